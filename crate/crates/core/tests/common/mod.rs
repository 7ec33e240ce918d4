//! Random problem documents for property tests.
#![allow(dead_code)]

pub mod checks;

use std::collections::{BTreeMap, BTreeSet};

use outrank_core::document::{ProblemDocument, SCHEMA_VERSION};
use outrank_core::model::{
    Alternative, CriterionNode, Direction, InteractionDeclaration, InteractionKind, Scale,
    ThresholdBand,
};
use outrank_core::srf::{CardDeck, CardInterval};
use outrank_core::LoadedProblem;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    pub max_alternatives: usize,
    /// Allow value-dependent threshold bands.
    pub bands: bool,
    pub dichotomous: bool,
    pub interactions: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            max_alternatives: 6,
            bands: true,
            dichotomous: true,
            interactions: true,
        }
    }
}

fn node(id: &str, parent: Option<&str>) -> CriterionNode {
    CriterionNode {
        id: id.into(),
        label: String::new(),
        parent: parent.map(Into::into),
        direction: None,
        scale: None,
        unit: None,
        range: None,
    }
}

fn interval(rng: &mut ChaCha8Rng, max_lo: u32) -> CardInterval {
    let lo = rng.gen_range(0..=max_lo);
    CardInterval::new(lo, lo + rng.gen_range(0..=2))
}

fn deck(rng: &mut ChaCha8Rng, node: &str, children: &[String]) -> CardDeck {
    let mut shuffled = children.to_vec();
    shuffled.shuffle(rng);
    let mut levels: Vec<Vec<String>> = Vec::new();
    for c in shuffled {
        match levels.last_mut() {
            Some(last) if rng.gen_bool(0.3) => last.push(c),
            _ => levels.push(vec![c]),
        }
    }
    let gaps = (1..levels.len()).map(|_| interval(rng, 3)).collect();
    let zero_gap = (levels.len() > 1 || rng.gen_bool(0.5)).then(|| interval(rng, 3));
    CardDeck {
        node: node.into(),
        levels,
        gaps,
        zero_gap,
        z_range: None,
    }
}

fn band(rng: &mut ChaCha8Rng) -> ThresholdBand {
    let q = f64::from(rng.gen_range(0..=3u8));
    let p = q + f64::from(rng.gen_range(1..=4u8));
    let v = rng.gen_bool(0.6).then(|| p + f64::from(rng.gen_range(1..=10u8)));
    ThresholdBand { from: None, until: None, q, p, v }
}

/// A valid document: a flat or two-level tree, integer performances with
/// frequent ties, and decks on every non-elementary node.
pub fn random_document(rng: &mut ChaCha8Rng, opts: GenOptions) -> ProblemDocument {
    let mut criteria = vec![node("r", None)];
    let mut groups: Vec<(String, Vec<String>)> = Vec::new();
    let mut leaf = 0;
    let mut leaves = |n: usize| -> Vec<String> {
        (0..n)
            .map(|_| {
                leaf += 1;
                format!("g{leaf}")
            })
            .collect()
    };
    if rng.gen_bool(0.4) {
        groups.push(("r".into(), leaves(rng.gen_range(1..=4))));
    } else {
        let macros: Vec<String> = (0..rng.gen_range(2..=3)).map(|i| format!("m{i}")).collect();
        for m in &macros {
            criteria.push(node(m, Some("r")));
            groups.push((m.clone(), leaves(rng.gen_range(1..=3))));
        }
        groups.insert(0, ("r".into(), Vec::new()));
        groups[0].1 = macros;
    }

    let n_alt = rng.gen_range(2..=opts.max_alternatives.max(2));
    let alternatives: Vec<Alternative> = (0..n_alt)
        .map(|i| Alternative {
            id: format!("a{i}"),
            label: String::new(),
        })
        .collect();
    let mut performances: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut thresholds = BTreeMap::new();
    let mut elementary = Vec::new();

    for (parent, children) in &groups {
        for c in children {
            if c.starts_with('m') {
                continue;
            }
            elementary.push(c.clone());
            let dichotomous = opts.dichotomous && rng.gen_bool(0.15);
            let mut n = node(c, Some(parent));
            n.direction = Some(if rng.gen_bool(0.5) { Direction::Gain } else { Direction::Cost });
            n.scale = Some(if dichotomous { Scale::Dichotomous } else { Scale::Cardinal });
            criteria.push(n);
            for a in &alternatives {
                let v = if dichotomous {
                    f64::from(rng.gen_range(0..=1u8))
                } else {
                    f64::from(rng.gen_range(0..=20u8))
                };
                performances.entry(a.id.clone()).or_default().insert(c.clone(), v);
            }
            if !dichotomous {
                let bands = if opts.bands && rng.gen_bool(0.3) {
                    let mut low = band(rng);
                    let mut high = band(rng);
                    low.until = Some(10.0);
                    high.from = Some(10.0);
                    vec![low, high]
                } else {
                    vec![band(rng)]
                };
                thresholds.insert(c.clone(), bands);
            }
        }
    }

    let mut interactions = Vec::new();
    if opts.interactions && elementary.len() >= 2 {
        let mut unordered = BTreeSet::new();
        let mut ordered = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=3) {
            let pick: Vec<&String> = elementary.choose_multiple(rng, 2).collect();
            let (x, y) = (pick[0].clone(), pick[1].clone());
            let kind = match rng.gen_range(0..3) {
                0 => InteractionKind::Strengthening,
                1 => InteractionKind::Weakening,
                _ => InteractionKind::Antagonism,
            };
            let fresh = match kind {
                InteractionKind::Antagonism => ordered.insert((x.clone(), y.clone())),
                _ => {
                    let key = if x < y { (x.clone(), y.clone()) } else { (y.clone(), x.clone()) };
                    unordered.insert(key)
                }
            };
            if fresh {
                interactions.push(InteractionDeclaration {
                    kind,
                    first: x,
                    second: y,
                    note: None,
                });
            }
        }
    }

    let decks = groups.iter().map(|(n, children)| deck(rng, n, children)).collect();
    ProblemDocument {
        schema_version: SCHEMA_VERSION,
        name: String::new(),
        criteria,
        alternatives,
        performances,
        thresholds,
        interactions,
        decks,
    }
}

pub fn random_problem(seed: u64, opts: GenOptions) -> LoadedProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_document(&mut rng, opts)
        .load()
        .expect("generated documents are valid")
}
