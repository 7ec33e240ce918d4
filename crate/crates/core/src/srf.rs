//! Card-deck weight elicitation.
//!
//! A deck ranks the children of one non-elementary criterion into importance
//! levels (least important first) with blank cards between consecutive levels.
//! The scale is anchored either by the number of blank cards `e₀` between a
//! zero-importance level and the least important level, or by the legacy
//! top/bottom ratio `z`. Blank-card counts may be given as integer intervals,
//! which turns a deck into a finite set of admissible local weight vectors.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Issue, Result};
use crate::model::{CriterionTree, NodeIdx};

/// Inclusive integer interval of blank cards. Serialized as a bare number when
/// exact, as `[lo, hi]` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CardInterval {
    pub lo: u32,
    pub hi: u32,
}

impl CardInterval {
    pub fn exact(n: u32) -> Self {
        Self { lo: n, hi: n }
    }

    pub fn new(lo: u32, hi: u32) -> Self {
        Self { lo, hi }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }
}

impl Serialize for CardInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_exact() {
            self.lo.serialize(s)
        } else {
            [self.lo, self.hi].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for CardInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Exact(u32),
            Range([u32; 2]),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Exact(n) => CardInterval::exact(n),
            Repr::Range([lo, hi]) => CardInterval { lo, hi },
        })
    }
}

/// Closed real interval `[lo, hi]` for the legacy ratio `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioInterval(pub f64, pub f64);

/// Card deck for the children of one non-elementary criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardDeck {
    pub node: String,
    /// Importance levels, least important first.
    pub levels: Vec<Vec<String>>,
    /// Blank cards between level `i` and level `i + 1`.
    #[serde(default)]
    pub gaps: Vec<CardInterval>,
    /// Blank cards between the zero level and the least important level (e₀).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_gap: Option<CardInterval>,
    /// Legacy ratio between the most and the least important weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_range: Option<RatioInterval>,
}

/// Non-normalized SRF weights per level from an exact ratio `z`:
/// `w_s = 1 + (z − 1)·Σ_{r<s}(e_r + 1) / Σ_{r<q}(e_r + 1)`.
pub fn srf_weights_from_z(gaps: &[u32], z: f64) -> Result<Vec<f64>> {
    if gaps.is_empty() {
        return Err(Error::InvalidArgument("the ratio z needs at least two levels".into()));
    }
    if !(z > 1.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z = {z} must exceed 1")));
    }
    let total: f64 = gaps.iter().map(|&e| f64::from(e) + 1.0).sum();
    let mut out = Vec::with_capacity(gaps.len() + 1);
    let mut cum = 0.0;
    out.push(1.0);
    for &e in gaps {
        cum += f64::from(e) + 1.0;
        out.push(cum * (z - 1.0) / total + 1.0);
    }
    Ok(out)
}

/// Non-normalized SRF-II weights per level: `w_s = Σ_{r=0}^{s−1}(e_r + 1)`.
pub fn srf2_weights(e0: u32, gaps: &[u32]) -> Vec<f64> {
    let mut out = Vec::with_capacity(gaps.len() + 1);
    let mut w = f64::from(e0) + 1.0;
    out.push(w);
    for &e in gaps {
        w += f64::from(e) + 1.0;
        out.push(w);
    }
    out
}

/// Ratio between top and bottom SRF-II weights:
/// `z = (Σ_{r≥1}(e_r + 1) + e₀ + 1) / (e₀ + 1)`.
pub fn z_of_e0(e0: u32, gaps: &[u32]) -> f64 {
    let span: f64 = gaps.iter().map(|&e| f64::from(e) + 1.0).sum();
    (span + f64::from(e0) + 1.0) / (f64::from(e0) + 1.0)
}

/// Inverse of [`z_of_e0`]; generally not an integer.
pub fn e0_of_z(z: f64, gaps: &[u32]) -> Result<f64> {
    if !(z > 1.0) {
        return Err(Error::InvalidArgument(format!("z = {z} must exceed 1")));
    }
    let span: f64 = gaps.iter().map(|&e| f64::from(e) + 1.0).sum();
    Ok((span - (z - 1.0)) / (z - 1.0))
}

/// Weights attached to the children of one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: BTreeMap<String, f64>,
    pub normalized: bool,
}

/// How the deck's scale is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor {
    ZeroGap(CardInterval),
    Ratio(RatioInterval),
    /// Single-level deck without an anchor.
    None,
}

/// One admissible reading of a deck.
#[derive(Debug, Clone, PartialEq)]
pub struct DeckChoice {
    pub gaps: Vec<u32>,
    pub anchor: AnchorChoice,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorChoice {
    ZeroGap(u32),
    Ratio(f64),
    None,
}

/// A deck checked against the hierarchy.
#[derive(Debug, Clone)]
pub struct LocalWeightSpace {
    pub node: NodeIdx,
    levels: Vec<Vec<NodeIdx>>,
    child_ids: Vec<Vec<String>>,
    gaps: Vec<CardInterval>,
    anchor: Anchor,
}

impl LocalWeightSpace {
    pub fn levels(&self) -> &[Vec<NodeIdx>] {
        &self.levels
    }

    /// Number of distinct integer choices, or `None` for a continuous ratio.
    pub fn choice_count(&self) -> Option<usize> {
        let base: usize = self.gaps.iter().map(CardInterval::width).product();
        match self.anchor {
            Anchor::ZeroGap(i) => Some(base * i.width()),
            Anchor::Ratio(RatioInterval(lo, hi)) if lo == hi => Some(base),
            Anchor::Ratio(_) => None,
            Anchor::None => Some(base),
        }
    }

    /// Every integer choice, in lexicographic order (e₀ first, then gaps).
    /// `None` when the ratio ranges over a continuum.
    pub fn choices(&self) -> Option<Vec<DeckChoice>> {
        self.choice_count()?;
        Some(self.choices_with_ratio_ends())
    }

    /// Like [`Self::choices`], but a continuous ratio contributes both ends.
    fn choices_with_ratio_ends(&self) -> Vec<DeckChoice> {
        let mut anchors = Vec::new();
        match self.anchor {
            Anchor::ZeroGap(i) => anchors.extend((i.lo..=i.hi).map(AnchorChoice::ZeroGap)),
            Anchor::Ratio(RatioInterval(lo, hi)) => {
                anchors.push(AnchorChoice::Ratio(lo));
                if hi > lo {
                    anchors.push(AnchorChoice::Ratio(hi));
                }
            }
            Anchor::None => anchors.push(AnchorChoice::None),
        }
        let mut gap_sets: Vec<Vec<u32>> = vec![Vec::new()];
        for g in &self.gaps {
            gap_sets = gap_sets
                .into_iter()
                .flat_map(|prefix| {
                    (g.lo..=g.hi).map(move |e| {
                        let mut v = prefix.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        anchors
            .iter()
            .flat_map(|&anchor| {
                gap_sets.iter().map(move |gaps| DeckChoice {
                    gaps: gaps.clone(),
                    anchor,
                })
            })
            .collect()
    }

    /// Smallest and largest normalized weight each child can take.
    ///
    /// For fixed gaps every normalized weight is monotone in the ratio, so the
    /// ends of a continuous ratio interval are enough.
    pub fn bounds(&self) -> Result<BTreeMap<String, (f64, f64)>> {
        let mut out: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for choice in self.choices_with_ratio_ends() {
            for (id, w) in self.weight_vector(&choice)?.weights {
                let e = out.entry(id).or_insert((w, w));
                e.0 = e.0.min(w);
                e.1 = e.1.max(w);
            }
        }
        Ok(out)
    }

    pub fn child_ids(&self) -> impl Iterator<Item = &str> {
        self.child_ids.iter().flatten().map(String::as_str)
    }

    /// Draws each interval independently and uniformly; a ratio interval is
    /// drawn uniformly on the continuum.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DeckChoice {
        let anchor = match self.anchor {
            Anchor::ZeroGap(i) => AnchorChoice::ZeroGap(rng.gen_range(i.lo..=i.hi)),
            Anchor::Ratio(RatioInterval(lo, hi)) if lo == hi => AnchorChoice::Ratio(lo),
            Anchor::Ratio(RatioInterval(lo, hi)) => AnchorChoice::Ratio(rng.gen_range(lo..=hi)),
            Anchor::None => AnchorChoice::None,
        };
        let gaps = self.gaps.iter().map(|g| rng.gen_range(g.lo..=g.hi)).collect();
        DeckChoice { gaps, anchor }
    }

    /// Non-normalized weight of each level for `choice`.
    pub fn level_weights(&self, choice: &DeckChoice) -> Result<Vec<f64>> {
        if choice.gaps.len() + 1 != self.levels.len() {
            return Err(Error::InvalidArgument("choice does not match the deck".into()));
        }
        match choice.anchor {
            AnchorChoice::ZeroGap(e0) => Ok(srf2_weights(e0, &choice.gaps)),
            AnchorChoice::Ratio(z) => srf_weights_from_z(&choice.gaps, z),
            AnchorChoice::None if self.levels.len() == 1 => Ok(vec![1.0]),
            AnchorChoice::None => Err(Error::InvalidArgument("deck has no anchor".into())),
        }
    }

    /// Normalized weight of every child for `choice`, in level order.
    pub fn local_weights(&self, choice: &DeckChoice) -> Result<Vec<(NodeIdx, f64)>> {
        let per_level = self.level_weights(choice)?;
        let total: f64 = self
            .levels
            .iter()
            .zip(&per_level)
            .map(|(lvl, w)| w * lvl.len() as f64)
            .sum();
        Ok(self
            .levels
            .iter()
            .zip(&per_level)
            .flat_map(|(lvl, &w)| lvl.iter().map(move |&c| (c, w / total)))
            .collect())
    }

    pub fn weight_vector(&self, choice: &DeckChoice) -> Result<WeightVector> {
        let ids = self.child_ids.iter().flatten();
        let weights = self.local_weights(choice)?;
        Ok(WeightVector {
            weights: ids.zip(weights).map(|(id, (_, w))| (id.clone(), w)).collect(),
            normalized: true,
        })
    }

    /// Distinct normalized weight vectors over every integer choice.
    pub fn enumerate(&self) -> Option<Vec<WeightVector>> {
        let mut out: Vec<WeightVector> = Vec::new();
        for choice in self.choices()? {
            let wv = self.weight_vector(&choice).ok()?;
            let dup = out.iter().any(|o| {
                o.weights
                    .values()
                    .zip(wv.weights.values())
                    .all(|(a, b)| (a - b).abs() < 1e-12)
            });
            if !dup {
                out.push(wv);
            }
        }
        Some(out)
    }
}

/// Checks one deck against the hierarchy.
pub fn local_weight_space(tree: &CriterionTree, deck: &CardDeck) -> Result<LocalWeightSpace> {
    let mut issues = Vec::new();
    let space = resolve_deck(tree, deck, &format!("decks.{}", deck.node), &mut issues);
    match space {
        Some(s) if issues.is_empty() => Ok(s),
        _ => Err(Error::invalid(issues)),
    }
}

fn resolve_deck(
    tree: &CriterionTree,
    deck: &CardDeck,
    path: &str,
    issues: &mut Vec<Issue>,
) -> Option<LocalWeightSpace> {
    let before = issues.len();
    let Some(node) = tree.find(&deck.node) else {
        issues.push(Issue::new(path, format!("unknown identifier `{}`", deck.node)));
        return None;
    };
    if tree.is_elementary(node) {
        issues.push(Issue::new(
            path,
            format!("`{}` is elementary and takes no deck", deck.node),
        ));
        return None;
    }
    if deck.levels.is_empty() {
        issues.push(Issue::new(path, "deck has no levels"));
        return None;
    }

    let children = tree.children(node);
    let mut placed = vec![false; children.len()];
    let mut levels = Vec::with_capacity(deck.levels.len());
    for (li, level) in deck.levels.iter().enumerate() {
        if level.is_empty() {
            issues.push(Issue::new(format!("{path}.levels[{li}]"), "empty level"));
        }
        let mut resolved = Vec::with_capacity(level.len());
        for id in level {
            let lp = format!("{path}.levels[{li}]");
            match tree.find(id) {
                None => issues.push(Issue::new(lp, format!("unknown identifier `{id}`"))),
                Some(c) => match children.iter().position(|&k| k == c) {
                    None => issues.push(Issue::new(
                        lp,
                        format!("`{id}` is not a child of `{}`", deck.node),
                    )),
                    Some(pos) if placed[pos] => {
                        issues.push(Issue::new(lp, format!("`{id}` placed twice")))
                    }
                    Some(pos) => {
                        placed[pos] = true;
                        resolved.push(c);
                    }
                },
            }
        }
        levels.push(resolved);
    }
    for (pos, &c) in children.iter().enumerate() {
        if !placed[pos] {
            issues.push(Issue::new(
                format!("{path}.levels"),
                format!("`{}` is missing from the deck", tree.id(c)),
            ));
        }
    }

    if deck.gaps.len() + 1 != deck.levels.len() {
        issues.push(Issue::new(
            format!("{path}.gaps"),
            format!(
                "{} levels need {} gaps, found {}",
                deck.levels.len(),
                deck.levels.len() - 1,
                deck.gaps.len()
            ),
        ));
    }
    for (i, g) in deck.gaps.iter().enumerate() {
        if g.lo > g.hi {
            issues.push(Issue::new(format!("{path}.gaps[{i}]"), "empty interval"));
        }
    }

    let anchor = match (deck.zero_gap, deck.z_range) {
        (Some(_), Some(_)) => {
            issues.push(Issue::new(path, "zero_gap and z_range are mutually exclusive"));
            Anchor::None
        }
        (Some(i), None) => {
            if i.lo > i.hi {
                issues.push(Issue::new(format!("{path}.zero_gap"), "empty interval"));
            }
            Anchor::ZeroGap(i)
        }
        (None, Some(r)) => {
            if !(r.0 > 1.0 && r.0 <= r.1 && r.1.is_finite()) {
                issues.push(Issue::new(
                    format!("{path}.z_range"),
                    "z_range must satisfy 1 < lo ≤ hi",
                ));
            }
            if deck.levels.len() < 2 {
                issues.push(Issue::new(
                    format!("{path}.z_range"),
                    "a single-level deck cannot take a ratio",
                ));
            }
            Anchor::Ratio(r)
        }
        (None, None) => {
            if deck.levels.len() >= 2 {
                issues.push(Issue::new(path, "deck needs either zero_gap or z_range"));
            }
            Anchor::None
        }
    };

    (issues.len() == before).then(|| LocalWeightSpace {
        node,
        levels,
        child_ids: deck.levels.clone(),
        gaps: deck.gaps.clone(),
        anchor,
    })
}

/// Global elementary weights (by slot) as products of normalized local weights
/// along each root-to-leaf path.
pub fn elementary_weights(
    tree: &CriterionTree,
    local: &HashMap<NodeIdx, Vec<(NodeIdx, f64)>>,
) -> Result<Vec<f64>> {
    let mut global = vec![f64::NAN; tree.len()];
    global[tree.root().0] = 1.0;
    for &r in tree.aggregates() {
        let Some(weights) = local.get(&r) else {
            return Err(Error::InvalidArgument(format!("missing deck for `{}`", tree.id(r))));
        };
        let parent_weight = global[r.0];
        for &(child, w) in weights {
            global[child.0] = parent_weight * w;
        }
    }
    let out: Vec<f64> = tree.elementary().iter().map(|&t| global[t.0]).collect();
    if out.iter().any(|w| w.is_nan()) {
        return Err(Error::InvalidArgument("local weights do not cover the hierarchy".into()));
    }
    Ok(out)
}

/// Card decks for every non-elementary criterion of a hierarchy.
#[derive(Debug, Clone)]
pub struct Elicitation {
    decks: Vec<CardDeck>,
    /// Ordered like [`CriterionTree::aggregates`].
    spaces: Vec<LocalWeightSpace>,
}

impl Elicitation {
    pub fn new(tree: &CriterionTree, decks: &[CardDeck]) -> Result<Self> {
        let mut issues = Vec::new();
        let mut by_node: HashMap<NodeIdx, LocalWeightSpace> = HashMap::new();
        for (i, deck) in decks.iter().enumerate() {
            let path = format!("decks[{i}]");
            if let Some(space) = resolve_deck(tree, deck, &path, &mut issues) {
                if by_node.insert(space.node, space).is_some() {
                    issues.push(Issue::new(path, format!("second deck for `{}`", deck.node)));
                }
            }
        }
        let mut spaces = Vec::with_capacity(tree.aggregates().len());
        for &r in tree.aggregates() {
            match by_node.remove(&r) {
                Some(s) => spaces.push(s),
                None => issues.push(Issue::new(
                    "decks",
                    format!("missing deck for `{}`", tree.id(r)),
                )),
            }
        }
        if !issues.is_empty() {
            return Err(Error::invalid(issues));
        }
        Ok(Self {
            decks: decks.to_vec(),
            spaces,
        })
    }

    pub fn decks(&self) -> &[CardDeck] {
        &self.decks
    }

    pub fn spaces(&self) -> &[LocalWeightSpace] {
        &self.spaces
    }

    pub fn space(&self, node: NodeIdx) -> Option<&LocalWeightSpace> {
        self.spaces.iter().find(|s| s.node == node)
    }

    /// Whether every deck is exact (a single admissible weight vector).
    pub fn is_exact(&self) -> bool {
        self.spaces.iter().all(|s| s.choice_count() == Some(1))
    }

    /// Global elementary weights for one choice per deck, ordered like
    /// [`Elicitation::spaces`].
    pub fn compose(&self, tree: &CriterionTree, choices: &[DeckChoice]) -> Result<Vec<f64>> {
        if choices.len() != self.spaces.len() {
            return Err(Error::InvalidArgument("one choice per deck expected".into()));
        }
        let mut local = HashMap::with_capacity(self.spaces.len());
        for (space, choice) in self.spaces.iter().zip(choices) {
            local.insert(space.node, space.local_weights(choice)?);
        }
        elementary_weights(tree, &local)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset;

    fn approx(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn srf_from_z() {
        assert!(approx(
            &srf_weights_from_z(&[0, 0, 0], 2.0).unwrap(),
            &[1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0]
        ));
        assert!(approx(&srf_weights_from_z(&[0, 0, 0], 4.0).unwrap(), &[1.0, 2.0, 3.0, 4.0]));
        assert!(approx(&srf_weights_from_z(&[0], 3.0).unwrap(), &[1.0, 3.0]));
        assert!(srf_weights_from_z(&[0], 1.0).is_err());
        assert!(srf_weights_from_z(&[], 2.0).is_err());
    }

    #[test]
    fn srf2() {
        assert_eq!(srf2_weights(2, &[0, 0, 0]), vec![3.0, 4.0, 5.0, 6.0]);
        assert_eq!(srf2_weights(5, &[0, 0, 0]), vec![6.0, 7.0, 8.0, 9.0]);
        assert_eq!(srf2_weights(7, &[]), vec![8.0]);
    }

    #[test]
    fn z_e0_relation() {
        assert_eq!(z_of_e0(2, &[0, 0, 0]), 2.0);
        assert_eq!(z_of_e0(5, &[0, 0, 0]), 1.5);
        assert_eq!(z_of_e0(0, &[0]), 2.0);
        assert_eq!(e0_of_z(1.5, &[0, 0, 0]).unwrap(), 5.0);
        assert!((e0_of_z(2.5, &[0, 0, 0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(e0_of_z(1.0, &[0]).is_err());
    }

    #[test]
    fn reuse_deck_weight_space() {
        let loaded = dataset::stock_exchange();
        let tree = loaded.problem.tree();
        let deck = loaded.document.decks.iter().find(|d| d.node == "GR").unwrap();
        let space = local_weight_space(tree, deck).unwrap();
        let mut got: Vec<(f64, f64)> = space
            .enumerate()
            .unwrap()
            .iter()
            .map(|wv| (wv.weights["gR1"], wv.weights["gR2"]))
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got.len(), 2);
        assert!((got[0].0 - 1.0 / 3.0).abs() < 1e-12 && (got[0].1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((got[1].0 - 0.4).abs() < 1e-12 && (got[1].1 - 0.6).abs() < 1e-12);

        let social = loaded.document.decks.iter().find(|d| d.node == "GS").unwrap();
        let single = local_weight_space(tree, social).unwrap().enumerate().unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].weights["gS1"], 1.0);
    }

    #[test]
    fn bounds_cover_ratio_ends() {
        let loaded = dataset::stock_exchange();
        let tree = loaded.problem.tree();
        let deck = CardDeck {
            node: "GR".into(),
            levels: vec![vec!["gR1".into()], vec!["gR2".into()]],
            gaps: vec![CardInterval::exact(0)],
            zero_gap: None,
            z_range: Some(RatioInterval(2.0, 4.0)),
        };
        let space = local_weight_space(tree, &deck).unwrap();
        assert!(space.enumerate().is_none());
        let b = space.bounds().unwrap();
        // z = 2 gives 1/3, z = 4 gives 1/5
        assert!((b["gR1"].0 - 0.2).abs() < 1e-12 && (b["gR1"].1 - 1.0 / 3.0).abs() < 1e-12);
        assert!((b["gR2"].0 - 2.0 / 3.0).abs() < 1e-12 && (b["gR2"].1 - 0.8).abs() < 1e-12);

        let reuse = loaded.document.decks.iter().find(|d| d.node == "GR").unwrap();
        let b = local_weight_space(tree, reuse).unwrap().bounds().unwrap();
        assert!((b["gR1"].0 - 1.0 / 3.0).abs() < 1e-12 && (b["gR1"].1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn exact_deck_is_singleton() {
        let loaded = dataset::stock_exchange();
        let tree = loaded.problem.tree();
        let mut deck = loaded.document.decks.iter().find(|d| d.node == "GT").unwrap().clone();
        deck.gaps = vec![CardInterval::exact(3)];
        let space = local_weight_space(tree, &deck).unwrap();
        assert_eq!(space.choice_count(), Some(1));
        assert_eq!(space.enumerate().unwrap().len(), 1);
    }

    #[test]
    fn deck_errors() {
        let loaded = dataset::stock_exchange();
        let tree = loaded.problem.tree();
        let mut deck = loaded.document.decks.iter().find(|d| d.node == "GR").unwrap().clone();
        deck.levels[0] = vec!["gE1".into()];
        let Error::Invalid(issues) = local_weight_space(tree, &deck).unwrap_err() else { panic!() };
        assert!(issues.mentions("not a child of `GR`"));
        assert!(issues.mentions("missing from the deck"));

        let mut deck = loaded.document.decks.iter().find(|d| d.node == "GR").unwrap().clone();
        deck.gaps = vec![CardInterval { lo: 2, hi: 1 }];
        assert!(local_weight_space(tree, &deck).is_err());

        let mut deck = loaded.document.decks.iter().find(|d| d.node == "GR").unwrap().clone();
        deck.z_range = Some(RatioInterval(2.0, 3.0));
        assert!(local_weight_space(tree, &deck).is_err());
        deck.zero_gap = None;
        let space = local_weight_space(tree, &deck).unwrap();
        assert_eq!(space.choice_count(), None);
        assert!(space.enumerate().is_none());
    }

    #[test]
    fn case_study_lower_bounds_composition() {
        let loaded = dataset::stock_exchange();
        let tree = loaded.problem.tree();
        let el = &loaded.elicitation;
        let lower: Vec<DeckChoice> = el
            .spaces()
            .iter()
            .map(|s| s.choices().unwrap().into_iter().next().unwrap())
            .collect();
        let w = el.compose(tree, &lower).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let s1 = tree.slot(tree.find("gS1").unwrap()).unwrap();
        assert!((w[s1] - 8.0 / 26.0).abs() < 1e-12);
    }

    #[test]
    fn flat_hierarchy_local_is_global() {
        let loaded = dataset::stock_exchange();
        let tree = loaded.problem.tree();
        let mut local = HashMap::new();
        assert!(elementary_weights(tree, &local).is_err());
        for &r in tree.aggregates() {
            let kids = tree.children(r);
            local.insert(r, kids.iter().map(|&c| (c, 1.0 / kids.len() as f64)).collect());
        }
        let w = elementary_weights(tree, &local).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interval_serde() {
        let v: Vec<CardInterval> = serde_json::from_str("[2, [0, 1]]").unwrap();
        assert_eq!(v, vec![CardInterval::exact(2), CardInterval::new(0, 1)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[2,[0,1]]");
        assert!(serde_json::from_str::<CardInterval>("-1").is_err());
    }
}
