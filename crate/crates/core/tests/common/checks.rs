//! Property checks shared by the property suite and the acceptance runner.
//! Each returns the first violation found.

use outrank_core::electre::{self, Evaluator, ParameterVector};
use outrank_core::model::{Alternative, Direction};
use outrank_core::ranking::Relation;
use outrank_core::smaa::{evaluate_nodes, run_smaa, sample_parameters, SamplingConfig};
use outrank_core::srf::{srf2_weights, srf_weights_from_z, z_of_e0};
use outrank_core::{LoadedProblem, Problem, ProblemDocument};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{random_document, random_problem, GenOptions};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn params(loaded: &LoadedProblem, index: u64, seed: u64) -> Result<ParameterVector, String> {
    sample_parameters(&loaded.problem, &loaded.elicitation, index, seed).map_err(|e| e.to_string())
}

/// P(a,b) + P(b,a) + I + R = 100 for every pair, I and R symmetric, census
/// frequencies summing to 100. 20 samples keep every percentage exact.
pub fn pair_partition(seed: u64) -> Check {
    let loaded = random_problem(seed, GenOptions::default());
    let report = run_smaa(&loaded.problem, &loaded.elicitation, &SamplingConfig::new(20, seed))
        .map_err(|e| format!("instance {seed}: {e}"))?;
    let n = report.alternatives.len();
    for node in &report.nodes {
        for a in 0..n {
            ensure!(node.preference[a][a] == 0.0, "instance {seed}: {} has a P a", node.node);
            for b in (0..n).filter(|&b| b != a) {
                let total = node.preference[a][b]
                    + node.preference[b][a]
                    + node.indifference[a][b]
                    + node.incomparability[a][b];
                ensure!(
                    (total - 100.0).abs() < 1e-9,
                    "instance {seed} node {} pair ({a},{b}) sums to {total}",
                    node.node
                );
                ensure!(
                    node.indifference[a][b] == node.indifference[b][a]
                        && node.incomparability[a][b] == node.incomparability[b][a],
                    "instance {seed} node {}: asymmetric I or R",
                    node.node
                );
            }
            let outranked = (0..n)
                .filter(|&b| b != a)
                .map(|b| node.preference[a][b] + node.indifference[a][b])
                .sum::<f64>()
                / 100.0;
            ensure!(
                (outranked - node.mean_outranked[a]).abs() < 1e-9,
                "instance {seed} node {}: mean outranked count of {a} is off",
                node.node
            );
        }
        let census: f64 = node.census.iter().map(|c| c.frequency).sum();
        ensure!((census - 100.0).abs() < 1e-9, "instance {seed}: census sums to {census}");
    }
    Ok(())
}

/// Same seed gives byte-identical reports whatever the worker count.
pub fn thread_independence(loaded: &LoadedProblem, config: &SamplingConfig, threads: &[usize]) -> Check {
    let run = |n: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?;
        let report = pool
            .install(|| run_smaa(&loaded.problem, &loaded.elicitation, config))
            .map_err(|e| e.to_string())?;
        serde_json::to_string(&report).map_err(|e| e.to_string())
    };
    let reference = run(1)?;
    for &n in threads {
        ensure!(run(n)? == reference, "report differs with {n} threads");
    }
    Ok(())
}

/// SRF with z = z(e₀) equals SRF-II with e₀, the ratio of the extreme
/// weights is z, and consecutive levels differ by e + 1 units.
pub fn srf_consistency(e0: u32, gaps: &[u32]) -> Check {
    let z = z_of_e0(e0, gaps);
    let via_z = srf_weights_from_z(gaps, z).map_err(|e| e.to_string())?;
    let direct = srf2_weights(e0, gaps);
    let (sz, sd): (f64, f64) = (via_z.iter().sum(), direct.iter().sum());
    for (x, y) in via_z.iter().zip(&direct) {
        ensure!((x / sz - y / sd).abs() < 1e-12, "e0 {e0} gaps {gaps:?}: {via_z:?} vs {direct:?}");
    }
    let ratio = direct[direct.len() - 1] / direct[0];
    ensure!((ratio - z).abs() < 1e-12, "e0 {e0} gaps {gaps:?}: ratio {ratio} but z {z}");
    for (w, e) in direct.windows(2).zip(gaps) {
        ensure!(
            (w[1] - w[0] - f64::from(e + 1)).abs() < 1e-12,
            "e0 {e0} gaps {gaps:?}: step is not e + 1"
        );
    }
    Ok(())
}

/// Random deck shape within the tested bounds: 2 to 6 levels, gaps up to 5,
/// e₀ up to 9.
pub fn random_deck_shape(rng: &mut ChaCha8Rng) -> (u32, Vec<u32>) {
    let levels = rng.gen_range(2..=6);
    let gaps = (1..levels).map(|_| rng.gen_range(0..=5)).collect();
    (rng.gen_range(0..=9), gaps)
}

/// Adds `dom`, at least as good as the first alternative everywhere.
fn with_dominating_copy(doc: &mut ProblemDocument, rng: &mut ChaCha8Rng) -> String {
    let base = doc.alternatives[0].id.clone();
    let directions: Vec<(String, Direction)> = doc
        .criteria
        .iter()
        .filter_map(|c| Some((c.id.clone(), c.direction?)))
        .collect();
    let mut row = doc.performances[&base].clone();
    for (id, dir) in directions {
        let delta = f64::from(rng.gen_range(0..=4u8));
        if let Some(v) = row.get_mut(&id) {
            *v = match dir {
                Direction::Gain => *v + delta,
                Direction::Cost => *v - delta,
            };
        }
    }
    doc.alternatives.push(Alternative {
        id: "dom".into(),
        label: String::new(),
    });
    doc.performances.insert("dom".into(), row);
    base
}

/// A dominating alternative outranks with certainty and is never strictly
/// preferred against, at any node, for any sampled vector.
pub fn dominance(seed: u64, samples: u64) -> Check {
    let opts = GenOptions {
        bands: false,
        dichotomous: false,
        ..GenOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = random_document(&mut rng, opts);
    let base = with_dominating_copy(&mut doc, &mut rng);
    let loaded = doc.load().map_err(|e| e.to_string())?;
    let p = &loaded.problem;
    let a = p.alternative_index("dom").map_err(|e| e.to_string())?;
    let b = p.alternative_index(&base).map_err(|e| e.to_string())?;
    let evaluator = Evaluator::new(p);
    for i in 0..samples {
        let pv = params(&loaded, i, seed)?;
        for &r in p.tree().aggregates() {
            let s = evaluator.credibility(r, a, b, &pv).map_err(|e| e.to_string())?;
            ensure!(s == 1.0, "instance {seed} sample {i}: σ(dom, {base}) = {s}");
        }
        for pre in evaluate_nodes(&evaluator, &pv).map_err(|e| e.to_string())? {
            ensure!(
                pre.relation(b, a) != Relation::Prefers,
                "instance {seed} sample {i}: {base} P dom"
            );
        }
    }
    Ok(())
}

/// φ and d never both positive, both in [0, 1], and σ ≤ C.
pub fn complementarity(seed: u64) -> Check {
    let loaded = random_problem(seed, GenOptions::default());
    let p = &loaded.problem;
    let n = p.alternative_count();
    let e = |err: outrank_core::Error| err.to_string();
    for &t in p.tree().elementary() {
        for a in 0..n {
            for b in 0..n {
                let phi = electre::partial_concordance(p, t, a, b).map_err(e)?;
                let d = electre::partial_discordance(p, t, a, b).map_err(e)?;
                ensure!(
                    (0.0..=1.0).contains(&phi) && (0.0..=1.0).contains(&d),
                    "instance {seed}: φ = {phi}, d = {d} out of range"
                );
                ensure!(phi == 0.0 || d == 0.0, "instance {seed}: φ = {phi} and d = {d}");
            }
        }
    }
    let pv = params(&loaded, 0, seed)?;
    for &r in p.tree().aggregates() {
        for a in 0..n {
            for b in 0..n {
                let c = electre::concordance(p, r, a, b, &pv).map_err(e)?;
                let s = electre::credibility(p, r, a, b, &pv).map_err(e)?;
                ensure!((0.0..=1.0).contains(&c), "instance {seed}: C = {c}");
                ensure!((0.0..=c + 1e-12).contains(&s), "instance {seed}: σ = {s} > C = {c}");
            }
        }
    }
    Ok(())
}

fn rescaled(doc: &ProblemDocument, id: &str, alpha: f64, beta: f64) -> Result<Problem, String> {
    let mut doc = doc.clone();
    let f = |x: f64| alpha * x + beta;
    for row in doc.performances.values_mut() {
        if let Some(v) = row.get_mut(id) {
            *v = f(*v);
        }
    }
    if let Some(bands) = doc.thresholds.get_mut(id) {
        for band in bands {
            band.q *= alpha;
            band.p *= alpha;
            band.v = band.v.map(|v| v * alpha);
            band.from = band.from.map(f);
            band.until = band.until.map(f);
        }
    }
    doc.load().map(|l| l.problem).map_err(|e| e.to_string())
}

/// σ is unchanged when one criterion's values, thresholds and band bounds are
/// mapped through x ↦ αx + β with α > 0.
pub fn affine_invariance(seed: u64) -> Check {
    let opts = GenOptions {
        dichotomous: false,
        ..GenOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doc = random_document(&mut rng, opts);
    let loaded = doc.clone().load().map_err(|e| e.to_string())?;
    let pv = params(&loaded, 0, seed)?;
    let tree = loaded.problem.tree();
    let target = tree.id(tree.elementary()[0]).to_string();
    for (alpha, beta) in [(3.7, 11.25), (0.01, -4.0), (1000.0, 0.5)] {
        let scaled = rescaled(&doc, &target, alpha, beta)?;
        for &r in tree.aggregates() {
            let m1 = electre::credibility_matrix(&loaded.problem, r, &pv).map_err(|e| e.to_string())?;
            let m2 = electre::credibility_matrix(&scaled, r, &pv).map_err(|e| e.to_string())?;
            for a in 0..m1.len() {
                for b in 0..m1.len() {
                    let (s1, s2) = (m1.get(a, b), m2.get(a, b));
                    ensure!(
                        (s1 - s2).abs() < 1e-9,
                        "instance {seed}, α {alpha} β {beta}: σ {s1} became {s2}"
                    );
                }
            }
        }
    }
    Ok(())
}
