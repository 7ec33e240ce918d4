//! Stochastic acceptability analysis over the parameter vectors compatible
//! with an elicitation.
//!
//! Sample `i` of a run draws from its own ChaCha stream (`master_seed`,
//! stream `i`), so a report depends only on the problem, the elicitation and
//! the [`SamplingConfig`], never on thread count or scheduling.

use std::collections::BTreeMap;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::electre::{Evaluator, NamedParameters, ParameterVector};
use crate::error::{Error, Result};
use crate::model::{InteractionKind, Problem};
use crate::ranking::{self, DistillationDirection, HasseDiagram, PartialPreorder, PreorderKey};
use crate::srf::Elicitation;

pub const DEFAULT_SAMPLE_COUNT: usize = 10_000;
pub const DEFAULT_RETRY_BUDGET: u32 = 10_000;

fn default_retry_budget() -> u32 {
    DEFAULT_RETRY_BUDGET
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub sample_count: usize,
    pub master_seed: u64,
    /// Coefficient redraws allowed per sample before the elicitation is
    /// declared incompatible.
    #[serde(default = "default_retry_budget")]
    pub retry_budget: u32,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            sample_count: DEFAULT_SAMPLE_COUNT,
            master_seed: 0,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

impl SamplingConfig {
    pub fn new(sample_count: usize, master_seed: u64) -> Self {
        Self {
            sample_count,
            master_seed,
            ..Self::default()
        }
    }
}

fn sample_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Draws parameter vector number `index` of the run seeded by `master_seed`.
pub fn sample_parameters(
    problem: &Problem,
    elicitation: &Elicitation,
    index: u64,
    master_seed: u64,
) -> Result<ParameterVector> {
    draw(problem, elicitation, index, master_seed, DEFAULT_RETRY_BUDGET).map(|(p, _)| p)
}

/// Returns the vector and the number of coefficient draws it took.
pub(crate) fn draw(
    problem: &Problem,
    elicitation: &Elicitation,
    index: u64,
    master_seed: u64,
    retry_budget: u32,
) -> Result<(ParameterVector, u32)> {
    let mut rng = sample_rng(master_seed, index);
    let tree = problem.tree();
    let choices: Vec<_> = elicitation.spaces().iter().map(|s| s.sample(&mut rng)).collect();
    let weights = elicitation.compose(tree, &choices)?;

    let pairs: Vec<(InteractionKind, f64, f64)> = problem
        .interactions()
        .iter()
        .map(|i| {
            let w1 = weights[tree.slot(i.first).expect("validated")];
            let w2 = weights[tree.slot(i.second).expect("validated")];
            (i.kind, w1, w2)
        })
        .collect();

    let mut params = ParameterVector {
        weights,
        coefficients: vec![0.0; pairs.len()],
    };
    for attempt in 1..=retry_budget.max(1) {
        for (c, &(kind, w1, w2)) in params.coefficients.iter_mut().zip(&pairs) {
            *c = match kind {
                // uniform on (0, w1 + w2]
                InteractionKind::Strengthening => (w1 + w2) * (1.0 - rng.gen::<f64>()),
                // uniform on (-min(w1, w2), 0)
                InteractionKind::Weakening => -w1.min(w2) * rng.sample::<f64, _>(Open01),
                // uniform on (0, w_beneficiary)
                InteractionKind::Antagonism => w1 * rng.sample::<f64, _>(Open01),
            };
        }
        if (0..params.weights.len()).all(|s| params.net_balance(problem, s) > 0.0) {
            return Ok((params, attempt));
        }
    }
    Err(Error::Incompatible(format!(
        "no interaction coefficients satisfying the net-balance condition after {retry_budget} draws (sample {index})"
    )))
}

/// Running componentwise sum of parameter vectors.
#[derive(Debug, Clone)]
struct ParameterSum {
    weights: Vec<f64>,
    coefficients: Vec<f64>,
    count: usize,
}

impl ParameterSum {
    fn new(like: &ParameterVector) -> Self {
        Self {
            weights: vec![0.0; like.weights.len()],
            coefficients: vec![0.0; like.coefficients.len()],
            count: 0,
        }
    }

    fn add(&mut self, p: &ParameterVector) -> Result<()> {
        if p.weights.len() != self.weights.len() || p.coefficients.len() != self.coefficients.len() {
            return Err(Error::InvalidArgument(
                "parameter vectors have inconsistent shapes".into(),
            ));
        }
        for (s, v) in self.weights.iter_mut().zip(&p.weights) {
            *s += v;
        }
        for (s, v) in self.coefficients.iter_mut().zip(&p.coefficients) {
            *s += v;
        }
        self.count += 1;
        Ok(())
    }

    fn mean(&self) -> ParameterVector {
        let n = self.count as f64;
        ParameterVector {
            weights: self.weights.iter().map(|s| s / n).collect(),
            coefficients: self.coefficients.iter().map(|s| s / n).collect(),
        }
    }
}

/// Componentwise mean of parameter vectors.
pub fn barycenter(vectors: &[ParameterVector]) -> Result<ParameterVector> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidArgument("barycenter of an empty set".into()))?;
    let mut sum = ParameterSum::new(first);
    for v in vectors {
        sum.add(v)?;
    }
    Ok(sum.mean())
}

/// Census bucket key of a partial preorder.
pub fn canonical_key(p: &PartialPreorder) -> PreorderKey {
    p.key()
}

/// One distinct partial preorder observed at a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub key: PreorderKey,
    pub count: usize,
    /// Percentage of samples, two decimals.
    pub frequency: f64,
    pub relations: Vec<String>,
    pub hasse: HasseDiagram,
    pub barycenter: NamedParameters,
}

/// Robustness statistics for one non-elementary criterion.
///
/// Matrices are indexed `[a][b]` in the report's alternative order and hold
/// percentages with two decimals: `preference[a][b]` is the share of samples
/// with `a P b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub node: String,
    pub census: Vec<CensusEntry>,
    pub preference: Vec<Vec<f64>>,
    pub indifference: Vec<Vec<f64>>,
    pub incomparability: Vec<Vec<f64>>,
    /// Mean number of alternatives each alternative is at least as good as.
    pub mean_outranked: Vec<f64>,
    /// Mean number of alternatives at least as good as each alternative.
    pub mean_outranking: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmaaReport {
    pub sample_count: usize,
    pub master_seed: u64,
    pub alternatives: Vec<String>,
    /// Barycenter of every sampled vector.
    pub mean_parameters: NamedParameters,
    /// Root first, then the other non-elementary criteria depth-first.
    pub nodes: Vec<NodeReport>,
}

impl SmaaReport {
    pub fn node(&self, id: &str) -> Option<&NodeReport> {
        self.nodes.iter().find(|n| n.node == id)
    }

    pub fn alternative_index(&self, id: &str) -> Option<usize> {
        self.alternatives.iter().position(|a| a == id)
    }
}

/// Percentage with two decimals, rounded half-up, computed in integers.
pub fn percent(count: u64, total: u64) -> f64 {
    let hundredths = (count * 20_000 + total) / (2 * total);
    hundredths as f64 / 100.0
}

struct NodeTally {
    n: usize,
    pref: Vec<u64>,
    indiff: Vec<u64>,
    incomp: Vec<u64>,
    outranked: Vec<u64>,
    outranking: Vec<u64>,
    census: BTreeMap<PreorderKey, (PartialPreorder, ParameterSum)>,
}

impl NodeTally {
    fn new(n: usize) -> Self {
        Self {
            n,
            pref: vec![0; n * n],
            indiff: vec![0; n * n],
            incomp: vec![0; n * n],
            outranked: vec![0; n],
            outranking: vec![0; n],
            census: BTreeMap::new(),
        }
    }

    fn add(&mut self, p: &PartialPreorder, params: &ParameterVector) -> Result<()> {
        use ranking::Relation::*;
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                match p.relation(a, b) {
                    Prefers => self.pref[a * n + b] += 1,
                    Indifferent => self.indiff[a * n + b] += 1,
                    Incomparable => self.incomp[a * n + b] += 1,
                    PreferredBy => {}
                }
            }
        }
        for (a, (out, inc)) in ranking::relation_counts(p).into_iter().enumerate() {
            self.outranked[a] += out as u64;
            self.outranking[a] += inc as u64;
        }
        let entry = self
            .census
            .entry(p.key())
            .or_insert_with(|| (p.clone(), ParameterSum::new(params)));
        entry.1.add(params)
    }

    fn finish(self, problem: &Problem, node: String, total: usize) -> NodeReport {
        let n = self.n;
        let t = total as u64;
        let matrix = |counts: &[u64]| -> Vec<Vec<f64>> {
            (0..n)
                .map(|a| (0..n).map(|b| percent(counts[a * n + b], t)).collect())
                .collect()
        };
        let names = problem.alternative_ids();
        let mut census: Vec<CensusEntry> = self
            .census
            .into_iter()
            .map(|(key, (pre, sum))| CensusEntry {
                key,
                count: sum.count,
                frequency: percent(sum.count as u64, t),
                relations: pre.describe(&names),
                hasse: pre.hasse(),
                barycenter: sum.mean().named(problem),
            })
            .collect();
        // BTreeMap iteration already orders ties by key; the sort is stable
        census.sort_by_key(|c| std::cmp::Reverse(c.count));
        NodeReport {
            node,
            census,
            preference: matrix(&self.pref),
            indifference: matrix(&self.indiff),
            incomparability: matrix(&self.incomp),
            mean_outranked: self.outranked.iter().map(|&c| c as f64 / total as f64).collect(),
            mean_outranking: self.outranking.iter().map(|&c| c as f64 / total as f64).collect(),
        }
    }
}

/// Partial preorder of every non-elementary node for one parameter vector,
/// ordered like [`crate::model::CriterionTree::aggregates`].
pub fn evaluate_nodes(evaluator: &Evaluator<'_>, params: &ParameterVector) -> Result<Vec<PartialPreorder>> {
    let tree = evaluator.problem().tree();
    tree.aggregates()
        .iter()
        .map(|&r| {
            let m = evaluator.credibility_matrix(r, params)?;
            let desc = ranking::distill(&m, DistillationDirection::Descending)?;
            let asc = ranking::distill(&m, DistillationDirection::Ascending)?;
            ranking::intersect(&desc, &asc)
        })
        .collect()
}

pub fn run_smaa(problem: &Problem, elicitation: &Elicitation, config: &SamplingConfig) -> Result<SmaaReport> {
    if config.sample_count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let evaluator = Evaluator::new(problem);
    let outcomes: Vec<(ParameterVector, Vec<PartialPreorder>)> = (0..config.sample_count as u64)
        .into_par_iter()
        .map(|i| {
            let (params, _) = draw(problem, elicitation, i, config.master_seed, config.retry_budget)?;
            let preorders = evaluate_nodes(&evaluator, &params)?;
            Ok((params, preorders))
        })
        .collect::<Result<_>>()?;

    let tree = problem.tree();
    let n = problem.alternative_count();
    let mut tallies: Vec<NodeTally> = tree.aggregates().iter().map(|_| NodeTally::new(n)).collect();
    let mut pooled = ParameterSum::new(&outcomes[0].0);
    for (params, preorders) in &outcomes {
        pooled.add(params)?;
        for (tally, p) in tallies.iter_mut().zip(preorders) {
            tally.add(p, params)?;
        }
    }

    let nodes = tallies
        .into_iter()
        .zip(tree.aggregates())
        .map(|(t, &r)| t.finish(problem, tree.id(r).to_string(), config.sample_count))
        .collect();
    Ok(SmaaReport {
        sample_count: config.sample_count,
        master_seed: config.master_seed,
        alternatives: problem.alternative_ids(),
        mean_parameters: pooled.mean().named(problem),
        nodes,
    })
}
