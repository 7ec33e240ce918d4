//! Partial concordance and discordance, node-level concordance with interaction
//! terms, and credibility of outranking.
//!
//! Everything here is a pure function of a [`Problem`] and a [`ParameterVector`].
//! [`Evaluator`] caches the parameter-independent partial indices so that a
//! Monte Carlo run only recomputes the weighted aggregation per sample.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Direction, InteractionKind, NodeIdx, Problem};

/// Threshold comparisons treat differences within this relative tolerance as
/// equal, so that decimal inputs such as `5.1 - 5.0` against `q = 0.1` land on
/// the boundary the way they read on paper.
const THRESHOLD_EPS: f64 = 1e-9;

/// Normalized elementary weights plus interaction coefficients.
///
/// `weights` is indexed by elementary slot, `coefficients` follows the order of
/// [`Problem::interactions`]. Strengthening coefficients are positive,
/// weakening negative, antagonism positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub weights: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl ParameterVector {
    /// Plain weights with every interaction coefficient at zero. Such a vector
    /// evaluates fine but does not pass [`ParameterVector::check`] when the
    /// problem declares interactions.
    pub fn without_interactions(problem: &Problem, weights: Vec<f64>) -> Self {
        Self {
            weights,
            coefficients: vec![0.0; problem.interactions().len()],
        }
    }

    /// Net balance of criterion `slot`: its weight, plus its weakening
    /// coefficients, minus the antagonism coefficients it suffers.
    pub fn net_balance(&self, problem: &Problem, slot: usize) -> f64 {
        let tree = problem.tree();
        let mut balance = self.weights[slot];
        for (inter, &c) in problem.interactions().iter().zip(&self.coefficients) {
            let first = tree.slot(inter.first) == Some(slot);
            let second = tree.slot(inter.second) == Some(slot);
            match inter.kind {
                InteractionKind::Weakening if first || second => balance += c,
                InteractionKind::Antagonism if first => balance -= c,
                _ => {}
            }
        }
        balance
    }

    /// Checks the invariants listed on the type against `problem`.
    pub fn check(&self, problem: &Problem) -> Result<()> {
        let m = problem.tree().elementary().len();
        if self.weights.len() != m || self.coefficients.len() != problem.interactions().len() {
            return Err(Error::InvalidArgument(
                "parameter vector does not match the problem".into(),
            ));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("weights sum to {sum}, not 1")));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidArgument(format!("non-positive weight {w}")));
        }
        for (inter, &c) in problem.interactions().iter().zip(&self.coefficients) {
            let ok = match inter.kind {
                InteractionKind::Strengthening | InteractionKind::Antagonism => c > 0.0,
                InteractionKind::Weakening => c < 0.0,
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "{} coefficient {c} has the wrong sign",
                    inter.kind
                )));
            }
        }
        for slot in 0..m {
            if self.net_balance(problem, slot) <= 0.0 {
                let id = problem.tree().id(problem.tree().elementary()[slot]);
                return Err(Error::InvalidArgument(format!("net balance of `{id}` is not positive")));
            }
        }
        Ok(())
    }

    /// Id-keyed form used in reports.
    pub fn named(&self, problem: &Problem) -> NamedParameters {
        let tree = problem.tree();
        let weights = tree
            .elementary()
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| (tree.id(n).to_string(), w))
            .collect();
        let interactions = problem
            .interactions()
            .iter()
            .zip(&self.coefficients)
            .map(|(i, &value)| NamedCoefficient {
                kind: i.kind,
                first: tree.id(i.first).to_string(),
                second: tree.id(i.second).to_string(),
                value,
            })
            .collect();
        NamedParameters {
            weights,
            interactions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCoefficient {
    pub kind: InteractionKind,
    pub first: String,
    pub second: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedParameters {
    pub weights: BTreeMap<String, f64>,
    pub interactions: Vec<NamedCoefficient>,
}

/// σ_r over all ordered pairs of alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CredibilityMatrix {
    pub node: NodeIdx,
    n: usize,
    values: Vec<f64>,
}

impl CredibilityMatrix {
    /// Builds a matrix from row-major values; mainly for tests and tools.
    pub fn from_rows(node: NodeIdx, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("credibility matrix must be square".into()));
        }
        if rows.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("credibility outside [0, 1]".into()));
        }
        Ok(Self {
            node,
            n,
            values: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.n + b]
    }

    /// Matrix with rows and columns reordered so that new index `i` is old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self {
            node: self.node,
            n,
            values,
        }
    }
}

/// b's advantage over a on elementary criterion `t`, in the preference direction.
pub fn advantage(problem: &Problem, t: NodeIdx, a: usize, b: usize) -> Result<f64> {
    let slot = elementary_slot(problem, t)?;
    check_alt(problem, a)?;
    check_alt(problem, b)?;
    Ok(slot_advantage(problem, slot, a, b))
}

/// φ_t(a, b): how much `t` supports "a outranks b".
pub fn partial_concordance(problem: &Problem, t: NodeIdx, a: usize, b: usize) -> Result<f64> {
    let slot = elementary_slot(problem, t)?;
    check_alt(problem, a)?;
    check_alt(problem, b)?;
    Ok(slot_concordance(problem, slot, a, b))
}

/// d_t(a, b): how much `t` opposes "a outranks b".
pub fn partial_discordance(problem: &Problem, t: NodeIdx, a: usize, b: usize) -> Result<f64> {
    let slot = elementary_slot(problem, t)?;
    check_alt(problem, a)?;
    check_alt(problem, b)?;
    Ok(slot_discordance(problem, slot, a, b))
}

/// C_r(a, b) at non-elementary node `r`.
pub fn concordance(
    problem: &Problem,
    r: NodeIdx,
    a: usize,
    b: usize,
    params: &ParameterVector,
) -> Result<f64> {
    check_alt(problem, a)?;
    check_alt(problem, b)?;
    Evaluator::new(problem).concordance(r, a, b, params)
}

/// σ_r(a, b) at non-elementary node `r`.
pub fn credibility(
    problem: &Problem,
    r: NodeIdx,
    a: usize,
    b: usize,
    params: &ParameterVector,
) -> Result<f64> {
    check_alt(problem, a)?;
    check_alt(problem, b)?;
    Evaluator::new(problem).credibility(r, a, b, params)
}

pub fn credibility_matrix(
    problem: &Problem,
    r: NodeIdx,
    params: &ParameterVector,
) -> Result<CredibilityMatrix> {
    Evaluator::new(problem).credibility_matrix(r, params)
}

fn check_alt(problem: &Problem, a: usize) -> Result<()> {
    if a < problem.alternative_count() {
        Ok(())
    } else {
        Err(Error::UnknownId(format!("alternative #{a}")))
    }
}

fn elementary_slot(problem: &Problem, t: NodeIdx) -> Result<usize> {
    let tree = problem.tree();
    if t.0 >= tree.len() {
        return Err(Error::UnknownId(format!("criterion #{}", t.0)));
    }
    tree.slot(t)
        .ok_or_else(|| Error::InvalidArgument(format!("`{}` is not elementary", tree.id(t))))
}

fn slot_advantage(problem: &Problem, slot: usize, a: usize, b: usize) -> f64 {
    let diff = problem.value(b, slot) - problem.value(a, slot);
    match problem.tree().direction(problem.tree().elementary()[slot]) {
        Some(Direction::Cost) => -diff,
        _ => diff,
    }
}

fn eps(scale: f64) -> f64 {
    THRESHOLD_EPS * scale.abs().max(1.0)
}

fn slot_concordance(problem: &Problem, slot: usize, a: usize, b: usize) -> f64 {
    let adv = slot_advantage(problem, slot, a, b);
    let band = problem.band(slot, problem.value(a, slot));
    let tol = eps(band.p);
    if adv <= band.q + tol {
        1.0
    } else if adv >= band.p - tol {
        0.0
    } else {
        (band.p - adv) / (band.p - band.q)
    }
}

fn slot_discordance(problem: &Problem, slot: usize, a: usize, b: usize) -> f64 {
    let adv = slot_advantage(problem, slot, a, b);
    let band = problem.band(slot, problem.value(a, slot));
    let Some(v) = band.v else { return 0.0 };
    let tol = eps(v);
    if adv <= band.p + eps(band.p) {
        0.0
    } else if adv >= v - tol {
        1.0
    } else {
        (adv - band.p) / (v - band.p)
    }
}

#[derive(Debug, Clone)]
struct Scope {
    slots: Vec<usize>,
    /// (coefficient index, kind, first slot, second slot) for interactions
    /// whose criteria all lie below the node.
    interactions: Vec<(usize, InteractionKind, usize, usize)>,
}

/// Cached partial indices for one problem.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    problem: &'a Problem,
    n: usize,
    phi: Vec<f64>,
    disc: Vec<f64>,
    scopes: Vec<Option<Scope>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        let n = problem.alternative_count();
        let tree = problem.tree();
        let m = tree.elementary().len();
        let mut phi = vec![0.0; m * n * n];
        let mut disc = vec![0.0; m * n * n];
        for slot in 0..m {
            for a in 0..n {
                for b in 0..n {
                    let k = (slot * n + a) * n + b;
                    phi[k] = slot_concordance(problem, slot, a, b);
                    disc[k] = slot_discordance(problem, slot, a, b);
                }
            }
        }
        let mut scopes = vec![None; tree.len()];
        for &r in tree.aggregates() {
            let slots: Vec<usize> = tree
                .elementary_descendants(r)
                .into_iter()
                .filter_map(|t| tree.slot(t))
                .collect();
            let interactions = problem
                .interactions()
                .iter()
                .enumerate()
                .filter_map(|(k, i)| {
                    let s1 = tree.slot(i.first)?;
                    let s2 = tree.slot(i.second)?;
                    (slots.contains(&s1) && slots.contains(&s2)).then_some((k, i.kind, s1, s2))
                })
                .collect();
            scopes[r.0] = Some(Scope {
                slots,
                interactions,
            });
        }
        Self {
            problem,
            n,
            phi,
            disc,
            scopes,
        }
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    fn phi(&self, slot: usize, a: usize, b: usize) -> f64 {
        self.phi[(slot * self.n + a) * self.n + b]
    }

    fn disc(&self, slot: usize, a: usize, b: usize) -> f64 {
        self.disc[(slot * self.n + a) * self.n + b]
    }

    fn scope(&self, r: NodeIdx) -> Result<&Scope> {
        self.scopes
            .get(r.0)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::InvalidArgument(format!("node #{} is not an aggregate criterion", r.0)))
    }

    pub fn concordance(
        &self,
        r: NodeIdx,
        a: usize,
        b: usize,
        params: &ParameterVector,
    ) -> Result<f64> {
        let scope = self.scope(r)?;
        self.concordance_in(scope, a, b, params)
    }

    fn concordance_in(
        &self,
        scope: &Scope,
        a: usize,
        b: usize,
        params: &ParameterVector,
    ) -> Result<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for &s in &scope.slots {
            let w = params.weights[s];
            num += w * self.phi(s, a, b);
            den += w;
        }
        // A criterion on which b is strictly preferred has φ = 0.
        let strict = |s: usize| self.phi(s, a, b) == 0.0;
        for &(k, kind, s1, s2) in &scope.interactions {
            let c = params.coefficients[k];
            let term = match kind {
                InteractionKind::Strengthening | InteractionKind::Weakening => {
                    if strict(s1) || strict(s2) {
                        continue;
                    }
                    c * self.phi(s1, a, b).min(self.phi(s2, a, b))
                }
                InteractionKind::Antagonism => {
                    if strict(s1) || !strict(s2) {
                        continue;
                    }
                    -c * self.phi(s1, a, b).min(self.phi(s2, b, a))
                }
            };
            num += term;
            den += term;
        }
        if !(den > 0.0) {
            return Err(Error::Internal(format!(
                "non-positive concordance denominator {den}"
            )));
        }
        Ok((num / den).clamp(0.0, 1.0))
    }

    pub fn credibility(
        &self,
        r: NodeIdx,
        a: usize,
        b: usize,
        params: &ParameterVector,
    ) -> Result<f64> {
        let scope = self.scope(r)?;
        self.credibility_in(scope, a, b, params)
    }

    fn credibility_in(
        &self,
        scope: &Scope,
        a: usize,
        b: usize,
        params: &ParameterVector,
    ) -> Result<f64> {
        let c = self.concordance_in(scope, a, b, params)?;
        let mut sigma = c;
        for &s in &scope.slots {
            let d = self.disc(s, a, b);
            if d > c {
                sigma *= (1.0 - d) / (1.0 - c);
            }
        }
        Ok(sigma)
    }

    pub fn credibility_matrix(
        &self,
        r: NodeIdx,
        params: &ParameterVector,
    ) -> Result<CredibilityMatrix> {
        let scope = self.scope(r)?;
        let n = self.n;
        let mut values = vec![1.0; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    values[a * n + b] = self.credibility_in(scope, a, b, params)?;
                }
            }
        }
        Ok(CredibilityMatrix { node: r, n, values })
    }
}
