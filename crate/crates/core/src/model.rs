//! Criterion hierarchy, alternatives, performances, discrimination thresholds and
//! interaction declarations.
//!
//! Raw inputs (the serde types in this module) are turned into a [`Problem`] by
//! [`validate_problem`], which either accepts everything or reports every
//! violation it found. A `Problem` is immutable and indexes criteria by
//! [`NodeIdx`] and alternatives by their position.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Issue, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Gain,
    Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Cardinal,
    Ordinal,
    Dichotomous,
}

/// Closed range of admissible native values; `None` leaves that side unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ValueRange {
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl ValueRange {
    pub fn contains(&self, value: f64) -> bool {
        self.min.is_none_or(|m| value >= m) && self.max.is_none_or(|m| value <= m)
    }
}

/// One node of the criterion hierarchy as written in a problem document.
///
/// Children are derived from `parent` links in declaration order. Leaves are
/// elementary and must carry `direction` and `scale`; inner nodes must not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionNode {
    pub id: String,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<ValueRange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternative {
    pub id: String,
    #[serde(default)]
    pub label: String,
}

/// Alternative × elementary-criterion values in native units.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PerformanceTable {
    pub alternatives: Vec<Alternative>,
    /// alternative id → criterion id → value
    pub values: BTreeMap<String, BTreeMap<String, f64>>,
}

/// Thresholds that apply while the reference performance lies in `[from, until]`.
///
/// Bands of one criterion are listed in increasing order. A band covers values
/// strictly above the previous band's `until` and up to its own `until`
/// inclusive. Omitting `from` on the first band or `until` on the last one
/// extends the band to the criterion's range boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBand {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub until: Option<f64>,
    pub q: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

impl ThresholdBand {
    /// Dichotomous criteria: a 0/1 difference is strict preference, no veto.
    pub const DICHOTOMOUS: ThresholdBand = ThresholdBand {
        from: None,
        until: None,
        q: 0.0,
        p: 1.0,
        v: None,
    };
}

/// criterion id → ordered bands
pub type ThresholdSpec = BTreeMap<String, Vec<ThresholdBand>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Strengthening,
    Weakening,
    Antagonism,
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionKind::Strengthening => "strengthening",
            InteractionKind::Weakening => "weakening",
            InteractionKind::Antagonism => "antagonism",
        })
    }
}

/// Declared interaction between two elementary criteria.
///
/// For antagonism the pair is ordered: `second` opposes the outranking and
/// reduces the contribution of `first`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionDeclaration {
    pub kind: InteractionKind,
    pub first: String,
    pub second: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Index of a node in a [`CriterionTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIdx(pub usize);

/// Validated criterion hierarchy.
#[derive(Debug, Clone)]
pub struct CriterionTree {
    nodes: Vec<CriterionNode>,
    parent: Vec<Option<NodeIdx>>,
    children: Vec<Vec<NodeIdx>>,
    index: HashMap<String, NodeIdx>,
    root: NodeIdx,
    /// Elementary criteria in depth-first order; position is the criterion's slot.
    elementary: Vec<NodeIdx>,
    slot: Vec<Option<usize>>,
    /// Non-elementary criteria in depth-first order, root first.
    aggregates: Vec<NodeIdx>,
}

impl CriterionTree {
    pub fn new(nodes: Vec<CriterionNode>) -> Result<Self> {
        let mut issues = Vec::new();
        let tree = Self::build(nodes, &mut issues);
        match tree {
            Some(t) if issues.is_empty() => Ok(t),
            _ => Err(Error::invalid(issues)),
        }
    }

    fn build(nodes: Vec<CriterionNode>, issues: &mut Vec<Issue>) -> Option<Self> {
        let mut index = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.clone(), NodeIdx(i)).is_some() {
                issues.push(Issue::new(
                    format!("criteria[{i}].id"),
                    format!("duplicate identifier `{}`", node.id),
                ));
            }
        }
        if !issues.is_empty() {
            return None;
        }

        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        let mut roots = Vec::new();
        for (i, node) in nodes.iter().enumerate() {
            match &node.parent {
                None => roots.push(NodeIdx(i)),
                Some(p) => match index.get(p) {
                    Some(&pi) => {
                        parent[i] = Some(pi);
                        children[pi.0].push(NodeIdx(i));
                    }
                    None => issues.push(Issue::new(
                        format!("criteria[{i}].parent"),
                        format!("unknown identifier `{p}`"),
                    )),
                },
            }
        }
        let root = match roots.as_slice() {
            [r] => *r,
            [] => {
                issues.push(Issue::new("criteria", "non-tree hierarchy: no root criterion"));
                return None;
            }
            many => {
                let ids: Vec<_> = many.iter().map(|r| nodes[r.0].id.as_str()).collect();
                issues.push(Issue::new(
                    "criteria",
                    format!("non-tree hierarchy: multiple roots {}", ids.join(", ")),
                ));
                return None;
            }
        };

        // Depth-first walk from the root; anything not reached sits on a cycle.
        let mut seen = vec![false; nodes.len()];
        let mut order = Vec::with_capacity(nodes.len());
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.0], true) {
                continue;
            }
            order.push(n);
            stack.extend(children[n.0].iter().rev().copied());
        }
        for (i, node) in nodes.iter().enumerate() {
            if !seen[i] {
                issues.push(Issue::new(
                    format!("criteria[{i}]"),
                    format!("non-tree hierarchy: `{}` is not reachable from the root", node.id),
                ));
            }
        }
        if !issues.is_empty() {
            return None;
        }

        let mut elementary = Vec::new();
        let mut aggregates = Vec::new();
        let mut slot = vec![None; nodes.len()];
        for &n in &order {
            let node = &nodes[n.0];
            let path = format!("criteria[{}]", n.0);
            if children[n.0].is_empty() {
                if node.direction.is_none() {
                    issues.push(Issue::new(
                        &path,
                        format!("elementary criterion `{}` lacks a direction", node.id),
                    ));
                }
                if node.scale.is_none() {
                    issues.push(Issue::new(
                        &path,
                        format!("elementary criterion `{}` lacks a scale", node.id),
                    ));
                }
                if let Some(r) = node.range {
                    if let (Some(lo), Some(hi)) = (r.min, r.max) {
                        if lo > hi {
                            issues.push(Issue::new(
                                format!("{path}.range"),
                                format!("empty range for `{}`", node.id),
                            ));
                        }
                    }
                }
                slot[n.0] = Some(elementary.len());
                elementary.push(n);
            } else {
                if node.direction.is_some() || node.scale.is_some() {
                    issues.push(Issue::new(
                        &path,
                        format!(
                            "non-elementary criterion `{}` must not declare direction or scale",
                            node.id
                        ),
                    ));
                }
                aggregates.push(n);
            }
        }

        Some(Self {
            nodes,
            parent,
            children,
            index,
            root,
            elementary,
            slot,
            aggregates,
        })
    }

    pub fn root(&self) -> NodeIdx {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: NodeIdx) -> &CriterionNode {
        &self.nodes[idx.0]
    }

    pub fn nodes(&self) -> &[CriterionNode] {
        &self.nodes
    }

    pub fn id(&self, idx: NodeIdx) -> &str {
        &self.nodes[idx.0].id
    }

    pub fn find(&self, id: &str) -> Option<NodeIdx> {
        self.index.get(id).copied()
    }

    pub fn lookup(&self, id: &str) -> Result<NodeIdx> {
        self.find(id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn parent(&self, idx: NodeIdx) -> Option<NodeIdx> {
        self.parent[idx.0]
    }

    pub fn children(&self, idx: NodeIdx) -> &[NodeIdx] {
        &self.children[idx.0]
    }

    pub fn is_elementary(&self, idx: NodeIdx) -> bool {
        self.children[idx.0].is_empty()
    }

    /// Elementary criteria in depth-first order.
    pub fn elementary(&self) -> &[NodeIdx] {
        &self.elementary
    }

    /// Non-elementary criteria in depth-first order, root first.
    pub fn aggregates(&self) -> &[NodeIdx] {
        &self.aggregates
    }

    /// Column of an elementary criterion in the performance matrix.
    pub fn slot(&self, idx: NodeIdx) -> Option<usize> {
        self.slot[idx.0]
    }

    pub fn direction(&self, idx: NodeIdx) -> Option<Direction> {
        self.nodes[idx.0].direction
    }

    pub fn scale(&self, idx: NodeIdx) -> Option<Scale> {
        self.nodes[idx.0].scale
    }

    /// Declared range, with the implicit `[0, 1]` for dichotomous criteria.
    pub fn range(&self, idx: NodeIdx) -> ValueRange {
        let node = &self.nodes[idx.0];
        match (node.range, node.scale) {
            (Some(r), _) => r,
            (None, Some(Scale::Dichotomous)) => ValueRange {
                min: Some(0.0),
                max: Some(1.0),
            },
            (None, _) => ValueRange::default(),
        }
    }

    /// E(g_r): elementary criteria below `idx`, in depth-first order. An
    /// elementary criterion is its own only descendant.
    pub fn elementary_descendants(&self, idx: NodeIdx) -> Vec<NodeIdx> {
        let mut out = Vec::new();
        let mut stack = vec![idx];
        while let Some(n) = stack.pop() {
            let kids = &self.children[n.0];
            if kids.is_empty() {
                out.push(n);
            } else {
                stack.extend(kids.iter().rev().copied());
            }
        }
        out
    }

    /// Id-based variant of [`CriterionTree::elementary_descendants`].
    pub fn elementary_descendants_of(&self, id: &str) -> Result<BTreeSet<String>> {
        let idx = self.lookup(id)?;
        Ok(self
            .elementary_descendants(idx)
            .into_iter()
            .map(|n| self.id(n).to_string())
            .collect())
    }

    /// Path from the root down to `idx`, both included.
    pub fn path_from_root(&self, idx: NodeIdx) -> Vec<NodeIdx> {
        let mut path = vec![idx];
        let mut cur = idx;
        while let Some(p) = self.parent[cur.0] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Validated interaction with resolved criterion indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub first: NodeIdx,
    pub second: NodeIdx,
}

/// A validated decision problem. Immutable; share freely across threads.
#[derive(Debug, Clone)]
pub struct Problem {
    tree: CriterionTree,
    table: PerformanceTable,
    thresholds: ThresholdSpec,
    declarations: Vec<InteractionDeclaration>,
    alt_index: HashMap<String, usize>,
    /// Row-major `[alternative][slot]`.
    values: Vec<f64>,
    bands: Vec<Vec<ThresholdBand>>,
    interactions: Vec<Interaction>,
}

impl Problem {
    pub fn tree(&self) -> &CriterionTree {
        &self.tree
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.table.alternatives
    }

    pub fn alternative_count(&self) -> usize {
        self.table.alternatives.len()
    }

    pub fn alternative_ids(&self) -> Vec<String> {
        self.table.alternatives.iter().map(|a| a.id.clone()).collect()
    }

    pub fn alternative_index(&self, id: &str) -> Result<usize> {
        self.alt_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn performance_table(&self) -> &PerformanceTable {
        &self.table
    }

    pub fn threshold_spec(&self) -> &ThresholdSpec {
        &self.thresholds
    }

    pub fn interaction_declarations(&self) -> &[InteractionDeclaration] {
        &self.declarations
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    /// Performance of alternative `alt` on the elementary criterion in `slot`.
    pub fn value(&self, alt: usize, slot: usize) -> f64 {
        self.values[alt * self.tree.elementary.len() + slot]
    }

    /// Thresholds in force when the reference performance on `slot` is `value`.
    pub fn band(&self, slot: usize, value: f64) -> &ThresholdBand {
        let bands = &self.bands[slot];
        bands
            .iter()
            .find(|b| b.until.is_none_or(|u| value <= u))
            .unwrap_or_else(|| bands.last().expect("validated bands are non-empty"))
    }

    /// Re-runs validation on this problem's own inputs.
    pub fn revalidate(&self) -> Result<Problem> {
        validate_problem(
            self.tree.nodes.clone(),
            &self.table,
            &self.thresholds,
            &self.declarations,
        )
    }
}

/// Checks every structural invariant and returns the problem, or all violations.
pub fn validate_problem(
    criteria: Vec<CriterionNode>,
    perf: &PerformanceTable,
    thresholds: &ThresholdSpec,
    interactions: &[InteractionDeclaration],
) -> Result<Problem> {
    let mut issues = Vec::new();
    let Some(tree) = CriterionTree::build(criteria, &mut issues) else {
        return Err(Error::invalid(issues));
    };

    let alt_index = check_alternatives(&perf.alternatives, &mut issues);
    let values = check_performances(&tree, perf, &alt_index, &mut issues);
    let bands = check_thresholds(&tree, thresholds, &mut issues);
    let resolved = check_interactions(&tree, interactions, &mut issues);

    if !issues.is_empty() {
        return Err(Error::invalid(issues));
    }
    Ok(Problem {
        tree,
        table: perf.clone(),
        thresholds: thresholds.clone(),
        declarations: interactions.to_vec(),
        alt_index,
        values,
        bands,
        interactions: resolved,
    })
}

fn check_alternatives(alts: &[Alternative], issues: &mut Vec<Issue>) -> HashMap<String, usize> {
    if alts.is_empty() {
        issues.push(Issue::new("alternatives", "no alternatives declared"));
    }
    let mut index = HashMap::new();
    for (i, alt) in alts.iter().enumerate() {
        if index.insert(alt.id.clone(), i).is_some() {
            issues.push(Issue::new(
                format!("alternatives[{i}].id"),
                format!("duplicate alternative `{}`", alt.id),
            ));
        }
    }
    index
}

fn check_performances(
    tree: &CriterionTree,
    perf: &PerformanceTable,
    alt_index: &HashMap<String, usize>,
    issues: &mut Vec<Issue>,
) -> Vec<f64> {
    let m = tree.elementary.len();
    let mut values = vec![f64::NAN; perf.alternatives.len() * m];

    for (alt, row) in &perf.values {
        let Some(&ai) = alt_index.get(alt) else {
            issues.push(Issue::new(
                format!("performances.{alt}"),
                format!("unknown identifier `{alt}`"),
            ));
            continue;
        };
        for (crit, &value) in row {
            let path = format!("performances.{alt}.{crit}");
            let Some(ci) = tree.find(crit) else {
                issues.push(Issue::new(path, format!("unknown identifier `{crit}`")));
                continue;
            };
            let Some(slot) = tree.slot(ci) else {
                issues.push(Issue::new(path, format!("`{crit}` is not an elementary criterion")));
                continue;
            };
            if !value.is_finite() {
                issues.push(Issue::new(path, "performance is not a finite number"));
                continue;
            }
            if tree.scale(ci) == Some(Scale::Dichotomous) && value != 0.0 && value != 1.0 {
                issues.push(Issue::new(path, "dichotomous performance must be 0 or 1"));
                continue;
            }
            if !tree.range(ci).contains(value) {
                issues.push(Issue::new(
                    path,
                    format!("performance {value} outside the declared range of `{crit}`"),
                ));
                continue;
            }
            values[ai * m + slot] = value;
        }
    }

    for (ai, alt) in perf.alternatives.iter().enumerate() {
        for (slot, &ci) in tree.elementary.iter().enumerate() {
            if values[ai * m + slot].is_nan() && perf.values.get(&alt.id).is_none_or(|r| !r.contains_key(tree.id(ci))) {
                issues.push(Issue::new(
                    format!("performances.{}.{}", alt.id, tree.id(ci)),
                    "missing performance cell",
                ));
            }
        }
    }
    values
}

fn check_thresholds(
    tree: &CriterionTree,
    spec: &ThresholdSpec,
    issues: &mut Vec<Issue>,
) -> Vec<Vec<ThresholdBand>> {
    for id in spec.keys() {
        match tree.find(id) {
            None => issues.push(Issue::new(
                format!("thresholds.{id}"),
                format!("unknown identifier `{id}`"),
            )),
            Some(ci) if !tree.is_elementary(ci) => issues.push(Issue::new(
                format!("thresholds.{id}"),
                format!("`{id}` is not an elementary criterion"),
            )),
            Some(_) => {}
        }
    }

    let mut out = Vec::with_capacity(tree.elementary.len());
    for &ci in &tree.elementary {
        let id = tree.id(ci);
        let path = format!("thresholds.{id}");
        let declared = spec.get(id);
        if tree.scale(ci) == Some(Scale::Dichotomous) {
            if declared.is_some() {
                issues.push(Issue::new(
                    path,
                    "dichotomous criteria use implicit thresholds (q=0, p=1, no veto)",
                ));
            }
            out.push(vec![ThresholdBand::DICHOTOMOUS]);
            continue;
        }
        let Some(bands) = declared else {
            issues.push(Issue::new(path, format!("missing thresholds for `{id}`")));
            out.push(Vec::new());
            continue;
        };
        if bands.is_empty() {
            issues.push(Issue::new(path, "no threshold band declared"));
            out.push(Vec::new());
            continue;
        }
        check_bands(&path, tree.range(ci), bands, issues);
        out.push(bands.clone());
    }
    out
}

fn check_bands(path: &str, range: ValueRange, bands: &[ThresholdBand], issues: &mut Vec<Issue>) {
    for (i, b) in bands.iter().enumerate() {
        let bp = format!("{path}[{i}]");
        let finite = b.q.is_finite() && b.p.is_finite() && b.v.is_none_or(f64::is_finite);
        if !finite {
            issues.push(Issue::new(bp, "thresholds must be finite"));
            continue;
        }
        if b.q < 0.0 {
            issues.push(Issue::new(&bp, "q < 0"));
        }
        if b.p <= b.q {
            issues.push(Issue::new(&bp, "p ≤ q"));
        }
        if let Some(v) = b.v {
            if v <= b.p {
                issues.push(Issue::new(&bp, "v ≤ p"));
            }
        }
    }

    let first = &bands[0];
    if let Some(from) = first.from {
        if range.min != Some(from) {
            issues.push(Issue::new(
                format!("{path}[0].from"),
                "band gap: first band does not start at the range minimum",
            ));
        }
    }
    let last = &bands[bands.len() - 1];
    if let Some(until) = last.until {
        if range.max != Some(until) {
            issues.push(Issue::new(
                format!("{path}[{}].until", bands.len() - 1),
                "band gap: last band does not reach the range maximum",
            ));
        }
    }
    for i in 0..bands.len() - 1 {
        let Some(until) = bands[i].until else {
            issues.push(Issue::new(
                format!("{path}[{i}].until"),
                "band overlap: only the last band may be unbounded above",
            ));
            continue;
        };
        let lower = bands[i].from.or(if i == 0 { range.min } else { bands[i - 1].until });
        if lower.is_some_and(|l| until <= l) {
            issues.push(Issue::new(format!("{path}[{i}]"), "band overlap: empty band"));
        }
        if let Some(next_from) = bands[i + 1].from {
            if next_from > until {
                issues.push(Issue::new(format!("{path}[{}].from", i + 1), "band gap"));
            } else if next_from < until {
                issues.push(Issue::new(format!("{path}[{}].from", i + 1), "band overlap"));
            }
        }
    }
}

fn check_interactions(
    tree: &CriterionTree,
    decls: &[InteractionDeclaration],
    issues: &mut Vec<Issue>,
) -> Vec<Interaction> {
    let mut out = Vec::new();
    let mut unordered = BTreeSet::new();
    let mut ordered = BTreeSet::new();
    for (i, d) in decls.iter().enumerate() {
        let path = format!("interactions[{i}]");
        let resolve = |id: &str, issues: &mut Vec<Issue>| match tree.find(id) {
            None => {
                issues.push(Issue::new(&path, format!("unknown identifier `{id}`")));
                None
            }
            Some(ci) if !tree.is_elementary(ci) => {
                issues.push(Issue::new(&path, format!("`{id}` is not an elementary criterion")));
                None
            }
            Some(ci) => Some(ci),
        };
        let (Some(a), Some(b)) = (resolve(&d.first, issues), resolve(&d.second, issues)) else {
            continue;
        };
        if a == b {
            issues.push(Issue::new(&path, "interaction pairs a criterion with itself"));
            continue;
        }
        let fresh = match d.kind {
            InteractionKind::Antagonism => ordered.insert((a, b)),
            _ => unordered.insert((a.min(b), a.max(b))),
        };
        if !fresh {
            issues.push(Issue::new(
                &path,
                format!("duplicate {} declaration for ({}, {})", d.kind, d.first, d.second),
            ));
            continue;
        }
        out.push(Interaction {
            kind: d.kind,
            first: a,
            second: b,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(id: &str, parent: &str, direction: Direction, scale: Scale) -> CriterionNode {
        CriterionNode {
            id: id.into(),
            label: id.into(),
            parent: Some(parent.into()),
            direction: Some(direction),
            scale: Some(scale),
            unit: None,
            range: None,
        }
    }

    fn inner(id: &str, parent: Option<&str>) -> CriterionNode {
        CriterionNode {
            id: id.into(),
            label: id.into(),
            parent: parent.map(Into::into),
            direction: None,
            scale: None,
            unit: None,
            range: None,
        }
    }

    fn small() -> (Vec<CriterionNode>, PerformanceTable, ThresholdSpec) {
        let nodes = vec![
            inner("root", None),
            leaf("x", "root", Direction::Gain, Scale::Cardinal),
            leaf("y", "root", Direction::Cost, Scale::Dichotomous),
        ];
        let mut values = BTreeMap::new();
        for (alt, x, y) in [("a", 1.0, 0.0), ("b", 3.0, 1.0)] {
            values.insert(alt.to_string(), BTreeMap::from([("x".into(), x), ("y".into(), y)]));
        }
        let perf = PerformanceTable {
            alternatives: vec![
                Alternative { id: "a".into(), label: String::new() },
                Alternative { id: "b".into(), label: String::new() },
            ],
            values,
        };
        let thr = BTreeMap::from([(
            "x".to_string(),
            vec![ThresholdBand { from: None, until: None, q: 1.0, p: 2.0, v: None }],
        )]);
        (nodes, perf, thr)
    }

    #[test]
    fn accepts_minimal_problem() {
        let (nodes, perf, thr) = small();
        let p = validate_problem(nodes, &perf, &thr, &[]).unwrap();
        assert_eq!(p.tree().elementary().len(), 2);
        assert_eq!(p.value(1, 0), 3.0);
    }

    #[test]
    fn unknown_criterion_in_performances() {
        let (nodes, mut perf, thr) = small();
        perf.values.get_mut("a").unwrap().insert("zz".into(), 1.0);
        let err = validate_problem(nodes, &perf, &thr, &[]).unwrap_err();
        let Error::Invalid(issues) = err else { panic!() };
        assert!(issues.mentions("unknown identifier `zz`"));
    }

    #[test]
    fn inverted_thresholds() {
        let (nodes, perf, mut thr) = small();
        thr.get_mut("x").unwrap()[0].q = 2.0;
        thr.get_mut("x").unwrap()[0].p = 1.0;
        let Error::Invalid(issues) = validate_problem(nodes, &perf, &thr, &[]).unwrap_err() else {
            panic!()
        };
        assert!(issues.mentions("p ≤ q"));
    }

    #[test]
    fn veto_below_preference() {
        let (nodes, perf, mut thr) = small();
        thr.get_mut("x").unwrap()[0].v = Some(1.5);
        let Error::Invalid(issues) = validate_problem(nodes, &perf, &thr, &[]).unwrap_err() else {
            panic!()
        };
        assert!(issues.mentions("v ≤ p"));
    }

    #[test]
    fn missing_cell_and_bad_dichotomous_reported_together() {
        let (nodes, mut perf, thr) = small();
        perf.values.get_mut("a").unwrap().remove("x");
        perf.values.get_mut("b").unwrap().insert("y".into(), 0.5);
        let Error::Invalid(issues) = validate_problem(nodes, &perf, &thr, &[]).unwrap_err() else {
            panic!()
        };
        assert!(issues.mentions("missing performance cell"));
        assert!(issues.mentions("0 or 1"));
        assert_eq!(issues.len(), 2);
    }

    #[test]
    fn band_gap_and_overlap() {
        let (mut nodes, perf, mut thr) = small();
        nodes[1].range = Some(ValueRange { min: Some(0.0), max: None });
        let band = |from, until| ThresholdBand { from, until, q: 1.0, p: 2.0, v: None };
        thr.insert("x".into(), vec![band(None, Some(5.0)), band(Some(6.0), None)]);
        let Error::Invalid(issues) =
            validate_problem(nodes.clone(), &perf, &thr, &[]).unwrap_err()
        else {
            panic!()
        };
        assert!(issues.mentions("band gap"));

        thr.insert("x".into(), vec![band(None, Some(5.0)), band(Some(4.0), None)]);
        let Error::Invalid(issues) = validate_problem(nodes.clone(), &perf, &thr, &[]).unwrap_err()
        else {
            panic!()
        };
        assert!(issues.mentions("band overlap"));

        thr.insert("x".into(), vec![band(None, Some(5.0)), band(Some(5.0), None)]);
        let p = validate_problem(nodes, &perf, &thr, &[]).unwrap();
        let slot = p.tree().slot(p.tree().find("x").unwrap()).unwrap();
        // "until" is inclusive
        assert_eq!(p.band(slot, 5.0).until, Some(5.0));
        assert_eq!(p.band(slot, 5.01).until, None);
    }

    #[test]
    fn non_tree_hierarchies() {
        let (mut nodes, perf, thr) = small();
        nodes.push(inner("other_root", None));
        let Error::Invalid(issues) = validate_problem(nodes, &perf, &thr, &[]).unwrap_err() else {
            panic!()
        };
        assert!(issues.mentions("multiple roots"));

        let (mut nodes, perf, thr) = small();
        nodes.push(inner("c1", Some("c2")));
        nodes.push(inner("c2", Some("c1")));
        let Error::Invalid(issues) = validate_problem(nodes, &perf, &thr, &[]).unwrap_err() else {
            panic!()
        };
        assert!(issues.mentions("not reachable"));
    }

    #[test]
    fn interaction_checks() {
        let (nodes, perf, thr) = small();
        let decl = |kind, a: &str, b: &str| InteractionDeclaration {
            kind,
            first: a.into(),
            second: b.into(),
            note: None,
        };
        let bad = [
            decl(InteractionKind::Strengthening, "x", "x"),
            decl(InteractionKind::Strengthening, "x", "root"),
            decl(InteractionKind::Strengthening, "x", "y"),
            decl(InteractionKind::Weakening, "y", "x"),
        ];
        let Error::Invalid(issues) = validate_problem(nodes.clone(), &perf, &thr, &bad).unwrap_err()
        else {
            panic!()
        };
        assert_eq!(issues.len(), 3);
        assert!(issues.mentions("itself"));
        assert!(issues.mentions("not an elementary"));
        assert!(issues.mentions("duplicate"));

        let ok = [
            decl(InteractionKind::Antagonism, "x", "y"),
            decl(InteractionKind::Antagonism, "y", "x"),
        ];
        assert!(validate_problem(nodes, &perf, &thr, &ok).is_ok());
    }
}
