//! Descending and ascending distillation of a credibility matrix, and the
//! partial preorder obtained by intersecting the two complete preorders.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::electre::CredibilityMatrix;
use crate::error::{Error, Result};

/// Strict comparisons on credibility values ignore differences below this.
const CUT_EPS: f64 = 1e-9;

/// Discrimination threshold `s(λ) = intercept + slope·λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    pub intercept: f64,
    pub slope: f64,
}

impl Default for Discrimination {
    fn default() -> Self {
        Self {
            intercept: 0.3,
            slope: -0.15,
        }
    }
}

impl Discrimination {
    pub fn at(&self, lambda: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("λ = {lambda} outside [0, 1]")));
        }
        Ok(self.eval(lambda))
    }

    fn eval(&self, lambda: f64) -> f64 {
        self.intercept + self.slope * lambda
    }
}

/// s(λ) with the default constants.
pub fn discrimination_s(lambda: f64) -> Result<f64> {
    Discrimination::default().at(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistillationDirection {
    Descending,
    Ascending,
}

/// Complete ranking with ties; classes are listed best first and hold
/// alternative indices in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletePreorder {
    pub classes: Vec<Vec<usize>>,
}

impl CompletePreorder {
    pub fn alternative_count(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    /// Class position of every alternative (0 = best).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.alternative_count()];
        for (r, class) in self.classes.iter().enumerate() {
            for &a in class {
                ranks[a] = r;
            }
        }
        ranks
    }
}

/// Distillation with the default discrimination threshold.
pub fn distill(matrix: &CredibilityMatrix, direction: DistillationDirection) -> Result<CompletePreorder> {
    distill_with(matrix, direction, Discrimination::default())
}

pub fn distill_with(
    matrix: &CredibilityMatrix,
    direction: DistillationDirection,
    s: Discrimination,
) -> Result<CompletePreorder> {
    if matrix.is_empty() {
        return Err(Error::InvalidArgument("empty credibility matrix".into()));
    }
    let mut remaining: Vec<usize> = (0..matrix.len()).collect();
    let mut peeled = Vec::new();
    while !remaining.is_empty() {
        let distillate = distillate(matrix, &remaining, direction, s);
        remaining.retain(|a| !distillate.contains(a));
        peeled.push(distillate);
    }
    if direction == DistillationDirection::Ascending {
        peeled.reverse();
    }
    Ok(CompletePreorder { classes: peeled })
}

fn distillate(
    m: &CredibilityMatrix,
    set: &[usize],
    direction: DistillationDirection,
    s: Discrimination,
) -> Vec<usize> {
    let mut d = set.to_vec();
    let mut lambda = max_off_diagonal(m, &d, f64::INFINITY);
    loop {
        if d.len() == 1 {
            return d;
        }
        let cut = lambda - s.eval(lambda) - CUT_EPS;
        let next = max_off_diagonal(m, &d, cut);

        let mut qual = vec![0i64; d.len()];
        for (i, &x) in d.iter().enumerate() {
            for (j, &y) in d.iter().enumerate() {
                if i == j {
                    continue;
                }
                let sxy = m.get(x, y);
                if sxy > next + CUT_EPS && sxy - m.get(y, x) > s.eval(sxy) + CUT_EPS {
                    qual[i] += 1;
                    qual[j] -= 1;
                }
            }
        }
        let target = match direction {
            DistillationDirection::Descending => *qual.iter().max().unwrap(),
            DistillationDirection::Ascending => *qual.iter().min().unwrap(),
        };
        let chosen: Vec<usize> = d
            .iter()
            .zip(&qual)
            .filter(|(_, &q)| q == target)
            .map(|(&a, _)| a)
            .collect();
        if chosen.len() == 1 || next == 0.0 {
            return chosen;
        }
        d = chosen;
        lambda = next;
    }
}

/// Largest σ(x, y) over distinct x, y in `set` that is strictly below `below`,
/// or 0 when there is none.
fn max_off_diagonal(m: &CredibilityMatrix, set: &[usize], below: f64) -> f64 {
    let mut best = 0.0f64;
    for &x in set {
        for &y in set {
            if x != y {
                let v = m.get(x, y);
                if v < below && v > best {
                    best = v;
                }
            }
        }
    }
    best
}

/// Relation between two alternatives, read from the first one's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// first P second
    Prefers,
    /// second P first
    PreferredBy,
    Indifferent,
    Incomparable,
}

impl Relation {
    pub fn reverse(self) -> Self {
        match self {
            Relation::Prefers => Relation::PreferredBy,
            Relation::PreferredBy => Relation::Prefers,
            other => other,
        }
    }

    /// "at least as good as"
    pub fn outranks(self) -> bool {
        matches!(self, Relation::Prefers | Relation::Indifferent)
    }

    fn code(self) -> char {
        match self {
            Relation::Prefers => 'P',
            Relation::PreferredBy => 'p',
            Relation::Indifferent => 'I',
            Relation::Incomparable => 'R',
        }
    }

    fn from_code(c: char) -> Option<Self> {
        Some(match c {
            'P' => Relation::Prefers,
            'p' => Relation::PreferredBy,
            'I' => Relation::Indifferent,
            'R' => Relation::Incomparable,
            _ => return None,
        })
    }
}

/// One relation per unordered pair of alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialPreorder {
    n: usize,
    /// Relations for pairs `(i, j)`, `i < j`, in row-major order, from `i`'s side.
    upper: Vec<Relation>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl PartialPreorder {
    pub fn alternative_count(&self) -> usize {
        self.n
    }

    pub fn relation(&self, a: usize, b: usize) -> Relation {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => Relation::Indifferent,
            Less => self.upper[pair_index(self.n, a, b)],
            Greater => self.upper[pair_index(self.n, b, a)].reverse(),
        }
    }

    /// a S b: a is at least as good as b.
    pub fn outranks(&self, a: usize, b: usize) -> bool {
        self.relation(a, b).outranks()
    }

    /// Canonical census key: one character per unordered pair.
    pub fn key(&self) -> PreorderKey {
        PreorderKey(self.upper.iter().map(|r| r.code()).collect())
    }

    pub fn from_key(n: usize, key: &PreorderKey) -> Result<Self> {
        let upper: Option<Vec<Relation>> = key.0.chars().map(Relation::from_code).collect();
        match upper {
            Some(upper) if upper.len() == n * n.saturating_sub(1) / 2 => Ok(Self { n, upper }),
            _ => Err(Error::InvalidArgument(format!("malformed preorder key `{}`", key.0))),
        }
    }

    /// Equivalence classes of the indifference relation, each in increasing
    /// index order, ordered by their smallest member.
    pub fn indifference_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![usize::MAX; self.n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for a in 0..self.n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let members: Vec<usize> = (a..self.n)
                .filter(|&b| self.relation(a, b) == Relation::Indifferent)
                .collect();
            for &b in &members {
                class_of[b] = id;
            }
            classes.push(members);
        }
        classes
    }

    /// Covering relation of P on indifference classes.
    pub fn hasse(&self) -> HasseDiagram {
        let classes = self.indifference_classes();
        let k = classes.len();
        let better = |x: usize, y: usize| self.relation(classes[x][0], classes[y][0]) == Relation::Prefers;
        let mut edges = Vec::new();
        for x in 0..k {
            for y in 0..k {
                if x != y && better(x, y) && !(0..k).any(|z| z != x && z != y && better(x, z) && better(z, y)) {
                    edges.push((x, y));
                }
            }
        }
        HasseDiagram { classes, edges }
    }

    /// Human-readable relations for every unordered pair, e.g. `D P A`.
    pub fn describe(&self, names: &[String]) -> Vec<String> {
        let mut out = Vec::with_capacity(self.upper.len());
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (a, b) = (&names[i], &names[j]);
                out.push(match self.relation(i, j) {
                    Relation::Prefers => format!("{a} P {b}"),
                    Relation::PreferredBy => format!("{b} P {a}"),
                    Relation::Indifferent => format!("{a} I {b}"),
                    Relation::Incomparable => format!("{a} R {b}"),
                });
            }
        }
        out
    }
}

/// Opaque census key of a [`PartialPreorder`] over a fixed alternative order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PreorderKey(pub String);

impl fmt::Display for PreorderKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Layered view of a partial preorder: indifference classes and the edges of
/// the transitive reduction of strict preference between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseDiagram {
    pub classes: Vec<Vec<usize>>,
    /// `(better class, worse class)`
    pub edges: Vec<(usize, usize)>,
}

/// Intersection of the descending and ascending preorders.
pub fn intersect(desc: &CompletePreorder, asc: &CompletePreorder) -> Result<PartialPreorder> {
    let n = desc.alternative_count();
    let well_formed = |p: &CompletePreorder| {
        let mut seen = vec![false; n];
        p.classes.iter().flatten().all(|&a| a < n && !std::mem::replace(&mut seen[a], true))
    };
    if asc.alternative_count() != n || !well_formed(desc) || !well_formed(asc) {
        return Err(Error::InvalidArgument(
            "preorders range over different alternative sets".into(),
        ));
    }
    let rd = desc.ranks();
    let ra = asc.ranks();
    let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = rd[i].cmp(&rd[j]);
            let a = ra[i].cmp(&ra[j]);
            use std::cmp::Ordering::*;
            upper.push(match (d, a) {
                (Equal, Equal) => Relation::Indifferent,
                (Less, Less) | (Less, Equal) | (Equal, Less) => Relation::Prefers,
                (Greater, Greater) | (Greater, Equal) | (Equal, Greater) => Relation::PreferredBy,
                _ => Relation::Incomparable,
            });
        }
    }
    Ok(PartialPreorder { n, upper })
}

/// For each alternative: (number it outranks, number outranking it).
pub fn relation_counts(p: &PartialPreorder) -> Vec<(usize, usize)> {
    (0..p.n)
        .map(|a| {
            let outranked = (0..p.n).filter(|&b| b != a && p.outranks(a, b)).count();
            let outranking = (0..p.n).filter(|&b| b != a && p.outranks(b, a)).count();
            (outranked, outranking)
        })
        .collect()
}
