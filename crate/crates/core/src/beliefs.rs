//! Finite belief sets that pin down a sender's incentive constraints.
//!
//! For each outcome `r`, the beliefs at which `r` is a worst outcome form a
//! polytope `K(r)` inside the simplex, cut out by one dominance inequality
//! per competing outcome. The gap between the punishment value and the
//! allocation value is linear on each `K(r)`, so its maximum over the
//! simplex is attained at a vertex of some `K(r)`. Those vertices, together
//! with the point masses, form the test set.
//!
//! Vertices are found by brute-force active-set enumeration: pick
//! `|T| - 1` inequalities to hold with equality, add the normalization
//! row, solve, and keep feasible solutions.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::solve_square;
use crate::model::{Belief, ModelSpec};
use crate::punishment::argmin_with_ties;
use crate::tol;

/// Absolute determinant below which an active set is treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// `Σ_t μ(t) coeffs[t] <= 0`: outcome `r` is weakly worse than `competitor`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halfspace {
    pub competitor: usize,
    pub coeffs: Vec<f64>,
}

/// Half-space description of `K(r)`, on top of the simplex constraints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub sender: usize,
    pub outcome: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl Region {
    pub fn contains(&self, probs: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| {
            let lhs: f64 = h.coeffs.iter().zip(probs).map(|(a, m)| a * m).sum();
            lhs <= tol
        })
    }
}

pub fn region_membership(model: &ModelSpec, i: usize, r: usize) -> Result<Region> {
    let sender = model.sender(i)?;
    if r >= model.num_outcomes() {
        return Err(crate::Error::IndexOutOfRange {
            what: "outcome",
            index: r,
            len: model.num_outcomes(),
        });
    }
    let own = &sender.payoff[r];
    let halfspaces = (0..model.num_outcomes())
        .filter(|&q| q != r)
        .map(|q| Halfspace {
            competitor: q,
            coeffs: own.iter().zip(&sender.payoff[q]).map(|(a, b)| a - b).collect(),
        })
        .collect();
    Ok(Region {
        sender: i,
        outcome: r,
        halfspaces,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BeliefKind {
    Degenerate,
    Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ActiveConstraint {
    /// `μ(t) = 0`.
    NonNegative { type_index: usize },
    /// The region's outcome ties with `competitor`.
    Dominance { competitor: usize },
}

/// Certificate that a belief is a vertex of `K(outcome)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexOrigin {
    pub outcome: usize,
    pub active: Vec<ActiveConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestBelief {
    pub belief: Belief,
    pub kind: BeliefKind,
    /// Every outcome that is a worst outcome at this belief.
    pub regions: Vec<usize>,
    /// First active set that produced the belief, per region it bounds.
    pub origins: Vec<VertexOrigin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestBeliefSet {
    pub sender: usize,
    /// Point masses first, in type order, followed by non-degenerate vertices.
    pub beliefs: Vec<TestBelief>,
    /// Number of active sets examined.
    pub systems_examined: usize,
}

impl TestBeliefSet {
    pub fn degenerate(&self) -> impl Iterator<Item = &TestBelief> {
        self.beliefs.iter().filter(|b| b.kind == BeliefKind::Degenerate)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &TestBelief> {
        self.beliefs.iter().filter(|b| b.kind == BeliefKind::Vertex)
    }

    pub fn contains(&self, probs: &[f64], tol: f64) -> bool {
        self.beliefs.iter().any(|b| b.belief.l1_distance(probs) <= tol)
    }

    pub fn to_doc(&self, model: &ModelSpec) -> TestBeliefSetDoc {
        TestBeliefSetDoc {
            sender: self.sender,
            beliefs: self
                .beliefs
                .iter()
                .map(|b| TestBeliefDoc {
                    probs: b.belief.probs().to_vec(),
                    kind: b.kind,
                    regions: b.regions.iter().map(|&r| model.outcomes()[r].clone()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestBeliefDoc {
    pub probs: Vec<f64>,
    pub kind: BeliefKind,
    pub regions: Vec<String>,
}

/// Serialized form of a [`TestBeliefSet`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestBeliefSetDoc {
    pub sender: usize,
    pub beliefs: Vec<TestBeliefDoc>,
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Enumerates the test beliefs for sender `i`: every point mass plus every
/// vertex of every `K(r)`, deduplicated across outcomes.
pub fn enumerate_vertices(model: &ModelSpec, i: usize) -> Result<TestBeliefSet> {
    let sender = model.sender(i)?;
    let n = sender.num_types();
    let mut beliefs: Vec<TestBelief> = (0..n)
        .map(|t| TestBelief {
            belief: Belief::degenerate(i, n, t),
            kind: BeliefKind::Degenerate,
            regions: Vec::new(),
            origins: Vec::new(),
        })
        .collect();
    let mut systems_examined = 0;

    for r in 0..model.num_outcomes() {
        let region = region_membership(model, i, r)?;
        // Constraint rows a·μ <= 0, each scaled to unit max-norm.
        let mut rows: Vec<(Vec<f64>, ActiveConstraint)> = (0..n)
            .map(|t| {
                let mut a = vec![0.0; n];
                a[t] = -1.0;
                (a, ActiveConstraint::NonNegative { type_index: t })
            })
            .collect();
        for h in &region.halfspaces {
            let norm = h.coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if norm > tol::TIE {
                rows.push((
                    h.coeffs.iter().map(|x| x / norm).collect(),
                    ActiveConstraint::Dominance {
                        competitor: h.competitor,
                    },
                ));
            }
        }

        for_each_subset(rows.len(), n - 1, |active| {
            systems_examined += 1;
            let mut a: Vec<Vec<f64>> = active.iter().map(|&k| rows[k].0.clone()).collect();
            a.push(vec![1.0; n]);
            let mut b = vec![0.0; n - 1];
            b.push(1.0);
            let Some(mu) = solve_square(a, b, SINGULAR_DET) else {
                return;
            };
            let feasible = rows.iter().all(|(row, _)| {
                let lhs: f64 = row.iter().zip(&mu).map(|(x, m)| x * m).sum();
                lhs <= tol::SUM
            });
            if !feasible {
                return;
            }
            let belief = Belief::from_raw(i, mu);
            let origin = VertexOrigin {
                outcome: r,
                active: active.iter().map(|&k| rows[k].1.clone()).collect(),
            };
            match beliefs
                .iter_mut()
                .find(|b| b.belief.l1_distance(belief.probs()) < tol::DEDUP)
            {
                Some(existing) => {
                    if existing.origins.iter().all(|o| o.outcome != r) {
                        existing.origins.push(origin);
                    }
                }
                None => beliefs.push(TestBelief {
                    kind: if belief.degenerate_type(tol::DEDUP).is_some() {
                        BeliefKind::Degenerate
                    } else {
                        BeliefKind::Vertex
                    },
                    belief,
                    regions: Vec::new(),
                    origins: vec![origin],
                }),
            }
        });
    }

    for b in &mut beliefs {
        let payoffs = sender.expected_payoffs(b.belief.probs());
        b.regions = argmin_with_ties(&payoffs).0;
    }
    Ok(TestBeliefSet {
        sender: i,
        beliefs,
        systems_examined,
    })
}

/// A two-type belief at which a pair of outcomes gives equal expected payoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseEntry {
    pub outcomes: (usize, usize),
    pub types: (usize, usize),
    /// Weight on `types.0`.
    pub alpha: f64,
    pub belief: Belief,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseIndifferenceSet {
    pub sender: usize,
    pub entries: Vec<PairwiseEntry>,
}

/// For each outcome pair and each type pair whose payoff differences have
/// opposite signs, the unique two-type belief equalizing the two outcomes.
pub fn pairwise_prefilter(model: &ModelSpec, i: usize) -> Result<PairwiseIndifferenceSet> {
    let sender = model.sender(i)?;
    let n = sender.num_types();
    let k = model.num_outcomes();
    let mut entries = Vec::new();
    for r in 0..k {
        for q in r + 1..k {
            let gap: Vec<f64> = sender.payoff[r]
                .iter()
                .zip(&sender.payoff[q])
                .map(|(a, b)| a - b)
                .collect();
            for t in 0..n {
                for s in t + 1..n {
                    let (dt, ds) = (gap[t], gap[s]);
                    let crossing = (dt > tol::TIE && ds < -tol::TIE) || (dt < -tol::TIE && ds > tol::TIE);
                    if !crossing {
                        continue;
                    }
                    // alpha * dt + (1 - alpha) * ds = 0
                    let alpha = ds / (ds - dt);
                    let mut probs = vec![0.0; n];
                    probs[t] = alpha;
                    probs[s] = 1.0 - alpha;
                    entries.push(PairwiseEntry {
                        outcomes: (r, q),
                        types: (t, s),
                        alpha,
                        belief: Belief::from_raw(i, probs),
                    });
                }
            }
        }
    }
    Ok(PairwiseIndifferenceSet { sender: i, entries })
}
