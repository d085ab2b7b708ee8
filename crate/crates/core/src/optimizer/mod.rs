//! The receiver's constrained-optimal allocation.
//!
//! Allocations are vectors `p(t)(r)` with one simplex per profile. Each
//! incentive constraint at a test belief is linear in `p`, so the optimum
//! is a linear program. Constant allocations always satisfy every
//! constraint, so the program is feasible and bounded.

pub mod lp;

use serde::Serialize;

use crate::beliefs::{enumerate_vertices, BeliefKind, TestBeliefSet};
use crate::error::{Error, Result};
use crate::model::{receiver_value, Allocation, AllocationDoc, ModelSpec};
use crate::tol;
use lp::{solve_lp, LinearProgram, LpStatus};

/// The receiver's first-best allocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnconstrainedOptimum {
    pub allocation: Allocation,
    /// Selected outcome per profile: the first maximizer.
    pub choices: Vec<usize>,
    /// All maximizers per profile within tie tolerance.
    pub ties: Vec<Vec<usize>>,
    pub value: f64,
}

pub fn unconstrained_optimum(model: &ModelSpec) -> Result<UnconstrainedOptimum> {
    let v = model.receiver_payoff();
    let mut choices = Vec::with_capacity(model.num_profiles());
    let mut ties = Vec::with_capacity(model.num_profiles());
    for idx in 0..model.num_profiles() {
        let best = v.iter().map(|row| row[idx]).fold(f64::NEG_INFINITY, f64::max);
        let set: Vec<usize> = (0..model.num_outcomes()).filter(|&r| v[r][idx] >= best - tol::TIE).collect();
        choices.push(set[0]);
        ties.push(set);
    }
    let allocation = Allocation::deterministic(model, &choices)?;
    let value = receiver_value(model, &allocation)?;
    Ok(UnconstrainedOptimum {
        allocation,
        choices,
        ties,
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BindingConstraint {
    pub sender: usize,
    pub belief: Vec<f64>,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub allocation: Allocation,
    pub value: f64,
    pub binding: Vec<BindingConstraint>,
    /// Read off the raw LP solution: every row within tie tolerance of a
    /// point mass.
    pub deterministic: bool,
    pub unconstrained_value: f64,
    pub first_best_gap: f64,
    /// Tie sets of the first-best allocation, per profile.
    pub unconstrained_ties: Vec<Vec<usize>>,
    pub pivots: usize,
}

impl Optimum {
    pub fn to_doc(&self, model: &ModelSpec) -> OptimumDoc {
        OptimumDoc {
            value: self.value,
            allocation: self.allocation.to_doc(model),
            binding: self
                .binding
                .iter()
                .map(|b| BindingDoc {
                    sender: b.sender,
                    belief: b.belief.clone(),
                })
                .collect(),
            deterministic: self.deterministic,
            first_best_gap: self.first_best_gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BindingDoc {
    pub sender: usize,
    pub belief: Vec<f64>,
}

/// Serialized form of an [`Optimum`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumDoc {
    pub value: f64,
    pub allocation: AllocationDoc,
    pub binding: Vec<BindingDoc>,
    pub deterministic: bool,
    pub first_best_gap: f64,
}

pub fn constrained_optimum(model: &ModelSpec) -> Result<Optimum> {
    let sets = (0..model.num_senders())
        .map(|i| enumerate_vertices(model, i))
        .collect::<Result<Vec<_>>>()?;
    constrained_optimum_with(model, &sets)
}

/// As [`constrained_optimum`] with precomputed test sets, one per sender.
pub fn constrained_optimum_with(model: &ModelSpec, sets: &[TestBeliefSet]) -> Result<Optimum> {
    if sets.len() != model.num_senders() {
        return Err(Error::Dimension(format!(
            "{} test sets for {} senders",
            sets.len(),
            model.num_senders()
        )));
    }
    let k = model.num_outcomes();
    let np = model.num_profiles();
    let var = |idx: usize, r: usize| idx * k + r;
    let v = model.receiver_payoff();

    let mut objective = vec![0.0; np * k];
    for idx in 0..np {
        let w = model.profile_prior(idx);
        for r in 0..k {
            objective[var(idx, r)] = w * v[r][idx];
        }
    }
    let mut lp = LinearProgram::new(objective);
    for idx in 0..np {
        let mut row = vec![0.0; np * k];
        for r in 0..k {
            row[var(idx, r)] = 1.0;
        }
        lp.add_eq(row, 1.0);
    }

    // One row per (sender, non-degenerate test belief).
    let mut constraints: Vec<(usize, Vec<f64>, Vec<f64>, f64)> = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        let sender = model.sender(i)?;
        for tb in set.beliefs.iter().filter(|b| b.kind == BeliefKind::Vertex) {
            let mu = tb.belief.probs();
            let grim = sender
                .expected_payoffs(mu)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let mut row = vec![0.0; np * k];
            for idx in 0..np {
                let t = model.profile(idx)[i];
                let w = mu[t] * model.others_weight(idx, i);
                if w == 0.0 {
                    continue;
                }
                for r in 0..k {
                    row[var(idx, r)] = w * sender.payoff[r][t];
                }
            }
            lp.add_ge(row.clone(), grim);
            constraints.push((i, mu.to_vec(), row, grim));
        }
    }

    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpStatus {
            status: sol.status.to_string(),
        });
    }
    let raw = &sol.x;
    let deterministic = (0..np).all(|idx| {
        let best = (0..k).map(|r| raw[var(idx, r)]).fold(f64::NEG_INFINITY, f64::max);
        best >= 1.0 - tol::TIE
    });
    let rows: Vec<Vec<f64>> = (0..np)
        .map(|idx| {
            let row: Vec<f64> = (0..k).map(|r| raw[var(idx, r)].max(0.0)).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let allocation = Allocation::new(model, rows)?;
    let binding = constraints
        .into_iter()
        .filter_map(|(sender, belief, row, grim)| {
            let lhs: f64 = row.iter().zip(raw).map(|(a, x)| a * x).sum();
            let slack = lhs - grim;
            (slack <= tol::IC).then_some(BindingConstraint { sender, belief, slack })
        })
        .collect();
    let value = receiver_value(model, &allocation)?;
    let first_best = unconstrained_optimum(model)?;
    Ok(Optimum {
        allocation,
        value,
        binding,
        deterministic,
        unconstrained_value: first_best.value,
        first_best_gap: first_best.value - value,
        unconstrained_ties: first_best.ties,
        pivots: sol.pivots,
    })
}

/// An outcome in the support of `p(t)` that another outcome beats for the
/// receiver and for every sender.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParetoViolation {
    pub profile: usize,
    pub outcome: usize,
    pub dominating: usize,
}

pub fn pareto_support_audit(model: &ModelSpec, p: &Allocation) -> Result<Vec<ParetoViolation>> {
    model.check_allocation(p)?;
    let v = model.receiver_payoff();
    let mut out = Vec::new();
    for idx in 0..model.num_profiles() {
        let profile = model.profile(idx);
        for (r, &prob) in p.row(idx).iter().enumerate() {
            if prob <= tol::TIE {
                continue;
            }
            for q in (0..model.num_outcomes()).filter(|&q| q != r) {
                let receiver = v[q][idx] > v[r][idx];
                let senders = model
                    .senders()
                    .iter()
                    .zip(profile)
                    .all(|(s, &t)| s.payoff[q][t] > s.payoff[r][t]);
                if receiver && senders {
                    out.push(ParetoViolation {
                        profile: idx,
                        outcome: r,
                        dominating: q,
                    });
                }
            }
        }
    }
    Ok(out)
}
