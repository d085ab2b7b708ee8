//! Implementability verdicts, optimal deviations, and cross-checks.
//!
//! Sender `i` can profitably deviate from truthful revelation exactly when
//! some posterior `μ` has `G_i(μ) > ⟨μ, U_i⟩`, where `G_i` is the
//! punishment value and `U_i` the interim payoff vector. The largest such
//! gap is computed four ways: over the finite test set, by a primal LP
//! over the simplex, by the dual minimax LP over outcome lotteries, and by
//! brute force over a rational grid.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::beliefs::{enumerate_vertices, pairwise_prefilter, PairwiseEntry, TestBeliefSet};
use crate::error::{Error, Result};
use crate::model::{interim_payoff, Allocation, Belief, ModelSpec};
use crate::optimizer::lp::{solve_lp, LinearProgram, LpStatus};
use crate::punishment::{argmin_with_ties, evaluate_mechanism};
use crate::tol;

/// Default grid denominator.
pub const DEFAULT_GRID: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Vertex,
    PrimalLp,
    DualLp,
    Grid { k: usize },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Vertex => f.write_str("vertex"),
            Method::PrimalLp => f.write_str("primal-lp"),
            Method::DualLp => f.write_str("dual-lp"),
            Method::Grid { k } if *k == DEFAULT_GRID => f.write_str("grid"),
            Method::Grid { k } => write!(f, "grid={k}"),
        }
    }
}

/// Accepts `vertex`, `primal-lp`, `dual-lp`, `grid`, and `grid=K`.
impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertex" => Ok(Method::Vertex),
            "primal-lp" => Ok(Method::PrimalLp),
            "dual-lp" => Ok(Method::DualLp),
            "grid" => Ok(Method::Grid { k: DEFAULT_GRID }),
            _ => s
                .strip_prefix("grid=")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k > 0)
                .map(|k| Method::Grid { k })
                .ok_or_else(|| Error::UnknownMethod(s.to_string())),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Bayes-plausible split of the prior: with weight `alpha` the sender
/// induces `pooled_belief`, and with weight `residual[t]` reveals `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationDistribution {
    pub alpha: f64,
    pub pooled_belief: Vec<f64>,
    pub residual: Vec<f64>,
}

impl DeviationDistribution {
    /// Largest `alpha` keeping `prior - alpha * pooled` nonnegative.
    pub fn split(prior: &[f64], pooled: &[f64]) -> Self {
        let alpha = prior
            .iter()
            .zip(pooled)
            .filter(|(_, &m)| m > 0.0)
            .map(|(p, m)| p / m)
            .fold(1.0f64, f64::min);
        let residual = prior
            .iter()
            .zip(pooled)
            .map(|(p, m)| (p - alpha * m).max(0.0))
            .collect();
        Self {
            alpha,
            pooled_belief: pooled.to_vec(),
            residual,
        }
    }

    /// `alpha * pooled + residual`, which equals the prior.
    pub fn reconstruct(&self) -> Vec<f64> {
        self.pooled_belief
            .iter()
            .zip(&self.residual)
            .map(|(m, r)| self.alpha * m + r)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub sender: usize,
    pub implementable: bool,
    /// Set when the gap is positive but within tolerance.
    pub boundary: bool,
    pub worst_belief: Belief,
    pub deviation_gap: f64,
    pub grim_set: Vec<usize>,
    /// Every evaluated belief whose gap is within tolerance of the maximum.
    /// The LP methods report only their optimal point.
    pub maximizers: Vec<Belief>,
    pub deviation_distribution: DeviationDistribution,
    pub method: Method,
    /// Minimax outcome lottery, reported by the dual LP.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lottery: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplementabilityReport {
    pub implementable: bool,
    pub senders: Vec<DeviationReport>,
}

/// `G_i(μ) - ⟨μ, U_i⟩` for the sender that `mu` belongs to.
pub fn deviation_gap_at(model: &ModelSpec, p: &Allocation, mu: &Belief) -> Result<f64> {
    model.check_belief(mu)?;
    let interim = interim_payoff(model, p, mu.sender())?;
    Ok(gap_with(model, mu, &interim))
}

fn gap_with(model: &ModelSpec, mu: &Belief, interim: &[f64]) -> f64 {
    let sender = &model.senders()[mu.sender()];
    let grim = sender
        .expected_payoffs(mu.probs())
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    grim - mu.dot(interim)
}

/// Check sender `i` with the given method.
pub fn check_sender_ic(model: &ModelSpec, p: &Allocation, i: usize, method: Method) -> Result<DeviationReport> {
    model.sender(i)?;
    match method {
        Method::Vertex => check_over_set(model, p, i, &enumerate_vertices(model, i)?),
        Method::PrimalLp => check_primal(model, p, i),
        Method::DualLp => check_dual(model, p, i),
        Method::Grid { k } => {
            let n = model.senders()[i].num_types();
            let beliefs: Vec<Belief> = grid_beliefs(n, k).into_iter().map(|probs| Belief::from_raw(i, probs)).collect();
            let interim = interim_payoff(model, p, i)?;
            Ok(report_from_candidates(model, i, &interim, &beliefs, method))
        }
    }
}

/// Vertex method against a precomputed test set.
pub fn check_over_set(model: &ModelSpec, p: &Allocation, i: usize, set: &TestBeliefSet) -> Result<DeviationReport> {
    let interim = interim_payoff(model, p, i)?;
    let beliefs: Vec<Belief> = set.beliefs.iter().map(|b| b.belief.clone()).collect();
    Ok(report_from_candidates(model, i, &interim, &beliefs, Method::Vertex))
}

fn report_from_candidates(
    model: &ModelSpec,
    i: usize,
    interim: &[f64],
    beliefs: &[Belief],
    method: Method,
) -> DeviationReport {
    let gaps: Vec<f64> = beliefs.iter().map(|b| gap_with(model, b, interim)).collect();
    let (best, &gap) = gaps
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (k, g)| if *g > *acc.1 { (k, g) } else { acc });
    let maximizers = beliefs
        .iter()
        .zip(&gaps)
        .filter(|(_, &g)| g >= gap - tol::IC)
        .map(|(b, _)| b.clone())
        .collect();
    build_report(model, i, beliefs[best].clone(), gap, maximizers, method, None)
}

fn build_report(
    model: &ModelSpec,
    i: usize,
    worst: Belief,
    gap: f64,
    maximizers: Vec<Belief>,
    method: Method,
    lottery: Option<Vec<f64>>,
) -> DeviationReport {
    let sender = &model.senders()[i];
    let grim_set = argmin_with_ties(&sender.expected_payoffs(worst.probs())).0;
    DeviationReport {
        sender: i,
        implementable: gap <= tol::IC,
        boundary: gap > 0.0 && gap <= tol::IC,
        deviation_distribution: DeviationDistribution::split(&sender.prior, worst.probs()),
        worst_belief: worst,
        deviation_gap: gap,
        grim_set,
        maximizers,
        method,
        lottery,
    }
}

/// `c[r][t] = u_i(r,t) - U_i(t)`.
fn relative_payoffs(model: &ModelSpec, i: usize, interim: &[f64]) -> Vec<Vec<f64>> {
    model.senders()[i]
        .payoff
        .iter()
        .map(|row| row.iter().zip(interim).map(|(u, v)| u - v).collect())
        .collect()
}

fn require_optimal(status: LpStatus) -> Result<()> {
    match status {
        LpStatus::Optimal => Ok(()),
        other => Err(Error::LpStatus {
            status: other.to_string(),
        }),
    }
}

/// max z  s.t.  z <= Σ_t μ(t) c[r][t] for all r,  μ in the simplex.
fn check_primal(model: &ModelSpec, p: &Allocation, i: usize) -> Result<DeviationReport> {
    let interim = interim_payoff(model, p, i)?;
    let c = relative_payoffs(model, i, &interim);
    let n = interim.len();
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::new(objective);
    lp.lower[n] = None;
    for row in &c {
        let mut a: Vec<f64> = row.iter().map(|x| -x).collect();
        a.push(1.0);
        lp.add_le(a, 0.0);
    }
    let mut norm = vec![1.0; n];
    norm.push(0.0);
    lp.add_eq(norm, 1.0);
    let sol = solve_lp(&lp)?;
    require_optimal(sol.status)?;
    let worst = Belief::from_raw(i, sol.x[..n].to_vec());
    Ok(build_report(
        model,
        i,
        worst.clone(),
        sol.value,
        vec![worst],
        Method::PrimalLp,
        None,
    ))
}

/// min_ρ max_t Σ_r ρ(r) c[r][t], written as max -w subject to
/// Σ_r ρ(r) c[r][t] <= w. The multipliers of the `t` rows form the worst
/// belief.
fn check_dual(model: &ModelSpec, p: &Allocation, i: usize) -> Result<DeviationReport> {
    let interim = interim_payoff(model, p, i)?;
    let c = relative_payoffs(model, i, &interim);
    let k = c.len();
    let n = interim.len();
    let mut objective = vec![0.0; k + 1];
    objective[k] = -1.0;
    let mut lp = LinearProgram::new(objective);
    lp.lower[k] = None;
    for t in 0..n {
        let mut a: Vec<f64> = c.iter().map(|row| row[t]).collect();
        a.push(-1.0);
        lp.add_le(a, 0.0);
    }
    let mut norm = vec![1.0; k];
    norm.push(0.0);
    lp.add_eq(norm, 1.0);
    let sol = solve_lp(&lp)?;
    require_optimal(sol.status)?;
    let duals = sol.ineq_duals.clone();
    let mass: f64 = duals.iter().sum();
    if mass.is_nan() || mass <= 0.5 {
        return Err(Error::LpStatus {
            status: format!("optimal with degenerate multipliers (mass {mass})"),
        });
    }
    let worst = Belief::from_raw(i, duals);
    let lottery: Vec<f64> = sol.x[..k].iter().map(|x| x.max(0.0)).collect();
    Ok(build_report(
        model,
        i,
        worst.clone(),
        -sol.value,
        vec![worst],
        Method::DualLp,
        Some(lottery),
    ))
}

/// All probability vectors of length `n` with entries in `{0, 1/k, ..., 1}`.
pub fn grid_beliefs(n: usize, k: usize) -> Vec<Vec<f64>> {
    fn fill(slot: usize, remaining: usize, counts: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<f64>>) {
        let n = counts.len();
        if slot + 1 == n {
            counts[slot] = remaining;
            out.push(counts.iter().map(|&c| c as f64 / k as f64).collect());
            return;
        }
        for c in 0..=remaining {
            counts[slot] = c;
            fill(slot + 1, remaining - c, counts, k, out);
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        fill(0, k, &mut vec![0; n], k, &mut out);
    }
    out
}

/// Every sender with the vertex method; implementable iff all pass.
pub fn check_implementable(model: &ModelSpec, p: &Allocation) -> Result<ImplementabilityReport> {
    check_implementable_with(model, p, Method::Vertex)
}

pub fn check_implementable_with(model: &ModelSpec, p: &Allocation, method: Method) -> Result<ImplementabilityReport> {
    let senders = (0..model.num_senders())
        .map(|i| check_sender_ic(model, p, i, method))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImplementabilityReport {
        implementable: senders.iter().all(|r| r.implementable),
        senders,
    })
}

/// As [`check_implementable_with`], one thread per sender. Reports come
/// back in sender order.
pub fn check_implementable_parallel(model: &ModelSpec, p: &Allocation, method: Method) -> Result<ImplementabilityReport> {
    let results: Vec<Result<DeviationReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..model.num_senders())
            .map(|i| scope.spawn(move || check_sender_ic(model, p, i, method)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sender check panicked"))
            .collect()
    });
    let senders = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ImplementabilityReport {
        implementable: senders.iter().all(|r| r.implementable),
        senders,
    })
}

/// Vertex-method checker that enumerates each sender's test set once.
#[derive(Debug, Clone)]
pub struct IcChecker<'a> {
    model: &'a ModelSpec,
    sets: Vec<TestBeliefSet>,
}

impl<'a> IcChecker<'a> {
    pub fn new(model: &'a ModelSpec) -> Result<Self> {
        let sets = (0..model.num_senders())
            .map(|i| enumerate_vertices(model, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model, sets })
    }

    pub fn test_set(&self, i: usize) -> &TestBeliefSet {
        &self.sets[i]
    }

    pub fn check_sender(&self, p: &Allocation, i: usize) -> Result<DeviationReport> {
        check_over_set(self.model, p, i, &self.sets[i])
    }

    pub fn check(&self, p: &Allocation) -> Result<ImplementabilityReport> {
        let senders = (0..self.model.num_senders())
            .map(|i| self.check_sender(p, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(ImplementabilityReport {
            implementable: senders.iter().all(|r| r.implementable),
            senders,
        })
    }

    pub fn is_implementable(&self, p: &Allocation) -> Result<bool> {
        for i in 0..self.model.num_senders() {
            if !self.check_sender(p, i)?.implementable {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Per sender, whether the only binding belief is the prior itself.
pub fn experiment_implementable(model: &ModelSpec, p: &Allocation) -> Result<Vec<bool>> {
    (0..model.num_senders())
        .map(|i| {
            let prior = Belief::new(i, model.senders()[i].prior.clone())?;
            Ok(deviation_gap_at(model, p, &prior)? <= tol::IC)
        })
        .collect()
}

/// The most profitable two-type indifference belief, if any beats tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseViolation {
    pub entry: PairwiseEntry,
    pub gap: f64,
}

/// Runs only the two-type prefilter. Finding nothing does not certify
/// implementability: profitable pools may need three or more types.
pub fn pairwise_violation(model: &ModelSpec, p: &Allocation, i: usize) -> Result<Option<PairwiseViolation>> {
    let interim = interim_payoff(model, p, i)?;
    let set = pairwise_prefilter(model, i)?;
    let best = set
        .entries
        .into_iter()
        .map(|entry| {
            let gap = gap_with(model, &entry.belief, &interim);
            PairwiseViolation { entry, gap }
        })
        .filter(|v| v.gap > tol::IC)
        .fold(None::<PairwiseViolation>, |best, v| match best {
            Some(b) if b.gap >= v.gap => Some(b),
            _ => Some(v),
        });
    Ok(best)
}

/// Sender `i`'s ex-ante payoff when it follows `report`'s deviation and the
/// others reveal truthfully, evaluated through the grim-trigger mechanism.
pub fn deviation_payoff(model: &ModelSpec, p: &Allocation, report: &DeviationReport) -> Result<f64> {
    let i = report.sender;
    let sender = model.sender(i)?;
    let dist = &report.deviation_distribution;
    let n = sender.num_types();
    let mut total = 0.0;
    for idx in 0..model.num_profiles() {
        let profile = model.profile(idx);
        let w = model.others_weight(idx, i);
        let t = profile[i];
        let others: Vec<Belief> = profile
            .iter()
            .enumerate()
            .map(|(j, &tj)| Belief::degenerate(j, model.senders()[j].num_types(), tj))
            .collect();
        let payoff_of = |d: &[f64]| -> f64 { d.iter().zip(&sender.payoff).map(|(q, u)| q * u[t]).sum() };

        // Type t lands on the pooled belief with probability
        // alpha * pooled[t], and on its own point mass with residual[t].
        let revealed = evaluate_mechanism(model, p, &others)?;
        total += w * dist.residual[t] * payoff_of(&revealed.dist);
        if dist.alpha * dist.pooled_belief[t] > 0.0 {
            let mut beliefs = others.clone();
            beliefs[i] = if report.worst_belief.degenerate_type(tol::TIE).is_some() {
                Belief::degenerate(i, n, t)
            } else {
                report.worst_belief.clone()
            };
            let pooled = evaluate_mechanism(model, p, &beliefs)?;
            total += w * dist.alpha * dist.pooled_belief[t] * payoff_of(&pooled.dist);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::SenderSpec;

    const ALL: [Method; 4] = [Method::Vertex, Method::PrimalLp, Method::DualLp, Method::Grid { k: 40 }];

    #[test]
    fn method_parsing() {
        assert_eq!("vertex".parse::<Method>().unwrap(), Method::Vertex);
        assert_eq!("primal-lp".parse::<Method>().unwrap(), Method::PrimalLp);
        assert_eq!("dual-lp".parse::<Method>().unwrap(), Method::DualLp);
        assert_eq!("grid".parse::<Method>().unwrap(), Method::Grid { k: 40 });
        assert_eq!("grid=7".parse::<Method>().unwrap(), Method::Grid { k: 7 });
        assert!(matches!("simplex".parse::<Method>(), Err(Error::UnknownMethod(_))));
        assert!("grid=0".parse::<Method>().is_err());
        for m in ALL.into_iter().chain([Method::Grid { k: 9 }]) {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
    }

    #[test]
    fn grid_enumerates_compositions() {
        let all = grid_beliefs(3, 4);
        assert_eq!(all.len(), 15);
        for (a, x) in all.iter().enumerate() {
            assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(all[a + 1..].iter().all(|y| y != x));
        }
        assert_eq!(grid_beliefs(1, 40).len(), 1);
        assert_eq!(grid_beliefs(2, 40).len(), 41);
        assert_eq!(grid_beliefs(4, 5).len(), 56);
    }

    #[test]
    fn partition_counterexample_fails() {
        let m = partition_counterexample();
        let p = Allocation::deterministic(&m, &[3, 0, 0]).unwrap();
        let mid = Belief::new(0, vec![0.5, 0.0, 0.5]).unwrap();
        assert!((deviation_gap_at(&m, &p, &mid).unwrap() - 10.0).abs() < 1e-12);
        for method in ALL {
            let r = check_sender_ic(&m, &p, 0, method).unwrap();
            assert!(!r.implementable, "{method}");
            assert!(r.deviation_gap >= 10.0 - 1e-9, "{method}: {}", r.deviation_gap);
        }
        assert_eq!(experiment_implementable(&m, &p).unwrap(), vec![true]);
    }

    #[test]
    fn cyclic_counterexample_needs_three_types() {
        let m = cyclic_counterexample();
        let p = Allocation::deterministic(&m, &[1, 2, 0]).unwrap();
        let r = check_sender_ic(&m, &p, 0, Method::Vertex).unwrap();
        assert!(!r.implementable);
        assert!((r.deviation_gap - 33.0).abs() < 1e-9);
        assert!(r.worst_belief.l1_distance(&[1.0 / 3.0; 3]) < 1e-8);
        assert_eq!(r.grim_set, vec![0, 1, 2]);
        let dual = check_sender_ic(&m, &p, 0, Method::DualLp).unwrap();
        assert!((dual.deviation_gap - 33.0).abs() < 1e-9);
        let lottery = dual.lottery.unwrap();
        assert!((lottery.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pairwise_violation(&m, &p, 0).unwrap().is_none());
        assert_eq!(experiment_implementable(&m, &p).unwrap(), vec![false]);
    }

    #[test]
    fn car_full_information_is_implementable() {
        let m = car(0.3);
        let p = Allocation::deterministic(&m, &[0, 1]).unwrap();
        for method in ALL {
            let r = check_sender_ic(&m, &p, 0, method).unwrap();
            assert!(r.implementable);
            assert!(r.deviation_gap.abs() < 1e-9, "{method}");
        }
        let r = check_sender_ic(&m, &p, 0, Method::Vertex).unwrap();
        assert_eq!(r.worst_belief.probs(), &[0.0, 1.0]);
        assert!(!r.boundary);
    }

    #[test]
    fn single_outcome_is_vacuously_implementable() {
        let m = ModelSpec::new(
            labels(&["only"]),
            vec![SenderSpec {
                name: "s".into(),
                types: labels(&["a", "b"]),
                prior: vec![0.5, 0.5],
                payoff: vec![vec![3.0, -1.0]],
            }],
            vec![vec![0.0, 0.0]],
        )
        .unwrap();
        let p = Allocation::constant(&m, 0).unwrap();
        let rep = check_implementable(&m, &p).unwrap();
        assert!(rep.implementable);
        assert!(rep.senders[0].deviation_gap.abs() < 1e-12);
    }

    #[test]
    fn deviation_distribution_is_bayes_plausible_and_profitable() {
        let m = partition_counterexample();
        let p = Allocation::deterministic(&m, &[3, 0, 0]).unwrap();
        let r = check_sender_ic(&m, &p, 0, Method::Vertex).unwrap();
        let d = &r.deviation_distribution;
        assert!(d.alpha > 0.0 && d.alpha <= 1.0);
        let back = d.reconstruct();
        for (a, b) in back.iter().zip(&m.senders()[0].prior) {
            assert!((a - b).abs() < 1e-12);
        }
        let interim = interim_payoff(&m, &p, 0).unwrap();
        let truthful: f64 = interim.iter().zip(&m.senders()[0].prior).map(|(u, q)| u * q).sum();
        let deviating = deviation_payoff(&m, &p, &r).unwrap();
        assert!((deviating - truthful - d.alpha * r.deviation_gap).abs() < 1e-8);
    }

    #[test]
    fn split_with_degenerate_belief() {
        let d = DeviationDistribution::split(&[0.2, 0.8], &[0.0, 1.0]);
        assert_eq!(d.alpha, 0.8);
        assert_eq!(d.residual, vec![0.2, 0.0]);
    }

    #[test]
    fn two_senders_parallel_matches_sequential() {
        let s = |name: &str, payoff: Vec<Vec<f64>>| SenderSpec {
            name: name.into(),
            types: labels(&["x", "y"]),
            prior: vec![0.4, 0.6],
            payoff,
        };
        let m = ModelSpec::new(
            labels(&["a", "b", "c"]),
            vec![
                s("s0", vec![vec![1.0, -2.0], vec![-1.0, 3.0], vec![0.0, 0.0]]),
                s("s1", vec![vec![2.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]]),
            ],
            vec![vec![0.0; 4]; 3],
        )
        .unwrap();
        let p = Allocation::deterministic(&m, &[0, 1, 2, 0]).unwrap();
        let seq = check_implementable_with(&m, &p, Method::Vertex).unwrap();
        let par = check_implementable_parallel(&m, &p, Method::Vertex).unwrap();
        assert_eq!(seq, par);
        let checker = IcChecker::new(&m).unwrap();
        assert_eq!(checker.check(&p).unwrap(), seq);
    }

    #[test]
    fn report_serializes_method_as_string() {
        let m = car(0.5);
        let p = Allocation::deterministic(&m, &[0, 1]).unwrap();
        let r = check_sender_ic(&m, &p, 0, Method::PrimalLp).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["method"], "primal-lp");
        assert!(v.get("lottery").is_none());
        assert_eq!(v["worst_belief"]["probs"].as_array().unwrap().len(), 2);
    }
}
