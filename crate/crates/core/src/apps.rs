//! Generators for three applications: grant allocation, auctions with
//! externalities, and pollution audits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Allocation, ModelSpec, SenderSpec};
use crate::tol;

/// Largest number of firms in an audit model; outcomes are all subsets.
pub const MAX_AUDIT_FIRMS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmParams {
    /// Receiver's cost of fining a clean firm.
    pub c: f64,
    /// A clean firm's gain from being fined.
    pub eps: f64,
    pub prior_pollute: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditParams {
    pub firms: Vec<FirmParams>,
}

impl AuditParams {
    pub fn validate(&self) -> Result<()> {
        if self.firms.is_empty() || self.firms.len() > MAX_AUDIT_FIRMS {
            return Err(Error::Validation(format!(
                "audit models take 1 to {MAX_AUDIT_FIRMS} firms, got {}",
                self.firms.len()
            )));
        }
        for (k, f) in self.firms.iter().enumerate() {
            let ok = f.c > 0.0 && f.eps > 0.0 && f.prior_pollute > 0.0 && f.prior_pollute < 1.0;
            if !ok || !f.c.is_finite() || !f.eps.is_finite() {
                return Err(Error::Validation(format!(
                    "firm {k}: need c > 0, eps > 0 and prior_pollute in (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// Label of the fine set encoded by bitmask `mask` (bit `i` set when firm
/// `i` is fined), with firms numbered from 1.
pub fn fine_set_label(mask: usize, firms: usize) -> String {
    let members: Vec<String> = (0..firms)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", members.join(","))
}

/// Outcomes are fine sets in bitmask order; each firm's type is `0`
/// (clean) or `1` (polluting).
pub fn gen_audit_model(params: &AuditParams) -> Result<ModelSpec> {
    params.validate()?;
    let n = params.firms.len();
    let k = 1usize << n;
    let outcomes = (0..k).map(|m| fine_set_label(m, n)).collect();
    let senders = params
        .firms
        .iter()
        .enumerate()
        .map(|(i, f)| SenderSpec {
            name: format!("firm{}", i + 1),
            types: vec!["0".into(), "1".into()],
            prior: vec![1.0 - f.prior_pollute, f.prior_pollute],
            payoff: (0..k)
                .map(|m| if m >> i & 1 == 1 { vec![f.eps, -1.0] } else { vec![0.0, 1.0] })
                .collect(),
        })
        .collect();
    let profiles = k; // two types per firm
    let receiver_payoff = (0..k)
        .map(|m| {
            (0..profiles)
                .map(|idx| {
                    (0..n)
                        .map(|i| {
                            // Row-major profile index: firm 0 is the slowest digit.
                            let polluting = idx >> (n - 1 - i) & 1 == 1;
                            let fined = m >> i & 1 == 1;
                            match (fined, polluting) {
                                (true, true) => 1.0,
                                (true, false) => -params.firms[i].c,
                                (false, true) => -1.0,
                                (false, false) => 0.0,
                            }
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    ModelSpec::new(outcomes, senders, receiver_payoff)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditClosedForm {
    /// Firms fined at every profile, zero-based.
    pub fine_set: Vec<usize>,
    /// Index of the fine set among the model's outcomes.
    pub outcome: usize,
    pub label: String,
    /// Firms at the indifference boundary; these are left unfined.
    pub indifferent: Vec<usize>,
}

/// Fine firm `i` at every profile iff `c_i / 2 < q_i / (1 - q_i)`.
pub fn audit_closed_form(params: &AuditParams) -> Result<AuditClosedForm> {
    params.validate()?;
    let mut fine_set = Vec::new();
    let mut indifferent = Vec::new();
    for (i, f) in params.firms.iter().enumerate() {
        let lhs = f.c / 2.0;
        let rhs = f.prior_pollute / (1.0 - f.prior_pollute);
        if (lhs - rhs).abs() <= tol::TIE * lhs.abs().max(rhs.abs()).max(1.0) {
            indifferent.push(i);
        } else if lhs < rhs {
            fine_set.push(i);
        }
    }
    let outcome = fine_set.iter().map(|i| 1usize << i).sum();
    Ok(AuditClosedForm {
        label: fine_set_label(outcome, params.firms.len()),
        fine_set,
        outcome,
        indifferent,
    })
}

fn uniform_priors(sizes: &[usize]) -> Vec<Vec<f64>> {
    sizes.iter().map(|&n| vec![1.0 / n as f64; n]).collect()
}

fn check_tables(f: &[Vec<f64>], prior: &Option<Vec<Vec<f64>>>) -> Result<Vec<Vec<f64>>> {
    if f.is_empty() {
        return Err(Error::Validation("at least one sender is required".into()));
    }
    let sizes: Vec<usize> = f.iter().map(Vec::len).collect();
    if sizes.contains(&0) {
        return Err(Error::Validation("every sender needs at least one type".into()));
    }
    match prior {
        None => Ok(uniform_priors(&sizes)),
        Some(p) if p.len() == f.len() && p.iter().zip(&sizes).all(|(p, &n)| p.len() == n) => Ok(p.clone()),
        Some(_) => Err(Error::Dimension("prior shape differs from f".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrantParams {
    pub lambda: Vec<f64>,
    /// `f[i][t]`: sender `i`'s payoff from winning.
    pub f: Vec<Vec<f64>>,
    /// `g[i][t]`: sender `i`'s payoff when another sender wins.
    pub g: Vec<Vec<f64>>,
    /// Uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrantInstance {
    pub model: ModelSpec,
    /// The λ-efficient allocation.
    pub allocation: Allocation,
    pub warnings: Vec<String>,
}

/// One outcome per sender (who receives the grant). The receiver
/// maximizes `Σ λ_i u_i`, breaking ties toward the lowest sender index.
pub fn gen_grant_model(params: &GrantParams) -> Result<GrantInstance> {
    let priors = check_tables(&params.f, &params.prior)?;
    let n = params.f.len();
    if params.g.len() != n || params.g.iter().zip(&params.f).any(|(g, f)| g.len() != f.len()) {
        return Err(Error::Dimension("g shape differs from f".into()));
    }
    if params.lambda.len() != n {
        return Err(Error::Dimension(format!("{} weights for {n} senders", params.lambda.len())));
    }
    let sum: f64 = params.lambda.iter().sum();
    if params.lambda.iter().any(|&l| l.is_nan() || l < 0.0) || (sum - 1.0).abs() > tol::SUM {
        return Err(Error::NotNormalized {
            what: "lambda".into(),
            sum,
        });
    }
    let mut warnings = Vec::new();
    for i in 0..n {
        let d: Vec<f64> = params.f[i].iter().zip(&params.g[i]).map(|(a, b)| a - b).collect();
        if d.windows(2).any(|w| w[1] < w[0] - tol::TIE) {
            warnings.push(format!(
                "sender {}: f - g is not weakly increasing in type; the efficient allocation may fail to be implementable",
                i + 1
            ));
        }
    }
    let names: Vec<String> = (1..=n).map(|i| format!("sender{i}")).collect();
    let senders: Vec<SenderSpec> = (0..n)
        .map(|i| SenderSpec {
            name: names[i].clone(),
            types: (0..params.f[i].len()).map(|t| t.to_string()).collect(),
            prior: priors[i].clone(),
            payoff: (0..n)
                .map(|r| if r == i { params.f[i].clone() } else { params.g[i].clone() })
                .collect(),
        })
        .collect();
    let skeleton = ModelSpec::new(names.clone(), senders.clone(), vec![vec![0.0; num_profiles(&senders)]; n])?;
    let receiver_payoff: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            (0..skeleton.num_profiles())
                .map(|idx| {
                    let t = skeleton.profile(idx);
                    (0..n).map(|i| params.lambda[i] * senders[i].payoff[r][t[i]]).sum()
                })
                .collect()
        })
        .collect();
    let model = ModelSpec::new(names, senders, receiver_payoff)?;
    let choices: Vec<usize> = (0..model.num_profiles())
        .map(|idx| first_argmax((0..n).map(|r| model.receiver_payoff()[r][idx])))
        .collect();
    let allocation = Allocation::deterministic(&model, &choices)?;
    Ok(GrantInstance {
        model,
        allocation,
        warnings,
    })
}

fn num_profiles(senders: &[SenderSpec]) -> usize {
    senders.iter().map(SenderSpec::num_types).product()
}

/// Index of the first maximum, treating values within tie tolerance as equal.
fn first_argmax(values: impl Iterator<Item = f64>) -> usize {
    let values: Vec<f64> = values.collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&v| v >= best - tol::TIE).unwrap_or(0)
}

/// What the auction falls back to when one sender is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutsideOption {
    /// The efficient allocation among the remaining senders, ignoring the
    /// removed sender's externality. Depends only on the others' types.
    #[default]
    Removed,
    /// The best remaining winner when scores still count the removed
    /// sender's externality. Depends on the removed sender's type too.
    Displaced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionParams {
    /// `f[i][t]`: winner's value.
    pub f: Vec<Vec<f64>>,
    /// `g[i][r][t]`: loss to sender `i` when sender `r` wins.
    pub g: Vec<Vec<Vec<f64>>>,
    /// Upper bound on transfers; unbounded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub outside: OutsideOption,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapViolation {
    pub profile: usize,
    pub sender: usize,
    pub transfer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuctionInstance {
    pub model: ModelSpec,
    /// The surplus-maximizing allocation.
    pub allocation: Allocation,
    pub winners: Vec<usize>,
    /// `removed[profile][i]`: the winner once sender `i` is removed; `None`
    /// when nobody is left.
    pub removed: Vec<Vec<Option<usize>>>,
    /// `transfers[profile][i]`.
    pub transfers: Vec<Vec<f64>>,
    /// `u_i(winner) - x_i - u_i(removed winner)`; zero when EPIR binds.
    pub epir_residuals: Vec<Vec<f64>>,
    /// `(profile, sender)` pairs where a positive transfer and winning
    /// disagree.
    pub sign_mismatches: Vec<(usize, usize)>,
    pub cap_violations: Vec<CapViolation>,
}

/// One outcome per sender (who wins). Sender `i` gets `f_i(t_i)` from
/// winning and `-g_i(r, t_i)` when `r` wins; the receiver maximizes total
/// surplus. Transfers charge each sender its payoff gain over the efficient
/// allocation computed without it.
pub fn gen_auction_model(params: &AuctionParams) -> Result<AuctionInstance> {
    let priors = check_tables(&params.f, &params.prior)?;
    let n = params.f.len();
    let shape_ok = params.g.len() == n
        && params
            .g
            .iter()
            .zip(&params.f)
            .all(|(gi, fi)| gi.len() == n && gi.iter().all(|row| row.len() == fi.len()));
    if !shape_ok {
        return Err(Error::Dimension("g must be indexed [sender][winner][type]".into()));
    }
    if params.f.iter().flatten().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::Validation("f must be strictly positive".into()));
    }
    if params.g.iter().flatten().flatten().any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::Validation("g must be nonnegative".into()));
    }
    if let Some(cap) = params.cap {
        if cap.is_nan() {
            return Err(Error::Validation("cap is not a number".into()));
        }
    }
    let names: Vec<String> = (1..=n).map(|i| format!("sender{i}")).collect();
    let senders: Vec<SenderSpec> = (0..n)
        .map(|i| SenderSpec {
            name: names[i].clone(),
            types: (0..params.f[i].len()).map(|t| t.to_string()).collect(),
            prior: priors[i].clone(),
            payoff: (0..n)
                .map(|r| {
                    if r == i {
                        params.f[i].clone()
                    } else {
                        params.g[i][r].iter().map(|x| -x).collect()
                    }
                })
                .collect(),
        })
        .collect();
    let skeleton = ModelSpec::new(names.clone(), senders.clone(), vec![vec![0.0; num_profiles(&senders)]; n])?;
    let np = skeleton.num_profiles();
    let u = |i: usize, r: usize, t: &[usize]| senders[i].payoff[r][t[i]];
    let receiver_payoff: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            (0..np)
                .map(|idx| {
                    let t = skeleton.profile(idx);
                    (0..n).map(|j| u(j, r, t)).sum()
                })
                .collect()
        })
        .collect();
    let model = ModelSpec::new(names, senders.clone(), receiver_payoff)?;

    let mut winners = Vec::with_capacity(np);
    let mut removed = Vec::with_capacity(np);
    let mut transfers = Vec::with_capacity(np);
    let mut epir_residuals = Vec::with_capacity(np);
    let mut sign_mismatches = Vec::new();
    let mut cap_violations = Vec::new();
    for idx in 0..np {
        let t = model.profile(idx);
        let winner = first_argmax((0..n).map(|r| model.receiver_payoff()[r][idx]));
        let mut row_removed = Vec::with_capacity(n);
        let mut row_x = Vec::with_capacity(n);
        let mut row_res = Vec::with_capacity(n);
        for i in 0..n {
            let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let alt = (!others.is_empty()).then(|| {
                let surplus = others.iter().map(|&k| match params.outside {
                    OutsideOption::Removed => others.iter().map(|&j| u(j, k, t)).sum::<f64>(),
                    OutsideOption::Displaced => model.receiver_payoff()[k][idx],
                });
                others[first_argmax(surplus)]
            });
            let outside = alt.map_or(0.0, |k| u(i, k, t));
            let x = u(i, winner, t) - outside;
            row_res.push(u(i, winner, t) - x - outside);
            if (x > tol::TIE) != (winner == i) {
                sign_mismatches.push((idx, i));
            }
            if let Some(cap) = params.cap {
                if x > cap {
                    cap_violations.push(CapViolation {
                        profile: idx,
                        sender: i,
                        transfer: x,
                    });
                }
            }
            row_removed.push(alt);
            row_x.push(x);
        }
        winners.push(winner);
        removed.push(row_removed);
        transfers.push(row_x);
        epir_residuals.push(row_res);
    }
    let allocation = Allocation::deterministic(&model, &winners)?;
    Ok(AuctionInstance {
        model,
        allocation,
        winners,
        removed,
        transfers,
        epir_residuals,
        sign_mismatches,
        cap_violations,
    })
}
