//! Problem instances, beliefs, and allocations.
//!
//! Type profiles are flattened row-major over senders in declaration
//! order: the last sender's type varies fastest. That index convention is
//! part of the JSON format for `receiver_payoff`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// One sender: its type space, full-support prior, and payoff matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenderSpec {
    pub name: String,
    pub types: Vec<String>,
    pub prior: Vec<f64>,
    /// `payoff[r][t]` is the sender's payoff from outcome `r` at own type `t`.
    pub payoff: Vec<Vec<f64>>,
}

impl SenderSpec {
    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    /// Expected payoff of every pure outcome at belief `probs`.
    pub fn expected_payoffs(&self, probs: &[f64]) -> Vec<f64> {
        self.payoff
            .iter()
            .map(|row| row.iter().zip(probs).map(|(u, m)| u * m).sum())
            .collect()
    }

    fn validate(&self, num_outcomes: usize) -> Result<()> {
        if self.types.is_empty() {
            return Err(Error::Validation(format!(
                "sender `{}` has no types",
                self.name
            )));
        }
        if self.prior.len() != self.types.len() {
            return Err(Error::Dimension(format!(
                "sender `{}`: prior has {} entries for {} types",
                self.name,
                self.prior.len(),
                self.types.len()
            )));
        }
        if self.payoff.len() != num_outcomes {
            return Err(Error::Dimension(format!(
                "sender `{}`: payoff has {} rows for {} outcomes",
                self.name,
                self.payoff.len(),
                num_outcomes
            )));
        }
        for (r, row) in self.payoff.iter().enumerate() {
            if row.len() != self.types.len() {
                return Err(Error::Dimension(format!(
                    "sender `{}`: payoff row {r} has {} entries for {} types",
                    self.name,
                    row.len(),
                    self.types.len()
                )));
            }
            if row.iter().any(|u| !u.is_finite()) {
                return Err(Error::Validation(format!(
                    "sender `{}`: non-finite payoff in row {r}",
                    self.name
                )));
            }
        }
        if self.prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Validation(format!(
                "sender `{}`: prior has a negative or non-finite entry",
                self.name
            )));
        }
        let sum: f64 = self.prior.iter().sum();
        if (sum - 1.0).abs() > tol::SUM {
            return Err(Error::NotNormalized {
                what: format!("prior of sender `{}`", self.name),
                sum,
            });
        }
        if let Some((t, &mass)) = self.prior.iter().enumerate().find(|(_, p)| **p <= 0.0) {
            return Err(Error::NotFullSupport {
                sender: self.name.clone(),
                type_label: self.types[t].clone(),
                mass,
            });
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct ModelDoc {
    outcomes: Vec<String>,
    senders: Vec<SenderSpec>,
    receiver_payoff: Vec<Vec<f64>>,
}

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc")]
pub struct ModelSpec {
    outcomes: Vec<String>,
    senders: Vec<SenderSpec>,
    /// `receiver_payoff[r][profile]`.
    receiver_payoff: Vec<Vec<f64>>,
    #[serde(skip)]
    profiles: Vec<Vec<usize>>,
}

impl TryFrom<ModelDoc> for ModelSpec {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        ModelSpec::new(doc.outcomes, doc.senders, doc.receiver_payoff)
    }
}

impl ModelSpec {
    pub fn new(
        outcomes: Vec<String>,
        senders: Vec<SenderSpec>,
        receiver_payoff: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if senders.is_empty() {
            return Err(Error::Validation("model has no senders".into()));
        }
        if outcomes.is_empty() {
            return Err(Error::Validation("model has no outcomes".into()));
        }
        for s in &senders {
            s.validate(outcomes.len())?;
        }
        let dims: Vec<usize> = senders.iter().map(SenderSpec::num_types).collect();
        let profiles = enumerate_profiles(&dims);
        if receiver_payoff.len() != outcomes.len() {
            return Err(Error::Dimension(format!(
                "receiver_payoff has {} rows for {} outcomes",
                receiver_payoff.len(),
                outcomes.len()
            )));
        }
        for (r, row) in receiver_payoff.iter().enumerate() {
            if row.len() != profiles.len() {
                return Err(Error::Dimension(format!(
                    "receiver_payoff row {r} has {} entries for {} type profiles",
                    row.len(),
                    profiles.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "non-finite receiver payoff in row {r}"
                )));
            }
        }
        Ok(Self {
            outcomes,
            senders,
            receiver_payoff,
            profiles,
        })
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn senders(&self) -> &[SenderSpec] {
        &self.senders
    }

    pub fn num_senders(&self) -> usize {
        self.senders.len()
    }

    pub fn sender(&self, i: usize) -> Result<&SenderSpec> {
        self.senders.get(i).ok_or(Error::IndexOutOfRange {
            what: "sender",
            index: i,
            len: self.senders.len(),
        })
    }

    pub fn receiver_payoff(&self) -> &[Vec<f64>] {
        &self.receiver_payoff
    }

    pub fn num_profiles(&self) -> usize {
        self.profiles.len()
    }

    /// Per-sender type indices of the flattened profile `idx`.
    pub fn profile(&self, idx: usize) -> &[usize] {
        &self.profiles[idx]
    }

    pub fn profile_index(&self, types: &[usize]) -> Result<usize> {
        if types.len() != self.senders.len() {
            return Err(Error::Dimension(format!(
                "profile has {} coordinates for {} senders",
                types.len(),
                self.senders.len()
            )));
        }
        let mut idx = 0;
        for (s, &t) in self.senders.iter().zip(types) {
            if t >= s.num_types() {
                return Err(Error::IndexOutOfRange {
                    what: "type",
                    index: t,
                    len: s.num_types(),
                });
            }
            idx = idx * s.num_types() + t;
        }
        Ok(idx)
    }

    /// Prior probability of profile `idx` under the independent product prior.
    pub fn profile_prior(&self, idx: usize) -> f64 {
        self.profiles[idx]
            .iter()
            .zip(&self.senders)
            .map(|(&t, s)| s.prior[t])
            .product()
    }

    /// Prior probability of the other senders' coordinates of profile `idx`,
    /// i.e. the profile prior with sender `i`'s own factor removed.
    pub fn others_weight(&self, idx: usize, i: usize) -> f64 {
        self.profiles[idx]
            .iter()
            .zip(&self.senders)
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (&t, s))| s.prior[t])
            .product()
    }

    /// Copy of the model with sender `i`'s prior replaced.
    pub fn with_prior(&self, i: usize, prior: Vec<f64>) -> Result<Self> {
        let mut senders = self.senders.clone();
        senders
            .get_mut(i)
            .ok_or(Error::IndexOutOfRange {
                what: "sender",
                index: i,
                len: self.senders.len(),
            })?
            .prior = prior;
        Self::new(self.outcomes.clone(), senders, self.receiver_payoff.clone())
    }

    /// Copy of the model with a different receiver payoff tensor.
    pub fn with_receiver_payoff(&self, receiver_payoff: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.outcomes.clone(), self.senders.clone(), receiver_payoff)
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }

    pub fn check_belief(&self, belief: &Belief) -> Result<()> {
        let s = self.sender(belief.sender)?;
        if belief.probs.len() != s.num_types() {
            return Err(Error::Dimension(format!(
                "belief for sender `{}` has {} entries for {} types",
                s.name,
                belief.probs.len(),
                s.num_types()
            )));
        }
        Ok(())
    }

    pub fn check_allocation(&self, p: &Allocation) -> Result<()> {
        if p.rows.len() != self.num_profiles() {
            return Err(Error::Dimension(format!(
                "allocation has {} rows for {} type profiles",
                p.rows.len(),
                self.num_profiles()
            )));
        }
        if let Some(row) = p.rows.iter().find(|r| r.len() != self.num_outcomes()) {
            return Err(Error::Dimension(format!(
                "allocation row has {} entries for {} outcomes",
                row.len(),
                self.num_outcomes()
            )));
        }
        Ok(())
    }
}

fn enumerate_profiles(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut types = vec![0; dims.len()];
            for (slot, &d) in types.iter_mut().zip(dims).rev() {
                *slot = idx % d;
                idx /= d;
            }
            types
        })
        .collect()
}

/// Parses and validates a model document.
pub fn load_model(document: &str) -> Result<ModelSpec> {
    Ok(serde_json::from_str(document)?)
}

/// A posterior belief over one sender's types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    sender: usize,
    probs: Vec<f64>,
}

impl Belief {
    pub fn new(sender: usize, probs: Vec<f64>) -> Result<Self> {
        check_distribution(&probs, "belief")?;
        Ok(Self { sender, probs })
    }

    /// Builds a belief from a vector known to be a distribution up to
    /// rounding; tiny negative entries are clipped.
    pub(crate) fn from_raw(sender: usize, mut probs: Vec<f64>) -> Self {
        for p in probs.iter_mut() {
            if *p <= 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if sum > 0.0 && (sum - 1.0).abs() > f64::EPSILON {
            for p in probs.iter_mut() {
                *p /= sum;
            }
        }
        Self { sender, probs }
    }

    pub fn degenerate(sender: usize, num_types: usize, t: usize) -> Self {
        let mut probs = vec![0.0; num_types];
        probs[t] = 1.0;
        Self { sender, probs }
    }

    pub fn uniform(sender: usize, num_types: usize) -> Self {
        Self {
            sender,
            probs: vec![1.0 / num_types as f64; num_types],
        }
    }

    pub fn sender(&self) -> usize {
        self.sender
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The type this belief is a point mass on, if it is within `tol` of one.
    pub fn degenerate_type(&self, tol: f64) -> Option<usize> {
        self.probs.iter().position(|&p| p >= 1.0 - tol)
    }

    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.probs.len())
            .filter(|&t| self.probs[t] > tol)
            .collect()
    }

    pub fn l1_distance(&self, other: &[f64]) -> f64 {
        self.probs
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn dot(&self, values: &[f64]) -> f64 {
        self.probs.iter().zip(values).map(|(a, b)| a * b).sum()
    }
}

fn check_distribution(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Validation(format!("{what} is empty")));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Validation(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > tol::SUM {
        return Err(Error::NotNormalized {
            what: what.to_string(),
            sum,
        });
    }
    Ok(())
}

/// A map from type profiles to lotteries over outcomes, stored in
/// flattened profile order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    rows: Vec<Vec<f64>>,
}

impl Allocation {
    pub fn new(model: &ModelSpec, rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self { rows };
        model.check_allocation(&p)?;
        for row in &p.rows {
            check_distribution(row, "allocation row")?;
        }
        Ok(p)
    }

    /// Pure outcome `outcomes[idx]` at every profile `idx`.
    pub fn deterministic(model: &ModelSpec, outcomes: &[usize]) -> Result<Self> {
        if outcomes.len() != model.num_profiles() {
            return Err(Error::Dimension(format!(
                "{} outcomes for {} profiles",
                outcomes.len(),
                model.num_profiles()
            )));
        }
        let rows = outcomes
            .iter()
            .map(|&r| {
                if r >= model.num_outcomes() {
                    return Err(Error::IndexOutOfRange {
                        what: "outcome",
                        index: r,
                        len: model.num_outcomes(),
                    });
                }
                let mut row = vec![0.0; model.num_outcomes()];
                row[r] = 1.0;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn constant(model: &ModelSpec, r: usize) -> Result<Self> {
        Self::deterministic(model, &vec![r; model.num_profiles()])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, profile: usize) -> &[f64] {
        &self.rows[profile]
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Allocation, lambda: f64) -> Allocation {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                    .collect()
            })
            .collect();
        Allocation { rows }
    }

    /// Whether every row is within `tol` of a point mass.
    pub fn is_deterministic(&self, tol: f64) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().any(|&x| x >= 1.0 - tol))
    }

    pub fn to_doc(&self, model: &ModelSpec) -> AllocationDoc {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(idx, dist)| AllocationRow {
                profile: model
                    .profile(idx)
                    .iter()
                    .zip(model.senders())
                    .map(|(&t, s)| s.types[t].clone())
                    .collect(),
                dist: dist.clone(),
            })
            .collect();
        AllocationDoc { rows }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationRow {
    pub profile: Vec<String>,
    pub dist: Vec<f64>,
}

/// On-disk form of an allocation, keyed by type labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationDoc {
    pub rows: Vec<AllocationRow>,
}

impl AllocationDoc {
    pub fn into_allocation(self, model: &ModelSpec) -> Result<Allocation> {
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; model.num_profiles()];
        for row in self.rows {
            if row.profile.len() != model.num_senders() {
                return Err(Error::Dimension(format!(
                    "allocation profile {:?} has {} labels for {} senders",
                    row.profile,
                    row.profile.len(),
                    model.num_senders()
                )));
            }
            let types = row
                .profile
                .iter()
                .zip(model.senders())
                .map(|(label, s)| {
                    s.types.iter().position(|t| t == label).ok_or_else(|| {
                        Error::Validation(format!(
                            "unknown type `{label}` for sender `{}`",
                            s.name
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let idx = model.profile_index(&types)?;
            if rows[idx].is_some() {
                return Err(Error::Validation(format!(
                    "profile {:?} listed twice",
                    row.profile
                )));
            }
            rows[idx] = Some(row.dist);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(idx, r)| {
                r.ok_or_else(|| {
                    Error::Validation(format!(
                        "allocation misses profile {:?}",
                        model.profile(idx)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Allocation::new(model, rows)
    }
}

/// Parses an allocation document against `model`.
pub fn load_allocation(model: &ModelSpec, document: &str) -> Result<Allocation> {
    let doc: AllocationDoc = serde_json::from_str(document)?;
    doc.into_allocation(model)
}

/// Expected payoff to sender `i` of truthful reporting, one entry per own
/// type, integrating out the other senders' priors. Never reads sender
/// `i`'s own prior.
pub fn interim_payoff(model: &ModelSpec, p: &Allocation, i: usize) -> Result<Vec<f64>> {
    let sender = model.sender(i)?;
    model.check_allocation(p)?;
    let mut out = vec![0.0; sender.num_types()];
    for idx in 0..model.num_profiles() {
        let t = model.profile(idx)[i];
        let w = model.others_weight(idx, i);
        let row_value: f64 = p.rows[idx]
            .iter()
            .zip(&sender.payoff)
            .map(|(prob, u)| prob * u[t])
            .sum();
        out[t] += w * row_value;
    }
    Ok(out)
}

/// The receiver's ex-ante expected payoff from allocation `p`.
pub fn receiver_value(model: &ModelSpec, p: &Allocation) -> Result<f64> {
    model.check_allocation(p)?;
    Ok((0..model.num_profiles())
        .map(|idx| {
            let value: f64 = p.rows[idx]
                .iter()
                .zip(&model.receiver_payoff)
                .map(|(prob, v)| prob * v[idx])
                .sum();
            model.profile_prior(idx) * value
        })
        .sum())
}
