//! Worst-outcome punishments and the direct grim-trigger mechanism.
//!
//! At a posterior belief the receiver can always punish a sender with the
//! pure outcome that minimizes the sender's expected payoff at that
//! belief. The minimized value, as a function of the belief, is the lower
//! envelope of one linear function per outcome and is therefore concave.

use serde::Serialize;

use crate::error::Result;
use crate::model::{Allocation, Belief, ModelSpec};
use crate::tol;

/// The set of worst pure outcomes for a sender at one belief.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PunishmentSet {
    pub sender: usize,
    pub belief: Belief,
    /// Outcome indices in declaration order; never empty.
    pub minimizers: Vec<usize>,
    /// The minimized expected payoff.
    pub value: f64,
}

impl PunishmentSet {
    /// The lexicographically first minimizer.
    pub fn selected(&self) -> usize {
        self.minimizers[0]
    }
}

/// Argmin over pure outcomes of the sender's expected payoff at `belief`,
/// with ties resolved to within [`tol::TIE`].
pub fn grim_trigger(model: &ModelSpec, belief: &Belief) -> Result<PunishmentSet> {
    model.check_belief(belief)?;
    let sender = model.sender(belief.sender())?;
    let payoffs = sender.expected_payoffs(belief.probs());
    let (minimizers, value) = argmin_with_ties(&payoffs);
    Ok(PunishmentSet {
        sender: belief.sender(),
        belief: belief.clone(),
        minimizers,
        value,
    })
}

pub(crate) fn argmin_with_ties(values: &[f64]) -> (Vec<usize>, f64) {
    let value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let minimizers = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= value + tol::TIE)
        .map(|(r, _)| r)
        .collect();
    (minimizers, value)
}

/// `μ ↦ G_i(μ)`, the punishment value function of sender `i`.
pub fn punishment_value_fn(model: &ModelSpec, i: usize) -> Result<impl Fn(&Belief) -> f64 + '_> {
    let sender = model.sender(i)?;
    Ok(move |belief: &Belief| {
        sender
            .expected_payoffs(belief.probs())
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    })
}

/// Result of evaluating the direct grim-trigger mechanism at one belief
/// profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismOutcome {
    pub dist: Vec<f64>,
    /// Set when more than one belief is non-degenerate; such profiles are
    /// unconstrained and `dist` is a fixed default.
    pub off_path: bool,
    /// The punishment applied when exactly one sender deviated.
    pub punishment: Option<PunishmentSet>,
}

/// Evaluates the grim-trigger mechanism for allocation `p` at one belief
/// per sender: follow `p` when every belief reveals a type, punish a lone
/// deviator with its lexicographically first worst outcome, and return a
/// flagged point mass on outcome 0 otherwise.
pub fn evaluate_mechanism(
    model: &ModelSpec,
    p: &Allocation,
    beliefs: &[Belief],
) -> Result<MechanismOutcome> {
    model.check_allocation(p)?;
    if beliefs.len() != model.num_senders() {
        return Err(crate::Error::Dimension(format!(
            "{} beliefs for {} senders",
            beliefs.len(),
            model.num_senders()
        )));
    }
    for (i, b) in beliefs.iter().enumerate() {
        model.check_belief(b)?;
        if b.sender() != i {
            return Err(crate::Error::Validation(format!(
                "belief in slot {i} is for sender {}",
                b.sender()
            )));
        }
    }
    let revealed: Vec<Option<usize>> = beliefs.iter().map(|b| b.degenerate_type(tol::TIE)).collect();
    let deviators: Vec<usize> = (0..beliefs.len()).filter(|&i| revealed[i].is_none()).collect();
    let point_mass = |r: usize| {
        let mut d = vec![0.0; model.num_outcomes()];
        d[r] = 1.0;
        d
    };
    match deviators.as_slice() {
        [] => {
            let types: Vec<usize> = revealed.into_iter().map(Option::unwrap).collect();
            let idx = model.profile_index(&types)?;
            Ok(MechanismOutcome {
                dist: p.row(idx).to_vec(),
                off_path: false,
                punishment: None,
            })
        }
        [i] => {
            let set = grim_trigger(model, &beliefs[*i])?;
            Ok(MechanismOutcome {
                dist: point_mass(set.selected()),
                off_path: false,
                punishment: Some(set),
            })
        }
        _ => Ok(MechanismOutcome {
            dist: point_mass(0),
            off_path: true,
            punishment: None,
        }),
    }
}
