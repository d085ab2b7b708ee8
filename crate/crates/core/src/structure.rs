//! Preference structure and the fast certificates it enables.
//!
//! A sender is two-decomposable when every outcome gives, at every type,
//! the same payoff as one of two reference outcomes `r1`, `r2`. Then an
//! allocation matters to the sender only through the interim probability
//! `A(t)` of the `r1` class, and implementability reduces to comparing
//! `A` across types that prefer `r1` and types that prefer `r2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ic::deviation_gap_at;
use crate::model::{Allocation, Belief, ModelSpec, SenderSpec};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeClass {
    /// Payoff-equivalent to `r1`.
    High,
    /// Payoff-equivalent to `r2`.
    Low,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionCert {
    pub sender: usize,
    pub r1: usize,
    pub r2: usize,
    pub class_map: Vec<OutcomeClass>,
    pub valid: bool,
}

impl DecompositionCert {
    /// `u(r1,t) - u(r2,t)` per type.
    pub fn gaps(&self, sender: &SenderSpec) -> Vec<f64> {
        sender.payoff[self.r1]
            .iter()
            .zip(&sender.payoff[self.r2])
            .map(|(a, b)| a - b)
            .collect()
    }
}

fn same_column(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol::TIE)
}

/// Scans outcome pairs in lexicographic order and returns the first pair
/// that covers every outcome. The returned `r1` represents the smaller
/// class (ties go to the class holding the lowest outcome index).
pub fn find_two_decomposition(model: &ModelSpec, i: usize) -> Result<Option<DecompositionCert>> {
    let sender = model.sender(i)?;
    let u = &sender.payoff;
    let k = model.num_outcomes();
    for a in 0..k {
        for b in a + 1..k {
            let classes: Option<Vec<OutcomeClass>> = (0..k)
                .map(|r| {
                    if same_column(&u[r], &u[a]) {
                        Some(OutcomeClass::High)
                    } else if same_column(&u[r], &u[b]) {
                        Some(OutcomeClass::Low)
                    } else {
                        None
                    }
                })
                .collect();
            let Some(mut class_map) = classes else { continue };
            let first_of = |c: OutcomeClass, map: &[OutcomeClass]| map.iter().position(|&x| x == c);
            let highs = class_map.iter().filter(|&&c| c == OutcomeClass::High).count();
            let lows = k - highs;
            if lows == 0 {
                // Every outcome is equivalent to `a`; split off `b` by index.
                class_map[b] = OutcomeClass::Low;
            } else if lows < highs {
                for c in &mut class_map {
                    *c = match c {
                        OutcomeClass::High => OutcomeClass::Low,
                        OutcomeClass::Low => OutcomeClass::High,
                    };
                }
            }
            let r1 = first_of(OutcomeClass::High, &class_map).unwrap();
            let r2 = first_of(OutcomeClass::Low, &class_map).unwrap();
            return Ok(Some(DecompositionCert {
                sender: i,
                r1,
                r2,
                class_map,
                valid: true,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCert {
    pub sender: usize,
    /// Types sorted by gap, ascending; ties by index.
    pub type_order: Vec<usize>,
    /// Gaps along `type_order`.
    pub gaps: Vec<f64>,
    /// First position whose gap is nonnegative.
    pub crossing_index: usize,
}

/// Orders types by `u(r1,·) - u(r2,·)`. Sorting always yields a single
/// crossing, so this fails only for an invalid certificate.
pub fn find_single_crossing_order(
    model: &ModelSpec,
    i: usize,
    cert: &DecompositionCert,
) -> Result<Option<OrderCert>> {
    let sender = model.sender(i)?;
    if !cert.valid || cert.sender != i {
        return Ok(None);
    }
    let gaps = cert.gaps(sender);
    let mut type_order: Vec<usize> = (0..gaps.len()).collect();
    type_order.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = type_order.iter().map(|&t| gaps[t]).collect();
    let crossing_index = sorted.iter().position(|&d| d >= -tol::TIE).unwrap_or(sorted.len());
    Ok(Some(OrderCert {
        sender: i,
        type_order,
        gaps: sorted,
        crossing_index,
    }))
}

/// `A(t) = Σ_{t_-i} μ_-i(t_-i) p(t)(high class)` per type of sender `i`.
pub fn high_class_interim(model: &ModelSpec, p: &Allocation, i: usize, cert: &DecompositionCert) -> Result<Vec<f64>> {
    let sender = model.sender(i)?;
    model.check_allocation(p)?;
    let mut out = vec![0.0; sender.num_types()];
    for idx in 0..model.num_profiles() {
        let t = model.profile(idx)[i];
        let high: f64 = p
            .row(idx)
            .iter()
            .zip(&cert.class_map)
            .filter(|(_, &c)| c == OutcomeClass::High)
            .map(|(q, _)| q)
            .sum();
        out[t] += model.others_weight(idx, i) * high;
    }
    Ok(out)
}

/// `A` nondecreasing along `order`. Types whose gaps tie may be permuted
/// freely, so `A` is only compared across distinct gap values.
pub fn is_monotone(
    model: &ModelSpec,
    p: &Allocation,
    i: usize,
    cert: &DecompositionCert,
    order: &OrderCert,
) -> Result<bool> {
    let a = high_class_interim(model, p, i, cert)?;
    let seq = &order.type_order;
    let gaps = &order.gaps;
    Ok((0..seq.len()).all(|x| {
        (x + 1..seq.len())
            .filter(|&y| gaps[y] > gaps[x] + tol::TIE)
            .all(|y| a[seq[y]] >= a[seq[x]] - tol::TIE)
    }))
}

/// A two-type pool that profits from the worst outcome: types `high_type`
/// strictly prefers `r1` yet gets it less often than `low_type`, which
/// strictly prefers `r2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneWitness {
    pub high_type: usize,
    pub low_type: usize,
    pub belief: Vec<f64>,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum Certificate {
    CertifiedImplementable,
    CertifiedNot { witness: MonotoneWitness },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenderCertificate {
    pub sender: usize,
    pub certificate: Certificate,
    pub decomposition: Option<DecompositionCert>,
    pub order: Option<OrderCert>,
}

/// Per sender: implementable when two-decomposable and monotone; not
/// implementable when some type strictly preferring `r1` gets it less often
/// than some type strictly preferring `r2`; inconclusive otherwise.
pub fn monotone_certificate_check(model: &ModelSpec, p: &Allocation) -> Result<Vec<SenderCertificate>> {
    (0..model.num_senders())
        .map(|i| sender_certificate(model, p, i))
        .collect()
}

fn sender_certificate(model: &ModelSpec, p: &Allocation, i: usize) -> Result<SenderCertificate> {
    let Some(cert) = find_two_decomposition(model, i)? else {
        return Ok(SenderCertificate {
            sender: i,
            certificate: Certificate::Inconclusive,
            decomposition: None,
            order: None,
        });
    };
    let order = find_single_crossing_order(model, i, &cert)?;
    let certificate = match &order {
        Some(order) if is_monotone(model, p, i, &cert, order)? => Certificate::CertifiedImplementable,
        _ => match exclusion_witness(model, p, i, &cert)? {
            Some(witness) => Certificate::CertifiedNot { witness },
            None => Certificate::Inconclusive,
        },
    };
    Ok(SenderCertificate {
        sender: i,
        certificate,
        decomposition: Some(cert),
        order,
    })
}

fn exclusion_witness(
    model: &ModelSpec,
    p: &Allocation,
    i: usize,
    cert: &DecompositionCert,
) -> Result<Option<MonotoneWitness>> {
    let sender = model.sender(i)?;
    let d = cert.gaps(sender);
    let a = high_class_interim(model, p, i, cert)?;
    let pick = |pred: &dyn Fn(f64) -> bool, better: &dyn Fn(f64, f64) -> bool| {
        (0..d.len())
            .filter(|&t| pred(d[t]))
            .fold(None::<usize>, |best, t| match best {
                Some(b) if !better(a[t], a[b]) => Some(b),
                _ => Some(t),
            })
    };
    let high = pick(&|x| x > tol::TIE, &|x, y| x < y);
    let low = pick(&|x| x < -tol::TIE, &|x, y| x > y);
    let (Some(hi), Some(lo)) = (high, low) else {
        return Ok(None);
    };
    // alpha·d(hi) + (1 - alpha)·d(lo) = 0
    let alpha = -d[lo] / (d[hi] - d[lo]);
    let mut probs = vec![0.0; d.len()];
    probs[hi] = alpha;
    probs[lo] = 1.0 - alpha;
    let belief = Belief::from_raw(i, probs);
    let gap = deviation_gap_at(model, p, &belief)?;
    Ok((gap > tol::IC).then(|| MonotoneWitness {
        high_type: hi,
        low_type: lo,
        belief: belief.probs().to_vec(),
        gap,
    }))
}

fn common_least_favorite(sender: &SenderSpec, types: &[usize]) -> Option<usize> {
    let worst: Vec<f64> = types
        .iter()
        .map(|&t| sender.payoff.iter().map(|row| row[t]).fold(f64::INFINITY, f64::min))
        .collect();
    (0..sender.payoff.len()).find(|&r| {
        types
            .iter()
            .zip(&worst)
            .all(|(&t, &w)| sender.payoff[r][t] <= w + tol::TIE)
    })
}

/// An outcome that is worst for every type of sender `i`.
pub fn hlf_check(model: &ModelSpec, i: usize) -> Result<Option<usize>> {
    let sender = model.sender(i)?;
    let all: Vec<usize> = (0..sender.num_types()).collect();
    Ok(common_least_favorite(sender, &all))
}

/// Types that `p` always hands their worst outcome but that share no
/// common worst outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FallGuyWitness {
    pub sender: usize,
    pub types: Vec<usize>,
}

/// Searches subsets of up to three types.
pub fn no_fall_guys_check(model: &ModelSpec, p: &Allocation, i: usize) -> Result<Option<FallGuyWitness>> {
    no_fall_guys_check_with(model, p, i, Some(3))
}

/// `max_size = None` searches every subset.
pub fn no_fall_guys_check_with(
    model: &ModelSpec,
    p: &Allocation,
    i: usize,
    max_size: Option<usize>,
) -> Result<Option<FallGuyWitness>> {
    let sender = model.sender(i)?;
    model.check_allocation(p)?;
    let n = sender.num_types();
    // Types that receive only worst outcomes at every opponent profile.
    let mut minimized = vec![true; n];
    for idx in 0..model.num_profiles() {
        let t = model.profile(idx)[i];
        let worst = sender.payoff.iter().map(|row| row[t]).fold(f64::INFINITY, f64::min);
        let only_worst = p
            .row(idx)
            .iter()
            .enumerate()
            .all(|(r, &q)| q <= tol::TIE || sender.payoff[r][t] <= worst + tol::TIE);
        minimized[t] &= only_worst;
    }
    let pool: Vec<usize> = (0..n).filter(|&t| minimized[t]).collect();
    let cap = max_size.unwrap_or(pool.len()).min(pool.len());
    for size in 2..=cap {
        let mut found = None;
        subsets(pool.len(), size, &mut |pick| {
            if found.is_none() {
                let types: Vec<usize> = pick.iter().map(|&k| pool[k]).collect();
                if common_least_favorite(sender, &types).is_none() {
                    found = Some(types);
                }
            }
        });
        if let Some(types) = found {
            return Ok(Some(FallGuyWitness { sender: i, types }));
        }
    }
    Ok(None)
}

fn subsets(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Mixed-radix decode, last digit fastest.
fn digits(mut idx: usize, radix: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radix.len()];
    for (slot, &b) in radix.iter().enumerate().rev() {
        out[slot] = idx % b;
        idx /= b;
    }
    out
}

/// Product model and allocation. Types and outcomes are tuples ordered
/// with the last component fastest and labelled `a|b|...`. Sender payoffs
/// and the receiver payoff add across components; the prior is the
/// independent product.
pub fn product_compose(models: &[ModelSpec], allocations: &[Allocation]) -> Result<(ModelSpec, Allocation)> {
    let Some(first) = models.first() else {
        return Err(Error::Validation("product of zero models".into()));
    };
    if allocations.len() != models.len() {
        return Err(Error::Dimension(format!(
            "{} allocations for {} models",
            allocations.len(),
            models.len()
        )));
    }
    let ns = first.num_senders();
    for (k, (m, p)) in models.iter().zip(allocations).enumerate() {
        if m.num_senders() != ns {
            return Err(Error::Validation(format!(
                "component {k} has {} senders, expected {ns}",
                m.num_senders()
            )));
        }
        m.check_allocation(p)?;
    }
    let join = |parts: Vec<&str>| parts.join("|");
    let outcome_radix: Vec<usize> = models.iter().map(|m| m.num_outcomes()).collect();
    let num_outcomes: usize = outcome_radix.iter().product();
    let outcome_parts: Vec<Vec<usize>> = (0..num_outcomes).map(|r| digits(r, &outcome_radix)).collect();
    let outcomes: Vec<String> = outcome_parts
        .iter()
        .map(|rs| join(rs.iter().zip(models).map(|(&r, m)| m.outcomes()[r].as_str()).collect()))
        .collect();

    // Per sender: component type of each product type.
    let mut type_parts: Vec<Vec<Vec<usize>>> = Vec::with_capacity(ns);
    let mut senders = Vec::with_capacity(ns);
    for i in 0..ns {
        let radix: Vec<usize> = models.iter().map(|m| m.senders()[i].num_types()).collect();
        let count: usize = radix.iter().product();
        let parts: Vec<Vec<usize>> = (0..count).map(|t| digits(t, &radix)).collect();
        let comp = |k: usize| &models[k].senders()[i];
        let types = parts
            .iter()
            .map(|ts| join(ts.iter().enumerate().map(|(k, &t)| comp(k).types[t].as_str()).collect()))
            .collect();
        let prior = parts
            .iter()
            .map(|ts| ts.iter().enumerate().map(|(k, &t)| comp(k).prior[t]).product())
            .collect();
        let payoff = outcome_parts
            .iter()
            .map(|rs| {
                parts
                    .iter()
                    .map(|ts| (0..models.len()).map(|k| comp(k).payoff[rs[k]][ts[k]]).sum())
                    .collect()
            })
            .collect();
        senders.push(SenderSpec {
            name: first.senders()[i].name.clone(),
            types,
            prior,
            payoff,
        });
        type_parts.push(parts);
    }

    // Component profile index of each product profile, per component.
    let profile_radix: Vec<usize> = senders.iter().map(|s| s.num_types()).collect();
    let num_profiles: usize = profile_radix.iter().product();
    let component_profiles: Vec<Vec<usize>> = (0..num_profiles)
        .map(|idx| {
            let ts = digits(idx, &profile_radix);
            models
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let comp: Vec<usize> = (0..ns).map(|i| type_parts[i][ts[i]][k]).collect();
                    m.profile_index(&comp)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let receiver_payoff = outcome_parts
        .iter()
        .map(|rs| {
            component_profiles
                .iter()
                .map(|cp| {
                    models
                        .iter()
                        .enumerate()
                        .map(|(k, m)| m.receiver_payoff()[rs[k]][cp[k]])
                        .sum()
                })
                .collect()
        })
        .collect();
    let model = ModelSpec::new(outcomes, senders, receiver_payoff)?;
    let rows = component_profiles
        .iter()
        .map(|cp| {
            outcome_parts
                .iter()
                .map(|rs| {
                    allocations
                        .iter()
                        .enumerate()
                        .map(|(k, p)| p.row(cp[k])[rs[k]])
                        .product()
                })
                .collect()
        })
        .collect();
    let allocation = Allocation::new(&model, rows)?;
    Ok((model, allocation))
}

/// Per-sender classification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenderStructure {
    pub sender: usize,
    pub decomposition: Option<DecompositionCert>,
    pub order: Option<OrderCert>,
    /// Label of the homogeneous least favorite.
    pub hlf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fall_guys: Option<FallGuyWitness>,
}

pub fn classify(model: &ModelSpec, p: Option<&Allocation>) -> Result<Vec<SenderStructure>> {
    (0..model.num_senders())
        .map(|i| {
            let decomposition = find_two_decomposition(model, i)?;
            let order = match &decomposition {
                Some(cert) => find_single_crossing_order(model, i, cert)?,
                None => None,
            };
            let hlf = hlf_check(model, i)?.map(|r| model.outcomes()[r].clone());
            let (certificate, fall_guys) = match p {
                Some(p) => (
                    Some(sender_certificate(model, p, i)?.certificate),
                    no_fall_guys_check(model, p, i)?,
                ),
                None => (None, None),
            };
            Ok(SenderStructure {
                sender: i,
                decomposition,
                order,
                hlf,
                certificate,
                fall_guys,
            })
        })
        .collect()
}
