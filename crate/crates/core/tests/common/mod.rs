#![allow(dead_code)]

use persuasion_core::model::{Allocation, ModelSpec, SenderSpec};
use persuasion_core::structure::{high_class_interim, DecompositionCert};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// Uniform draw from the simplex.
pub fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Full-support prior with every entry at least `0.05 / n`.
pub fn prior(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

pub fn table(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}

pub fn model_from(rng: &mut ChaCha8Rng, types: &[usize], outcomes: usize, payoffs: Vec<Vec<Vec<f64>>>) -> ModelSpec {
    let senders: Vec<SenderSpec> = types
        .iter()
        .zip(payoffs)
        .enumerate()
        .map(|(i, (&n, payoff))| SenderSpec {
            name: format!("s{i}"),
            types: labels("t", n),
            prior: prior(rng, n),
            payoff,
        })
        .collect();
    let profiles: usize = types.iter().product();
    let v = table(rng, outcomes, profiles, -10.0, 10.0);
    ModelSpec::new(labels("r", outcomes), senders, v).unwrap()
}

/// Senders in `1..=max_senders`, types in `1..=max_types` (at least 2 for
/// the first sender), outcomes in `2..=max_outcomes`, payoffs in [-10, 10].
pub fn random_model(rng: &mut ChaCha8Rng, max_senders: usize, max_types: usize, max_outcomes: usize) -> ModelSpec {
    let ns = rng.gen_range(1..=max_senders);
    let types: Vec<usize> = (0..ns)
        .map(|i| rng.gen_range(if i == 0 { 2 } else { 1 }..=max_types))
        .collect();
    let k = rng.gen_range(2..=max_outcomes);
    let payoffs = types.iter().map(|&n| table(rng, k, n, -10.0, 10.0)).collect();
    model_from(rng, &types, k, payoffs)
}

pub fn random_allocation(rng: &mut ChaCha8Rng, model: &ModelSpec) -> Allocation {
    if rng.gen_bool(0.3) {
        let choices: Vec<usize> = (0..model.num_profiles())
            .map(|_| rng.gen_range(0..model.num_outcomes()))
            .collect();
        return Allocation::deterministic(model, &choices).unwrap();
    }
    let rows = (0..model.num_profiles())
        .map(|_| simplex(rng, model.num_outcomes()))
        .collect();
    Allocation::new(model, rows).unwrap()
}

/// Gives every type of sender `i` one of its worst outcomes at every profile.
pub fn pointwise_minimizer(model: &ModelSpec, i: usize) -> Allocation {
    let sender = &model.senders()[i];
    let choices: Vec<usize> = (0..model.num_profiles())
        .map(|idx| {
            let t = model.profile(idx)[i];
            (0..model.num_outcomes())
                .min_by(|&a, &b| sender.payoff[a][t].total_cmp(&sender.payoff[b][t]))
                .unwrap()
        })
        .collect();
    Allocation::deterministic(model, &choices).unwrap()
}

/// A two-decomposable instance: each outcome is assigned a class per
/// sender, and each sender's payoff depends only on that class.
pub struct Decomposable {
    pub model: ModelSpec,
    /// `high[i][r]`: outcome `r` is in the first class for sender `i`.
    pub high: Vec<Vec<bool>>,
    /// `gap[i][t]`: first-class minus second-class payoff.
    pub gap: Vec<Vec<f64>>,
}

/// One or two senders with 2 or 3 types each. Gaps have magnitude in
/// [0.5, 10] and both signs occur for every sender.
pub fn decomposable(rng: &mut ChaCha8Rng) -> Decomposable {
    let ns = rng.gen_range(1..=2);
    let types: Vec<usize> = (0..ns).map(|_| rng.gen_range(2..=3)).collect();
    let mut combos: Vec<Vec<bool>> = if ns == 1 {
        vec![vec![true], vec![false]]
    } else {
        vec![vec![true, true], vec![true, false], vec![false, true], vec![false, false]]
    };
    for _ in 0..rng.gen_range(0..=1) {
        combos.push((0..ns).map(|_| rng.gen_bool(0.5)).collect());
    }
    combos.shuffle(rng);
    let k = combos.len();
    let high: Vec<Vec<bool>> = (0..ns).map(|i| combos.iter().map(|c| c[i]).collect()).collect();
    let mut gap = Vec::new();
    let mut payoffs = Vec::new();
    for (i, &n) in types.iter().enumerate() {
        let mut d: Vec<f64> = (0..n)
            .map(|t| {
                let m = rng.gen_range(0.5..10.0);
                if t == 0 {
                    m
                } else if t == 1 {
                    -m
                } else if rng.gen_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect();
        d.shuffle(rng);
        let lo: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let hi: Vec<f64> = lo.iter().zip(&d).map(|(l, g)| l + g).collect();
        payoffs.push(
            (0..k)
                .map(|r| if high[i][r] { hi.clone() } else { lo.clone() })
                .collect(),
        );
        gap.push(d);
    }
    let model = model_from(rng, &types, k, payoffs);
    Decomposable { model, high, gap }
}

/// Row-by-row allocation with `P(first class for sender i | t) = a[i][t_i]`,
/// independent across senders, spread randomly within each class combo.
pub fn class_allocation(rng: &mut ChaCha8Rng, inst: &Decomposable, a: &[Vec<f64>]) -> Allocation {
    let m = &inst.model;
    let k = m.num_outcomes();
    let ns = m.num_senders();
    let rows = (0..m.num_profiles())
        .map(|idx| {
            let t = m.profile(idx);
            let mut row = vec![0.0; k];
            for mask in 0..(1usize << ns) {
                let combo: Vec<bool> = (0..ns).map(|i| mask >> i & 1 == 1).collect();
                let mass: f64 = (0..ns)
                    .map(|i| if combo[i] { a[i][t[i]] } else { 1.0 - a[i][t[i]] })
                    .product();
                let members: Vec<usize> = (0..k)
                    .filter(|&r| (0..ns).all(|i| inst.high[i][r] == combo[i]))
                    .collect();
                let split = simplex(rng, members.len());
                for (r, w) in members.into_iter().zip(split) {
                    row[r] += mass * w;
                }
            }
            row
        })
        .collect();
    Allocation::new(m, rows).unwrap()
}

/// First-class probabilities nondecreasing in the gap.
pub fn monotone_targets(rng: &mut ChaCha8Rng, gap: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..gap.len()).collect();
    order.sort_by(|&x, &y| gap[x].total_cmp(&gap[y]));
    let mut values: Vec<f64> = (0..gap.len()).map(|_| rng.gen::<f64>()).collect();
    values.sort_by(f64::total_cmp);
    let mut a = vec![0.0; gap.len()];
    for (t, v) in order.into_iter().zip(values) {
        a[t] = v;
    }
    a
}

/// First-class probabilities strictly decreasing in the gap, with steps of
/// at least 0.2.
pub fn anti_monotone_targets(rng: &mut ChaCha8Rng, gap: &[f64]) -> Vec<f64> {
    let n = gap.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| gap[x].total_cmp(&gap[y]));
    let mut a = vec![0.0; n];
    for (pos, t) in order.into_iter().enumerate() {
        let base = 0.9 - 0.8 * pos as f64 / (n - 1) as f64;
        a[t] = base + rng.gen_range(-0.05..0.05);
    }
    a
}

/// Largest amount by which a type preferring `r1` gets it less often than
/// a type preferring `r2`; positive means the exclusion condition fails.
pub fn exclusion_violation(model: &ModelSpec, p: &Allocation, i: usize, cert: &DecompositionCert) -> f64 {
    let d = cert.gaps(&model.senders()[i]);
    let a = high_class_interim(model, p, i, cert).unwrap();
    let min_pos = (0..d.len()).filter(|&t| d[t] > 1e-9).map(|t| a[t]).fold(f64::INFINITY, f64::min);
    let max_neg = (0..d.len()).filter(|&t| d[t] < -1e-9).map(|t| a[t]).fold(f64::NEG_INFINITY, f64::max);
    max_neg - min_pos
}

/// Sender-`i` payoffs with an outcome that is worst for every type.
pub fn hlf_payoff(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut u = table(rng, k, n, -10.0, 10.0);
    let worst = rng.gen_range(0..k);
    for t in 0..n {
        let m = (0..k).map(|r| u[r][t]).fold(f64::INFINITY, f64::min);
        u[worst][t] = m - rng.gen_range(0.0..2.0);
    }
    u
}
