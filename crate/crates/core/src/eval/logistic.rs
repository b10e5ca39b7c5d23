//! Monotone four-parameter logistic mapping from objective scores to the
//! subjective scale, fit by least squares with a Nelder–Mead simplex.

use crate::error::{Error, Result};

const MIN_POINTS: usize = 5;
const MAX_EVALS: usize = 200_000;
const MAX_RESTARTS: usize = 30;

/// `Q(s) = (τ₁ − τ₂) / (1 + exp(−(s − τ₃)/|τ₄|)) + τ₂`
#[inline]
pub fn logistic_map(params: &[f64; 4], s: f64) -> f64 {
    let [t1, t2, t3, t4] = *params;
    let scale = t4.abs().max(f64::MIN_POSITIVE);
    (t1 - t2) / (1.0 + (-(s - t3) / scale).exp()) + t2
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    /// `τ₁ .. τ₄`.
    pub params: [f64; 4],
    /// Root mean squared residual of the fit.
    pub residual: f64,
    /// `false` when the evaluation cap was hit; `params` are then the best found.
    pub converged: bool,
}

impl LogisticFit {
    pub fn map(&self, s: f64) -> f64 {
        logistic_map(&self.params, s)
    }

    pub fn apply(&self, scores: &[f64]) -> Vec<f64> {
        scores.iter().map(|&s| self.map(s)).collect()
    }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) }
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
}

/// Fits the logistic to `(predicted, subjective)` pairs.
pub fn logistic_fit(predicted: &[f64], subjective: &[f64]) -> Result<LogisticFit> {
    if predicted.len() != subjective.len() {
        return Err(Error::LengthMismatch(predicted.len(), subjective.len()));
    }
    if predicted.len() < MIN_POINTS {
        return Err(Error::TooFewSamples { needed: MIN_POINTS, got: predicted.len() });
    }
    if predicted.iter().chain(subjective).any(|v| !v.is_finite()) {
        return Err(Error::NotANumber);
    }
    let hi = subjective.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = subjective.iter().copied().fold(f64::INFINITY, f64::min);
    if hi == lo {
        return Err(Error::DegenerateSpread("subjective scores are all equal"));
    }
    let sd = std_dev(predicted);
    let start = [hi, lo, median(predicted), if sd > 0.0 { sd } else { 1.0 }];
    let steps = [0.1 * (hi - lo), 0.1 * (hi - lo), 0.5 * start[3], 0.5 * start[3]];

    let sse = |p: &[f64; 4]| -> f64 {
        predicted.iter().zip(subjective).map(|(&s, &y)| (logistic_map(p, s) - y).powi(2)).sum()
    };

    let mut best = start;
    let mut best_f = sse(&best);
    let mut evals = 0;
    let mut converged = false;
    for _ in 0..MAX_RESTARTS {
        let (p, f, used, done) = nelder_mead(&sse, best, steps_around(&best, &steps), MAX_EVALS - evals);
        evals += used;
        let improved = f < best_f * (1.0 - 1e-12) - 1e-300;
        if f <= best_f {
            best = p;
            best_f = f;
        }
        if !done || evals >= MAX_EVALS {
            break;
        }
        if !improved {
            converged = true;
            break;
        }
    }
    let residual = (best_f / predicted.len() as f64).sqrt();
    Ok(LogisticFit { params: best, residual, converged })
}

fn steps_around(p: &[f64; 4], initial: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| {
        let s = 0.05 * p[i].abs();
        if s > 0.0 { s.max(1e-6 * initial[i]) } else { initial[i] }
    })
}

/// Minimises `f` from `x0`. Returns (best point, value, evaluations used,
/// whether the simplex collapsed before the budget ran out).
fn nelder_mead(f: &impl Fn(&[f64; 4]) -> f64, x0: [f64; 4], steps: [f64; 4], budget: usize) -> ([f64; 4], f64, usize, bool) {
    const N: usize = 4;
    let mut simplex: Vec<([f64; 4], f64)> = Vec::with_capacity(N + 1);
    simplex.push((x0, f(&x0)));
    for i in 0..N {
        let mut x = x0;
        x[i] += steps[i];
        simplex.push((x, f(&x)));
    }
    let mut evals = N + 1;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (fb, fw) = (simplex[0].1, simplex[N].1);
        let spread = (fw - fb).abs() <= 1e-15 * (fb.abs() + fw.abs()) + 1e-300;
        let size = (1..=N)
            .map(|j| (0..N).map(|i| (simplex[j].0[i] - simplex[0].0[i]).abs() / (simplex[0].0[i].abs() + 1e-12)).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread || size < 1e-13 {
            return (simplex[0].0, simplex[0].1, evals, true);
        }
        if evals >= budget {
            return (simplex[0].0, simplex[0].1, evals, false);
        }
        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for i in 0..N {
                centroid[i] += x[i] / N as f64;
            }
        }
        let along = |t: f64| -> [f64; 4] { std::array::from_fn(|i| centroid[i] + t * (simplex[N].0[i] - centroid[i])) };

        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[N].1 {
                let xc = along(-0.5);
                (xc, f(&xc))
            } else {
                let xc = along(0.5);
                (xc, f(&xc))
            };
            evals += 1;
            if fc < fr.min(simplex[N].1) {
                simplex[N] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for (x, fx) in simplex.iter_mut().skip(1) {
                    *x = std::array::from_fn(|i| best[i] + 0.5 * (x[i] - best[i]));
                    *fx = f(x);
                }
                evals += N;
            }
        }
    }
}
