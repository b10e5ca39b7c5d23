//! Zero-mean generalized Gaussian (GGD) block models seen through an
//! additive Gaussian noise channel, their closed-form entropies, and the
//! variance-scaled entropies fed to the quality indices.
//!
//! The GGD with scale `α` and shape `β` has density
//! `β / (2αΓ(1/β)) · exp(-(|x|/α)^β)`. Entropies are in nats.

use std::sync::LazyLock;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Smallest shape on the inversion grid.
pub const BETA_MIN: f64 = 0.05;
/// Largest shape on the inversion grid.
pub const BETA_MAX: f64 = 10.0;
/// Grid spacing used when inverting kurtosis.
pub const BETA_STEP: f64 = 0.001;
/// Lower bound on the latent variance (native luma scale squared).
pub const VARIANCE_FLOOR: f64 = 1e-6;
/// Kurtosis of the β → ∞ limit (uniform distribution).
pub const UNIFORM_KURTOSIS: f64 = 1.8;

/// `x (x+1) … (x+n-1)`, i.e. `Γ(x+n)/Γ(x)`.
fn rising(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x + i as f64))
}

/// When `2/β` is a whole number the Gamma ratios below differ by integer
/// steps and are evaluated exactly with the recurrence; otherwise through
/// `ln Γ`.
fn integer_step(beta: f64) -> Option<u32> {
    let two_u = 2.0 / beta;
    (two_u.fract() == 0.0 && two_u <= 64.0).then_some(two_u as u32)
}

fn kurtosis_f64(beta: f64) -> f64 {
    let u = 1.0 / beta;
    match integer_step(beta) {
        // Γ(5u)Γ(u)/Γ(3u)² = [Γ(5u)/Γ(3u)] / [Γ(3u)/Γ(u)]
        Some(n) => rising(3.0 * u, n) / rising(u, n),
        None => (ln_gamma(5.0 * u) + ln_gamma(u) - 2.0 * ln_gamma(3.0 * u)).exp(),
    }
}

/// `sqrt(Γ(1/β)/Γ(3/β))`.
fn alpha_factor_f64(beta: f64) -> f64 {
    let u = 1.0 / beta;
    match integer_step(beta) {
        Some(n) => 1.0 / rising(u, n).sqrt(),
        None => (0.5 * (ln_gamma(u) - ln_gamma(3.0 * u))).exp(),
    }
}

fn entropy_f64(alpha: f64, beta: f64, ln_gamma_u: f64) -> f64 {
    1.0 / beta - (beta / (2.0 * alpha)).ln() + ln_gamma_u
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() {
        return Err(Error::NotANumber);
    }
    if beta <= 0.0 {
        return Err(Error::InvalidParameter(format!("shape must be positive, got {beta}")));
    }
    Ok(())
}

/// Kurtosis `Γ(5/β)Γ(1/β)/Γ(3/β)²` of a GGD with shape `beta`.
pub fn ggd_kurtosis<T: Scalar>(beta: T) -> Result<T> {
    let beta = beta.to_f64_lossy();
    check_beta(beta)?;
    Ok(lit(kurtosis_f64(beta)))
}

/// Scale `α = σ·sqrt(Γ(1/β)/Γ(3/β))` of a GGD with standard deviation `sigma`.
pub fn ggd_alpha<T: Scalar>(sigma: T, beta: T) -> Result<T> {
    let (s, b) = (sigma.to_f64_lossy(), beta.to_f64_lossy());
    check_beta(b)?;
    if s.is_nan() {
        return Err(Error::NotANumber);
    }
    if s < 0.0 {
        return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {s}")));
    }
    Ok(lit(s * alpha_factor_f64(b)))
}

struct GridPoint {
    beta: f64,
    kurtosis: f64,
    alpha_factor: f64,
    ln_gamma_u: f64,
}

/// Shape grid with its kurtosis, strictly decreasing in β.
struct ShapeGrid(Vec<GridPoint>);

static GRID: LazyLock<ShapeGrid> = LazyLock::new(|| {
    let lo = (BETA_MIN / BETA_STEP).round() as usize;
    let hi = (BETA_MAX / BETA_STEP).round() as usize;
    ShapeGrid(
        (lo..=hi)
            .map(|i| {
                // i / 1000 keeps grid values such as 0.5, 1 and 2 exact
                let beta = i as f64 / (1.0 / BETA_STEP).round();
                GridPoint {
                    beta,
                    kurtosis: kurtosis_f64(beta),
                    alpha_factor: alpha_factor_f64(beta),
                    ln_gamma_u: ln_gamma(1.0 / beta),
                }
            })
            .collect(),
    )
});

impl ShapeGrid {
    fn kurtosis_range(&self) -> (f64, f64) {
        (self.0.last().unwrap().kurtosis, self.0[0].kurtosis)
    }

    /// Index of the grid point whose kurtosis is nearest `k` after clamping.
    fn nearest(&self, k: f64) -> usize {
        let (lo, hi) = self.kurtosis_range();
        let k = k.clamp(lo, hi);
        let i = self.0.partition_point(|p| p.kurtosis > k);
        if i == 0 {
            return 0;
        }
        if i == self.0.len() {
            return i - 1;
        }
        let above = self.0[i - 1].kurtosis - k;
        let below = k - self.0[i].kurtosis;
        if above <= below { i - 1 } else { i }
    }
}

/// Attainable kurtosis interval `[κ(β_max), κ(β_min)]` of the shape grid.
pub fn kurtosis_range() -> (f64, f64) {
    GRID.kurtosis_range()
}

/// Grid-search inverse of [`ggd_kurtosis`]. Out-of-range kurtosis is clamped
/// to the grid ends.
pub fn invert_kurtosis<T: Scalar>(kurtosis: T) -> Result<T> {
    let k = kurtosis.to_f64_lossy();
    if k.is_nan() {
        return Err(Error::NotANumber);
    }
    Ok(lit(GRID.0[GRID.nearest(k)].beta))
}

/// Parameters of one zero-mean GGD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgdParams<T> {
    /// Scale.
    pub alpha: T,
    /// Shape.
    pub beta: T,
    /// Variance, `α²Γ(3/β)/Γ(1/β)`.
    pub sigma2: T,
}

impl<T: Scalar> GgdParams<T> {
    pub fn from_variance(sigma2: T, beta: T) -> Result<Self> {
        if sigma2 < T::zero() {
            return Err(Error::InvalidParameter("variance must be non-negative".into()));
        }
        let alpha = ggd_alpha(sigma2.sqrt(), beta)?;
        Ok(Self { alpha, beta, sigma2 })
    }

    pub fn from_scale(alpha: T, beta: T) -> Result<Self> {
        let b = beta.to_f64_lossy();
        check_beta(b)?;
        if alpha.is_nan() || alpha <= T::zero() {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        let factor = alpha_factor_f64(b);
        let a = alpha.to_f64_lossy();
        Ok(Self { alpha, beta, sigma2: lit((a / factor).powi(2)) })
    }
}

/// Closed-form differential entropy `1/β - ln(β / (2αΓ(1/β)))`, in nats.
pub fn ggd_entropy<T: Scalar>(params: &GgdParams<T>) -> T {
    let beta = params.beta.to_f64_lossy();
    lit(entropy_f64(params.alpha.to_f64_lossy(), beta, ln_gamma(1.0 / beta)))
}

/// Second and fourth raw moments about zero (divide-by-M).
fn raw_moments<T: Scalar>(block: &[T]) -> (f64, f64) {
    let (mut m2, mut m4) = (0.0f64, 0.0f64);
    for &v in block {
        let sq = v.to_f64_lossy().powi(2);
        m2 += sq;
        m4 += sq * sq;
    }
    let n = block.len() as f64;
    (m2 / n, m4 / n)
}

struct LatentFit {
    /// Latent variance before flooring, never negative.
    variance: f64,
    grid: &'static GridPoint,
    alpha: f64,
    sigma2: f64,
}

fn fit_latent(block_m2: f64, block_m4: f64, noise_var: f64) -> LatentFit {
    let variance = (block_m2 - noise_var).max(0.0);
    let sigma2 = variance.max(VARIANCE_FLOOR);
    // E[B⁴] = E[B̃⁴] + 6σ̃²σ_W² + 3σ_W⁴ for independent zero-mean terms
    let m4 = (block_m4 - 6.0 * sigma2 * noise_var - 3.0 * noise_var * noise_var)
        .max(UNIFORM_KURTOSIS * sigma2 * sigma2);
    let grid = &GRID.0[GRID.nearest(m4 / (sigma2 * sigma2))];
    LatentFit { variance, grid, alpha: sigma2.sqrt() * grid.alpha_factor, sigma2 }
}

fn check_block<T: Scalar>(block: &[T], noise_var: T) -> Result<(f64, f64, f64)> {
    if block.is_empty() {
        return Err(Error::Empty("block has no samples"));
    }
    let nv = noise_var.to_f64_lossy();
    if nv.is_nan() {
        return Err(Error::NotANumber);
    }
    if nv < 0.0 {
        return Err(Error::InvalidParameter(format!("noise variance must be non-negative, got {nv}")));
    }
    let (m2, m4) = raw_moments(block);
    if !m4.is_finite() {
        return Err(Error::NotANumber);
    }
    Ok((m2, m4, nv))
}

/// Recovers the GGD of the latent coefficients `B̃` from an observed block
/// `B = B̃ + W`, `W ~ N(0, noise_var)`, by subtracting the noise
/// contribution from the second and fourth moments and matching kurtosis.
pub fn latent_block_params<T: Scalar>(block: &[T], noise_var: T) -> Result<GgdParams<T>> {
    let (m2, m4, nv) = check_block(block, noise_var)?;
    let fit = fit_latent(m2, m4, nv);
    Ok(GgdParams { alpha: lit(fit.alpha), beta: lit(fit.grid.beta), sigma2: lit(fit.sigma2) })
}

/// Entropy of a block's latent GGD premultiplied by `γ = ln(1 + σ̃²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEntropy<T> {
    pub epsilon: T,
    pub raw_entropy: T,
    pub gamma: T,
}

/// Scaled entropy of one block of band-pass coefficients.
///
/// `γ` uses the latent variance before flooring, so a block with no signal
/// above the noise level scores exactly zero.
pub fn scaled_entropy<T: Scalar>(block: &[T], noise_var: T) -> Result<ScaledEntropy<T>> {
    let (m2, m4, nv) = check_block(block, noise_var)?;
    let fit = fit_latent(m2, m4, nv);
    let raw = entropy_f64(fit.alpha, fit.grid.beta, fit.grid.ln_gamma_u);
    let gamma = fit.variance.ln_1p();
    let epsilon = if gamma == 0.0 { 0.0 } else { gamma * raw };
    Ok(ScaledEntropy { epsilon: lit(epsilon), raw_entropy: lit(raw), gamma: lit(gamma) })
}
