//! Closed-form average conditioning bounds for random Waring polynomials,
//! together with independent numerical checks: quadrature for the radial
//! moment factors and Monte Carlo for the mean squared gamma.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::conditioning::gamma_frob_exact;
use crate::error::{Error, Result};
use crate::math::binomial;
use crate::rng::complex_gaussian;
use crate::sampling::sample_root_on_hypersurface;
use crate::waring::{WaringPolynomial, DENSE_TERM_LIMIT};
use crate::CMatrix;

/// Monomial cap for the Monte Carlo check, which runs exact gammas through
/// dense expansions.
pub const MC_TERM_LIMIT: u128 = 10_000;

/// Closed-form bound data for mean squared gamma at `(n, D, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub degree: usize,
    pub r: usize,
    /// Moment amplification factor of the `r`-term representation.
    pub r_factor: f64,
    /// Upper bound on the mean squared Frobenius gamma at a uniform root.
    pub bound: f64,
    /// Weighted gamma constant entering the complexity statement;
    /// `gamma_w^2 = n * bound`.
    pub gamma_w: f64,
}

/// `prod_{j=2}^{D} r / (r - j)`; finite only for `r > D`.
///
/// Grows with the degree and blows up as `r` approaches `D`, reflecting that
/// short representations concentrate mass on ill-conditioned roots.
pub fn r_factor(r: usize, degree: usize) -> Result<f64> {
    if degree < 2 {
        return Err(Error::Domain("degree must be at least 2"));
    }
    if r <= degree {
        return Err(Error::Domain("the factor requires r > D"));
    }
    let mut acc = 1.0f64;
    for j in 2..=degree {
        acc *= r as f64 / (r - j) as f64;
    }
    Ok(acc)
}

/// Average conditioning bound at `(n, D, r)`:
/// `bound = (pi/4) R (D-1)^3 n (1 + 3/n)^2` with `R = r_factor(r, D)`,
/// and `gamma_w = (sqrt(pi)/2) sqrt(R) (D-1)^(3/2) n (1 + 3/n)`.
pub fn theorem_bound(n: usize, degree: usize, r: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    let rf = r_factor(r, degree)?;
    let nf = n as f64;
    let dm1 = (degree - 1) as f64;
    let shape = 1.0 + 3.0 / nf;
    let bound = core::f64::consts::FRAC_PI_4 * rf * dm1.powi(3) * nf * shape * shape;
    let gamma_w = 0.5 * core::f64::consts::PI.sqrt() * rf.sqrt() * dm1.powf(1.5) * nf * shape;
    Ok(BoundReport { n, degree, r, r_factor: rf, bound, gamma_w })
}

/// Per-degree constant of the estimator analysis:
/// `M_k = (pi / (n D^2)) C(D, k)^2 (n + k + 1)^k`.
///
/// The quantity `M_k^(1/(k-1))` is maximized at `k = 2`, which is why the
/// sandwich constants depend on `D` only polynomially.
pub fn estimator_moment(n: usize, degree: usize, k: usize) -> Result<f64> {
    if n == 0 || degree < 2 || k < 2 || k > degree {
        return Err(Error::Domain("estimator moment needs 2 <= k <= D and n >= 1"));
    }
    let nf = n as f64;
    let df = degree as f64;
    let c = binomial(degree as u64, k as u64);
    Ok(core::f64::consts::PI / (nf * df * df) * c * c * ((n + k + 1) as f64).powi(k as i32))
}

/// Radial moment factor `E |rho|^(2r - 2m - 2) / E |rho|^(2r - 2)` under the
/// Gaussian radial law, returned as `(closed form, quadrature)`.
///
/// The closed form is `1` for `m = 1` and `prod_{j=2}^m 1/(r - j)` for
/// `m >= 2`; the quadrature evaluates the defining integrals with adaptive
/// Simpson so the two sides are independent.
pub fn radial_factor_check(r: usize, m: usize) -> Result<(f64, f64)> {
    if m == 0 || r <= m {
        return Err(Error::Domain("radial factor requires 1 <= m < r"));
    }
    let closed = if m == 1 {
        1.0
    } else {
        let mut acc = 1.0f64;
        for j in 2..=m {
            acc /= (r - j) as f64;
        }
        acc
    };
    let upper = 9.0;
    let numerator = adaptive_simpson(
        &|rho: f64| rho.powi((2 * r - 2 * m - 1) as i32) * (-rho * rho).exp(),
        0.0,
        upper,
        1e-13,
        40,
    );
    let denominator = adaptive_simpson(
        &|rho: f64| rho.powi((2 * r - 3) as i32) * (-rho * rho).exp(),
        0.0,
        upper,
        1e-13,
        40,
    );
    Ok((closed, numerator / denominator))
}

fn simpson_slice(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), mid, fm)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, depth: usize) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let (whole, mid, fm) = simpson_slice(f, a, fa, b, fb);
    // The tolerance is relative to the coarse estimate; an absolute one would
    // demand sub-ulp refinement when the integral is large.
    let tol = rel_tol * whole.abs().max(1e-300);
    adaptive_simpson_rec(f, a, fa, b, fb, mid, fm, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    mid: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let (left, lm, flm) = simpson_slice(f, a, fa, mid, fm);
    let (right, rm, frm) = simpson_slice(f, mid, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson_rec(f, a, fa, mid, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson_rec(f, mid, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Monte Carlo mean of the squared exact gamma at uniformly sampled roots of
/// Gaussian `r`-term polynomials, returned as `(mean, standard error)`.
///
/// Draws with singular sampled roots are redrawn; the attempt budget is ten
/// times the requested trial count. Dense expansions cap the instance size
/// at [`MC_TERM_LIMIT`] monomials.
pub fn mc_gamma_avg_sq<R: Rng + ?Sized>(
    n: usize,
    degree: usize,
    r: usize,
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::Domain("at least two trials are required"));
    }
    let monomials = {
        let mut acc: u128 = 1;
        for i in 0..degree {
            acc = acc.saturating_mul((n + 1 + i) as u128) / (i as u128 + 1);
        }
        acc
    };
    if monomials > MC_TERM_LIMIT.min(DENSE_TERM_LIMIT) {
        return Err(Error::Capacity { required: monomials, limit: MC_TERM_LIMIT });
    }
    let mut values = Vec::with_capacity(trials);
    let mut attempts = 0usize;
    while values.len() < trials {
        attempts += 1;
        if attempts > 10 * trials {
            return Err(Error::RootFinding("too many degenerate draws"));
        }
        let coeffs = CMatrix::from_fn(r, n + 1, |_, _| complex_gaussian(rng));
        let Ok(f) = WaringPolynomial::new(degree, coeffs) else { continue };
        let Ok(root) = sample_root_on_hypersurface(&f, rng) else { continue };
        let Ok(gamma) = gamma_frob_exact(&f, &root) else { continue };
        values.push(gamma * gamma);
    }
    let mean = values.iter().sum::<f64>() / trials as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials as f64 - 1.0);
    Ok((mean, (var / trials as f64).sqrt()))
}
