//! Condition numbers that drive certified step-length control: the exact
//! Frobenius gamma of a polynomial at an approximate zero, its randomized
//! estimator from few evaluations, and the split aggregate for systems.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::ProjectivePoint;
use crate::linalg::{complete_orthonormal, min_singular_value};
use crate::math::binomial;
use crate::rng::{keyed_stream, unit_ball_points};
use crate::waring::{dense_expand, homogeneous_parts_at, WaringPolynomial, WaringSystem};
use crate::{CMatrix, CVector};

/// Estimates and conditioning data gathered at one point of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaReport {
    /// Gamma estimate for each polynomial of the system.
    pub per_poly_estimates: Vec<f64>,
    /// Overlap factor of the projected gradient directions.
    pub kappa: f64,
    /// `kappa * sqrt(sum_i g_i^2)`; the certified step rule consumes this.
    pub split_gamma: f64,
    /// Largest per-polynomial sample count used by the estimator.
    pub sample_count: usize,
    /// Failure probability budget each estimate was run with.
    pub epsilon_budget: f64,
}

/// Number of samples needed for failure probability `eps` at degree `d`:
/// `ceil(1 + log2(d / eps))`.
pub fn sample_count(degree: usize, eps: f64) -> Result<usize> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Domain("epsilon must be positive and finite"));
    }
    let raw = 1.0 + (degree as f64 / eps).log2();
    Ok(raw.ceil().max(1.0) as usize)
}

/// Overlap factor of the gradient directions at `z`: the reciprocal of the
/// smallest singular value of the row-normalized projected Jacobian.
///
/// Rows are gradients restricted to `z`'s orthogonal complement and scaled to
/// unit length, so `kappa >= 1`, with equality when the directions are
/// orthogonal. A vanishing projected gradient row means `z` is (numerically)
/// a singular point of that hypersurface.
pub fn kappa(system: &WaringSystem, z: &ProjectivePoint) -> Result<f64> {
    let jac = system.jacobian(z.rep())?;
    let rows = restricted_unit_rows(&jac, z.rep())?;
    kappa_from_rows(&rows)
}

fn restricted_unit_rows(jac: &CMatrix, zhat: &CVector) -> Result<Vec<CVector>> {
    let (n, dim) = (jac.nrows(), jac.ncols());
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        // Row w of the Jacobian acts on the right; restricting the linear map
        // to the complement of zhat replaces w by w - (w zhat) zhat^H.
        let mut w = CVector::from_iterator(dim, jac.row(i).iter().copied());
        let full = w.norm();
        let along: Complex64 = (0..dim).map(|j| w[j] * zhat[j]).sum();
        for j in 0..dim {
            w[j] -= along * zhat[j].conj();
        }
        let restricted = w.norm();
        if !(restricted.is_finite()) || restricted <= 1e-14 * full.max(1e-300) {
            return Err(Error::SingularPoint);
        }
        rows.push(w / Complex64::new(restricted, 0.0));
    }
    Ok(rows)
}

fn kappa_from_rows(rows: &[CVector]) -> Result<f64> {
    let n = rows.len();
    if n == 1 {
        // A single unit row has unit singular value.
        return Ok(1.0);
    }
    let dim = rows[0].len();
    let m = CMatrix::from_fn(n, dim, |i, j| rows[i][j]);
    let sigma = min_singular_value(&m);
    if !(sigma.is_finite()) || sigma <= 1e-14 {
        return Err(Error::SingularPoint);
    }
    Ok((1.0 / sigma).max(1.0))
}

/// Exact Frobenius gamma of `f` at an approximate zero `zeta`.
///
/// The polynomial is composed with an affine chart `y -> zeta + B y`, where
/// `B` spans the orthogonal complement of `zeta`; with `p_k` the degree-`k`
/// part of the composition, the value is
/// `max_k (|p_k|_W / |p_1|)^(1/(k-1))` over `2 <= k <= D`.
///
/// The chart runs through a dense expansion, so the monomial capacity limit
/// of [`dense_expand`] applies.
pub fn gamma_frob_exact(f: &WaringPolynomial, zeta: &ProjectivePoint) -> Result<f64> {
    if zeta.dim() != f.num_vars() {
        return Err(Error::Dimension { expected: f.num_vars(), got: zeta.dim() });
    }
    let dim = f.num_vars();
    let tangent = complete_orthonormal(&[zeta.rep().clone()], dim)?;
    let mut basis = CMatrix::zeros(dim, dim - 1);
    for (j, t) in tangent.iter().enumerate() {
        basis.set_column(j, t);
    }
    let chart = dense_expand(f)?.compose_affine(zeta.rep(), &basis)?;
    let denom = chart.bw_norm_part(1);
    if !(denom.is_finite()) || denom <= 1e-300 {
        return Err(Error::SingularPoint);
    }
    let mut gamma: f64 = 0.0;
    for k in 2..=f.degree() {
        let ratio = chart.bw_norm_part(k) / denom;
        gamma = gamma.max(ratio.powf(1.0 / (k as f64 - 1.0)));
    }
    Ok(gamma)
}

/// Gamma estimate from explicit ball samples; deterministic in the samples.
///
/// `zeta_rep` is used as given (no normalization): the estimator scales as
/// `1 / |zeta_rep|`, matching the exact gamma only at unit representatives.
/// With `h = f(zeta_rep + . )` and `J_k = sum_i |h_k(w_i)|^2`, the estimate is
/// `max_k ((32 n k)^k C(n+k+1, k) J_k / (s |dh(0)|^2))^(1/(2k-2))`.
pub fn gamma_estimate_with_samples(
    f: &WaringPolynomial,
    zeta_rep: &CVector,
    samples: &[CVector],
) -> Result<f64> {
    if zeta_rep.len() != f.num_vars() {
        return Err(Error::Dimension { expected: f.num_vars(), got: zeta_rep.len() });
    }
    let s = samples.len();
    if s == 0 {
        return Err(Error::Domain("at least one sample is required"));
    }
    let n = (f.num_vars() - 1) as f64;
    let grad_sq = f.gradient(zeta_rep)?.norm_squared();
    if !(grad_sq.is_finite()) || grad_sq <= 1e-300 {
        return Err(Error::SingularPoint);
    }
    let d = f.degree();
    let mut part_power = alloc::vec![0.0f64; d + 1];
    for w in samples {
        let parts = homogeneous_parts_at(f, zeta_rep, w)?;
        for k in 2..=d {
            part_power[k] += parts[k - 1].norm_sqr();
        }
    }
    let mut gamma: f64 = 0.0;
    for k in 2..=d {
        let kf = k as f64;
        let front = (32.0 * n * kf).powi(k as i32);
        let comb = binomial((f.num_vars() + k) as u64, k as u64);
        let value = front * comb * part_power[k] / (s as f64 * grad_sq);
        gamma = gamma.max(value.powf(1.0 / (2.0 * kf - 2.0)));
    }
    if !gamma.is_finite() {
        return Err(Error::Domain("gamma estimate overflowed"));
    }
    Ok(gamma)
}

/// Randomized gamma estimate at a projective point.
///
/// Draws `sample_count(D, eps)` points from the unit ball and evaluates `f`
/// at `D + 1` ray points per sample, so the cost is `O(s D)` evaluations and
/// no dense expansion is formed. With probability at least `1 - eps` the
/// result brackets the exact gamma within the theory's constant factors.
pub fn gamma_estimate<R: Rng + ?Sized>(
    f: &WaringPolynomial,
    zeta: &ProjectivePoint,
    eps: f64,
    rng: &mut R,
) -> Result<f64> {
    let s = sample_count(f.degree(), eps)?;
    let samples = unit_ball_points(f.num_vars(), s, rng);
    gamma_estimate_with_samples(f, zeta.rep(), &samples)
}

/// Split gamma of a system at a point: per-polynomial estimates are combined
/// as `kappa * sqrt(sum_i g_i^2)`.
///
/// Each polynomial gets its own substream keyed by its index, so the report
/// is bitwise reproducible however the per-polynomial work is scheduled.
pub fn split_gamma<R: Rng + ?Sized>(
    system: &WaringSystem,
    z: &ProjectivePoint,
    eps_each: f64,
    rng: &mut R,
) -> Result<GammaReport> {
    let overlap = kappa(system, z)?;
    let base = rng.next_u64();
    let mut per_poly = Vec::with_capacity(system.n());
    let mut sum_sq = 0.0;
    let mut max_s = 0;
    for (i, f) in system.polys().iter().enumerate() {
        let mut stream = keyed_stream(base, i as u64);
        let g = gamma_estimate(f, z, eps_each, &mut stream)?;
        max_s = max_s.max(sample_count(f.degree(), eps_each)?);
        sum_sq += g * g;
        per_poly.push(g);
    }
    Ok(GammaReport {
        per_poly_estimates: per_poly,
        kappa: overlap,
        split_gamma: overlap * sum_sq.sqrt(),
        sample_count: max_s,
        epsilon_budget: eps_each,
    })
}
