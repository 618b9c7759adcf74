//! Random start data: roots on single hypersurfaces through line sections,
//! hyperplane frames with a common point, and matched start pairs whose
//! unitaries carry each hypersurface root to that common point.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{match_frames, project_orth, Frame, ProjectivePoint, UnitaryTuple};
use crate::linalg::{complete_orthonormal, orthonormalize, univariate_roots};
use crate::math::binomial;
use crate::rng::gaussian_vector;
use crate::waring::{unitary_action, WaringPolynomial, WaringSystem};
use crate::CVector;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

const LINE_ATTEMPTS: usize = 5;
const PAIR_ATTEMPTS: usize = 5;

/// Start system data: unitaries moving each equation, the common zero of the
/// moved system, and the residuals certifying it.
#[derive(Debug, Clone)]
pub struct StartPair {
    /// One unitary per equation; the start system is `(u_i . f_i)_i`.
    pub unitaries: UnitaryTuple,
    /// Common approximate zero of the moved equations.
    pub zeta: ProjectivePoint,
    /// `|(u_i . f_i)(zeta)|` for each equation.
    pub residuals: Vec<f64>,
}

/// Uniformly chosen root of `f` on a random complex line.
///
/// The line `t -> a + t b` through two Gaussian points meets `V(f)` in `D`
/// points (with multiplicity); one is chosen uniformly and polished with
/// Newton steps on `p/p'`, which stays quadratically convergent at multiple
/// roots. Polishing evaluates the section from the Waring rows rather than
/// its expanded coefficients, which would cancel catastrophically near a
/// multiple root. Degenerate lines are redrawn up to a small retry budget.
pub fn sample_root_on_hypersurface<R: Rng + ?Sized>(
    f: &WaringPolynomial,
    rng: &mut R,
) -> Result<ProjectivePoint> {
    let dim = f.num_vars();
    let d = f.degree();
    let scale = f.coefficient_scale();
    for _ in 0..LINE_ATTEMPTS {
        let a = gaussian_vector(dim, rng);
        let b = gaussian_vector(dim, rng);
        let (la, lb) = line_values(f, &a, &b);
        let coeffs = line_section_coefficients(d, &la, &lb);
        let roots = match univariate_roots(&coeffs) {
            Ok(r) if !r.is_empty() => r,
            _ => continue,
        };
        let mut t = roots[rng.random_range(0..roots.len())];
        for _ in 0..3 {
            let (p, dp, half_ddp) = line_section_derivatives(&la, &lb, d, t);
            let ddp = half_ddp * Complex64::new(2.0, 0.0);
            let denom = dp * dp - p * ddp;
            let step = if denom.norm() > 1e-300 {
                p * dp / denom
            } else if dp.norm() > 1e-300 {
                p / dp
            } else {
                break;
            };
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            t -= step;
        }
        let y = &a + &b * t;
        let point = match ProjectivePoint::new(y) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let residual = match f.evaluate(point.rep()) {
            Ok(v) => v.norm(),
            Err(_) => continue,
        };
        if residual < 1e-8 * scale.max(1e-300) {
            return Ok(point);
        }
    }
    Err(Error::RootFinding("no well-conditioned line section after retries"))
}

/// Values of each linear form of `f` at the line anchors: `(L_i(a), L_i(b))`.
fn line_values(f: &WaringPolynomial, a: &CVector, b: &CVector) -> (Vec<Complex64>, Vec<Complex64>) {
    let r = f.num_terms();
    let dim = f.num_vars();
    let mut la = Vec::with_capacity(r);
    let mut lb = Vec::with_capacity(r);
    for i in 0..r {
        let mut va = ZERO;
        let mut vb = ZERO;
        for j in 0..dim {
            va += f.coeffs()[(i, j)] * a[j];
            vb += f.coeffs()[(i, j)] * b[j];
        }
        la.push(va);
        lb.push(vb);
    }
    (la, lb)
}

/// Coefficients of `t -> f(a + t b)` in ascending order:
/// `c_j = C(D, j) sum_i L_i(a)^(D-j) L_i(b)^j`.
fn line_section_coefficients(d: usize, la: &[Complex64], lb: &[Complex64]) -> Vec<Complex64> {
    (0..=d)
        .map(|j| {
            let mut sum = ZERO;
            for i in 0..la.len() {
                sum += la[i].powu((d - j) as u32) * lb[i].powu(j as u32);
            }
            sum * Complex64::new(binomial(d as u64, j as u64), 0.0)
        })
        .collect()
}

/// Values `(p, p', p''/2)` of the line section at `t`, summed term by term
/// as powers of the exactly evaluated linear values `L_i(a) + t L_i(b)`.
fn line_section_derivatives(
    la: &[Complex64],
    lb: &[Complex64],
    degree: usize,
    t: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let d = degree as f64;
    let mut p = ZERO;
    let mut dp = ZERO;
    let mut half_ddp = ZERO;
    for (&alpha, &beta) in la.iter().zip(lb) {
        let ell = alpha + t * beta;
        let low = ell.powu((degree - 2) as u32);
        let mid = low * ell;
        p += mid * ell;
        dp += beta * mid;
        half_ddp += beta * beta * low;
    }
    (p, dp * d, half_ddp * Complex64::new(d * (d - 1.0) * 0.5, 0.0))
}

/// Frame adapted to the hypersurface `V(f)` at a smooth root `y`: the normal
/// is the conjugated gradient projected off `y`, so the tangent block spans
/// the kernel of `w -> df(y) . w` inside `y`'s orthogonal complement.
pub fn hypersurface_frame(f: &WaringPolynomial, y: &ProjectivePoint) -> Result<Frame> {
    let grad = f.gradient(y.rep())?;
    let full = grad.norm();
    let conj_grad = CVector::from_iterator(grad.len(), grad.iter().map(|c| c.conj()));
    let normal_dir = project_orth(&conj_grad, y);
    let norm = normal_dir.norm();
    if !(norm.is_finite()) || norm <= 1e-10 * full.max(1e-300) {
        return Err(Error::SingularPoint);
    }
    Frame::from_point_and_normal(y.clone(), normal_dir / Complex64::new(norm, 0.0))
}

/// Draws `n` random hyperplane frames sharing a common point.
///
/// Normals are independent Gaussian directions; the common point is the unit
/// vector orthogonal to all of them, and each frame is adapted to its
/// hyperplane at that point.
pub fn sample_hyperplane_frames<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(Vec<Frame>, ProjectivePoint)> {
    if n == 0 {
        return Err(Error::Domain("at least one hyperplane is required"));
    }
    let dim = n + 1;
    for _ in 0..PAIR_ATTEMPTS {
        let normals: Vec<CVector> = (0..n)
            .map(|_| {
                let v = gaussian_vector(dim, rng);
                let norm = v.norm();
                v / Complex64::new(norm, 0.0)
            })
            .collect();
        let Ok(ortho) = orthonormalize(&normals) else { continue };
        let Ok(completion) = complete_orthonormal(&ortho, dim) else { continue };
        let zeta = ProjectivePoint::new(completion[0].clone())?;
        let mut frames = Vec::with_capacity(n);
        let mut ok = true;
        for normal in &normals {
            match Frame::from_point_and_normal(zeta.clone(), normal.clone()) {
                Ok(fr) => frames.push(fr),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok((frames, zeta));
        }
    }
    Err(Error::RankDeficient)
}

/// Builds a start pair for `system`: each equation is moved by a unitary
/// matching a frame at one of its roots to a random hyperplane frame at a
/// common point, which then solves the moved system.
pub fn sample_start_pair<R: Rng + ?Sized>(
    system: &WaringSystem,
    rng: &mut R,
) -> Result<StartPair> {
    let mut last_err = Error::RankDeficient;
    for _ in 0..PAIR_ATTEMPTS {
        match try_start_pair(system, rng) {
            Ok(pair) => return Ok(pair),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn try_start_pair<R: Rng + ?Sized>(system: &WaringSystem, rng: &mut R) -> Result<StartPair> {
    let n = system.n();
    let (frames, zeta) = sample_hyperplane_frames(n, rng)?;
    let mut mats = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for (f, dst) in system.polys().iter().zip(&frames) {
        let y = sample_root_on_hypersurface(f, rng)?;
        let src = hypersurface_frame(f, &y)?;
        let u = match_frames(&src, dst, rng)?;
        let moved = unitary_action(&u, f)?;
        residuals.push(moved.evaluate(zeta.rep())?.norm());
        mats.push(u);
    }
    let pair = StartPair { unitaries: UnitaryTuple::new(mats)?, zeta, residuals };
    if pair.residuals.iter().all(|&r| r < 1e-8) {
        Ok(pair)
    } else {
        Err(Error::RootFinding("start residual above tolerance"))
    }
}

/// Applies a tuple of unitaries equationwise: `(u . F)_i = u_i . f_i`.
pub fn apply_tuple(u: &UnitaryTuple, system: &WaringSystem) -> Result<WaringSystem> {
    if u.n() != system.n() {
        return Err(Error::Dimension { expected: system.n(), got: u.n() });
    }
    let moved = system
        .polys()
        .iter()
        .zip(u.mats())
        .map(|(f, m)| unitary_action(m, f))
        .collect::<Result<Vec<_>>>()?;
    WaringSystem::new(moved)
}
