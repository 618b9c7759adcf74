//! Projective points, adapted frames, Haar-random unitaries, and the
//! one-parameter unitary paths that carry a start system to a target.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hdot, hermitian_eigen, skew_defect, unitary_defect, unitary_eigen};
use crate::rng::{complex_gaussian, random_phase};
use crate::{CMatrix, CVector};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Point of complex projective space, stored as a unit representative.
///
/// Representatives differing by a phase denote the same point; equality is
/// tested through the alignment `|<p, q>|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    rep: CVector,
}

impl ProjectivePoint {
    /// Normalizes the representative; rejects zero or non-finite input.
    pub fn new(v: CVector) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::Domain("projective points need at least two coordinates"));
        }
        if !v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Domain("projective representative must be finite"));
        }
        let n = v.norm();
        if n < 1e-150 {
            return Err(Error::Domain("projective representative must be nonzero"));
        }
        Ok(Self { rep: v / Complex64::new(n, 0.0) })
    }

    /// Unit representative.
    pub fn rep(&self) -> &CVector {
        &self.rep
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// `|<p, q>|`; equals 1 exactly when the points coincide.
    pub fn alignment(&self, other: &ProjectivePoint) -> f64 {
        hdot(&self.rep, &other.rep).norm()
    }

    /// Projective equality up to phase: `|<p, q>| > 1 - tol`.
    pub fn approx_eq(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.alignment(other) > 1.0 - tol
    }
}

/// Component of `v` orthogonal to the line through `p`.
pub fn project_orth(v: &CVector, p: &ProjectivePoint) -> CVector {
    let c = hdot(p.rep(), v);
    v - p.rep() * c
}

/// Tuple of unitaries, one per equation of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryTuple {
    mats: Vec<CMatrix>,
}

impl UnitaryTuple {
    /// Validates that every matrix is square, of a common dimension, and
    /// unitary within `1e-10`.
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let first = mats.first().ok_or(Error::Domain("a tuple needs at least one matrix"))?;
        let dim = first.nrows();
        for m in &mats {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dimension { expected: dim, got: m.nrows().max(m.ncols()) });
            }
            let defect = unitary_defect(m);
            if !defect.is_finite() || defect > 1e-10 {
                return Err(Error::NonUnitary { defect });
            }
        }
        Ok(Self { mats })
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        Self { mats: (0..n).map(|_| CMatrix::identity(dim, dim)).collect() }
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }
}

/// Tuple of skew-Hermitian generators with cached eigenstructure, so points
/// along `t -> exp(t a_i)` cost one small triple product each.
#[derive(Debug, Clone)]
pub struct SkewHermitianTuple {
    mats: Vec<CMatrix>,
    speed: f64,
    spectra: Vec<(Vec<f64>, CMatrix)>,
}

impl SkewHermitianTuple {
    /// Validates skewness within `1e-10` and caches, for each generator
    /// `a = i h`, the eigendecomposition of the Hermitian part `h`.
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let first = mats.first().ok_or(Error::Domain("a tuple needs at least one matrix"))?;
        let dim = first.nrows();
        let mut spectra = Vec::with_capacity(mats.len());
        let mut speed_sq = 0.0;
        for m in &mats {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dimension { expected: dim, got: m.nrows().max(m.ncols()) });
            }
            let defect = skew_defect(m);
            if !defect.is_finite() || defect > 1e-10 {
                return Err(Error::Domain("matrix is not skew-Hermitian"));
            }
            speed_sq += m.norm_squared();
            let h = m * (-I);
            spectra.push(hermitian_eigen(&h)?);
        }
        Ok(Self { mats, speed: (0.5 * speed_sq).sqrt(), spectra })
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    /// Path speed `sqrt(1/2 sum_i |a_i|_F^2)`; an upper bound on the velocity
    /// of the induced motion on the sphere.
    pub fn speed(&self) -> f64 {
        self.speed
    }
}

/// Evaluates the rigid path `t -> (exp(t a_1), ..., exp(t a_n))`.
pub fn path_at(a: &SkewHermitianTuple, t: f64) -> UnitaryTuple {
    let dim = a.dim();
    let mats = a
        .spectra
        .iter()
        .map(|(theta, w)| {
            let phases = CVector::from_iterator(
                dim,
                theta.iter().map(|&th| {
                    let angle = t * th;
                    Complex64::new(angle.cos(), angle.sin())
                }),
            );
            let mut scaled = w.clone();
            for j in 0..dim {
                let p = phases[j];
                for i in 0..dim {
                    scaled[(i, j)] *= p;
                }
            }
            scaled * w.adjoint()
        })
        .collect();
    UnitaryTuple { mats }
}

/// Draws a unitary matrix from the Haar measure: a complex Ginibre matrix is
/// QR-factored and the phases of `diag(R)` are absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        let mut ok = true;
        for j in 0..dim {
            let p = r[(j, j)];
            let norm = p.norm();
            if norm < 1e-12 {
                ok = false;
                break;
            }
            let phase = p / Complex64::new(norm, 0.0);
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        if ok {
            return q;
        }
    }
}

/// Principal logarithm of a unitary matrix: the skew-Hermitian `a` with
/// eigenangles in `(-pi, pi)` such that `exp(a) = u`.
///
/// An eigenvalue within `1e-9` of angle `pi` has no principal branch and is
/// reported as [`Error::BranchAmbiguity`].
pub fn principal_log(u: &CMatrix) -> Result<CMatrix> {
    let (angles, w) = unitary_eigen(u)?;
    for &theta in &angles {
        if core::f64::consts::PI - theta.abs() < 1e-9 {
            return Err(Error::BranchAmbiguity);
        }
    }
    let dim = u.nrows();
    let mut scaled = w.clone();
    for j in 0..dim {
        let phase = I * Complex64::new(angles[j], 0.0);
        for i in 0..dim {
            scaled[(i, j)] *= phase;
        }
    }
    let raw = scaled * w.adjoint();
    // Symmetrize away rounding: the exact logarithm is skew-Hermitian.
    Ok((&raw - raw.adjoint()).scale(0.5))
}

/// Principal logarithm applied entrywise to a tuple.
pub fn log_tuple(u: &UnitaryTuple) -> Result<SkewHermitianTuple> {
    let mats = u.mats().iter().map(principal_log).collect::<Result<Vec<_>>>()?;
    SkewHermitianTuple::new(mats)
}

/// Orthonormal frame adapted to a point on a hypersurface: the point itself,
/// a basis of the hypersurface tangent directions, and the normal.
#[derive(Debug, Clone)]
pub struct Frame {
    point: ProjectivePoint,
    tangent_basis: Vec<CVector>,
    normal: CVector,
}

impl Frame {
    /// Validates that point, tangents, and normal assemble into a unitary
    /// matrix (orthonormality within `1e-8`).
    pub fn new(point: ProjectivePoint, tangent_basis: Vec<CVector>, normal: CVector) -> Result<Self> {
        let dim = point.dim();
        if tangent_basis.len() + 2 != dim {
            return Err(Error::Dimension { expected: dim - 2, got: tangent_basis.len() });
        }
        let frame = Self { point, tangent_basis, normal };
        let defect = unitary_defect(&frame.to_matrix());
        if !defect.is_finite() || defect > 1e-8 {
            return Err(Error::Domain("frame columns are not orthonormal"));
        }
        Ok(frame)
    }

    /// Builds the tangent block by orthonormal completion of `(point, normal)`.
    pub fn from_point_and_normal(point: ProjectivePoint, normal: CVector) -> Result<Self> {
        let tangent_basis =
            crate::linalg::complete_orthonormal(&[point.rep().clone(), normal.clone()], point.dim())?;
        Self::new(point, tangent_basis, normal)
    }

    pub fn point(&self) -> &ProjectivePoint {
        &self.point
    }

    pub fn tangent_basis(&self) -> &[CVector] {
        &self.tangent_basis
    }

    pub fn normal(&self) -> &CVector {
        &self.normal
    }

    /// Columns ordered as point, tangents, normal.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = self.point.dim();
        let mut m = CMatrix::zeros(dim, dim);
        m.set_column(0, self.point.rep());
        for (j, t) in self.tangent_basis.iter().enumerate() {
            m.set_column(1 + j, t);
        }
        m.set_column(dim - 1, &self.normal);
        m
    }
}

/// Unitary carrying the source frame to the destination frame, randomized
/// over the stabilizer: point goes to point and normal to normal up to Haar
/// phases, and the tangent block is mixed by a Haar unitary.
pub fn match_frames<R: Rng + ?Sized>(src: &Frame, dst: &Frame, rng: &mut R) -> Result<CMatrix> {
    let dim = src.point.dim();
    if dst.point.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: dst.point.dim() });
    }
    let mut block = CMatrix::zeros(dim, dim);
    block[(0, 0)] = random_phase(rng);
    let inner = dim - 2;
    if inner > 0 {
        let v = haar_unitary(inner, rng);
        for i in 0..inner {
            for j in 0..inner {
                block[(1 + i, 1 + j)] = v[(i, j)];
            }
        }
    }
    block[(dim - 1, dim - 1)] = random_phase(rng);
    Ok(dst.to_matrix() * block * src.to_matrix().adjoint())
}
