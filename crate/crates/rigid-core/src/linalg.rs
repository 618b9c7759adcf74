//! Complex dense linear algebra built on nalgebra: Hermitian and unitary
//! eigenstructure, bordered Newton solves, polynomial companion roots, and
//! orthonormal completions.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

/// Hermitian inner product `<a, b> = a^H b` (conjugate-linear in `a`).
pub fn hdot(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// Frobenius distance of `u^H u` from the identity.
pub fn unitary_defect(u: &CMatrix) -> f64 {
    let d = u.ncols();
    (u.adjoint() * u - CMatrix::identity(d, d)).norm()
}

/// Frobenius distance of `a` from skew-Hermitian form, `|a + a^H|`.
pub fn skew_defect(a: &CMatrix) -> f64 {
    (a + a.adjoint()).norm()
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension { expected: m.nrows(), got: m.ncols() });
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized before factoring, so tiny Hermitian defects from
/// upstream arithmetic do not leak into the eigenvectors.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let d = check_square(h)?;
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Smallest singular value.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().fold(f64::INFINITY, |acc, &s| acc.min(s))
}

/// Eigendecomposition `u = W diag(exp(i theta)) W^H` of a unitary matrix,
/// with `theta` in `(-pi, pi]` and `W` unitary.
///
/// A unitary matrix is normal, so it is unitarily diagonalizable. We split it
/// into the commuting Hermitian pair `(u + u^H)/2` and `(u - u^H)/(2i)`
/// (cosine and sine of the angle), diagonalize the first, and refine each
/// eigenvalue cluster against the second. This keeps the computation inside
/// the well-tested Hermitian solver instead of a general normal-matrix path.
pub fn unitary_eigen(u: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let d = check_square(u)?;
    let defect = unitary_defect(u);
    if !defect.is_finite() || defect > 1e-10 {
        return Err(Error::NonUnitary { defect });
    }
    let cos_part = (u + u.adjoint()).scale(0.5);
    let sin_part = (u - u.adjoint()).scale(0.5) * Complex64::new(0.0, -1.0);
    let (cos_values, cos_vectors) = hermitian_eigen(&cos_part)?;

    // Group eigenvalues of the cosine part that are equal to working accuracy;
    // within each group the sine part separates theta from -theta.
    let cluster_tol = 1e-7;
    let mut vectors = CMatrix::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && cos_values[end] - cos_values[end - 1] < cluster_tol {
            end += 1;
        }
        let block = cos_vectors.columns(start, end - start).into_owned();
        if end - start == 1 {
            vectors.set_column(start, &block.column(0));
        } else {
            let restricted = block.adjoint() * &sin_part * &block;
            let (_, w) = hermitian_eigen(&restricted)?;
            let rotated = block * w;
            for j in 0..(end - start) {
                vectors.set_column(start + j, &rotated.column(j));
            }
        }
        start = end;
    }

    // Rayleigh quotients of the full unitary give the angles directly.
    let mut angles = Vec::with_capacity(d);
    for j in 0..d {
        let w = vectors.column(j).into_owned();
        let lambda = hdot(&w, &(u * &w));
        angles.push(lambda.im.atan2(lambda.re));
    }
    Ok((angles, vectors))
}

/// Solves the bordered system `[jac; z^H] delta = [rhs; 0]`.
///
/// `jac` is `n x (n+1)` and `z` a unit representative; the extra row pins the
/// correction to the hyperplane `z^H delta = 0`. Returns `None` when the
/// bordered matrix is numerically singular.
pub fn solve_bordered(jac: &CMatrix, z: &CVector, rhs: &CVector) -> Option<CVector> {
    let n = jac.nrows();
    let dim = jac.ncols();
    debug_assert_eq!(dim, n + 1);
    debug_assert_eq!(z.len(), dim);
    debug_assert_eq!(rhs.len(), n);
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..dim {
            m[(i, j)] = jac[(i, j)];
        }
    }
    for j in 0..dim {
        m[(n, j)] = z[j].conj();
    }
    let mut b = CVector::zeros(dim);
    for i in 0..n {
        b[i] = rhs[i];
    }
    let lu = m.lu();
    let diag = lu.u().diagonal();
    let mut min_p = f64::INFINITY;
    let mut max_p: f64 = 0.0;
    for p in diag.iter() {
        let a = p.norm();
        min_p = min_p.min(a);
        max_p = max_p.max(a);
    }
    if !(min_p.is_finite() && max_p.is_finite()) || min_p <= 1e-14 * max_p.max(1e-300) {
        return None;
    }
    let sol = lu.solve(&b)?;
    if sol.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Some(sol)
    } else {
        None
    }
}

/// Roots of a univariate polynomial with ascending coefficients
/// `p(t) = coeffs[0] + coeffs[1] t + ...`, via companion-matrix Schur.
///
/// The caller must ensure the leading coefficient is well scaled; a leading
/// coefficient at zero relative to the largest entry is rejected.
pub fn univariate_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len().checked_sub(1).ok_or(Error::Domain("empty coefficient list"))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let lead = coeffs[deg];
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Domain("zero polynomial"));
    }
    if lead.norm() <= 1e-12 * scale {
        return Err(Error::RootFinding("leading coefficient vanishes"));
    }
    if deg == 1 {
        return Ok([-coeffs[0] / lead].into_iter().collect());
    }
    let mut companion = CMatrix::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = companion
        .try_schur(1e-14, 5_000)
        .ok_or(Error::RootFinding("companion Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Modified Gram-Schmidt with reorthogonalization; errors when the input is
/// rank deficient at tolerance `1e-8` relative to each vector's norm.
pub fn orthonormalize(vs: &[CVector]) -> Result<Vec<CVector>> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vs.len());
    for v in vs {
        let original = v.norm();
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = hdot(b, &w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if !(n.is_finite()) || n <= 1e-8 * original.max(1e-300) {
            return Err(Error::RankDeficient);
        }
        basis.push(w / Complex64::new(n, 0.0));
    }
    Ok(basis)
}

/// Completes an orthonormal set to a full orthonormal basis of `C^dim`,
/// returning only the appended vectors. Candidates are standard basis
/// vectors, chosen greedily by residual norm, so the result is deterministic.
pub fn complete_orthonormal(basis: &[CVector], dim: usize) -> Result<Vec<CVector>> {
    for b in basis {
        if b.len() != dim {
            return Err(Error::Dimension { expected: dim, got: b.len() });
        }
    }
    let mut full: Vec<CVector> = basis.to_vec();
    let mut appended = Vec::new();
    while full.len() < dim {
        let mut best: Option<(f64, CVector)> = None;
        for j in 0..dim {
            let mut w = CVector::zeros(dim);
            w[j] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for b in &full {
                    let c = hdot(b, &w);
                    w -= b * c;
                }
            }
            let n = w.norm();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, w));
            }
        }
        let (n, w) = best.expect("dim > 0");
        if n <= 1e-8 {
            return Err(Error::RankDeficient);
        }
        let unit = w / Complex64::new(n, 0.0);
        full.push(unit.clone());
        appended.push(unit);
    }
    Ok(appended)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_vector, keyed_stream};

    fn random_matrix(d: usize, seed: u64) -> CMatrix {
        let mut rng = keyed_stream(seed, 0);
        CMatrix::from_fn(d, d, |_, _| crate::rng::complex_gaussian(&mut rng))
    }

    fn random_unitary(d: usize, seed: u64) -> CMatrix {
        let g = random_matrix(d, seed);
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..d {
            let p = r[(j, j)];
            let phase = p / Complex64::new(p.norm(), 0.0);
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
        q
    }

    #[test]
    fn hermitian_eigen_reconstructs_and_sorts() {
        let g = random_matrix(5, 21);
        let h = (&g + g.adjoint()).scale(0.5);
        let (values, w) = hermitian_eigen(&h).unwrap();
        assert!(values.windows(2).all(|p| p[0] <= p[1]));
        let lambda = CMatrix::from_fn(5, 5, |i, j| {
            if i == j { Complex64::new(values[i], 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let recon = &w * lambda * w.adjoint();
        assert!((recon - &h).norm() < 1e-12 * h.norm());
        assert!(unitary_defect(&w) < 1e-12);
    }

    #[test]
    fn unitary_eigen_reconstructs_with_angles_in_range() {
        for seed in [1u64, 2, 3, 4] {
            let u = random_unitary(4, seed);
            let (angles, w) = unitary_eigen(&u).unwrap();
            assert!(unitary_defect(&w) < 1e-10);
            let lambda = CMatrix::from_fn(4, 4, |i, j| {
                if i == j {
                    Complex64::new(angles[i].cos(), angles[i].sin())
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let recon = &w * lambda * w.adjoint();
            assert!((recon - &u).norm() < 1e-9, "seed {seed}: defect {}", (&w * Complex64::new(0.0, 0.0)).norm());
            for &t in &angles {
                assert!(t > -core::f64::consts::PI - 1e-12 && t <= core::f64::consts::PI + 1e-12);
            }
        }
    }

    #[test]
    fn unitary_eigen_handles_repeated_eigenvalues() {
        // diag(1, 1, i) conjugated by a random unitary has a double eigenvalue.
        let w = random_unitary(3, 9);
        let lambda = CMatrix::from_diagonal(&CVector::from_iterator(
            3,
            [
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
            ],
        ));
        let u = &w * lambda * w.adjoint();
        let (angles, v) = unitary_eigen(&u).unwrap();
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 0.0).abs() < 1e-10);
        assert!((sorted[1] - 0.0).abs() < 1e-10);
        assert!((sorted[2] - core::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!(unitary_defect(&v) < 1e-10);
    }

    #[test]
    fn unitary_eigen_rejects_non_unitary() {
        let g = random_matrix(3, 5);
        assert!(matches!(unitary_eigen(&g), Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn bordered_solve_satisfies_both_blocks() {
        let mut rng = keyed_stream(31, 0);
        let jac = CMatrix::from_fn(2, 3, |_, _| crate::rng::complex_gaussian(&mut rng));
        let z = crate::rng::unit_vector(3, &mut rng);
        let rhs = gaussian_vector(2, &mut rng);
        let delta = solve_bordered(&jac, &z, &rhs).unwrap();
        assert!((&jac * &delta - &rhs).norm() < 1e-12);
        assert!(hdot(&z, &delta).norm() < 1e-12);
    }

    #[test]
    fn bordered_solve_detects_singular() {
        // Jacobian rows proportional to z^H make the bordered matrix singular.
        let z = CVector::from_iterator(2, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let jac = CMatrix::from_fn(1, 2, |_, j| if j == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        assert!(solve_bordered(&jac, &z, &CVector::from_element(1, Complex64::new(1.0, 0.0))).is_none());
    }

    #[test]
    fn univariate_roots_match_known_factorization() {
        // (t - 2)(t + i) = t^2 + (i - 2) t - 2i
        let coeffs = [
            Complex64::new(0.0, -2.0),
            Complex64::new(-2.0, 1.0),
            Complex64::new(1.0, 0.0),
        ];
        let mut roots = univariate_roots(&coeffs).unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((roots[0] - Complex64::new(0.0, -1.0)).norm() < 1e-10);
        assert!((roots[1] - Complex64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn univariate_roots_rejects_degenerate_leading_coefficient() {
        let coeffs = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(univariate_roots(&coeffs), Err(Error::RootFinding(_))));
    }

    #[test]
    fn completion_builds_full_unitary_basis() {
        let mut rng = keyed_stream(41, 0);
        let v1 = crate::rng::unit_vector(4, &mut rng);
        let raw = gaussian_vector(4, &mut rng);
        let v2_set = orthonormalize(&[v1.clone(), raw]).unwrap();
        let rest = complete_orthonormal(&v2_set, 4).unwrap();
        assert_eq!(rest.len(), 2);
        let mut all = v2_set;
        all.extend(rest);
        for i in 0..4 {
            for j in 0..4 {
                let g = hdot(&all[i], &all[j]).norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-10, "gram({i},{j}) = {g}");
            }
        }
    }

    #[test]
    fn orthonormalize_rejects_dependent_input() {
        let v = CVector::from_iterator(3, [
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
        ]);
        let w = &v * Complex64::new(0.5, 0.5);
        assert!(matches!(orthonormalize(&[v, w]), Err(Error::RankDeficient)));
    }
}
