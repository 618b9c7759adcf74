//! Polynomials as sums of powers of linear forms (Waring representation),
//! plus the dense expansions used by exact conditioning numbers and tests.
//!
//! A polynomial of degree `D` in `n + 1` variables is stored as an
//! `r x (n+1)` coefficient matrix; row `lambda_i` contributes the term
//! `(lambda_i . z)^D` with the unconjugated pairing. Evaluation and gradients
//! cost `O(r (n + log D))`, independent of the number of dense monomials.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::unitary_defect;
use crate::math::factorial;
use crate::{CMatrix, CVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Maximum number of dense monomials `dense_expand` will produce.
pub const DENSE_TERM_LIMIT: u128 = 1_000_000;

/// Homogeneous polynomial in Waring form.
#[derive(Debug, Clone, PartialEq)]
pub struct WaringPolynomial {
    degree: usize,
    coeffs: CMatrix,
}

impl WaringPolynomial {
    /// Builds a polynomial of the given degree from an `r x (n+1)` matrix of
    /// linear forms. Requires `degree >= 2`, at least one term, at least two
    /// variables, and finite entries.
    pub fn new(degree: usize, coeffs: CMatrix) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Domain("degree must be at least 2"));
        }
        if coeffs.nrows() == 0 {
            return Err(Error::Domain("at least one linear form is required"));
        }
        if coeffs.ncols() < 2 {
            return Err(Error::Domain("at least two variables are required"));
        }
        if !coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Domain("coefficients must be finite"));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of variables `n + 1`.
    pub fn num_vars(&self) -> usize {
        self.coeffs.ncols()
    }

    /// Number of linear forms `r` in the representation.
    pub fn num_terms(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    /// Number of rows with a nonzero linear form; a diagnostic for
    /// representations padded with zero rows.
    pub fn effective_terms(&self) -> usize {
        (0..self.coeffs.nrows())
            .filter(|&i| self.coeffs.row(i).iter().any(|c| c.norm_sqr() > 0.0))
            .count()
    }

    /// `sum_i |lambda_i|^D`; bounds `|f|` on the unit sphere and serves as
    /// the scale for relative residuals.
    pub fn coefficient_scale(&self) -> f64 {
        (0..self.coeffs.nrows())
            .map(|i| self.coeffs.row(i).norm().powi(self.degree as i32))
            .sum()
    }

    fn check_dim(&self, z: &CVector) -> Result<()> {
        if z.len() != self.num_vars() {
            return Err(Error::Dimension { expected: self.num_vars(), got: z.len() });
        }
        Ok(())
    }

    /// `f(z) = sum_i (lambda_i . z)^D`.
    pub fn evaluate(&self, z: &CVector) -> Result<Complex64> {
        self.check_dim(z)?;
        let (r, dim) = (self.coeffs.nrows(), self.coeffs.ncols());
        let mut acc = ZERO;
        for i in 0..r {
            let mut dot = ZERO;
            for j in 0..dim {
                dot += self.coeffs[(i, j)] * z[j];
            }
            acc += dot.powu(self.degree as u32);
        }
        Ok(acc)
    }

    /// Holomorphic gradient `d f(z) = D sum_i (lambda_i . z)^(D-1) lambda_i`.
    pub fn gradient(&self, z: &CVector) -> Result<CVector> {
        self.check_dim(z)?;
        let (r, dim) = (self.coeffs.nrows(), self.coeffs.ncols());
        let mut grad = CVector::zeros(dim);
        for i in 0..r {
            let mut dot = ZERO;
            for j in 0..dim {
                dot += self.coeffs[(i, j)] * z[j];
            }
            let w = dot.powu(self.degree as u32 - 1);
            for j in 0..dim {
                grad[j] += w * self.coeffs[(i, j)];
            }
        }
        Ok(grad * Complex64::new(self.degree as f64, 0.0))
    }
}

/// Pullback of `f` by `u^(-1)`: `(u . f)(z) = f(u^H z)`.
///
/// In Waring coordinates this is a single matrix product, `C' = C u^H`; the
/// degree and the number of terms are unchanged, and the Bombieri-Weyl norm
/// is preserved. Rejects matrices that are not unitary within `1e-10`.
pub fn unitary_action(u: &CMatrix, f: &WaringPolynomial) -> Result<WaringPolynomial> {
    if u.nrows() != f.num_vars() || u.ncols() != f.num_vars() {
        return Err(Error::Dimension { expected: f.num_vars(), got: u.nrows().max(u.ncols()) });
    }
    let defect = unitary_defect(u);
    if !defect.is_finite() || defect > 1e-10 {
        return Err(Error::NonUnitary { defect });
    }
    WaringPolynomial::new(f.degree, &f.coeffs * u.adjoint())
}

/// Homogeneous components of the shifted polynomial `z -> f(zeta + z)`,
/// evaluated at `w`: returns `[h_1(w), ..., h_D(w)]`.
///
/// Uses `D + 1` evaluations at roots-of-unity multiples of `w` and an inverse
/// discrete Fourier transform, so no dense expansion is formed.
pub fn homogeneous_parts_at(
    f: &WaringPolynomial,
    zeta: &CVector,
    w: &CVector,
) -> Result<Vec<Complex64>> {
    f.check_dim(zeta)?;
    f.check_dim(w)?;
    let d = f.degree;
    let nodes = d + 1;
    let step = core::f64::consts::TAU / nodes as f64;
    let mut values = Vec::with_capacity(nodes);
    let mut shifted = CVector::zeros(zeta.len());
    for j in 0..nodes {
        let omega = Complex64::new((step * j as f64).cos(), (step * j as f64).sin());
        for t in 0..zeta.len() {
            shifted[t] = zeta[t] + omega * w[t];
        }
        values.push(f.evaluate(&shifted)?);
    }
    let mut parts = Vec::with_capacity(d);
    for k in 1..=d {
        let mut acc = ZERO;
        for (j, g) in values.iter().enumerate() {
            let angle = -step * (j * k) as f64;
            acc += g * Complex64::new(angle.cos(), angle.sin());
        }
        parts.push(acc / Complex64::new(nodes as f64, 0.0));
    }
    Ok(parts)
}

/// Square system of Waring polynomials: `n` equations in `n + 1` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct WaringSystem {
    polys: Vec<WaringPolynomial>,
}

impl WaringSystem {
    /// Requires `polys.len() = num_vars - 1` and a common variable count.
    pub fn new(polys: Vec<WaringPolynomial>) -> Result<Self> {
        let first = polys.first().ok_or(Error::Domain("a system needs at least one polynomial"))?;
        let dim = first.num_vars();
        if !polys.iter().all(|p| p.num_vars() == dim) {
            return Err(Error::Domain("all polynomials must share the variable count"));
        }
        if polys.len() + 1 != dim {
            return Err(Error::Dimension { expected: dim - 1, got: polys.len() });
        }
        Ok(Self { polys })
    }

    /// Number of equations `n`; the projective dimension of the domain.
    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn num_vars(&self) -> usize {
        self.polys[0].num_vars()
    }

    pub fn polys(&self) -> &[WaringPolynomial] {
        &self.polys
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.polys.iter().map(|p| p.degree()).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.polys.iter().map(|p| p.degree()).max().unwrap_or(2)
    }

    pub fn evaluate_all(&self, z: &CVector) -> Result<CVector> {
        let mut out = CVector::zeros(self.n());
        for (i, p) in self.polys.iter().enumerate() {
            out[i] = p.evaluate(z)?;
        }
        Ok(out)
    }

    /// Jacobian matrix, `n x (n+1)`, row `i` the gradient of `f_i`.
    pub fn jacobian(&self, z: &CVector) -> Result<CMatrix> {
        let mut jac = CMatrix::zeros(self.n(), self.num_vars());
        for (i, p) in self.polys.iter().enumerate() {
            let g = p.gradient(z)?;
            for j in 0..self.num_vars() {
                jac[(i, j)] = g[j];
            }
        }
        Ok(jac)
    }
}

/// Polynomial stored as a map from exponent vectors to coefficients.
///
/// Not necessarily homogeneous: `degree` bounds the total degree of every
/// term. Serves as an oracle for the Waring fast paths and as the substrate
/// for exact gamma computations.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePolynomial {
    degree: usize,
    num_vars: usize,
    coeffs: BTreeMap<Vec<u32>, Complex64>,
}

impl DensePolynomial {
    /// Validates exponent lengths and total degrees; exact zeros are dropped.
    pub fn new(
        degree: usize,
        num_vars: usize,
        coeffs: BTreeMap<Vec<u32>, Complex64>,
    ) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::Domain("a polynomial needs at least one variable"));
        }
        for (a, c) in &coeffs {
            if a.len() != num_vars {
                return Err(Error::Dimension { expected: num_vars, got: a.len() });
            }
            if a.iter().map(|&e| e as usize).sum::<usize>() > degree {
                return Err(Error::Domain("exponent exceeds the stated degree"));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Domain("coefficients must be finite"));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| c.norm_sqr() > 0.0).collect();
        Ok(Self { degree, num_vars, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn evaluate(&self, z: &CVector) -> Result<Complex64> {
        if z.len() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, got: z.len() });
        }
        let mut acc = ZERO;
        for (a, c) in &self.coeffs {
            let mut term = *c;
            for (j, &e) in a.iter().enumerate() {
                if e > 0 {
                    term *= z[j].powu(e);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Terms of total degree exactly `k`, as a polynomial of degree `k`.
    pub fn homogeneous_part(&self, k: usize) -> DensePolynomial {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(a, _)| a.iter().map(|&e| e as usize).sum::<usize>() == k)
            .map(|(a, c)| (a.clone(), *c))
            .collect();
        DensePolynomial { degree: k, num_vars: self.num_vars, coeffs }
    }

    /// Bombieri-Weyl norm; requires a homogeneous polynomial.
    ///
    /// Monomials are orthogonal with `|z^a|^2 = a_0! ... a_n! / D!`, which
    /// makes the norm invariant under the unitary action.
    pub fn bw_norm(&self) -> Result<f64> {
        let d = self.degree;
        let mut acc = 0.0f64;
        for (a, c) in &self.coeffs {
            if a.iter().map(|&e| e as usize).sum::<usize>() != d {
                return Err(Error::Domain("Bombieri-Weyl norm requires a homogeneous polynomial"));
            }
            let mut weight = 1.0 / factorial(d as u64);
            for &e in a {
                weight *= factorial(e as u64);
            }
            acc += c.norm_sqr() * weight;
        }
        Ok(acc.sqrt())
    }

    /// Bombieri-Weyl norm of the degree-`k` part.
    pub fn bw_norm_part(&self, k: usize) -> f64 {
        self.homogeneous_part(k).bw_norm().expect("part is homogeneous by construction")
    }

    /// Substitutes `z = center + basis y`, returning a polynomial in the
    /// `basis.ncols()` variables `y`.
    pub fn compose_affine(&self, center: &CVector, basis: &CMatrix) -> Result<DensePolynomial> {
        if center.len() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, got: center.len() });
        }
        if basis.nrows() != self.num_vars {
            return Err(Error::Dimension { expected: self.num_vars, got: basis.nrows() });
        }
        let m = basis.ncols();
        // Linear substitution for each original variable.
        let lines: Vec<BTreeMap<Vec<u32>, Complex64>> = (0..self.num_vars)
            .map(|i| {
                let mut line = BTreeMap::new();
                if center[i] != ZERO {
                    line.insert(vec![0u32; m], center[i]);
                }
                for j in 0..m {
                    if basis[(i, j)] != ZERO {
                        let mut e = vec![0u32; m];
                        e[j] = 1;
                        line.insert(e, basis[(i, j)]);
                    }
                }
                line
            })
            .collect();
        let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (a, c) in &self.coeffs {
            let mut term: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
            term.insert(vec![0u32; m], *c);
            for (i, &e) in a.iter().enumerate() {
                for _ in 0..e {
                    term = mul_maps(&term, &lines[i]);
                }
            }
            for (e, v) in term {
                *out.entry(e).or_insert(ZERO) += v;
            }
        }
        out.retain(|_, v| v.norm_sqr() > 0.0);
        DensePolynomial::new(self.degree, m, out)
    }
}

fn mul_maps(
    a: &BTreeMap<Vec<u32>, Complex64>,
    b: &BTreeMap<Vec<u32>, Complex64>,
) -> BTreeMap<Vec<u32>, Complex64> {
    let mut out = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(ZERO) += ca * cb;
        }
    }
    out
}

fn count_monomials(num_vars: usize, degree: usize) -> u128 {
    // C(num_vars + degree - 1, degree) with saturation.
    let mut acc: u128 = 1;
    for i in 0..degree {
        acc = acc.saturating_mul((num_vars + i) as u128) / (i as u128 + 1);
        if acc > DENSE_TERM_LIMIT {
            return u128::MAX;
        }
    }
    acc
}

/// Expands a Waring polynomial into dense monomial form.
///
/// The monomial count `C(n + D, D)` must stay at or below
/// [`DENSE_TERM_LIMIT`]; beyond that the expansion is refused rather than
/// attempted.
pub fn dense_expand(f: &WaringPolynomial) -> Result<DensePolynomial> {
    let dim = f.num_vars();
    let d = f.degree();
    let required = count_monomials(dim, d);
    if required > DENSE_TERM_LIMIT {
        return Err(Error::Capacity { required, limit: DENSE_TERM_LIMIT });
    }
    let mut coeffs: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    let mut exponents = vec![0u32; dim];
    expand_rec(f, 0, d as u32, &mut exponents, &mut coeffs);
    coeffs.retain(|_, v| v.norm_sqr() > 0.0);
    DensePolynomial::new(d, dim, coeffs)
}

fn expand_rec(
    f: &WaringPolynomial,
    var: usize,
    remaining: u32,
    exponents: &mut Vec<u32>,
    out: &mut BTreeMap<Vec<u32>, Complex64>,
) {
    let dim = f.num_vars();
    if var == dim - 1 {
        exponents[var] = remaining;
        let mut multinom = factorial(f.degree() as u64);
        for &e in exponents.iter() {
            multinom /= factorial(e as u64);
        }
        let mut sum = ZERO;
        for i in 0..f.num_terms() {
            let mut prod = ONE;
            for (j, &e) in exponents.iter().enumerate() {
                if e > 0 {
                    prod *= f.coeffs()[(i, j)].powu(e);
                }
            }
            sum += prod;
        }
        let c = sum * Complex64::new(multinom, 0.0);
        if c.norm_sqr() > 0.0 {
            out.insert(exponents.clone(), c);
        }
        exponents[var] = 0;
        return;
    }
    for e in 0..=remaining {
        exponents[var] = e;
        expand_rec(f, var + 1, remaining - e, exponents, out);
    }
    exponents[var] = 0;
}
