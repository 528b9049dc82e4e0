//! Real quadratic fields with their trace-dual bases, the induced map from
//! the product of upper half-planes into the Siegel space, the matrix
//! embedding of the Hilbert modular group into `Sp_4`, and the period
//! compatibility checks for real multiplication.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::periods::{period_matrices, standard_bases, CVector, DeRhamClass, HodgeBasis, PolarizedTorus};
use crate::symplectic::{
    cplx, from_blocks, identity, max_norm, CMatrix, IntegerSymplectic, SiegelPoint,
    SymplecticError, Tolerances, TWO_PI_I,
};

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("d must be a squarefree integer greater than 1")]
    InvalidField,
    #[error("element does not lie in the inverse different")]
    NotInInverseDifferent,
    #[error("matrix does not act integrally / symplectically on the module")]
    NotInGroup,
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

type CRational = Complex<BigRational>;

fn crat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// An element `a + b sqrt(d)` of the real quadratic field, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadFieldElement {
    d: i64,
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadFieldElement {
    pub fn new(d: i64, a: BigRational, b: BigRational) -> Self {
        QuadFieldElement { d, a, b }
    }

    pub fn from_i64(d: i64, a: i64, b: i64) -> Self {
        Self::new(d, crat(a), crat(b))
    }

    pub fn zero(d: i64) -> Self {
        Self::from_i64(d, 0, 0)
    }

    pub fn one(d: i64) -> Self {
        Self::from_i64(d, 1, 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.d, &self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.d, &self.a - &o.a, &self.b - &o.b)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.d, -self.a.clone(), -self.b.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        let dd = crat(self.d);
        Self::new(
            self.d,
            &self.a * &o.a + &dd * (&self.b * &o.b),
            &self.a * &o.b + &self.b * &o.a,
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.d, &self.a * c, &self.b * c)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.d, self.a.clone(), -self.b.clone())
    }

    /// `2a`, exactly.
    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    /// `a^2 - d b^2`, exactly.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - crat(self.d) * (&self.b * &self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Both real embeddings positive, decided exactly:
    /// `a > |b| sqrt(d)  <=>  a > 0 and a^2 > d b^2`.
    pub fn is_totally_positive(&self) -> bool {
        self.a.is_positive() && self.norm().is_positive()
    }

    /// The embedding `sigma_k`, `k` in {0, 1}: `a + b sqrt(d)` and
    /// `a - b sqrt(d)`.
    pub fn embed(&self, k: usize, sqrt_d: f64) -> f64 {
        let a = self.a.to_f64().unwrap();
        let b = self.b.to_f64().unwrap();
        if k == 0 {
            a + b * sqrt_d
        } else {
            a - b * sqrt_d
        }
    }

    pub fn to_string_exact(&self) -> String {
        format!("{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

/// An element `u + v sqrt(d)` of the complexified field, with exact
/// complex-rational coefficients. Arithmetic never leaves the exact layer;
/// the trace kills the irrational part.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFieldElement {
    d: i64,
    pub u: CRational,
    pub v: CRational,
}

impl ComplexFieldElement {
    pub fn new(d: i64, u: CRational, v: CRational) -> Self {
        ComplexFieldElement { d, u, v }
    }

    pub fn from_quad(x: &QuadFieldElement) -> Self {
        ComplexFieldElement {
            d: x.d,
            u: CRational::new(x.a.clone(), BigRational::zero()),
            v: CRational::new(x.b.clone(), BigRational::zero()),
        }
    }

    pub fn zero(d: i64) -> Self {
        ComplexFieldElement {
            d,
            u: CRational::new(BigRational::zero(), BigRational::zero()),
            v: CRational::new(BigRational::zero(), BigRational::zero()),
        }
    }

    pub fn one(d: i64) -> Self {
        ComplexFieldElement {
            d,
            u: CRational::new(BigRational::one(), BigRational::zero()),
            v: CRational::new(BigRational::zero(), BigRational::zero()),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.d, self.u.clone() + o.u.clone(), self.v.clone() + o.v.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        let dd = CRational::new(crat(self.d), BigRational::zero());
        Self::new(
            self.d,
            self.u.clone() * o.u.clone() + dd * self.v.clone() * o.v.clone(),
            self.u.clone() * o.v.clone() + self.v.clone() * o.u.clone(),
        )
    }

    /// `2u`, exactly (the trace of `u + v sqrt(d)` over the base).
    pub fn trace(&self) -> CRational {
        self.u.clone() + self.u.clone()
    }

    /// Numeric embeddings `u +/- v sqrt(d)`.
    pub fn embed(&self, k: usize, sqrt_d: f64) -> Complex64 {
        let u = cplx(self.u.re.to_f64().unwrap(), self.u.im.to_f64().unwrap());
        let v = cplx(self.v.re.to_f64().unwrap(), self.v.im.to_f64().unwrap());
        if k == 0 {
            u + v * sqrt_d
        } else {
            u - v * sqrt_d
        }
    }
}

/// A point of the product of two upper half-planes, listed by embeddings.
#[derive(Debug, Clone, Copy)]
pub struct HilbertTau {
    pub tau: [Complex64; 2],
}

impl HilbertTau {
    pub fn new(tau1: Complex64, tau2: Complex64) -> Option<Self> {
        (tau1.im > 0.0 && tau2.im > 0.0).then_some(HilbertTau { tau: [tau1, tau2] })
    }
}

/// A real quadratic field with its integral generator, discriminant,
/// totally positive basis of the inverse different, trace-dual basis of the
/// integer ring, and their numeric embedding matrices.
#[derive(Debug, Clone)]
pub struct QuadFieldContext {
    pub d: i64,
    pub disc: i64,
    pub omega: QuadFieldElement,
    pub x_basis: [QuadFieldElement; 2],
    pub r_basis: [QuadFieldElement; 2],
    sqrt_d: f64,
}

fn is_squarefree(d: i64) -> bool {
    let mut n = d;
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Build the context for `Q(sqrt(d))`: the integral generator is
/// `(1 + sqrt(d))/2` for `d = 1 mod 4` and `sqrt(d)` otherwise; the totally
/// positive basis of the inverse different is found by the deterministic
/// bounded search described at `x_basis_search`.
pub fn field_context(d: i64) -> Result<QuadFieldContext, FieldError> {
    if d <= 1 || !is_squarefree(d) {
        return Err(FieldError::InvalidField);
    }
    let (omega, disc) = if d % 4 == 1 {
        (
            QuadFieldElement::new(d, BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into())),
            d,
        )
    } else {
        (QuadFieldElement::from_i64(d, 0, 1), 4 * d)
    };
    let x_basis = x_basis_search(d, &omega, disc);
    let r_basis = solve_dual_basis(d, &x_basis);
    let ctx = QuadFieldContext {
        d,
        disc,
        omega,
        x_basis,
        r_basis,
        sqrt_d: (d as f64).sqrt(),
    };
    // Construction-time invariants, exact where possible.
    for i in 0..2 {
        assert!(ctx.x_basis[i].is_totally_positive());
        for j in 0..2 {
            let t = ctx.r_basis[i].mul(&ctx.x_basis[j]).trace();
            let expect = if i == j { BigRational::one() } else { BigRational::zero() };
            assert_eq!(t, expect, "trace duality failed for d = {d}");
        }
    }
    let x = ctx.x_embed();
    let r = ctx.r_embed();
    let det = x[(0, 0)] * x[(1, 1)] - x[(0, 1)] * x[(1, 0)];
    let x_inv = nalgebra::Matrix2::new(x[(1, 1)], -x[(0, 1)], -x[(1, 0)], x[(0, 0)]) / det;
    let res = (x_inv - r.transpose()).abs().max();
    assert!(res <= 1e-12, "embedding duality residual {res} for d = {d}");
    Ok(ctx)
}

// Enumerate inverse-different elements `(p + q omega)/sqrt(disc)` with
// coordinates bounded by 3, keep the totally positive ones, and pick the
// pair spanning the inverse different (coordinate determinant +-1) that is
// least under: total trace, then descending first embedding inside the
// pair, then coordinate tuple. For d = 5 this lands on
// `((5 + sqrt 5)/10, (5 - sqrt 5)/10)`.
fn x_basis_search(d: i64, omega: &QuadFieldElement, disc: i64) -> [QuadFieldElement; 2] {
    // 1/sqrt(disc) = sqrt(d) / (d * sqrt(disc/d)) as an exact element.
    let inv_sqrt_disc = if disc == d {
        // sqrt(d)/d
        QuadFieldElement::new(d, BigRational::zero(), BigRational::new(1.into(), d.into()))
    } else {
        // disc = 4d: 1/(2 sqrt d) = sqrt(d)/(2d)
        QuadFieldElement::new(d, BigRational::zero(), BigRational::new(1.into(), (2 * d).into()))
    };
    let mut candidates: Vec<(i64, (i64, i64), QuadFieldElement)> = Vec::new();
    for q in -3..=3i64 {
        for p in -3..=3i64 {
            let elt = QuadFieldElement::from_i64(d, p, 0)
                .add(&omega.scale(&crat(q)))
                .mul(&inv_sqrt_disc);
            if elt.is_totally_positive() {
                // The trace of (p + q omega)/sqrt(disc) is q.
                candidates.push((q, (p, q), elt));
            }
        }
    }
    let mut best: Option<((i64, (i64, i64, i64, i64)), [QuadFieldElement; 2])> = None;
    for (t1, c1, e1) in &candidates {
        for (t2, c2, e2) in &candidates {
            if c1 == c2 {
                continue;
            }
            let det = c1.0 * c2.1 - c1.1 * c2.0;
            if det != 1 && det != -1 {
                continue;
            }
            // Order inside the pair: descending first embedding, exactly:
            // sigma_1(e1) > sigma_1(e2) iff e1 - e2 has positive first
            // embedding.
            let diff = e1.sub(e2);
            let sigma1_positive = {
                // a + b sqrt(d) > 0 at the first embedding
                let a = &diff.a;
                let b = &diff.b;
                if b.is_zero() {
                    a.is_positive()
                } else if a.is_zero() {
                    b.is_positive()
                } else if a.is_positive() && b.is_positive() {
                    true
                } else if !a.is_positive() && !b.is_positive() {
                    false
                } else {
                    // signs differ: compare a^2 vs d b^2
                    let cmp = (a * a - crat(d) * (b * b)).is_positive();
                    if a.is_positive() {
                        cmp
                    } else {
                        !cmp
                    }
                }
            };
            if !sigma1_positive {
                continue;
            }
            let key = (t1 + t2, (c1.0, c1.1, c2.0, c2.1));
            if best.as_ref().map(|(k, _)| key < *k).unwrap_or(true) {
                best = Some((key, [e1.clone(), e2.clone()]));
            }
        }
    }
    best.expect("bounded search always finds a basis for squarefree d").1
}

// Solve `Tr(r x_j) = delta_ij` exactly for `r = s + t sqrt(d)`:
// `2 (s a_j + d t b_j) = delta_ij`.
fn solve_dual_basis(d: i64, x: &[QuadFieldElement; 2]) -> [QuadFieldElement; 2] {
    let two = crat(2);
    let dd = crat(d);
    // Rows of the linear system.
    let (a1, b1) = (&x[0].a * &two, &x[0].b * &two * &dd);
    let (a2, b2) = (&x[1].a * &two, &x[1].b * &two * &dd);
    let det = &a1 * &b2 - &b1 * &a2;
    assert!(!det.is_zero());
    let solve = |rhs1: BigRational, rhs2: BigRational| {
        let s = (&rhs1 * &b2 - &b1 * &rhs2) / &det;
        let t = (&a1 * &rhs2 - &rhs1 * &a2) / &det;
        QuadFieldElement::new(d, s, t)
    };
    [
        solve(BigRational::one(), BigRational::zero()),
        solve(BigRational::zero(), BigRational::one()),
    ]
}

impl QuadFieldContext {
    pub fn sqrt_d(&self) -> f64 {
        self.sqrt_d
    }

    /// `sigma_i(x_j)` as a 2x2 real matrix.
    pub fn x_embed(&self) -> nalgebra::Matrix2<f64> {
        nalgebra::Matrix2::from_fn(|i, j| self.x_basis[j].embed(i, self.sqrt_d))
    }

    /// `sigma_i(r_j)` as a 2x2 real matrix.
    pub fn r_embed(&self) -> nalgebra::Matrix2<f64> {
        nalgebra::Matrix2::from_fn(|i, j| self.r_basis[j].embed(i, self.sqrt_d))
    }

    /// Exact membership in the inverse different: traces against the
    /// integral basis `(1, omega)` are integers.
    pub fn in_inverse_different(&self, x: &QuadFieldElement) -> bool {
        let t1 = x.trace();
        let t2 = x.mul(&self.omega).trace();
        t1.denom().is_one() && t2.denom().is_one()
    }

    /// Exact membership in the different ideal `D = sqrt(disc) R`:
    /// equivalently `x / sqrt(disc)` lies in `R`.
    pub fn in_different(&self, x: &QuadFieldElement) -> bool {
        // x in D iff x * D^-1 subset R iff Tr(x * D^-1 * D^-1)... simplest:
        // x = sqrt(disc) * y with y in R; sqrt(disc) = sqrt(d) * (1 or 2).
        let scale = if self.disc == self.d { 1 } else { 2 };
        // y = x / (scale * sqrt(d)) = x * sqrt(d) / (scale * d)
        let y = x
            .mul(&QuadFieldElement::from_i64(self.d, 0, 1))
            .scale(&BigRational::new(1.into(), (scale * self.d).into()));
        self.in_ring(&y)
    }

    /// Exact membership in the ring of integers `Z + Z omega`.
    pub fn in_ring(&self, y: &QuadFieldElement) -> bool {
        // y = m + n omega with m, n integers.
        if self.d % 4 == 1 {
            // omega = (1 + sqrt d)/2: n = 2 b, m = a - b.
            let n = &y.b + &y.b;
            let m = &y.a - &y.b;
            n.denom().is_one() && m.denom().is_one()
        } else {
            y.a.denom().is_one() && y.b.denom().is_one()
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let x = self.x_embed();
        let r = self.r_embed();
        serde_json::json!({
            "d": self.d,
            "disc": self.disc,
            "omega": self.omega.to_string_exact(),
            "x_basis": [self.x_basis[0].to_string_exact(), self.x_basis[1].to_string_exact()],
            "r_basis": [self.r_basis[0].to_string_exact(), self.r_basis[1].to_string_exact()],
            "x_embed": [[x[(0,0)], x[(0,1)]], [x[(1,0)], x[(1,1)]]],
            "r_embed": [[r[(0,0)], r[(0,1)]], [r[(1,0)], r[(1,1)]]],
        })
    }
}

/// The Siegel-space image `R^T diag(tau) R` of a Hilbert point, with
/// `R = (sigma_i(r_j))`.
pub fn h_map(ctx: &QuadFieldContext, tau: &HilbertTau) -> Result<SiegelPoint, FieldError> {
    let r = ctx.r_embed();
    let m = CMatrix::from_fn(2, 2, |i, j| {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..2 {
            s += tau.tau[k] * r[(k, i)] * r[(k, j)];
        }
        s
    });
    Ok(SiegelPoint::new(m, &Tolerances::default())?)
}

/// Exact h-map on a complexified field point: entry `(i, j)` is
/// `Tr(r_i r_j tau)` in exact complex-rational arithmetic.
pub fn h_map_exact(ctx: &QuadFieldContext, tau: &ComplexFieldElement) -> [[CRational; 2]; 2] {
    let r: Vec<ComplexFieldElement> = ctx
        .r_basis
        .iter()
        .map(ComplexFieldElement::from_quad)
        .collect();
    std::array::from_fn(|i| std::array::from_fn(|j| r[i].mul(&r[j]).mul(tau).trace()))
}

/// The matrix of the action of `s` on the complexified module in the
/// ordered basis `(x_1, x_2, r_1, r_2)`, computed by exact trace
/// coordinates. Rational entries come out exactly.
pub fn iota_embed_exact(
    ctx: &QuadFieldContext,
    s: &[[ComplexFieldElement; 2]; 2],
) -> [[CRational; 4]; 4] {
    let x: Vec<ComplexFieldElement> = ctx
        .x_basis
        .iter()
        .map(ComplexFieldElement::from_quad)
        .collect();
    let r: Vec<ComplexFieldElement> = ctx
        .r_basis
        .iter()
        .map(ComplexFieldElement::from_quad)
        .collect();
    let mut out: [[CRational; 4]; 4] =
        std::array::from_fn(|_| std::array::from_fn(|_| CRational::new(BigRational::zero(), BigRational::zero())));
    // Basis vectors: (x_j, 0) for columns 0..2, (0, r_j) for columns 2..4.
    for col in 0..4 {
        let (e0, e1) = if col < 2 {
            (x[col].clone(), ComplexFieldElement::zero(ctx.d))
        } else {
            (ComplexFieldElement::zero(ctx.d), r[col - 2].clone())
        };
        // Image (a e0 + b e1, c e0 + d e1) in D^-1 (+) R.
        let top = s[0][0].mul(&e0).add(&s[0][1].mul(&e1));
        let bottom = s[1][0].mul(&e0).add(&s[1][1].mul(&e1));
        for i in 0..2 {
            out[i][col] = r[i].mul(&top).trace();
            out[2 + i][col] = x[i].mul(&bottom).trace();
        }
    }
    out
}

/// Numeric embedding of a matrix over the complexified field into `4 x 4`
/// complex matrices, with its symplectic residual checked.
pub fn iota_embed(
    ctx: &QuadFieldContext,
    s: &[[ComplexFieldElement; 2]; 2],
    tol: &Tolerances,
) -> Result<crate::symplectic::SymplecticElement, FieldError> {
    let exact = iota_embed_exact(ctx, s);
    let m = CMatrix::from_fn(4, 4, |i, j| {
        cplx(
            exact[i][j].re.to_f64().unwrap(),
            exact[i][j].im.to_f64().unwrap(),
        )
    });
    crate::symplectic::SymplecticElement::new(m, tol).map_err(|_| FieldError::NotInGroup)
}

/// Exact integral embedding for matrices over the field itself; the image
/// must be an exact integer symplectic matrix.
pub fn iota_embed_integral(
    ctx: &QuadFieldContext,
    s: &[[QuadFieldElement; 2]; 2],
) -> Result<IntegerSymplectic, FieldError> {
    let cf: [[ComplexFieldElement; 2]; 2] =
        std::array::from_fn(|i| std::array::from_fn(|j| ComplexFieldElement::from_quad(&s[i][j])));
    let exact = iota_embed_exact(ctx, &cf);
    let mut entries = vec![vec![BigInt::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let z = &exact[i][j];
            if !z.im.is_zero() || !z.re.denom().is_one() {
                return Err(FieldError::NotInGroup);
            }
            entries[i][j] = z.re.numer().clone();
        }
    }
    IntegerSymplectic::from_entries(2, entries).ok_or(FieldError::NotInGroup)
}

/// Coefficients of the real-multiplication derivation attached to an
/// inverse-different element: `(sigma_1(x), sigma_2(x)) / (2 pi i)`.
pub fn theta_f_coefficients(
    ctx: &QuadFieldContext,
    x: &QuadFieldElement,
) -> Result<[Complex64; 2], FieldError> {
    if !ctx.in_inverse_different(x) {
        return Err(FieldError::NotInInverseDifferent);
    }
    Ok([
        cplx(x.embed(0, ctx.sqrt_d), 0.0) / TWO_PI_I,
        cplx(x.embed(1, ctx.sqrt_d), 0.0) / TWO_PI_I,
    ])
}

/// The exponent matrix of the monomial substitution `q_ij -> q^(r_i r_j)`:
/// one row per target variable `q^(r_k)`, one column per source variable in
/// the order `q_11, q_12, q_22`; entry `Tr(r_i r_j x_k)`, always an integer.
pub fn qexp_exponent_map(ctx: &QuadFieldContext) -> Vec<Vec<i64>> {
    let pairs = [(0usize, 0usize), (0, 1), (1, 1)];
    (0..2)
        .map(|k| {
            pairs
                .iter()
                .map(|&(i, j)| {
                    let t = ctx.r_basis[i]
                        .mul(&ctx.r_basis[j])
                        .mul(&ctx.x_basis[k])
                        .trace();
                    assert!(t.denom().is_one(), "different ideal trace must be integral");
                    t.numer().to_i64().expect("small exponent")
                })
                .collect()
        })
        .collect()
}

/// Residuals of the four clauses of the real-multiplication period
/// compatibility check.
#[derive(Debug, Clone)]
pub struct HilbertHodgeReport {
    /// Transported lattice basis against the standard cycles.
    pub lattice_residual: f64,
    /// Transported holomorphic classes against the standard `omega`s.
    pub omega_residual: f64,
    /// The derivation identity `Tr(x_i r_j) = delta_ij`, exact and numeric.
    pub derivation_exact: bool,
    pub derivation_residual: f64,
    /// Assembled period matrix against the embedded representative.
    pub period_residual: f64,
}

impl HilbertHodgeReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.derivation_exact
            && self.lattice_residual <= tol
            && self.omega_residual <= tol
            && self.derivation_residual <= tol
            && self.period_residual <= tol
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lattice_residual": self.lattice_residual,
            "omega_residual": self.omega_residual,
            "derivation_exact": self.derivation_exact,
            "derivation_residual": self.derivation_residual,
            "period_residual": self.period_residual,
        })
    }
}

/// Check that the fiberwise torus identification carries the
/// real-multiplication data to the standard Siegel data at `h(tau)`:
///
/// 1. the embedded `x`-cycles and `tau r`-cycles map to the standard
///    integral basis;
/// 2. the classes `r_i omega_F` have the standard `omega_i` periods;
/// 3. the derivation pairing collapses to exact trace duality;
/// 4. the period matrix assembled from the transported classes equals the
///    embedded coset representative.
pub fn hilbert_hodge_check(
    ctx: &QuadFieldContext,
    tau: &HilbertTau,
) -> Result<HilbertHodgeReport, FieldError> {
    let siegel = h_map(ctx, tau)?;
    let torus = PolarizedTorus::new(siegel.clone());
    let r = ctx.r_embed();
    let x = ctx.x_embed();

    // (1) Transport T = R^T sends the embedded x_j to e_j and the
    // diag(tau)-scaled embedded r_j to h(tau) e_j.
    let mut lattice_residual = 0.0f64;
    for j in 0..2 {
        for i in 0..2 {
            let tx: f64 = (0..2).map(|k| r[(k, i)] * x[(k, j)]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            lattice_residual = lattice_residual.max((tx - target).abs());
            let tr: Complex64 = (0..2).map(|k| r[(k, i)] * tau.tau[k] * r[(k, j)]).sum();
            lattice_residual = lattice_residual.max((tr - siegel.tau()[(i, j)]).norm());
        }
    }

    // (2) Periods of r_i omega_F on the transported cycles against the
    // standard omega_i periods.
    let bases = standard_bases(&torus);
    let mut omega_residual = 0.0f64;
    let mut omega_classes = Vec::with_capacity(2);
    for i in 0..2 {
        let gamma = CVector::from_fn(2, |j, _| {
            // integral of r_i omega_F over the x_j cycle: 2 pi i Tr(r_i x_j)
            let t: f64 = (0..2).map(|k| r[(k, i)] * x[(k, j)]).sum();
            TWO_PI_I * t
        });
        let delta = CVector::from_fn(2, |j, _| {
            // over the tau r_j cycle: 2 pi i sum_k sigma_k(r_i) tau_k sigma_k(r_j)
            let t: Complex64 = (0..2).map(|k| r[(k, i)] * tau.tau[k] * r[(k, j)]).sum();
            TWO_PI_I * t
        });
        let std_omega = &bases.hodge.omega[i];
        omega_residual = omega_residual.max(max_norm(&CMatrix::from_fn(2, 1, |j, _| {
            gamma[j] - std_omega.gamma_periods[j]
        })));
        omega_residual = omega_residual.max(max_norm(&CMatrix::from_fn(2, 1, |j, _| {
            delta[j] - std_omega.delta_periods[j]
        })));
        omega_classes.push(DeRhamClass {
            gamma_periods: gamma,
            delta_periods: delta,
        });
    }

    // (3) Applying the derivation of x_i to the tau r_j period of omega_F
    // differentiates 2 pi i sum_k tau_k sigma_k(r_j) into Tr(x_i r_j).
    let mut derivation_exact = true;
    let mut derivation_residual = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let t = ctx.x_basis[i].mul(&ctx.r_basis[j]).trace();
            let expect = if i == j { BigRational::one() } else { BigRational::zero() };
            derivation_exact &= t == expect;
            let num: f64 = (0..2)
                .map(|k| ctx.x_basis[i].embed(k, ctx.sqrt_d) * r[(k, j)])
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            derivation_residual = derivation_residual.max((num - target).abs());
        }
    }

    // (4) Assemble the basis (transported omegas, etas defined by the
    // derivation periods (0, e_i)) and compare its period matrix with the
    // embedded representative of (1 tau; 0 1).
    let eta_classes: Vec<DeRhamClass> = (0..2)
        .map(|i| DeRhamClass {
            gamma_periods: CVector::zeros(2),
            delta_periods: CVector::from_fn(2, |j, _| {
                if i == j {
                    Complex64::one()
                } else {
                    cplx(0.0, 0.0)
                }
            }),
        })
        .collect();
    let basis = HodgeBasis {
        omega: omega_classes,
        eta: eta_classes,
    };
    let data = period_matrices(&torus, &basis);
    // iota route: psi_F(tau) = (1 tau; 0 1) with tau = u + v sqrt(d).
    let u = (tau.tau[0] + tau.tau[1]) / 2.0;
    let v = (tau.tau[0] - tau.tau[1]) / (2.0 * ctx.sqrt_d);
    let b_block = CMatrix::from_fn(2, 2, |i, j| {
        // Tr(r_i r_j (u + v sqrt d)) via exact quad products of r_i r_j.
        let rr = ctx.r_basis[i].mul(&ctx.r_basis[j]);
        let a = rr.a.to_f64().unwrap();
        let b = rr.b.to_f64().unwrap();
        // Tr((a + b sqrt d)(u + v sqrt d)) = 2(a u + d b v)
        (u * a + v * b * ctx.d as f64) * 2.0
    });
    let rep = from_blocks(
        &identity(2),
        &b_block,
        &CMatrix::zeros(2, 2),
        &identity(2),
    );
    let period_residual = max_norm(&(&data.pi - &rep));

    Ok(HilbertHodgeReport {
        lattice_residual,
        omega_residual,
        derivation_exact,
        derivation_residual,
        period_residual,
    })
}

/// Random word in the unipotent generators of `SL(D^-1 (+) R)`:
/// `(1 x; 0 1)` with `x` a small inverse-different element and `(1 0; c 1)`
/// with `c` a small different element.
pub fn random_sl_module(
    ctx: &QuadFieldContext,
    word_length: usize,
    rng: &mut impl Rng,
) -> [[QuadFieldElement; 2]; 2] {
    let d = ctx.d;
    let one = QuadFieldElement::one(d);
    let zero = QuadFieldElement::zero(d);
    let mut acc = [[one.clone(), zero.clone()], [zero.clone(), one.clone()]];
    let mat_mul = |m: &[[QuadFieldElement; 2]; 2], n: &[[QuadFieldElement; 2]; 2]| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                m[i][0].mul(&n[0][j]).add(&m[i][1].mul(&n[1][j]))
            })
        })
    };
    for _ in 0..word_length {
        let upper = rng.gen_bool(0.5);
        let c1 = crat(rng.gen_range(-2i64..=2));
        let c2 = crat(rng.gen_range(-2i64..=2));
        let gen: [[QuadFieldElement; 2]; 2] = if upper {
            // x in D^-1
            let x = ctx.x_basis[0].scale(&c1).add(&ctx.x_basis[1].scale(&c2));
            [[one.clone(), x], [zero.clone(), one.clone()]]
        } else {
            // c in D = sqrt(disc) R
            let sqrt_disc = if ctx.disc == ctx.d {
                QuadFieldElement::from_i64(d, 0, 1)
            } else {
                QuadFieldElement::from_i64(d, 0, 2)
            };
            let c = sqrt_disc.mul(
                &QuadFieldElement::from_i64(d, 1, 0)
                    .scale(&c1)
                    .add(&ctx.omega.scale(&c2)),
            );
            [[one.clone(), zero.clone()], [c, one.clone()]]
        };
        acc = mat_mul(&acc, &gen);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    #[test]
    fn golden_ratio_field_bases() {
        let ctx = field_context(5).unwrap();
        assert_eq!(ctx.disc, 5);
        assert_eq!(ctx.omega, QuadFieldElement::new(5, half(), half()));
        // x basis ((5 + sqrt5)/10, (5 - sqrt5)/10).
        let tenth = BigRational::new(1.into(), 10.into());
        assert_eq!(ctx.x_basis[0], QuadFieldElement::new(5, half(), tenth.clone()));
        assert_eq!(ctx.x_basis[1], QuadFieldElement::new(5, half(), -tenth));
        // r basis ((1 + sqrt5)/2, (1 - sqrt5)/2).
        assert_eq!(ctx.r_basis[0], QuadFieldElement::new(5, half(), half()));
        assert_eq!(ctx.r_basis[1], QuadFieldElement::new(5, half(), -half()));
    }

    #[test]
    fn context_invariants_and_validation() {
        for d in [2i64, 3, 5, 13] {
            let ctx = field_context(d).unwrap();
            for i in 0..2 {
                assert!(ctx.x_basis[i].is_totally_positive());
                assert!(ctx.in_inverse_different(&ctx.x_basis[i]));
                assert!(ctx.in_ring(&ctx.r_basis[i]));
                for j in 0..2 {
                    let t = ctx.r_basis[i].mul(&ctx.x_basis[j]).trace();
                    let expect = if i == j { BigRational::one() } else { BigRational::zero() };
                    assert_eq!(t, expect);
                }
            }
        }
        for bad in [0i64, 1, 4, 12, -5] {
            assert_eq!(field_context(bad).unwrap_err(), FieldError::InvalidField);
        }
    }

    #[test]
    fn h_map_values() {
        let ctx = field_context(5).unwrap();
        let i1 = cplx(0.0, 1.0);
        let tau = HilbertTau::new(i1, i1).unwrap();
        let h = h_map(&ctx, &tau).unwrap();
        let expect = [[3.0, -2.0], [-2.0, 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.tau()[(i, j)] - cplx(0.0, expect[i][j])).norm() < 1e-12);
            }
        }
        // Scalar collapse: both components equal gives z R^T R.
        let z = cplx(0.3, 1.2);
        let tau = HilbertTau::new(z, z).unwrap();
        let h = h_map(&ctx, &tau).unwrap();
        let r = ctx.r_embed();
        let rtr = r.transpose() * r;
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.tau()[(i, j)] - z * rtr[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn h_map_lands_in_siegel_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for d in [2i64, 3, 5, 13] {
            let ctx = field_context(d).unwrap();
            for _ in 0..100 {
                let t1 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0));
                let t2 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0));
                let tau = HilbertTau::new(t1, t2).unwrap();
                // Construction validates symmetry and positive-definiteness.
                h_map(&ctx, &tau).unwrap();
            }
        }
    }

    #[test]
    fn h_map_exact_is_symmetric() {
        let ctx = field_context(5).unwrap();
        let tau = ComplexFieldElement::new(
            5,
            CRational::new(BigRational::zero(), crat(2)),
            CRational::new(BigRational::zero(), BigRational::new(1.into(), 7.into())),
        );
        let h = h_map_exact(&ctx, &tau);
        assert_eq!(h[0][1], h[1][0]);
    }

    #[test]
    fn iota_identity_and_psi_representative() {
        let ctx = field_context(5).unwrap();
        let one = ComplexFieldElement::one(5);
        let zero = ComplexFieldElement::zero(5);
        let id = [[one.clone(), zero.clone()], [zero.clone(), one.clone()]];
        let m = iota_embed_exact(&ctx, &id);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { BigRational::one() } else { BigRational::zero() };
                assert_eq!(m[i][j].re, expect);
                assert!(m[i][j].im.is_zero());
            }
        }

        // psi_F representative (1 tau; 0 1): exact equality with the h-map.
        let tau = ComplexFieldElement::new(
            5,
            CRational::new(BigRational::zero(), crat(2)),
            CRational::new(BigRational::zero(), BigRational::new(1.into(), 3.into())),
        );
        let rep = [
            [one.clone(), tau.clone()],
            [zero.clone(), one.clone()],
        ];
        let m = iota_embed_exact(&ctx, &rep);
        let h = h_map_exact(&ctx, &tau);
        for i in 0..2 {
            for j in 0..2 {
                // A and D blocks are the identity, C vanishes.
                assert_eq!(m[i][j].re, if i == j { BigRational::one() } else { BigRational::zero() });
                assert!(m[2 + i][j].re.is_zero() && m[2 + i][j].im.is_zero());
                assert_eq!(
                    m[2 + i][2 + j].re,
                    if i == j { BigRational::one() } else { BigRational::zero() }
                );
                // B block equals the exact h-map, exactly.
                assert_eq!(m[i][2 + j], h[i][j]);
            }
        }
    }

    #[test]
    fn iota_integral_and_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for d in [2i64, 5, 13] {
            let ctx = field_context(d).unwrap();
            for _ in 0..20 {
                let s = random_sl_module(&ctx, 5, &mut rng);
                // Integral samples give exact integer symplectic images.
                let m = iota_embed_integral(&ctx, &s).unwrap();
                assert!(m.is_symplectic_exact());

                // Numeric homomorphism check.
                let t = random_sl_module(&ctx, 5, &mut rng);
                let cf = |q: &[[QuadFieldElement; 2]; 2]| -> [[ComplexFieldElement; 2]; 2] {
                    std::array::from_fn(|i| {
                        std::array::from_fn(|j| ComplexFieldElement::from_quad(&q[i][j]))
                    })
                };
                let st = {
                    let mm = |a: &[[QuadFieldElement; 2]; 2], b: &[[QuadFieldElement; 2]; 2]| -> [[QuadFieldElement; 2]; 2] {
                        std::array::from_fn(|i| {
                            std::array::from_fn(|j| {
                                a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]))
                            })
                        })
                    };
                    mm(&s, &t)
                };
                let tol = Tolerances::with_membership(1e-6);
                let lhs = iota_embed(&ctx, &cf(&st), &tol).unwrap();
                let rhs = iota_embed(&ctx, &cf(&s), &tol)
                    .unwrap()
                    .mul(&iota_embed(&ctx, &cf(&t), &tol).unwrap());
                assert!(max_norm(&(lhs.matrix() - rhs.matrix())) < 1e-9);
            }
        }
    }

    #[test]
    fn theta_coefficients() {
        let ctx = field_context(5).unwrap();
        let t = theta_f_coefficients(&ctx, &ctx.x_basis[0]).unwrap();
        let expect0 = (5.0 + 5.0f64.sqrt()) / 10.0;
        let expect1 = (5.0 - 5.0f64.sqrt()) / 10.0;
        assert!((t[0] * TWO_PI_I - cplx(expect0, 0.0)).norm() < 1e-14);
        assert!((t[1] * TWO_PI_I - cplx(expect1, 0.0)).norm() < 1e-14);

        let z = theta_f_coefficients(&ctx, &QuadFieldElement::zero(5)).unwrap();
        assert_eq!(z[0], cplx(0.0, 0.0));
        assert_eq!(z[1], cplx(0.0, 0.0));

        // Z-linearity through exact coordinates.
        let x = ctx.x_basis[0].scale(&crat(3)).sub(&ctx.x_basis[1].scale(&crat(2)));
        let tx = theta_f_coefficients(&ctx, &x).unwrap();
        let t1 = theta_f_coefficients(&ctx, &ctx.x_basis[0]).unwrap();
        let t2 = theta_f_coefficients(&ctx, &ctx.x_basis[1]).unwrap();
        for k in 0..2 {
            assert!((tx[k] - (t1[k] * 3.0 - t2[k] * 2.0)).norm() < 1e-14);
        }

        // Not in the inverse different.
        let bad = QuadFieldElement::new(5, half(), BigRational::zero());
        assert_eq!(
            theta_f_coefficients(&ctx, &bad).unwrap_err(),
            FieldError::NotInInverseDifferent
        );
    }

    #[test]
    fn qexp_matrix_values() {
        let ctx = field_context(5).unwrap();
        let m = qexp_exponent_map(&ctx);
        // Columns ordered (q11, q12, q22).
        assert_eq!(m[0][0], 2);
        assert_eq!(m[1][0], 1);
        assert_eq!(m[0][1], -1);
        assert_eq!(m[1][1], -1);
        assert_eq!(m[0][2], 1);
        assert_eq!(m[1][2], 2);
        // Integrality for the other fields is asserted inside the map.
        for d in [2i64, 3, 13] {
            let ctx = field_context(d).unwrap();
            let _ = qexp_exponent_map(&ctx);
        }
    }

    #[test]
    fn qexp_composes_with_substitution() {
        // The exponent matrix feeds the series substitution and stays a ring
        // homomorphism: image of q11 * q22 is the product of images.
        let ctx = field_context(5).unwrap();
        let m = qexp_exponent_map(&ctx);
        let vars = ["q11", "q12", "q22"];
        let one = BigRational::one();
        let q11 = crate::series::TruncatedLaurentSeries::monomial(&vars, 6, 0, &[1, 0, 0], one.clone());
        let q22 = crate::series::TruncatedLaurentSeries::monomial(&vars, 6, 0, &[0, 0, 1], one.clone());
        let prod = q11.mul(&q22).unwrap();
        let sub = |s: &crate::series::TruncatedLaurentSeries| {
            s.substitute_monomials(&m, &["qr1", "qr2"], 24, 0).unwrap()
        };
        let lhs = sub(&prod);
        let rhs = sub(&q11).mul(&sub(&q22)).unwrap();
        assert!(lhs.agrees_with(&rhs, 6));
        // q11 q22 -> (qr1 qr2)^3.
        assert_eq!(lhs.coeff(&[3, 3]), BigRational::one());
    }

    #[test]
    fn hodge_check_clauses() {
        let ctx = field_context(5).unwrap();
        let i1 = cplx(0.0, 1.0);
        let report = hilbert_hodge_check(&ctx, &HilbertTau::new(i1, i1).unwrap()).unwrap();
        assert!(report.pass(1e-10), "{report:?}");

        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for _ in 0..20 {
            let t1 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.4..2.0));
            let t2 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.4..2.0));
            let report =
                hilbert_hodge_check(&ctx, &HilbertTau::new(t1, t2).unwrap()).unwrap();
            assert!(report.pass(1e-10), "{report:?}");
        }
    }

    #[test]
    fn different_membership() {
        let ctx = field_context(5).unwrap();
        // sqrt(5) generates the different for d = 5.
        let sqrt5 = QuadFieldElement::from_i64(5, 0, 1);
        assert!(ctx.in_different(&sqrt5));
        assert!(!ctx.in_different(&QuadFieldElement::one(5)));
        let ctx2 = field_context(2).unwrap();
        // 2 sqrt(2) generates the different for d = 2.
        assert!(ctx2.in_different(&QuadFieldElement::from_i64(2, 0, 2)));
        assert!(!ctx2.in_different(&QuadFieldElement::from_i64(2, 0, 1)));
    }
}
