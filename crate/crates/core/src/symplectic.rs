//! Complex and exact-integer symplectic linear algebra: membership tests,
//! the Siegel action with its cocycle, the similitude-cell factorization,
//! parabolic transport, Lagrangian projection, and the leaf frames.
//!
//! All bilinear forms here use `J = (0 1_g; -1_g 0)` and matrix transpose,
//! never conjugate transpose: the groups are the complex symplectic groups,
//! not the unitary ones.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;

/// `2 pi i`, the normalization constant running through all period formulas.
pub const TWO_PI_I: Complex64 = Complex64::new(0.0, std::f64::consts::TAU);

#[derive(Debug, Error, PartialEq)]
pub enum SymplecticError {
    #[error("matrix size is odd, cannot split into symplectic blocks")]
    OddSize,
    #[error("matrix is not symplectic within tolerance (residual {0})")]
    NotSymplectic(f64),
    #[error("cocycle C tau + D is singular")]
    SingularCocycle,
    #[error("A-block is singular: the element lies outside the similitude cell")]
    NotInStarCell,
    #[error("matrix does not have the Siegel-parabolic shape")]
    NotParabolic,
    #[error("matrix is not symmetric within tolerance (residual {0})")]
    NotSymmetric(f64),
    #[error("imaginary part is not positive definite")]
    NotPositiveDefinite,
}

/// Global tolerance policy. Membership guards constructors, identity guards
/// algebraic identities, roundtrip guards factor/assemble cycles.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub membership: f64,
    pub identity: f64,
    pub roundtrip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: 1e-9,
            identity: 1e-10,
            roundtrip: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn with_membership(tol: f64) -> Self {
        Tolerances {
            membership: tol,
            ..Default::default()
        }
    }
}

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The standard symplectic form matrix `(0 1_g; -1_g 0)`.
pub fn j_matrix(g: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        j[(i, g + i)] = Complex64::one();
        j[(g + i, i)] = -Complex64::one();
    }
    j
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Split a `2g x 2g` matrix into its `g x g` blocks `(A, B, C, D)`.
pub fn blocks(m: &CMatrix) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let g = m.nrows() / 2;
    (
        m.view((0, 0), (g, g)).into_owned(),
        m.view((0, g), (g, g)).into_owned(),
        m.view((g, 0), (g, g)).into_owned(),
        m.view((g, g), (g, g)).into_owned(),
    )
}

pub fn from_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    let g = a.nrows();
    let mut m = CMatrix::zeros(2 * g, 2 * g);
    m.view_mut((0, 0), (g, g)).copy_from(a);
    m.view_mut((0, g), (g, g)).copy_from(b);
    m.view_mut((g, 0), (g, g)).copy_from(c);
    m.view_mut((g, g), (g, g)).copy_from(d);
    m
}

/// Max-norm of `M^T J M - J`.
pub fn symplectic_residual(m: &CMatrix) -> f64 {
    let g = m.nrows() / 2;
    let j = j_matrix(g);
    max_norm(&(m.transpose() * &j * m - &j))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymplecticGroup {
    Sp,
    GSp,
}

/// Outcome of a membership test; `similitude` is present for GSp only.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub member: bool,
    pub residual: f64,
    pub similitude: Option<Complex64>,
}

/// Test membership in `Sp_2g` or `GSp_2g` at the given tolerance. For GSp
/// the similitude is fitted from `A D^T - B C^T = nu 1_g` and the residual
/// collects the remaining block relations.
pub fn symplectic_check(
    m: &CMatrix,
    group: SymplecticGroup,
    tol: f64,
) -> Result<MembershipReport, SymplecticError> {
    if m.nrows() % 2 != 0 || m.nrows() != m.ncols() {
        return Err(SymplecticError::OddSize);
    }
    match group {
        SymplecticGroup::Sp => {
            let residual = symplectic_residual(m);
            Ok(MembershipReport {
                member: residual <= tol,
                residual,
                similitude: None,
            })
        }
        SymplecticGroup::GSp => {
            let g = m.nrows() / 2;
            let (a, b, c, d) = blocks(m);
            let s = &a * d.transpose() - &b * c.transpose();
            let nu = s.diagonal().sum() / cplx(g as f64, 0.0);
            let r1 = max_norm(&(&s - identity(g) * nu));
            let r2 = max_norm(&(&a * b.transpose() - &b * a.transpose()));
            let r3 = max_norm(&(&c * d.transpose() - &d * c.transpose()));
            let residual = r1.max(r2).max(r3);
            Ok(MembershipReport {
                member: residual <= tol && nu.norm() > tol,
                residual,
                similitude: Some(nu),
            })
        }
    }
}

/// A member of `Sp_2g(C)` with its membership residual.
#[derive(Debug, Clone)]
pub struct SymplecticElement {
    g: usize,
    matrix: CMatrix,
    residual: f64,
}

impl SymplecticElement {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self, SymplecticError> {
        if matrix.nrows() % 2 != 0 || matrix.nrows() != matrix.ncols() {
            return Err(SymplecticError::OddSize);
        }
        let residual = symplectic_residual(&matrix);
        if residual > tol.membership {
            return Err(SymplecticError::NotSymplectic(residual));
        }
        Ok(SymplecticElement {
            g: matrix.nrows() / 2,
            matrix,
            residual,
        })
    }

    pub fn identity(g: usize) -> Self {
        SymplecticElement {
            g,
            matrix: identity(2 * g),
            residual: 0.0,
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn inverse(&self) -> Option<SymplecticElement> {
        self.matrix.clone().try_inverse().map(|m| {
            let residual = symplectic_residual(&m);
            SymplecticElement {
                g: self.g,
                matrix: m,
                residual,
            }
        })
    }

    pub fn mul(&self, other: &SymplecticElement) -> SymplecticElement {
        let m = &self.matrix * &other.matrix;
        let residual = symplectic_residual(&m);
        SymplecticElement {
            g: self.g,
            matrix: m,
            residual,
        }
    }
}

/// A point of the Siegel upper half-space: symmetric with positive-definite
/// imaginary part. Construction symmetrizes sub-tolerance asymmetry and
/// verifies positivity by Cholesky.
#[derive(Debug, Clone)]
pub struct SiegelPoint {
    g: usize,
    tau: CMatrix,
}

impl SiegelPoint {
    pub fn new(tau: CMatrix, tol: &Tolerances) -> Result<Self, SymplecticError> {
        if tau.nrows() != tau.ncols() {
            return Err(SymplecticError::NotSymmetric(f64::INFINITY));
        }
        let asym = max_norm(&(&tau - tau.transpose()));
        if asym > tol.membership {
            return Err(SymplecticError::NotSymmetric(asym));
        }
        let tau = (&tau + tau.transpose()) * cplx(0.5, 0.0);
        let im = tau.map(|z| z.im);
        if nalgebra::Cholesky::new(im).is_none() {
            return Err(SymplecticError::NotPositiveDefinite);
        }
        Ok(SiegelPoint {
            g: tau.nrows(),
            tau,
        })
    }

    pub fn scalar(z: Complex64) -> Self {
        assert!(z.im > 0.0);
        SiegelPoint {
            g: 1,
            tau: CMatrix::from_element(1, 1, z),
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn tau(&self) -> &CMatrix {
        &self.tau
    }

    /// `(Im tau)^-1` as a complex matrix.
    pub fn im_inverse(&self) -> CMatrix {
        let im = self.tau.map(|z| z.im);
        let inv = im.try_inverse().expect("positive definite");
        inv.map(|x| cplx(x, 0.0))
    }
}

/// `psi(Z) = (1 Z; 0 1)` for symmetric `Z`, the exponential of the abelian
/// unipotent algebra.
pub fn psi(z: &CMatrix) -> CMatrix {
    let g = z.nrows();
    from_blocks(&identity(g), z, &CMatrix::zeros(g, g), &identity(g))
}

/// Moebius action `tau -> (A tau + B)(C tau + D)^-1` together with the
/// cocycle `j(gamma, tau) = C tau + D`.
pub fn mobius_act(
    gamma: &SymplecticElement,
    tau: &SiegelPoint,
    tol: &Tolerances,
) -> Result<(SiegelPoint, CMatrix), SymplecticError> {
    let (a, b, c, d) = blocks(gamma.matrix());
    let cocycle = &c * tau.tau() + &d;
    let inv = cocycle
        .clone()
        .try_inverse()
        .ok_or(SymplecticError::SingularCocycle)?;
    let image = (&a * tau.tau() + &b) * inv;
    let image = SiegelPoint::new(image, tol)?;
    Ok((image, cocycle))
}

/// Symmetric complex image `delta . Z` of the Lagrangian chart action; no
/// upper-half-space membership is implied for complex `delta`.
pub fn mobius_act_complex(delta: &CMatrix, z: &CMatrix) -> Result<CMatrix, SymplecticError> {
    let (a, b, c, d) = blocks(delta);
    let cocycle = &c * z + &d;
    let inv = cocycle
        .try_inverse()
        .ok_or(SymplecticError::SingularCocycle)?;
    Ok((&a * z + &b) * inv)
}

/// The factorization of the invertible-A cell of GSp: similitude, symmetric
/// part `C A^-1`, and Siegel-parabolic part `(A^-1 -B^T; 0 A^T)`.
#[derive(Debug, Clone)]
pub struct GspStarFactors {
    pub nu: Complex64,
    pub tau_part: CMatrix,
    pub parabolic: CMatrix,
}

pub fn gsp_star_factor(s: &CMatrix) -> Result<GspStarFactors, SymplecticError> {
    if s.nrows() % 2 != 0 || s.nrows() != s.ncols() {
        return Err(SymplecticError::OddSize);
    }
    let g = s.nrows() / 2;
    let (a, b, c, d) = blocks(s);
    let a_inv = a.clone().try_inverse().ok_or(SymplecticError::NotInStarCell)?;
    let nu = (&a * d.transpose() - &b * c.transpose()).diagonal().sum() / cplx(g as f64, 0.0);
    let tau_part = &c * &a_inv;
    let parabolic = from_blocks(
        &a_inv,
        &(-b.transpose()),
        &CMatrix::zeros(g, g),
        &a.transpose(),
    );
    Ok(GspStarFactors {
        nu,
        tau_part,
        parabolic,
    })
}

/// Inverse of [`gsp_star_factor`].
pub fn gsp_star_assemble(nu: Complex64, z: &CMatrix, p: &CMatrix) -> CMatrix {
    let g = z.nrows();
    let (x, y, _, _) = blocks(p);
    let x_inv = x.clone().try_inverse().expect("parabolic A-block invertible");
    let zx = z * &x_inv;
    let d = (identity(g) * nu - &zx * &y) * x.transpose();
    from_blocks(&x_inv, &(-y.transpose()), &zx, &d)
}

/// Blocks `(A, B)` of a Siegel-parabolic element `(A B; 0 (A^T)^-1)`,
/// validated at the given tolerance.
pub fn parabolic_blocks(
    p: &CMatrix,
    tol: &Tolerances,
) -> Result<(CMatrix, CMatrix), SymplecticError> {
    if p.nrows() % 2 != 0 || p.nrows() != p.ncols() {
        return Err(SymplecticError::OddSize);
    }
    let (a, b, c, d) = blocks(p);
    if max_norm(&c) > tol.membership {
        return Err(SymplecticError::NotParabolic);
    }
    let a_inv_t = a
        .clone()
        .try_inverse()
        .ok_or(SymplecticError::NotParabolic)?
        .transpose();
    if max_norm(&(&d - &a_inv_t)) > tol.membership {
        return Err(SymplecticError::NotParabolic);
    }
    if max_norm(&(&a * b.transpose() - &b * a.transpose())) > tol.membership {
        return Err(SymplecticError::NotParabolic);
    }
    Ok((a, b))
}

/// The isomorphism `P_g -> P'_g`, `(A B; 0 (A^T)^-1) -> ((A^T)^-1 0; 2 pi i B A)`.
pub fn parabolic_transport(p: &CMatrix, tol: &Tolerances) -> Result<CMatrix, SymplecticError> {
    let (a, b) = parabolic_blocks(p, tol)?;
    let g = a.nrows();
    let a_inv_t = a.clone().try_inverse().unwrap().transpose();
    Ok(from_blocks(
        &a_inv_t,
        &CMatrix::zeros(g, g),
        &(b * TWO_PI_I),
        &a,
    ))
}

/// Projection to the Lagrangian Grassmannian: the homogeneous pair `(B : D)`
/// always, the affine chart value `B D^-1` with its upper-half-space flag
/// when `D` is invertible.
#[derive(Debug, Clone)]
pub struct GrassmannPoint {
    pub homogeneous: (CMatrix, CMatrix),
    pub affine: Option<CMatrix>,
    pub in_siegel: bool,
}

pub fn grassmann_project(s: &SymplecticElement, tol: &Tolerances) -> GrassmannPoint {
    let (_, b, _, d) = blocks(s.matrix());
    match d.clone().try_inverse() {
        Some(d_inv) => {
            let affine = &b * d_inv;
            let in_siegel = SiegelPoint::new(affine.clone(), tol).is_ok();
            GrassmannPoint {
                homogeneous: (b, d),
                affine: Some(affine),
                in_siegel,
            }
        }
        None => GrassmannPoint {
            homogeneous: (b, d),
            affine: None,
            in_siegel: false,
        },
    }
}

/// The leaf frame at `(delta, tau)`: the domain flag, the parabolic
/// `p_{delta,tau}`, and the frames `psi(tau)`, `psi_delta(tau)`.
#[derive(Debug, Clone)]
pub struct LeafFrame {
    pub in_u_delta: bool,
    pub p_delta_tau: Option<CMatrix>,
    pub psi_tau: CMatrix,
    pub psi_delta_tau: Option<CMatrix>,
}

pub fn leaf_frame(delta: &SymplecticElement, tau: &SiegelPoint) -> LeafFrame {
    let psi_tau = psi(tau.tau());
    let (_, _, c, d) = blocks(delta.matrix());
    let cocycle = &c * tau.tau() + &d;
    let inv = match cocycle.clone().try_inverse() {
        Some(inv) => inv,
        None => {
            return LeafFrame {
                in_u_delta: false,
                p_delta_tau: None,
                psi_tau,
                psi_delta_tau: None,
            }
        }
    };
    let g = tau.g();
    let p = from_blocks(
        &inv,
        &(c.transpose() * (-Complex64::one() / TWO_PI_I)),
        &CMatrix::zeros(g, g),
        &cocycle.transpose(),
    );
    // psi_delta(tau) = delta^-1 psi(delta . tau)
    let image = mobius_act_complex(delta.matrix(), tau.tau()).expect("cocycle checked");
    let delta_inv = delta
        .matrix()
        .clone()
        .try_inverse()
        .expect("symplectic matrices are invertible");
    let psi_delta = delta_inv * psi(&image);
    LeafFrame {
        in_u_delta: true,
        p_delta_tau: Some(p),
        psi_tau,
        psi_delta_tau: Some(psi_delta),
    }
}

/// Solve for `delta` with `tau` in its domain and `p_{delta,tau} = p`.
pub fn solve_delta(
    tau: &SiegelPoint,
    p: &CMatrix,
    tol: &Tolerances,
) -> Result<SymplecticElement, SymplecticError> {
    let (a, b) = parabolic_blocks(p, tol)?;
    let a_inv = a.clone().try_inverse().ok_or(SymplecticError::NotParabolic)?;
    let at = a.transpose();
    let bt2pi = b.transpose() * TWO_PI_I;
    let delta = from_blocks(
        &at,
        &(-(&at * tau.tau())),
        &(-&bt2pi),
        &(&a_inv + &bt2pi * tau.tau()),
    );
    SymplecticElement::new(delta, tol)
}

/// Exact integer symplectic matrix, `M^T J M = J` over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSymplectic {
    g: usize,
    entries: Vec<Vec<BigInt>>,
}

impl IntegerSymplectic {
    pub fn identity(g: usize) -> Self {
        let n = 2 * g;
        let mut entries = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = BigInt::one();
        }
        IntegerSymplectic { g, entries }
    }

    pub fn from_entries(g: usize, entries: Vec<Vec<BigInt>>) -> Option<Self> {
        let n = 2 * g;
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return None;
        }
        let m = IntegerSymplectic { g, entries };
        m.is_symplectic_exact().then_some(m)
    }

    pub fn from_i64(g: usize, rows: &[&[i64]]) -> Option<Self> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_entries(g, entries)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn entries(&self) -> &Vec<Vec<BigInt>> {
        &self.entries
    }

    pub fn mul(&self, other: &IntegerSymplectic) -> IntegerSymplectic {
        let n = 2 * self.g;
        let mut entries = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if self.entries[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &self.entries[i][k] * &other.entries[k][j];
                    entries[i][j] += t;
                }
            }
        }
        IntegerSymplectic { g: self.g, entries }
    }

    /// `M^T J M = J` checked exactly over the integers.
    pub fn is_symplectic_exact(&self) -> bool {
        let g = self.g;
        let n = 2 * g;
        // (M^T J M)[i][j] = sum_k M[k][i] (J M)[k][j]
        let jm: Vec<Vec<BigInt>> = (0..n)
            .map(|k| {
                let src = if k < g { k + g } else { k - g };
                let sign = if k < g { BigInt::one() } else { -BigInt::one() };
                self.entries[src].iter().map(|x| &sign * x).collect()
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for k in 0..n {
                    s += &self.entries[k][i] * &jm[k][j];
                }
                let expect = if j == i + g {
                    BigInt::one()
                } else if i == j + g {
                    -BigInt::one()
                } else {
                    BigInt::zero()
                };
                if s != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_complex(&self) -> CMatrix {
        let n = 2 * self.g;
        CMatrix::from_fn(n, n, |i, j| {
            cplx(self.entries[i][j].to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    pub fn to_element(&self) -> SymplecticElement {
        let matrix = self.to_complex();
        let residual = symplectic_residual(&matrix);
        SymplecticElement {
            g: self.g,
            matrix,
            residual,
        }
    }

    /// Nested integer arrays; entries beyond the i64 range fall back to
    /// decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|row| {
                    serde_json::Value::Array(
                        row.iter()
                            .map(|x| match x.to_i64() {
                                Some(v) => serde_json::json!(v),
                                None => serde_json::json!(x.to_string()),
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// Seeded random word in the standard `Sp_2g(Z)` generators: `J`, unipotent
/// upper and lower blocks with small symmetric `N`, and `GL_g` conjugations
/// by elementary matrices. Exact integer arithmetic throughout.
pub fn random_symplectic_integer(g: usize, word_length: usize, seed: u64) -> IntegerSymplectic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_symplectic_integer_with(g, word_length, &mut rng)
}

/// Same sampler over a caller-provided generator, for drawing sequences.
pub fn random_symplectic_integer_with(
    g: usize,
    word_length: usize,
    rng: &mut impl Rng,
) -> IntegerSymplectic {
    let mut acc = IntegerSymplectic::identity(g);
    for _ in 0..word_length {
        let kind = rng.gen_range(0..4u8);
        let gen = match kind {
            0 => {
                // J
                let mut e = vec![vec![BigInt::zero(); 2 * g]; 2 * g];
                for i in 0..g {
                    e[i][g + i] = BigInt::one();
                    e[g + i][i] = -BigInt::one();
                }
                IntegerSymplectic { g, entries: e }
            }
            1 | 2 => {
                // (1 N; 0 1) or (1 0; N 1) with N symmetric in [-2, 2]
                let mut n = vec![vec![BigInt::zero(); g]; g];
                for i in 0..g {
                    for j in i..g {
                        let v = BigInt::from(rng.gen_range(-2i64..=2));
                        n[i][j] = v.clone();
                        n[j][i] = v;
                    }
                }
                let mut e = IntegerSymplectic::identity(g).entries;
                for i in 0..g {
                    for j in 0..g {
                        if kind == 1 {
                            e[i][g + j] = n[i][j].clone();
                        } else {
                            e[g + i][j] = n[i][j].clone();
                        }
                    }
                }
                IntegerSymplectic { g, entries: e }
            }
            _ => {
                // (U 0; 0 (U^T)^-1) with U elementary (or a sign for g = 1)
                let mut u = vec![vec![BigInt::zero(); g]; g];
                let mut u_inv_t = vec![vec![BigInt::zero(); g]; g];
                for i in 0..g {
                    u[i][i] = BigInt::one();
                    u_inv_t[i][i] = BigInt::one();
                }
                if g == 1 {
                    if rng.gen_bool(0.5) {
                        u[0][0] = -BigInt::one();
                        u_inv_t[0][0] = -BigInt::one();
                    }
                } else {
                    let i = rng.gen_range(0..g);
                    let mut j = rng.gen_range(0..g - 1);
                    if j >= i {
                        j += 1;
                    }
                    let c = BigInt::from(rng.gen_range(-2i64..=2));
                    u[i][j] = c.clone();
                    // (U^T)^-1 = (1 + c E_ji)^-1 = 1 - c E_ji
                    u_inv_t[j][i] = -c;
                }
                let mut e = vec![vec![BigInt::zero(); 2 * g]; 2 * g];
                for i in 0..g {
                    for j in 0..g {
                        e[i][j] = u[i][j].clone();
                        e[g + i][g + j] = u_inv_t[i][j].clone();
                    }
                }
                IntegerSymplectic { g, entries: e }
            }
        };
        acc = acc.mul(&gen);
    }
    acc
}

/// Seeded random Siegel point with moderate norm: symmetric real part in
/// `[-1, 1]`, imaginary part `Q Q^T + 1/2`.
pub fn random_siegel(g: usize, rng: &mut impl Rng) -> SiegelPoint {
    let re = {
        let mut m = DMatrix::<f64>::zeros(g, g);
        for i in 0..g {
            for j in i..g {
                let v = rng.gen_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    };
    let q = DMatrix::<f64>::from_fn(g, g, |_, _| rng.gen_range(-0.7..0.7));
    let im = &q * q.transpose() + DMatrix::<f64>::identity(g, g) * 0.5;
    let tau = CMatrix::from_fn(g, g, |i, j| cplx(re[(i, j)], im[(i, j)]));
    SiegelPoint::new(tau, &Tolerances::default()).expect("constructed in H_g")
}

/// Seeded random Siegel-parabolic element `(A B; 0 (A^T)^-1)` of moderate
/// norm with `A B^T` symmetric.
pub fn random_parabolic(g: usize, rng: &mut impl Rng) -> CMatrix {
    let x = identity(g)
        + CMatrix::from_fn(g, g, |_, _| {
            cplx(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
        });
    let mut s = CMatrix::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let v = cplx(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let x_inv_t = x.clone().try_inverse().unwrap().transpose();
    let y = &s * &x_inv_t;
    from_blocks(&x, &y, &CMatrix::zeros(g, g), &x_inv_t)
}

/// Seeded random element of `Sp_2g(C)` of moderate norm, assembled from a
/// random symmetric part and a random parabolic via the cell factorization.
pub fn random_sp_complex(g: usize, rng: &mut impl Rng) -> SymplecticElement {
    let mut rand_sym = |scale: f64| {
        let mut m = CMatrix::zeros(g, g);
        for i in 0..g {
            for j in i..g {
                let v = cplx(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    };
    let z = rand_sym(0.8);
    let s = rand_sym(0.8);
    // X = 1 + small perturbation keeps conditioning mild.
    let x = identity(g)
        + CMatrix::from_fn(g, g, |_, _| {
            cplx(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
        });
    let x_inv_t = x.clone().try_inverse().expect("well conditioned").transpose();
    let y = &s * &x_inv_t;
    let p = from_blocks(&x, &y, &CMatrix::zeros(g, g), &x_inv_t);
    let m = gsp_star_assemble(Complex64::one(), &z, &p);
    let residual = symplectic_residual(&m);
    SymplecticElement {
        g,
        matrix: m,
        residual,
    }
}

/// Matrix serialization as nested `[re, im]` pairs.
pub fn matrix_to_json(m: &CMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|i| {
                serde_json::Value::Array(
                    (0..m.ncols())
                        .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}
