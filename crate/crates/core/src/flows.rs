//! Flows of the Ramanujan-type vector fields: the exact nilpotent group
//! flow in symplectic coordinates, numeric integration of the classical
//! genus-one system, the twisted-ODE residual, and the density probe for
//! the parabolic coordinates of leaf frames.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::charts::{ramanujan_field, Chart};
use crate::periods::eisenstein_twist_g1;
use crate::symplectic::{
    blocks, cplx, max_norm, psi, random_symplectic_integer_with, CMatrix, IntegerSymplectic,
    SiegelPoint, SymplecticElement, SymplecticError, Tolerances, TWO_PI_I,
};

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("integration path leaves the upper half-plane")]
    PathLeavesDomain,
    #[error("step produced a non-finite value")]
    StepTooLarge,
    #[error("cocycle is singular on the stencil")]
    SingularCocycle,
    #[error("could not draw enough leaf-domain samples (bound {0} attempts)")]
    InsufficientSamples(usize),
    #[error("flow times must be symmetric (residual {0})")]
    NotSymmetricTimes(f64),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// Symmetric matrix of flow times, one entry per commuting field.
#[derive(Debug, Clone)]
pub struct FlowParameters {
    t: CMatrix,
}

impl FlowParameters {
    pub fn new(t: CMatrix, tol: &Tolerances) -> Result<Self, FlowError> {
        let asym = max_norm(&(&t - t.transpose()));
        if asym > tol.membership {
            return Err(FlowError::NotSymmetricTimes(asym));
        }
        Ok(FlowParameters {
            t: (&t + t.transpose()) * cplx(0.5, 0.0),
        })
    }

    pub fn times(&self) -> &CMatrix {
        &self.t
    }
}

/// The exact flow `s -> s (1 T; 0 1)`: the generators are strictly
/// nilpotent, so the exponential of the time matrix is this single product.
/// Flowing from the identity by `T = tau` lands on `psi(tau)`.
pub fn exact_flow(s: &SymplecticElement, t: &FlowParameters) -> SymplecticElement {
    let m = s.matrix() * psi(t.times());
    SymplecticElement::new(m, &Tolerances::with_membership(f64::INFINITY)).unwrap()
}

/// The same flow in exact integer arithmetic.
pub fn exact_flow_integer(
    s: &IntegerSymplectic,
    t: &[Vec<BigInt>],
) -> Option<IntegerSymplectic> {
    let g = s.g();
    if t.len() != g || t.iter().any(|r| r.len() != g) {
        return None;
    }
    for i in 0..g {
        for j in 0..g {
            if t[i][j] != t[j][i] {
                return None;
            }
        }
    }
    let mut e = vec![vec![BigInt::zero(); 2 * g]; 2 * g];
    for i in 0..2 * g {
        e[i][i] = BigInt::one();
    }
    for i in 0..g {
        for j in 0..g {
            e[i][g + j] = t[i][j].clone();
        }
    }
    let unipotent = IntegerSymplectic::from_entries(g, e)?;
    Some(s.mul(&unipotent))
}

/// State of the genus-one integration: a chart point and its base parameter.
#[derive(Debug, Clone)]
pub struct OdeState {
    pub chart: Chart,
    pub point: [Complex64; 3],
    pub tau: Complex64,
}

fn field_eval(chart: Chart, p: &[Complex64; 3]) -> [Complex64; 3] {
    let field = ramanujan_field(chart).expect("chart carries the Ramanujan field");
    [
        field.components[0].eval_complex(p),
        field.components[1].eval_complex(p),
        field.components[2].eval_complex(p),
    ]
}

/// Classical fourth-order Runge-Kutta integration of
/// `d phi / d tau = 2 pi i v(phi)` along the straight segment from
/// `start.tau` to `tau_end`, with steps of size at most `step` in `tau`.
pub fn integrate_g1(
    start: &OdeState,
    tau_end: Complex64,
    step: f64,
) -> Result<OdeState, FlowError> {
    assert!(step > 0.0);
    assert!(start.chart != Chart::Weierstrass);
    if start.tau.im <= 0.0 || tau_end.im <= 0.0 {
        // The segment is a straight line, so positivity at the endpoints
        // bounds the whole path.
        return Err(FlowError::PathLeavesDomain);
    }
    let delta = tau_end - start.tau;
    if delta.norm() == 0.0 {
        return Ok(start.clone());
    }
    let n = (delta.norm() / step).ceil() as usize;
    let h = 1.0 / n as f64;
    let scale = TWO_PI_I * delta;
    let f = |y: &[Complex64; 3]| -> [Complex64; 3] {
        let v = field_eval(start.chart, y);
        [v[0] * scale, v[1] * scale, v[2] * scale]
    };
    let axpy = |y: &[Complex64; 3], a: f64, k: &[Complex64; 3]| -> [Complex64; 3] {
        [y[0] + k[0] * a, y[1] + k[1] * a, y[2] + k[2] * a]
    };
    let mut y = start.point;
    for _ in 0..n {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, h / 2.0, &k1));
        let k3 = f(&axpy(&y, h / 2.0, &k2));
        let k4 = f(&axpy(&y, h, &k3));
        for i in 0..3 {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            if !y[i].re.is_finite() || !y[i].im.is_finite() {
                return Err(FlowError::StepTooLarge);
            }
        }
    }
    Ok(OdeState {
        chart: start.chart,
        point: y,
        tau: tau_end,
    })
}

/// Central-difference residual of the twisted genus-one equation
/// `(1/2 pi i) d phi_delta / d tau = (c tau + d)^-2 v(phi_delta(tau))`.
pub fn twisted_ode_residual(
    delta: &CMatrix,
    tau: Complex64,
    h: f64,
) -> Result<f64, FlowError> {
    assert!(h > 0.0);
    let c = delta[(1, 0)];
    let d = delta[(1, 1)];
    for t in [tau - h, tau, tau + h] {
        if (c * t + d).norm() < 1e-14 {
            return Err(FlowError::SingularCocycle);
        }
    }
    let plus = eisenstein_twist_g1(tau + h, delta).map_err(|_| FlowError::SingularCocycle)?;
    let minus = eisenstein_twist_g1(tau - h, delta).map_err(|_| FlowError::SingularCocycle)?;
    let here = eisenstein_twist_g1(tau, delta).map_err(|_| FlowError::SingularCocycle)?;
    let v = field_eval(Chart::EChart, &here);
    let cz = c * tau + d;
    let w = Complex64::one() / (cz * cz);
    let mut worst = 0.0f64;
    for i in 0..3 {
        let diff = (plus[i] - minus[i]) / cplx(2.0 * h, 0.0) / TWO_PI_I;
        worst = worst.max((diff - v[i] * w).norm());
    }
    Ok(worst)
}

/// Rank data of the density probe.
#[derive(Debug, Clone)]
pub struct DensityReport {
    pub rank: usize,
    pub monomial_count: usize,
    pub full_rank: bool,
    pub samples: usize,
    pub singular_values: Vec<f64>,
}

impl DensityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rank": self.rank,
            "monomial_count": self.monomial_count,
            "full_rank": self.full_rank,
            "samples": self.samples,
            "singular_values": self.singular_values,
        })
    }
}

fn monomials_up_to(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; vars]];
    for _ in 0..degree {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for m in &out {
            for v in 0..vars {
                let mut e = m.clone();
                e[v] += 1;
                next.push(e);
            }
        }
        out.extend(next);
        out.sort();
        out.dedup();
    }
    out.sort();
    out.dedup();
    out
}

// Monomials in the parabolic coordinates. For g = 1 the A-block is a scalar
// and its inverse sits among the coordinates, so a^i (a^-1)^j is the same
// function as the Laurent monomial a^(i-j); such duplicates are cancelled
// to keep the column set a set of distinct coordinate-ring monomials.
fn probe_monomials(g: usize, degree: usize) -> Vec<Vec<usize>> {
    let vars = 3 * g * g;
    let mut monos = monomials_up_to(vars, degree);
    if g == 1 {
        for m in monos.iter_mut() {
            let net = m[0] as i64 - m[1] as i64;
            m[0] = net.max(0) as usize;
            m[1] = (-net).max(0) as usize;
        }
        monos.sort();
        monos.dedup();
    }
    monos
}

/// Draw symplectic integer twists until `samples` of them land in the leaf
/// domain, evaluate all monomials of total degree at most `degree` in the
/// parabolic coordinates (entries of `A`, `A^-1` and `B`), and report the
/// numerical rank of the evaluation matrix (singular values above `1e-8`
/// of the largest).
pub fn density_probe(
    delta: &SymplecticElement,
    tau: &SiegelPoint,
    degree: usize,
    samples: usize,
    seed: u64,
) -> Result<DensityReport, FlowError> {
    assert!(degree >= 1);
    let g = delta.g();
    let vars = 3 * g * g;
    let monos = probe_monomials(g, degree);
    let monomial_count = monos.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    let bound = 100 * samples;
    while rows.len() < samples {
        attempts += 1;
        if attempts > bound {
            return Err(FlowError::InsufficientSamples(bound));
        }
        let gamma = random_symplectic_integer_with(g, 6, &mut rng);
        let m = delta.matrix() * gamma.to_complex();
        let (_, _, c, d) = blocks(&m);
        let cocycle = &c * tau.tau() + &d;
        let inv = match cocycle.clone().try_inverse() {
            Some(inv) => inv,
            None => continue,
        };
        // Keep conditioning sane: reject near-singular cocycles.
        if max_norm(&inv) > 1e6 {
            continue;
        }
        let a_block = inv; // A of p_{delta gamma, tau}
        let a_inv = cocycle; // its inverse
        let b_block = c.transpose() * (-Complex64::one() / TWO_PI_I);
        let mut coords = Vec::with_capacity(vars);
        for mtx in [&a_block, &a_inv, &b_block] {
            for i in 0..g {
                for j in 0..g {
                    coords.push(mtx[(i, j)]);
                }
            }
        }
        let row: Vec<Complex64> = monos
            .iter()
            .map(|m| {
                let mut acc = Complex64::one();
                for (v, e) in m.iter().enumerate() {
                    for _ in 0..*e {
                        acc *= coords[v];
                    }
                }
                acc
            })
            .collect();
        rows.push(row);
    }
    let mat = DMatrix::<Complex64>::from_fn(samples, monomial_count, |i, j| rows[i][j]);
    let svd = mat.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let cutoff = sv.first().copied().unwrap_or(0.0) * 1e-8;
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    Ok(DensityReport {
        rank,
        monomial_count,
        full_rank: rank == monomial_count,
        samples,
        singular_values: sv,
    })
}
