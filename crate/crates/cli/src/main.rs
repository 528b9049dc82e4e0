//! Command-line front end: every verification and computation behind one
//! binary, with JSON or single-line human output and a fixed exit-code
//! contract (0 pass/computed, 1 verification failed, 2 usage error).

mod report;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use ramlab_core::charts::{
    chart_change, connection_contract, connection_curvature, curvature_convention, delta_poly,
    gauss_manin_matrix, ramanujan_field, verify_series_solution, Chart, ChartChange, SeriesCheck,
};
use ramlab_core::flows::{density_probe, integrate_g1, twisted_ode_residual, OdeState};
use ramlab_core::hilbert::{
    field_context, h_map, h_map_exact, hilbert_hodge_check, iota_embed, iota_embed_exact,
    iota_embed_integral, qexp_exponent_map, random_sl_module, ComplexFieldElement, HilbertTau,
    QuadFieldElement,
};
use ramlab_core::periods::{eisenstein_numeric, period_matrices, phi_point, PolarizedTorus};
use ramlab_core::poly::PolyExpr;
use ramlab_core::series::eisenstein_series;
use ramlab_core::symplectic::{
    cplx, j_matrix, leaf_frame, matrix_to_json, max_norm, parabolic_transport, CMatrix,
    SiegelPoint, SymplecticElement, Tolerances,
};

use report::Report;

#[derive(Parser)]
#[command(
    name = "ramlab",
    about = "Exact and numerical checks for Ramanujan-type differential systems and period matrices",
    version
)]
struct Cli {
    /// Membership tolerance for numerical constructions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for all randomized subcommands.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Emit a canonical JSON report instead of a summary line.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall time in the report (breaks byte-reproducibility).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the q-expansion of an Eisenstein series with exact coefficients.
    Eisenstein {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        order: u32,
    },
    /// Run one of the exact verification suites.
    Verify {
        /// ramanujan | chazy | phihat-b | j-relation | gm-contract |
        /// gm-curvature | delta-transfer | all
        #[arg(long)]
        check: String,
        #[arg(long, default_value_t = 50)]
        order: u32,
    },
    /// Period matrices of the (optionally twisted) standard basis at tau.
    Periods {
        #[arg(long)]
        g: usize,
        /// g x g complex matrix as JSON [[..[re,im]..]..] or @file.
        #[arg(long)]
        tau: String,
        /// 2g x 2g symplectic matrix as JSON, @file, or identity | j.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Integrate the genus-one system and compare with the q-expansion.
    Flow {
        /// Start point [re, im] in the upper half-plane.
        #[arg(long)]
        from: String,
        /// End point [re, im].
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Central-difference residual of the twisted genus-one equation.
    TwistCheck {
        /// 2 x 2 complex matrix as JSON, @file, or identity | j.
        #[arg(long, default_value = "identity")]
        delta: String,
        /// Base point [re, im].
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
    },
    /// Leaf frame data at (delta, tau).
    Leaf {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        tau: String,
    },
    /// Rank probe of the parabolic coordinates along integer twists.
    Density {
        #[arg(long)]
        g: usize,
        #[arg(long, default_value = "identity")]
        delta: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 60)]
        samples: usize,
    },
    /// Real quadratic field checks.
    Hilbert {
        #[arg(long)]
        d: i64,
        /// dual-bases | h-map | iota | period-compat | qexp-map
        #[arg(long)]
        check: String,
        /// Two upper half-plane components [[re,im],[re,im]].
        #[arg(long)]
        tau: Option<String>,
    },
}

struct UsageError(String);

type CmdResult = Result<Report, UsageError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

fn read_arg_body(arg: &str) -> Result<String, UsageError> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_complex(v: &Value) -> Result<Complex64, UsageError> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| UsageError(format!("expected [re, im], got {v}")))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| UsageError("non-numeric real part".into()))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| UsageError("non-numeric imaginary part".into()))?;
    Ok(cplx(re, im))
}

fn parse_complex_arg(arg: &str) -> Result<Complex64, UsageError> {
    let body = read_arg_body(arg)?;
    let v: Value = serde_json::from_str(&body)
        .map_err(|e| UsageError(format!("invalid JSON complex number: {e}")))?;
    parse_complex(&v)
}

fn parse_matrix_arg(arg: &str, n: usize) -> Result<CMatrix, UsageError> {
    let body = read_arg_body(arg)?;
    match body.trim() {
        "identity" => return Ok(ramlab_core::symplectic::identity(n)),
        "j" | "J" => {
            if n % 2 != 0 {
                return usage("the symplectic form matrix needs even size");
            }
            return Ok(j_matrix(n / 2));
        }
        _ => {}
    }
    let v: Value =
        serde_json::from_str(&body).map_err(|e| UsageError(format!("invalid JSON matrix: {e}")))?;
    let rows = v
        .as_array()
        .filter(|r| r.len() == n)
        .ok_or_else(|| UsageError(format!("expected a {n} x {n} matrix")))?;
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let cols = row
            .as_array()
            .filter(|c| c.len() == n)
            .ok_or_else(|| UsageError(format!("expected a {n} x {n} matrix")))?;
        for (j, z) in cols.iter().enumerate() {
            m[(i, j)] = parse_complex(z)?;
        }
    }
    Ok(m)
}

fn siegel_from_arg(arg: &str, g: usize, tol: &Tolerances) -> Result<SiegelPoint, UsageError> {
    let m = parse_matrix_arg(arg, g)?;
    SiegelPoint::new(m, tol).map_err(|e| UsageError(format!("tau: {e}")))
}

fn run(cli: &Cli) -> CmdResult {
    let tol = Tolerances::with_membership(cli.tol);
    match &cli.command {
        Command::Eisenstein { k, order } => {
            let series =
                eisenstein_series(*k, *order as i64).map_err(|e| UsageError(e.to_string()))?;
            Ok(Report::computation("eisenstein", series.to_json()))
        }
        Command::Verify { check, order } => run_verify(check, *order),
        Command::Periods { g, tau, delta } => {
            if *g == 0 {
                return usage("g must be positive");
            }
            let tau = siegel_from_arg(tau, *g, &tol)?;
            let delta = match delta {
                None => None,
                Some(d) => {
                    let m = parse_matrix_arg(d, 2 * g)?;
                    Some(
                        SymplecticElement::new(m, &tol)
                            .map_err(|e| UsageError(format!("delta: {e}")))?,
                    )
                }
            };
            let point =
                phi_point(&tau, delta.as_ref(), &tol).map_err(|e| UsageError(e.to_string()))?;
            let torus = PolarizedTorus::new(tau);
            let data = period_matrices(&torus, &point.basis);
            Ok(Report::verification(
                "periods",
                point.consistency_residual <= 1e-9,
                json!({
                    "period_data": data.to_json(),
                    "coset_rep": matrix_to_json(&point.coset_rep),
                }),
                json!({ "consistency": point.consistency_residual }),
            ))
        }
        Command::Flow { from, to, step } => {
            let from = parse_complex_arg(from)?;
            let to = parse_complex_arg(to)?;
            if *step <= 0.0 {
                return usage("step must be positive");
            }
            let start = OdeState {
                chart: Chart::EChart,
                point: [
                    eisenstein_numeric(2, from),
                    eisenstein_numeric(4, from),
                    eisenstein_numeric(6, from),
                ],
                tau: from,
            };
            let out = integrate_g1(&start, to, *step).map_err(|e| UsageError(e.to_string()))?;
            let oracle = [
                eisenstein_numeric(2, to),
                eisenstein_numeric(4, to),
                eisenstein_numeric(6, to),
            ];
            let rel = (0..3)
                .map(|i| (out.point[i] - oracle[i]).norm() / oracle[i].norm())
                .fold(0.0f64, f64::max);
            Ok(Report::verification(
                "flow",
                rel <= 1e-8,
                json!({
                    "inputs": { "from": [from.re, from.im], "to": [to.re, to.im], "step": step },
                    "endpoint": out.point.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                    "q_series_endpoint": oracle.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                }),
                json!({ "relative_error": rel }),
            ))
        }
        Command::TwistCheck { delta, tau, h } => {
            let delta = parse_matrix_arg(delta, 2)?;
            let tau = parse_complex_arg(tau)?;
            if tau.im <= 0.0 {
                return usage("tau must lie in the upper half-plane");
            }
            let r = twisted_ode_residual(&delta, tau, *h).map_err(|e| UsageError(e.to_string()))?;
            Ok(Report::computation(
                "twist-check",
                json!({
                    "inputs": { "delta": matrix_to_json(&delta), "tau": [tau.re, tau.im], "h": h },
                    "residual": r,
                }),
            ))
        }
        Command::Leaf { g, delta, tau } => {
            let tau = siegel_from_arg(tau, *g, &tol)?;
            let delta = SymplecticElement::new(parse_matrix_arg(delta, 2 * g)?, &tol)
                .map_err(|e| UsageError(format!("delta: {e}")))?;
            let frame = leaf_frame(&delta, &tau);
            let mut payload = serde_json::Map::new();
            payload.insert("in_u_delta".into(), json!(frame.in_u_delta));
            payload.insert("psi_tau".into(), matrix_to_json(&frame.psi_tau));
            let mut residuals = Value::Null;
            if frame.in_u_delta {
                let p = frame.p_delta_tau.unwrap();
                let psi_delta = frame.psi_delta_tau.unwrap();
                let loose = Tolerances::with_membership(1e-6);
                let frame_residual = parabolic_transport(&p, &loose)
                    .map(|pt| max_norm(&(&psi_delta - &frame.psi_tau * pt)))
                    .unwrap_or(f64::INFINITY);
                payload.insert("p_delta_tau".into(), matrix_to_json(&p));
                payload.insert("psi_delta_tau".into(), matrix_to_json(&psi_delta));
                residuals = json!({ "frame_identity": frame_residual });
            }
            Ok(Report::computation("leaf", Value::Object(payload)).with_residuals(residuals))
        }
        Command::Density {
            g,
            delta,
            tau,
            degree,
            samples,
        } => {
            if *degree == 0 {
                return usage("degree must be at least 1");
            }
            let tau = siegel_from_arg(tau, *g, &tol)?;
            let delta = SymplecticElement::new(parse_matrix_arg(delta, 2 * g)?, &tol)
                .map_err(|e| UsageError(format!("delta: {e}")))?;
            let report = density_probe(&delta, &tau, *degree, *samples, cli.seed)
                .map_err(|e| UsageError(e.to_string()))?;
            let mut payload = report.to_json();
            payload["inputs"] = json!({
                "delta": matrix_to_json(delta.matrix()),
                "tau": matrix_to_json(tau.tau()),
                "degree": degree,
                "samples": samples,
                "seed": cli.seed,
            });
            Ok(Report::computation("density", payload))
        }
        Command::Hilbert { d, check, tau } => run_hilbert(*d, check, tau.as_deref(), &tol, cli.seed),
    }
}

impl Report {
    fn with_residuals(mut self, residuals: Value) -> Self {
        self.residuals = residuals;
        self
    }
}

fn run_verify(check: &str, order: u32) -> CmdResult {
    if order == 0 {
        return usage("order must be at least 1");
    }
    let series = |c: SeriesCheck| -> Report {
        let r = verify_series_solution(c, order as i64).expect("series checks are total");
        Report::verification("verify", r.pass, r.to_json(), Value::Null)
    };
    let single = |name: &str| -> CmdResult {
        match name {
            "gm-contract" => {
                let mut pass = true;
                let mut entries = Vec::new();
                for chart in [Chart::EChart, Chart::BChart] {
                    let m = connection_contract(
                        &gauss_manin_matrix(chart),
                        &ramanujan_field(chart).unwrap(),
                    )
                    .unwrap();
                    let ok = m[0][0].is_zero()
                        && m[0][1].is_zero()
                        && m[1][1].is_zero()
                        && m[1][0].is_one();
                    pass &= ok;
                    entries.push(json!({ "chart": chart.name(), "nilpotent_unit": ok }));
                }
                Ok(Report::verification(
                    "verify",
                    pass,
                    json!({ "check": "gm-contract", "charts": entries }),
                    Value::Null,
                ))
            }
            "gm-curvature" => {
                let mut pass = true;
                let mut entries = Vec::new();
                for chart in [Chart::Weierstrass, Chart::EChart, Chart::BChart] {
                    let conn = gauss_manin_matrix(chart);
                    let f = connection_curvature(&conn);
                    let flat = f
                        .iter()
                        .all(|row| row.iter().all(|e| e.iter().all(|r| r.is_zero())));
                    let antisym = (0..chart.dim())
                        .all(|v| conn.omega[1][1][v] == conn.omega[0][0][v].neg());
                    pass &= flat && antisym;
                    entries.push(json!({
                        "chart": chart.name(),
                        "curvature_zero": flat,
                        "antisymmetric": antisym,
                    }));
                }
                Ok(Report::verification(
                    "verify",
                    pass,
                    json!({
                        "check": "gm-curvature",
                        "charts": entries,
                        "convention": curvature_convention().describe(),
                    }),
                    Value::Null,
                ))
            }
            "delta-transfer" => {
                let e_to_b = chart_change(ChartChange::EToB);
                let b_to_e = chart_change(ChartChange::BToE);
                let round = (0..3).all(|i| {
                    b_to_e[i].substitute(&e_to_b) == PolyExpr::var(Chart::EChart.variables(), i)
                        && e_to_b[i].substitute(&b_to_e)
                            == PolyExpr::var(Chart::BChart.variables(), i)
                });
                let transfer = delta_poly(Chart::BChart).substitute(&e_to_b)
                    == delta_poly(Chart::EChart).scale(&PolyExpr::rational(1, 1728));
                Ok(Report::verification(
                    "verify",
                    round && transfer,
                    json!({
                        "check": "delta-transfer",
                        "roundtrips_exact": round,
                        "transfer_exact": transfer,
                    }),
                    Value::Null,
                ))
            }
            other => match SeriesCheck::parse(other) {
                Some(c) => Ok(series(c)),
                None => usage(format!("unknown check '{other}'")),
            },
        }
    };
    if check == "all" {
        let names = [
            "ramanujan",
            "chazy",
            "phihat-b",
            "j-relation",
            "gm-contract",
            "gm-curvature",
            "delta-transfer",
        ];
        let mut pass = true;
        let mut parts = Vec::new();
        for name in names {
            let r = single(name)?;
            pass &= r.pass.unwrap_or(true);
            parts.push(r.payload);
        }
        Ok(Report::verification(
            "verify",
            pass,
            json!({ "check": "all", "parts": parts }),
            Value::Null,
        ))
    } else {
        single(check)
    }
}

fn run_hilbert(d: i64, check: &str, tau: Option<&str>, tol: &Tolerances, seed: u64) -> CmdResult {
    let ctx = field_context(d).map_err(|e| UsageError(e.to_string()))?;
    let parse_hilbert_tau = |arg: Option<&str>| -> Result<HilbertTau, UsageError> {
        let body = match arg {
            None => "[[0,1],[0,1]]".to_string(),
            Some(a) => read_arg_body(a)?,
        };
        let v: Value =
            serde_json::from_str(&body).map_err(|e| UsageError(format!("invalid tau: {e}")))?;
        let arr = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| UsageError("expected two components".into()))?;
        let t1 = parse_complex(&arr[0])?;
        let t2 = parse_complex(&arr[1])?;
        HilbertTau::new(t1, t2).ok_or_else(|| UsageError("components must have Im > 0".into()))
    };
    match check {
        "dual-bases" => {
            let mut exact = true;
            for i in 0..2 {
                exact &= ctx.x_basis[i].is_totally_positive();
                for j in 0..2 {
                    let t = ctx.r_basis[i].mul(&ctx.x_basis[j]).trace();
                    let expect = if i == j {
                        num_rational::BigRational::from_integer(1.into())
                    } else {
                        num_rational::BigRational::from_integer(0.into())
                    };
                    exact &= t == expect;
                }
            }
            Ok(Report::verification(
                "hilbert",
                exact,
                json!({ "check": "dual-bases", "context": ctx.to_json() }),
                Value::Null,
            ))
        }
        "h-map" => {
            let tau = parse_hilbert_tau(tau)?;
            let h = h_map(&ctx, &tau).map_err(|e| UsageError(e.to_string()))?;
            Ok(Report::computation(
                "hilbert",
                json!({ "check": "h-map", "image": matrix_to_json(h.tau()) }),
            ))
        }
        "iota" => {
            // Exact representative identity at a rational-coefficient point,
            // plus integrality and a numeric homomorphism residual on random
            // module matrices.
            use num_rational::BigRational;
            let tau_cf = ComplexFieldElement::new(
                d,
                num_complex::Complex::new(
                    BigRational::from_integer(0.into()),
                    BigRational::from_integer(2.into()),
                ),
                num_complex::Complex::new(
                    BigRational::from_integer(0.into()),
                    BigRational::new(1.into(), 3.into()),
                ),
            );
            let one = ComplexFieldElement::one(d);
            let zero = ComplexFieldElement::zero(d);
            let rep = [[one.clone(), tau_cf.clone()], [zero.clone(), one.clone()]];
            let m = iota_embed_exact(&ctx, &rep);
            let h = h_map_exact(&ctx, &tau_cf);
            let mut exact = true;
            for i in 0..2 {
                for j in 0..2 {
                    exact &= m[i][2 + j] == h[i][j];
                }
            }
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let mut integral = true;
            let mut worst: f64 = 0.0;
            let loose = Tolerances::with_membership(1e-6);
            for _ in 0..10 {
                let s = random_sl_module(&ctx, 4, &mut rng);
                integral &= iota_embed_integral(&ctx, &s).is_ok();
                let t = random_sl_module(&ctx, 4, &mut rng);
                let cf = |q: &[[QuadFieldElement; 2]; 2]| -> [[ComplexFieldElement; 2]; 2] {
                    std::array::from_fn(|i| {
                        std::array::from_fn(|j| ComplexFieldElement::from_quad(&q[i][j]))
                    })
                };
                let mm: [[QuadFieldElement; 2]; 2] = std::array::from_fn(|i| {
                    std::array::from_fn(|j| s[i][0].mul(&t[0][j]).add(&s[i][1].mul(&t[1][j])))
                });
                let lhs =
                    iota_embed(&ctx, &cf(&mm), &loose).map_err(|e| UsageError(e.to_string()))?;
                let rhs = iota_embed(&ctx, &cf(&s), &loose)
                    .map_err(|e| UsageError(e.to_string()))?
                    .mul(&iota_embed(&ctx, &cf(&t), &loose).map_err(|e| UsageError(e.to_string()))?);
                worst = worst.max(max_norm(&(lhs.matrix() - rhs.matrix())));
            }
            Ok(Report::verification(
                "hilbert",
                exact && integral && worst <= 1e-9,
                json!({
                    "check": "iota",
                    "representative_identity_exact": exact,
                    "integral_samples_symplectic": integral,
                }),
                json!({ "homomorphism": worst }),
            ))
        }
        "period-compat" => {
            let threshold = tol.membership.max(1e-10);
            match tau {
                Some(arg) => {
                    let tau = parse_hilbert_tau(Some(arg))?;
                    let r =
                        hilbert_hodge_check(&ctx, &tau).map_err(|e| UsageError(e.to_string()))?;
                    Ok(Report::verification(
                        "hilbert",
                        r.pass(threshold),
                        json!({ "check": "period-compat", "clauses": r.to_json() }),
                        Value::Null,
                    ))
                }
                None => {
                    use rand::Rng;
                    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
                    let mut pass = true;
                    let mut worst: f64 = 0.0;
                    for _ in 0..20 {
                        let t1 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.4..2.0));
                        let t2 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.4..2.0));
                        let r = hilbert_hodge_check(&ctx, &HilbertTau::new(t1, t2).unwrap())
                            .map_err(|e| UsageError(e.to_string()))?;
                        pass &= r.pass(threshold);
                        worst = worst
                            .max(r.lattice_residual)
                            .max(r.omega_residual)
                            .max(r.derivation_residual)
                            .max(r.period_residual);
                    }
                    Ok(Report::verification(
                        "hilbert",
                        pass,
                        json!({ "check": "period-compat", "points": 20 }),
                        json!({ "worst_clause": worst }),
                    ))
                }
            }
        }
        "qexp-map" => {
            let m = qexp_exponent_map(&ctx);
            Ok(Report::verification(
                "hilbert",
                true,
                json!({
                    "check": "qexp-map",
                    "source_variables": ["q11", "q12", "q22"],
                    "target_variables": ["qr1", "qr2"],
                    "matrix": m,
                }),
                Value::Null,
            ))
        }
        other => usage(format!("unknown hilbert check '{other}'")),
    }
}

fn main() {
    let cli = Cli::parse();
    let t0 = std::time::Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.timing {
                report.wall_time_ms = Some(t0.elapsed().as_secs_f64() * 1e3);
            }
            if cli.json {
                println!("{}", report.to_json_string());
            } else {
                println!("{}", report.human_line());
            }
            std::process::exit(report.exit_code());
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}
