//! Acceptance suite: every release criterion in one target, each evaluated
//! at its pinned tolerance, with one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ramlab_core::charts::{
    chart_change, connection_contract, connection_curvature, curvature_convention, delta_poly,
    gauss_manin_matrix, ramanujan_field, verify_series_solution, Chart, ChartChange, SeriesCheck,
};
use ramlab_core::flows::{
    density_probe, exact_flow_integer, integrate_g1, twisted_ode_residual, OdeState,
};
use ramlab_core::hilbert::{
    field_context, h_map, h_map_exact, hilbert_hodge_check, iota_embed_exact, qexp_exponent_map,
    ComplexFieldElement, HilbertTau, QuadFieldElement,
};
use ramlab_core::periods::{
    basis_right_action, eisenstein_numeric, period_matrices, standard_bases, PolarizedTorus,
};
use ramlab_core::poly::PolyExpr;
use ramlab_core::series::eisenstein_series;
use ramlab_core::symplectic::{
    cplx, gsp_star_assemble, gsp_star_factor, identity, j_matrix, leaf_frame, max_norm,
    mobius_act, parabolic_transport, psi, random_parabolic, random_siegel, random_sp_complex,
    random_symplectic_integer_with, IntegerSymplectic, SiegelPoint, SymplecticElement,
    Tolerances, TWO_PI_I,
};

struct Suite {
    results: Vec<(usize, bool, String)>,
}

impl Suite {
    fn run(&mut self, number: usize, name: &str, f: impl FnOnce() -> Result<String, String>) {
        let outcome = f();
        let (ok, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        println!(
            "{} criterion {:2}: {} {}",
            if ok { "PASS" } else { "FAIL" },
            number,
            name,
            if detail.is_empty() {
                String::new()
            } else {
                format!("[{detail}]")
            }
        );
        self.results.push((number, ok, name.to_string()));
    }
}

fn check(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

#[test]
fn acceptance_criteria() {
    let mut suite = Suite { results: Vec::new() };
    let tols = Tolerances::default();

    suite.run(1, "Ramanujan system exact to order 200 under 10 s", || {
        let t0 = Instant::now();
        let report = verify_series_solution(SeriesCheck::Ramanujan, 200)
            .map_err(|e| e.to_string())?;
        check(report.pass, &format!("{:?}", report.first_failure))?;
        for k in [2, 4, 6] {
            check(
                eisenstein_series(k, 200).unwrap().is_integral(),
                "non-integer Eisenstein coefficient",
            )?;
        }
        let elapsed = t0.elapsed();
        check(elapsed.as_secs_f64() < 10.0, &format!("took {elapsed:?}"))?;
        Ok(format!("{elapsed:?}"))
    });

    suite.run(2, "Chazy equation exact to order 200", || {
        let report = verify_series_solution(SeriesCheck::Chazy, 200).map_err(|e| e.to_string())?;
        check(report.pass, &format!("{:?}", report.first_failure))?;
        Ok(String::new())
    });

    suite.run(3, "integral b-chart solution exact to order 200", || {
        let report = verify_series_solution(SeriesCheck::PhihatB, 200).map_err(|e| e.to_string())?;
        check(report.pass, &format!("{:?}", report.first_failure))?;
        Ok(String::new())
    });

    suite.run(4, "j-expression identities exact to order 100", || {
        let report = verify_series_solution(SeriesCheck::JRelation, 100).map_err(|e| e.to_string())?;
        check(report.pass, &format!("{:?}", report.first_failure))?;
        Ok(String::new())
    });

    suite.run(5, "connection contraction, antisymmetry, flatness", || {
        for chart in [Chart::EChart, Chart::BChart] {
            let conn = gauss_manin_matrix(chart);
            let m = connection_contract(&conn, &ramanujan_field(chart).unwrap())
                .map_err(|e| e.to_string())?;
            check(
                m[0][0].is_zero() && m[0][1].is_zero() && m[1][1].is_zero() && m[1][0].is_one(),
                &format!("contraction wrong on {chart}"),
            )?;
        }
        for chart in [Chart::Weierstrass, Chart::EChart, Chart::BChart] {
            let conn = gauss_manin_matrix(chart);
            for v in 0..chart.dim() {
                check(
                    conn.omega[1][1][v] == conn.omega[0][0][v].neg(),
                    &format!("antisymmetry fails on {chart}"),
                )?;
            }
            let f = connection_curvature(&conn);
            check(
                f.iter().all(|row| row.iter().all(|e| e.iter().all(|r| r.is_zero()))),
                &format!("curvature nonzero on {chart}"),
            )?;
        }
        Ok(format!("convention {}", curvature_convention().describe()))
    });

    suite.run(6, "chart-change roundtrips and discriminant transfer", || {
        let e_to_b = chart_change(ChartChange::EToB);
        let b_to_e = chart_change(ChartChange::BToE);
        for i in 0..3 {
            check(
                b_to_e[i].substitute(&e_to_b) == PolyExpr::var(Chart::EChart.variables(), i),
                "e-chart roundtrip",
            )?;
            check(
                e_to_b[i].substitute(&b_to_e) == PolyExpr::var(Chart::BChart.variables(), i),
                "b-chart roundtrip",
            )?;
        }
        let transferred = delta_poly(Chart::BChart).substitute(&e_to_b);
        let expected = delta_poly(Chart::EChart).scale(&PolyExpr::rational(1, 1728));
        check(transferred == expected, "discriminant transfer")?;
        Ok(String::new())
    });

    suite.run(7, "standard period matrices at 100 random tau, g = 1..3", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for g in 1..=3usize {
            for _ in 0..100 {
                let tau = random_siegel(g, &mut rng);
                let torus = PolarizedTorus::new(tau.clone());
                let data = period_matrices(&torus, &standard_bases(&torus).hodge);
                check(
                    max_norm(&(&data.pi - psi(tau.tau()))) <= 1e-10,
                    "Pi differs from (1 tau; 0 1)",
                )?;
                check((data.nu - TWO_PI_I).norm() <= 1e-9, "nu not 2 pi i")?;
                check(data.gsp_residual <= 1e-9, "P not in GSp")?;
                let ratio = &data.omega2
                    * data.omega1.clone().try_inverse().ok_or("Omega1 singular")?;
                check(
                    SiegelPoint::new(ratio, &tols).is_ok(),
                    "Omega2 Omega1^-1 not in H_g",
                )?;
            }
        }
        Ok(String::new())
    });

    suite.run(8, "factorization, equivariance, frame and coset laws at g = 2", || {
        let g = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(4096);
        let loose = Tolerances::with_membership(1e-6);
        let mut worst_round: f64 = 0.0;
        let mut worst_equiv: f64 = 0.0;
        let mut worst_frame: f64 = 0.0;
        let mut coset_checked = 0usize;
        for _ in 0..100 {
            // Factor / assemble roundtrip.
            let s = random_sp_complex(g, &mut rng);
            let f = gsp_star_factor(s.matrix()).map_err(|e| e.to_string())?;
            let back = gsp_star_assemble(f.nu, &f.tau_part, &f.parabolic);
            worst_round = worst_round.max(max_norm(&(&back - s.matrix())));

            // Basis transport equivariance.
            let tau = random_siegel(g, &mut rng);
            let torus = PolarizedTorus::new(tau.clone());
            let b = standard_bases(&torus).hodge;
            let p = random_parabolic(g, &mut rng);
            let bp = basis_right_action(&b, &p, &loose).map_err(|e| e.to_string())?;
            let lhs = period_matrices(&torus, &bp).pi;
            let rhs = period_matrices(&torus, &b).pi
                * parabolic_transport(&p, &loose).map_err(|e| e.to_string())?;
            worst_equiv = worst_equiv.max(max_norm(&(&lhs - &rhs)));

            // Frame identity.
            let delta = random_sp_complex(g, &mut rng);
            let frame = leaf_frame(&delta, &tau);
            if frame.in_u_delta {
                let rhs = &frame.psi_tau
                    * parabolic_transport(&frame.p_delta_tau.unwrap(), &loose)
                        .map_err(|e| e.to_string())?;
                worst_frame = worst_frame.max(max_norm(&(&frame.psi_delta_tau.unwrap() - &rhs)));
            }

            // Coset law: the quotient is an integer symplectic matrix.
            let gamma = random_symplectic_integer_with(g, 5, &mut rng);
            let dg = SymplecticElement::new(delta.matrix() * gamma.to_complex(), &loose)
                .map_err(|e| e.to_string())?;
            let f1 = leaf_frame(&dg, &tau);
            if !f1.in_u_delta {
                continue;
            }
            let (gtau, _) = mobius_act(&gamma.to_element(), &tau, &tols).map_err(|e| e.to_string())?;
            let f2 = leaf_frame(&delta, &gtau);
            if !f2.in_u_delta {
                continue;
            }
            let q = f1.psi_delta_tau.unwrap()
                * f2.psi_delta_tau.unwrap().try_inverse().ok_or("singular frame")?;
            let mut rounded = vec![vec![BigInt::from(0); 2 * g]; 2 * g];
            for i in 0..2 * g {
                for j in 0..2 * g {
                    let z = q[(i, j)];
                    check(z.im.abs() <= 1e-8, "coset entry has imaginary part")?;
                    check((z.re - z.re.round()).abs() <= 1e-8, "coset entry off integer")?;
                    rounded[i][j] = BigInt::from(z.re.round() as i64);
                }
            }
            check(
                IntegerSymplectic::from_entries(g, rounded).is_some(),
                "rounded coset not symplectic",
            )?;
            coset_checked += 1;
        }
        check(worst_round <= 1e-12, &format!("roundtrip residual {worst_round}"))?;
        check(worst_equiv <= 1e-10, &format!("equivariance residual {worst_equiv}"))?;
        check(worst_frame <= 1e-10, &format!("frame residual {worst_frame}"))?;
        check(coset_checked >= 90, "too few coset samples in domain")?;
        Ok(format!(
            "roundtrip {worst_round:.2e}, equivariance {worst_equiv:.2e}, frame {worst_frame:.2e}"
        ))
    });

    suite.run(9, "RK4 against the q-expansion, and the twisted equation", || {
        let start = OdeState {
            chart: Chart::EChart,
            point: [
                eisenstein_numeric(2, cplx(0.0, 2.0)),
                eisenstein_numeric(4, cplx(0.0, 2.0)),
                eisenstein_numeric(6, cplx(0.0, 2.0)),
            ],
            tau: cplx(0.0, 2.0),
        };
        let end_tau = cplx(0.0, 1.5);
        let out = integrate_g1(&start, end_tau, 1e-3).map_err(|e| e.to_string())?;
        let expect = [
            eisenstein_numeric(2, end_tau),
            eisenstein_numeric(4, end_tau),
            eisenstein_numeric(6, end_tau),
        ];
        let mut worst_rel: f64 = 0.0;
        for i in 0..3 {
            worst_rel = worst_rel.max((out.point[i] - expect[i]).norm() / expect[i].norm());
        }
        check(worst_rel <= 1e-8, &format!("endpoint relative error {worst_rel}"))?;

        // Order-4 convergence under step halving, at steps coarse enough to
        // stand clear of roundoff.
        let err = |step: f64| -> f64 {
            let out = integrate_g1(&start, end_tau, step).unwrap();
            (0..3)
                .map(|i| (out.point[i] - expect[i]).norm())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.025) / err(0.0125);
        check(
            (8.0..40.0).contains(&ratio),
            &format!("halving ratio {ratio}"),
        )?;

        // Twisted residuals over 10-point grids.
        let mut worst_id: f64 = 0.0;
        let mut worst_j: f64 = 0.0;
        for k in 0..10 {
            let tau = cplx(-0.9 + 0.2 * k as f64, 1.0 + 0.1 * k as f64);
            worst_id = worst_id.max(
                twisted_ode_residual(&identity(2), tau, 1e-4).map_err(|e| e.to_string())?,
            );
            let tau_j = cplx(1.0 + 0.1 * k as f64, 2.0 + 0.1 * k as f64);
            worst_j = worst_j.max(
                twisted_ode_residual(&j_matrix(1), tau_j, 1e-4).map_err(|e| e.to_string())?,
            );
        }
        check(worst_id <= 1e-6, &format!("identity residual {worst_id}"))?;
        check(worst_j <= 1e-5, &format!("inversion residual {worst_j}"))?;
        Ok(format!(
            "rel {worst_rel:.2e}, ratio {ratio:.1}, residuals {worst_id:.2e}/{worst_j:.2e}"
        ))
    });

    suite.run(10, "density probe full rank, byte-reproducible", || {
        let tau = SiegelPoint::scalar(cplx(0.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(314159);
        let deltas = [
            SymplecticElement::identity(1),
            SymplecticElement::new(j_matrix(1), &tols).map_err(|e| e.to_string())?,
            random_sp_complex(1, &mut rng),
        ];
        let mut blobs = Vec::new();
        for delta in &deltas {
            let a = density_probe(delta, &tau, 2, 60, 42).map_err(|e| e.to_string())?;
            let b = density_probe(delta, &tau, 2, 60, 42).map_err(|e| e.to_string())?;
            check(a.full_rank, &format!("rank {} of {}", a.rank, a.monomial_count))?;
            let sa = serde_json::to_string(&a.to_json()).unwrap();
            let sb = serde_json::to_string(&b.to_json()).unwrap();
            check(sa == sb, "probe output not reproducible")?;
            blobs.push(sa);
        }
        Ok(format!("monomials {}", 9))
    });

    suite.run(11, "real-multiplication suite over Q(sqrt 5)", || {
        let ctx = field_context(5).map_err(|e| e.to_string())?;
        // Exact dual bases.
        let half = BigRational::new(1.into(), 2.into());
        let tenth = BigRational::new(1.into(), 10.into());
        check(
            ctx.x_basis[0] == QuadFieldElement::new(5, half.clone(), tenth.clone())
                && ctx.x_basis[1] == QuadFieldElement::new(5, half.clone(), -tenth),
            "x basis",
        )?;
        check(
            ctx.r_basis[0] == QuadFieldElement::new(5, half.clone(), half.clone())
                && ctx.r_basis[1] == QuadFieldElement::new(5, half.clone(), -half.clone()),
            "dual basis",
        )?;

        // h(i, i) = i (3 -2; -2 3).
        let i1 = cplx(0.0, 1.0);
        let h = h_map(&ctx, &HilbertTau::new(i1, i1).unwrap()).map_err(|e| e.to_string())?;
        let expect = [[3.0, -2.0], [-2.0, 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                check(
                    (h.tau()[(i, j)] - cplx(0.0, expect[i][j])).norm() < 1e-12,
                    "h map value",
                )?;
            }
        }

        // Exact embedding identity on the coset representative.
        let tau_cf = ComplexFieldElement::new(
            5,
            num_complex::Complex::new(BigRational::from(BigInt::from(0)), BigRational::from(BigInt::from(2))),
            num_complex::Complex::new(BigRational::from(BigInt::from(0)), BigRational::new(1.into(), 3.into())),
        );
        let one = ComplexFieldElement::one(5);
        let zero = ComplexFieldElement::zero(5);
        let rep = [[one.clone(), tau_cf.clone()], [zero.clone(), one.clone()]];
        let m = iota_embed_exact(&ctx, &rep);
        let hx = h_map_exact(&ctx, &tau_cf);
        for i in 0..2 {
            for j in 0..2 {
                check(m[i][2 + j] == hx[i][j], "exact embedding vs exact h-map")?;
                let id = if i == j { BigRational::one() } else { BigRational::from(BigInt::from(0)) };
                check(m[i][j].re == id && m[2 + i][2 + j].re == id, "unipotent shape")?;
                check(m[2 + i][j].re == BigRational::from(BigInt::from(0)), "lower block zero")?;
            }
        }

        // Exponent matrix values.
        let q = qexp_exponent_map(&ctx);
        check(q[0][0] == 2 && q[1][0] == 1, "q11 exponents")?;
        check(q[0][1] == -1 && q[1][1] == -1, "q12 exponents")?;

        // Period compatibility at 20 random points.
        let mut rng = ChaCha8Rng::seed_from_u64(2718);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let t1 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.4..2.0));
            let t2 = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(0.4..2.0));
            let report = hilbert_hodge_check(&ctx, &HilbertTau::new(t1, t2).unwrap())
                .map_err(|e| e.to_string())?;
            check(report.pass(1e-10), &format!("{report:?}"))?;
            worst = worst
                .max(report.lattice_residual)
                .max(report.omega_residual)
                .max(report.derivation_residual)
                .max(report.period_residual);
        }
        Ok(format!("worst clause residual {worst:.2e}"))
    });

    suite.run(12, "exact flow commutation over the integers, g = 1..3", || {
        let mut rng = ChaCha8Rng::seed_from_u64(1618);
        for g in 1..=3usize {
            for _ in 0..20 {
                let s = random_symplectic_integer_with(g, 6, &mut rng);
                let sym = |rng: &mut ChaCha8Rng| -> Vec<Vec<BigInt>> {
                    let mut t = vec![vec![BigInt::from(0); g]; g];
                    for i in 0..g {
                        for j in i..g {
                            let v = BigInt::from(rng.gen_range(-9i64..=9));
                            t[i][j] = v.clone();
                            t[j][i] = v;
                        }
                    }
                    t
                };
                let t1 = sym(&mut rng);
                let t2 = sym(&mut rng);
                let ab = exact_flow_integer(&exact_flow_integer(&s, &t1).unwrap(), &t2).unwrap();
                let ba = exact_flow_integer(&exact_flow_integer(&s, &t2).unwrap(), &t1).unwrap();
                let sum: Vec<Vec<BigInt>> = (0..g)
                    .map(|i| (0..g).map(|j| &t1[i][j] + &t2[i][j]).collect())
                    .collect();
                let direct = exact_flow_integer(&s, &sum).unwrap();
                check(ab == ba, "flow order changed the result")?;
                check(ab == direct, "flow additivity failed")?;
            }
        }
        Ok(String::new())
    });

    let failed: Vec<_> = suite.results.iter().filter(|(_, ok, _)| !ok).collect();
    assert!(
        failed.is_empty(),
        "acceptance criteria failed: {:?}",
        failed.iter().map(|(n, _, name)| format!("{n}: {name}")).collect::<Vec<_>>()
    );
}
