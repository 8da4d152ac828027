//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uncertainty_core::classical::{classical_relation, SampleSet};
use uncertainty_core::config::QuadraticFormGrid;
use uncertainty_core::operators::ScalarFunction;
use uncertainty_core::oracle::oracle_stat_report;
use uncertainty_core::relations::{
    evaluate_commutator_form, evaluate_modified, phi_lz_bound, quadratic_form_check, Applicability,
};
use uncertainty_core::stats::stat_report;
use uncertainty_core::{
    domain_check, realize, DomainReason, GridTopology, Membership, OperatorSpec, StateRecipe, Tolerances, WaveFunction,
};

type Criterion = (&'static str, &'static str, fn(&Tolerances) -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn on_grid(recipe: &StateRecipe, n: usize) -> WaveFunction {
    realize(recipe, &recipe.default_topology(n).expect("grid")).expect("state")
}

fn random_amp(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_packet_modes(rng: &mut ChaCha8Rng) -> Vec<(i64, Complex64)> {
    (-3..=3).map(|m| (m, random_amp(rng))).collect()
}

/// Packet with `Σ a_m = 0`, so `ψ(0) = ψ(2π) = 0`.
fn vanishing_packet(rng: &mut ChaCha8Rng) -> StateRecipe {
    let mut modes = random_packet_modes(rng);
    let total: Complex64 = modes.iter().map(|m| m.1).sum();
    modes[3].1 -= total;
    StateRecipe::wave_packet(&modes, 0.0)
}

fn random_line_state(rng: &mut ChaCha8Rng, hbar: f64) -> StateRecipe {
    if rng.gen_bool(0.5) {
        StateRecipe::Gaussian {
            x0: rng.gen_range(-1.0..1.0),
            p0: rng.gen_range(-1.0..1.0) * hbar,
            sigma: rng.gen_range(0.7..1.5),
            chirp: rng.gen_range(-1.0..1.0),
            hbar,
        }
    } else {
        StateRecipe::HermiteSuperposition { coefficients: (0..4).map(|_| random_amp(rng)).collect() }
    }
}

fn cos_phi() -> OperatorSpec {
    OperatorSpec::multiply(ScalarFunction::expression("cos(phi)").expect("expr"))
}

fn ac1(tol: &Tolerances) -> Outcome {
    let start = Instant::now();
    let phi = OperatorSpec::angle();
    let lz = OperatorSpec::angular_momentum(1.0);
    let target = PI / 3f64.sqrt();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut ok = true;
    for m in -2..=2 {
        let psi = on_grid(&StateRecipe::lz_eigenstate(m), 8193);
        let r = evaluate_commutator_form(&phi, &lz, &psi, tol).expect("phi, Lz evaluates");
        worst.0 = worst.0.max((r.stats.delta_a - target).abs());
        worst.1 = worst.1.max(r.stats.delta_b);
        worst.2 = worst.2.max(r.lhs);
        let refused = match &r.standard.applicability {
            Applicability::InapplicableDomain { reason, evidence } => {
                *reason == DomainReason::BoundaryConditionViolated && evidence.operator == "Lz*phi"
            }
            _ => false,
        };
        ok &= refused && r.standard.bound.is_none();
    }
    let elapsed = start.elapsed();
    ok &= worst.0 <= 1e-6 && worst.1 <= 1e-6 && worst.2 < 0.5 && elapsed < Duration::from_secs(1);
    outcome(
        ok,
        format!(
            "max|dphi - pi/sqrt3| = {:.2e}, max dLz = {:.2e}, max product = {:.2e}, standard bound refused on Lz*phi, {:.0} ms",
            worst.0,
            worst.1,
            worst.2,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn ac2(tol: &Tolerances) -> Outcome {
    let start = Instant::now();
    let n = 4097;
    let h = GridTopology::circle(n).unwrap().step();
    let mut eig = 0.0f64;
    for m in -3..=3 {
        eig = eig.max(phi_lz_bound(&on_grid(&StateRecipe::lz_eigenstate(m), n), 1.0, tol).unwrap().bound);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let limit = tol.relation_c * h * h;
    let mut worst = 0.0f64;
    let count = 40;
    for _ in 0..count {
        let alpha = rng.gen_range(0.0..2.0 * PI);
        let psi = on_grid(&StateRecipe::wave_packet(&random_packet_modes(&mut rng), alpha), n);
        let closed = phi_lz_bound(&psi, 1.0, tol).unwrap().bound;
        let quad = evaluate_modified(&OperatorSpec::angle(), &OperatorSpec::angular_momentum(1.0), &psi, tol)
            .unwrap()
            .modified_bound();
        worst = worst.max((closed - quad).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        eig <= 1e-8 && worst <= limit && elapsed < Duration::from_secs(5),
        format!(
            "eigenstate bound max {eig:.2e}; {count} packets: max |closed - quadrature| = {worst:.2e} <= c h^2 = {limit:.2e}; {:.0} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn ac3(tol: &Tolerances) -> Outcome {
    let n = 131073;
    let x = OperatorSpec::position();
    let p = OperatorSpec::momentum(1.0);
    let psi = on_grid(&StateRecipe::gaussian(1.0), n);
    let r = evaluate_commutator_form(&x, &p, &psi, tol).unwrap();
    let prod_err = (r.lhs - 0.5).abs();
    let imag_err = (r.stats.imag_cross - 0.5).abs();
    let mut ok = prod_err <= 1e-6 && imag_err <= 1e-8;
    let mut cov_err = 0.0f64;
    let mut sat_err = 0.0f64;
    for c in [0.25, 0.5, 1.0] {
        let psi = on_grid(&StateRecipe::chirped_gaussian(1.0, c, 1.0), n);
        let r = evaluate_commutator_form(&x, &p, &psi, tol).unwrap();
        cov_err = cov_err.max((r.stats.covariance - c / 2.0).abs());
        let bound = r.commutator.bound.expect("commutator form applies to Gaussians");
        sat_err = sat_err.max((r.lhs - bound).abs());
    }
    ok &= cov_err <= 1e-6 && sat_err <= 1e-6;
    outcome(
        ok,
        format!(
            "n = {n}: |dx dp - 1/2| = {prod_err:.2e}, |Im - 1/2| = {imag_err:.2e}; chirped: max |cov - c/2| = {cov_err:.2e}, max |lhs - commutator bound| = {sat_err:.2e}"
        ),
    )
}

fn ac4(tol: &Tolerances) -> Outcome {
    let start = Instant::now();
    let psi = on_grid(&StateRecipe::Cusp, 1025);
    let norm = uncertainty_core::norm(&psi);
    let r = domain_check(&OperatorSpec::momentum(1.0), &psi, tol).unwrap();
    let elapsed = start.elapsed();
    let ok = r.reason == DomainReason::DerivativeNotSquareIntegrable
        && r.in_domain == Membership::No
        && r.derivative_norm_sequence.len() == 5
        && (norm - 1.0).abs() <= 1e-6
        && elapsed < Duration::from_secs(2);
    let seq: Vec<String> = r.derivative_norm_sequence.iter().map(|(n, v)| format!("{n}:{v:.4}")).collect();
    outcome(
        ok,
        format!(
            "{:?}, norm {norm:.12}, |p psi| over refinements [{}], {:.0} ms",
            r.reason,
            seq.join(" "),
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn ac5(tol: &Tolerances) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 1025;
    let (mut count, mut violations) = (0, 0);
    let mut worst = f64::INFINITY;
    while count < 240 {
        let hbar = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let (psi, a, b) = match count % 3 {
            0 => {
                let alpha = rng.gen_range(0.0..2.0 * PI);
                let psi = on_grid(&StateRecipe::wave_packet(&random_packet_modes(&mut rng), alpha), n);
                (psi, OperatorSpec::angle(), OperatorSpec::angular_momentum(hbar))
            }
            1 => {
                let psi = on_grid(&StateRecipe::wave_packet(&random_packet_modes(&mut rng), 0.0), n);
                (psi, cos_phi(), OperatorSpec::angular_momentum(hbar))
            }
            _ => {
                let psi = on_grid(&random_line_state(&mut rng, hbar), n);
                (psi, OperatorSpec::position(), OperatorSpec::momentum(hbar))
            }
        };
        let r = evaluate_modified(&a, &b, &psi, tol).expect("smooth states lie in both domains");
        let margin = r.modified.margin.unwrap();
        worst = worst.min(margin / r.tolerance_used);
        if r.modified.satisfied != Some(true) {
            violations += 1;
        }
        count += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(30),
        format!(
            "{count} states (circle and line, hbar in {{0.5, 1, 2}}): {violations} violations, smallest margin/tol = {worst:.3e}, {:.0} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn ac6(tol: &Tolerances) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 2049;
    let h = GridTopology::circle(n).unwrap().step();
    let limit = tol.relation_c * h * h;
    let mut worst = 0.0f64;
    let mut all_applied = true;
    let count = 60;
    for k in 0..count {
        let (recipe, a) = if k % 2 == 0 {
            (vanishing_packet(&mut rng), OperatorSpec::angle())
        } else {
            (StateRecipe::wave_packet(&random_packet_modes(&mut rng), 0.0), cos_phi())
        };
        let psi = on_grid(&recipe, n);
        let r = evaluate_commutator_form(&a, &OperatorSpec::angular_momentum(1.0), &psi, tol).unwrap();
        match r.stats.commutator_expectation {
            Some(c) => worst = worst.max((r.stats.imag_cross + 0.5 * c).abs()),
            None => all_applied = false,
        }
    }
    outcome(
        all_applied && worst <= limit,
        format!("{count} periodic states with (phi, Lz) and (cos phi, Lz): max |Im + i<[A,B]>/2| = {worst:.2e} <= c h^2 = {limit:.2e}"),
    )
}

fn ac7(tol: &Tolerances) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_rel = 0.0f64;
    let mut holds = true;
    for k in 0..100 {
        let len = rng.gen_range(2..200);
        let a: Vec<f64> = (0..len).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let b: Vec<f64> = a.iter().map(|x| 0.3 * x + rng.gen_range(-5.0..5.0)).collect();
        let weights = (k % 2 == 0).then(|| {
            let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|w| w / total).collect::<Vec<_>>()
        });
        let set = SampleSet::new(a, b, weights).expect("valid sample set");
        let r = classical_relation(&set);
        holds &= r.holds;
        worst_rel = worst_rel.max(((r.rhs - r.lhs) / r.lhs).max(0.0));
    }
    let mut worst_lin = 0.0f64;
    let mut all_equal = true;
    for _ in 0..20 {
        let a: Vec<f64> = (0..50).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let slope = rng.gen_range(-4.0..4.0);
        let b: Vec<f64> = a.iter().map(|x| slope * x + 1.5).collect();
        let r = classical_relation(&SampleSet::new(a, b, None).unwrap());
        all_equal &= r.equality;
        worst_lin = worst_lin.max(r.linearity_residual.unwrap());
    }
    // commuting quantum pair (x, x^2 + sin x) against the classical moments of |psi|^2
    let psi = on_grid(
        &StateRecipe::HermiteSuperposition { coefficients: vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.3)] },
        2049,
    );
    let f = OperatorSpec::multiply(ScalarFunction::expression("x*x + sin(x)").unwrap());
    let x = OperatorSpec::position();
    let xs = psi.topology().coordinates();
    let w = psi.topology().weights();
    let raw: Vec<f64> = w.iter().zip(psi.density()).map(|(w, d)| w * d).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let fx: Vec<f64> = xs.iter().map(|x| x * x + x.sin()).collect();
    let classical = classical_relation(&SampleSet::new(xs, fx, Some(weights)).unwrap()).moments;
    let quantum = stat_report(&x, &f, &psi, tol).unwrap();
    let corr = [
        quantum.delta_a - classical.delta_a,
        quantum.delta_b - classical.delta_b,
        quantum.covariance - classical.covariance,
        quantum.imag_cross,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()));
    let corr_tol = tol.relation_tol(psi.topology().step(), 1.0);
    outcome(
        holds && worst_rel <= 1e-12 && all_equal && worst_lin <= 1e-10 && corr <= corr_tol,
        format!(
            "random sets: max relative excess {worst_rel:.1e}; linear sets: equality flagged, max residual {worst_lin:.1e}; quantum vs classical max deviation {corr:.1e}"
        ),
    )
}

fn library() -> Vec<(StateRecipe, OperatorSpec, OperatorSpec)> {
    let x = OperatorSpec::position;
    let p = || OperatorSpec::momentum(1.0);
    let mut out = Vec::new();
    for m in -2..=2 {
        out.push((StateRecipe::lz_eigenstate(m), OperatorSpec::angle(), OperatorSpec::angular_momentum(1.0)));
    }
    let modes = [(-1, Complex64::new(0.4, 0.1)), (0, Complex64::new(1.0, 0.0)), (2, Complex64::new(-0.3, 0.5))];
    for alpha in [0.0, 1.0, 2.5] {
        out.push((StateRecipe::wave_packet(&modes, alpha), OperatorSpec::angle(), OperatorSpec::angular_momentum(1.0)));
        out.push((StateRecipe::wave_packet(&modes, alpha), cos_phi(), OperatorSpec::angular_momentum(1.0)));
    }
    out.push((StateRecipe::gaussian(1.0), x(), p()));
    for c in [0.25, 0.5, 1.0] {
        out.push((StateRecipe::chirped_gaussian(1.0, c, 1.0), x(), p()));
    }
    out.push((StateRecipe::Gaussian { x0: 0.5, p0: -1.0, sigma: 0.8, chirp: 0.3, hbar: 1.0 }, x(), p()));
    out.push((
        StateRecipe::HermiteSuperposition {
            coefficients: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.7), Complex64::new(0.2, 0.0)],
        },
        x(),
        p(),
    ));
    out.push((StateRecipe::SlowDecay { power: 0.75, half_width: 30.0 }, x(), p()));
    out
}

fn ac8(tol: &Tolerances) -> Outcome {
    let q = QuadraticFormGrid::default();
    let (lambdas, thetas) = (q.lambdas(), q.thetas());
    let mut worst = f64::INFINITY;
    let mut consistent = true;
    let mut states = 0;
    for (recipe, a, b) in library() {
        let psi = on_grid(&recipe, 2049);
        let r = quadratic_form_check(&a, &b, &psi, &lambdas, &thetas, tol).unwrap();
        worst = worst.min(r.worst_margin);
        consistent &= r.consistent;
        states += 1;
    }
    let psi = on_grid(&StateRecipe::gaussian(1.0), 8193);
    let g = quadratic_form_check(&OperatorSpec::position(), &OperatorSpec::momentum(1.0), &psi, &lambdas, &thetas, tol)
        .unwrap();
    let gmin = g.worst_margin.min(g.complex_plane.as_ref().unwrap().numeric);
    outcome(
        worst >= -1e-12 && consistent && gmin.abs() <= 1e-6,
        format!("{states} library states: smallest form value {worst:.3e}, closed-form minima consistent; Gaussian (x, p) minimum {gmin:.2e}"),
    )
}

fn ac9(tol: &Tolerances) -> Outcome {
    let n = 1025;
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut with_comm = 0;
    let mut cases_list = library();
    // states outside D(p): compared on a multiplier pair
    cases_list.push((
        StateRecipe::Cusp,
        OperatorSpec::position(),
        OperatorSpec::multiply(ScalarFunction::expression("exp(-x*x)").unwrap()),
    ));
    for (recipe, a, b) in cases_list {
        let psi = on_grid(&recipe, n);
        let fast = stat_report(&a, &b, &psi, tol).unwrap();
        let slow = oracle_stat_report(&a, &b, &psi, 2049).unwrap();
        worst = worst.max(slow.max_deviation(&fast));
        with_comm += usize::from(fast.commutator_expectation.is_some());
        cases += 1;
    }
    outcome(
        worst <= 1e-10,
        format!(
            "{cases} library states at n = {n} ({with_comm} with commutator): max fast/dense deviation {worst:.2e}"
        ),
    )
}

fn main() {
    let tol = Tolerances::default();
    let criteria: [Criterion; 9] = [
        ("AC1", "phi-Lz eigenstates: small product, standard bound refused", ac1),
        ("AC2", "closed-form phi-Lz bound matches quadrature", ac2),
        ("AC3", "Gaussian and chirped Gaussian x-p moments", ac3),
        ("AC4", "cusp state outside D(p)", ac4),
        ("AC5", "modified relation on random states", ac5),
        ("AC6", "Im<A psi, B psi> = -(1/2) i<[A,B]> on periodic states", ac6),
        ("AC7", "classical covariance inequality", ac7),
        ("AC8", "quadratic form nonnegative", ac8),
        ("AC9", "fast path agrees with dense oracle", ac9),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let o = check(&tol);
        if !o.pass {
            failed += 1;
        }
        println!("{id} {} {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
