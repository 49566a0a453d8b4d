//! Acceptance gate: ten end-to-end criteria, each printing one PASS/FAIL
//! line. Built with `harness = false` so every line is printed even under
//! plain `cargo test`; the process exits nonzero if any criterion fails.

use kzlab::algebra::{gaudin, generic_points, matching_model, spectrum_scan, sym_model};
use kzlab::braiding::{dk_compare, hecke_generators, hecke_q, kz_braid_generator};
use kzlab::connections::{
    central_fit, flatness_check, gl_duality_subspace, make_connection, so_duality_subspace,
    ConnectionInputs, ConnectionKind,
};
use kzlab::solutions::appendix::{kz_residual, AppendixParams};
use kzlab::solutions::bethe::{gaudin_eigenvector_residuals, solve_bethe};
use kzlab::solutions::contour::ContourDensity;
use kzlab::solutions::hyp2f1::{hyp2f1, hyp2f1_deriv, hyp2f1_series};
use kzlab::solutions::integral::{
    integral_solution_batch, kz_alignment, ordering_l1, ordering_l2, residue_integral,
};
use kzlab::solutions::master::{master_m1n1, master_m2n2};
use kzlab::transport::{
    local_exponents, pure_braid_loop, standard_basepoint, transport, RADIUS_FACTOR,
};
use kzlab::{fock, linalg, C64, CMat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn criterion(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        ("criterion-01 casimir-identity", criterion_01_casimir_identity),
        ("criterion-02 flatness", criterion_02_flatness),
        ("criterion-03 closed-form-sections", criterion_03_closed_form_sections),
        ("criterion-04 residue-oracle", criterion_04_residue_oracle),
        ("criterion-05 integral-sections", criterion_05_integral_sections),
        ("criterion-06 monodromy", criterion_06_monodromy),
        ("criterion-07 braid-hecke", criterion_07_braid_hecke),
        ("criterion-08 gaudin", criterion_08_gaudin),
        ("criterion-09 bethe", criterion_09_bethe),
        ("criterion-10 hypergeometric", criterion_10_hypergeometric),
    ];
    // the PASS/FAIL lines are the report; suppress the default panic spew
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0usize;
    for (name, run) in criteria {
        if let Err(payload) = std::panic::catch_unwind(run) {
            failures += 1;
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("");
            // criterion() prints its own FAIL line before panicking; only a
            // panic from elsewhere (e.g. an unwrap) still needs one
            if !msg.starts_with(name) {
                println!("FAIL {name}: aborted before producing a verdict ({msg})");
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}

/// Criterion 1: the Casimir/quadratic-form identity 2Ω_ij = −κ_ij + E_ii +
/// E_jj holds on every fermionic Fock space with t·d ≤ 12, to 1e−12.
fn criterion_01_casimir_identity() {
    let mut worst = 0.0f64;
    for (t, d) in [(2, 2), (3, 2), (6, 2), (2, 3), (3, 3), (4, 3), (2, 4), (3, 4), (2, 6)] {
        let sp = fock::FockSpace::new(t, d).unwrap();
        for i in 1..=d {
            for j in (i + 1)..=d {
                let lhs = fock::omega_fock(&sp, i, j).unwrap().scale(c(2.0, 0.0));
                let rhs = &(&fock::glw_generator(&sp, i, i).unwrap()
                    + &fock::glw_generator(&sp, j, j).unwrap())
                    - &fock::kappa(&sp, i, j).unwrap();
                worst = worst.max(fock::max_action_difference(&sp, &lhs, &rhs));
            }
        }
    }
    criterion(
        "criterion-01 casimir-identity",
        worst <= 1e-12,
        &format!("max deviation {worst:.3e} (tol 1e-12)"),
    );
}

/// Criterion 2: all five connection families satisfy the infinitesimal braid
/// relations to 1e−10 at three random parameter draws.
fn criterion_02_flatness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let t = c(rng.gen_range(0.3..1.5), rng.gen_range(-0.4..0.4));
        let hbar = c(rng.gen_range(0.1..0.5), rng.gen_range(-0.2..0.2));
        let sym = sym_model(3, t, hbar).unwrap();
        let spec = make_connection(ConnectionKind::KzGl, &ConnectionInputs::Model(&sym), hbar)
            .unwrap();
        worst = worst.max(flatness_check(&spec).max_norm());

        let mat = matching_model(6, t, hbar).unwrap();
        let spec = make_connection(ConnectionKind::KzO, &ConnectionInputs::Model(&mat), hbar)
            .unwrap();
        worst = worst.max(flatness_check(&spec).max_norm());

        let (space, sub) = gl_duality_subspace(4, 2, 2).unwrap();
        for kind in [ConnectionKind::Kappa, ConnectionKind::Dynamical] {
            let spec = make_connection(
                kind,
                &ConnectionInputs::Subspace { space: &space, sub: &sub },
                hbar,
            )
            .unwrap();
            worst = worst.max(flatness_check(&spec).max_norm());
        }

        let (space, sub) = so_duality_subspace(3, 2).unwrap();
        let spec = make_connection(
            ConnectionKind::DualSo,
            &ConnectionInputs::Subspace { space: &space, sub: &sub },
            hbar,
        )
        .unwrap();
        worst = worst.max(flatness_check(&spec).max_norm());
    }
    criterion(
        "criterion-02 flatness",
        worst <= 1e-10,
        &format!("max bracket norm {worst:.3e} (tol 1e-10)"),
    );
}

/// Criterion 3: the closed-form hypergeometric sections solve the four-point
/// KZ system to 1e−8 at 20 random configurations, for both basis sections.
fn criterion_03_closed_form_sections() {
    let (t, hbar) = (c(0.8, 0.1), c(0.45, 0.05));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = generic_points(&mut rng, 4);
        for (c1, c2) in [(1.0, 0.0), (0.0, 1.0)] {
            let p = AppendixParams { t, hbar, c1: c(c1, 0.0), c2: c(c2, 0.0) };
            worst = worst.max(kz_residual(&p, &z).unwrap());
        }
    }
    criterion(
        "criterion-03 closed-form-sections",
        worst <= 1e-8,
        &format!("max KZ residual {worst:.3e} (tol 1e-8)"),
    );
}

/// Criterion 4: nested hairpin quadrature reproduces the iterated-residue
/// values (−2πi)^m̄ · δ_{σ, surviving}: all σ and orderings at m̄ = 2
/// (rel. 1e−6), eight sampled σ for both orderings at m̄ = 4 (rel. 1e−4).
fn criterion_04_residue_oracle() {
    let tau = std::f64::consts::TAU;
    let mut worst2 = 0.0f64;
    let fine = ContourDensity::fine();
    let oracle2 = c(0.0, -tau).powu(2);
    let w2 = [c(1.1, 0.07), c(0.8, -0.05)];
    for l in [vec![1usize, 2], vec![2, 1]] {
        let ordering = kzlab::solutions::integral::VariableOrdering::new(l).unwrap();
        let survivor = ordering.surviving_sigma();
        for sigma in [vec![1usize, 2], vec![2, 1]] {
            let got = residue_integral(&sigma, &ordering, &w2, &fine).unwrap();
            let want = if sigma == survivor { oracle2 } else { c(0.0, 0.0) };
            worst2 = worst2.max((got - want).norm() / oracle2.norm());
        }
    }

    let coarse = ContourDensity::coarse();
    let oracle4 = c(0.0, -tau).powu(4);
    let w4 = [c(1.1, 0.07), c(0.8, -0.05), c(1.3, 0.02), c(0.9, 0.04)];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut sigmas: Vec<Vec<usize>> =
        vec![ordering_l1().surviving_sigma(), ordering_l2().surviving_sigma()];
    while sigmas.len() < 8 {
        let mut p: Vec<usize> = (1..=4).collect();
        for k in (1..4).rev() {
            p.swap(k, rng.gen_range(0..=k));
        }
        if !sigmas.contains(&p) {
            sigmas.push(p);
        }
    }
    let mut worst4 = 0.0f64;
    for ordering in [ordering_l1(), ordering_l2()] {
        let survivor = ordering.surviving_sigma();
        for sigma in &sigmas {
            let got = residue_integral(sigma, &ordering, &w4, &coarse).unwrap();
            let want = if *sigma == survivor { oracle4 } else { c(0.0, 0.0) };
            worst4 = worst4.max((got - want).norm() / oracle4.norm());
        }
    }
    criterion(
        "criterion-04 residue-oracle",
        worst2 <= 1e-6 && worst4 <= 1e-4,
        &format!("rel. error m=2: {worst2:.3e} (tol 1e-6), m=4: {worst4:.3e} (tol 1e-4)"),
    );
}

/// Criterion 5: the two contour-integral sections are linearly independent
/// (σ_min > 1e−6) and, after the constant basis alignment, flat for the
/// four-point KZ connection up to a central gauge (fit residual < 1e−5);
/// the fitted central exponents are reported.
fn criterion_05_integral_sections() {
    let (t, hbar) = (c(0.8, 0.1), c(0.45, 0.05));
    let base = vec![c(9.0, 0.02), c(6.0, -0.03), c(3.0, 0.04), c(0.0, 0.01)];
    let dens = ContourDensity::coarse();
    let (l1, l2) = (ordering_l1(), ordering_l2());
    let u1 = integral_solution_batch(t, hbar, &l1, &[base.clone()], true, &dens).unwrap();
    let u2 = integral_solution_batch(t, hbar, &l2, &[base.clone()], true, &dens).unwrap();
    let mut mat = CMat::zeros((2, 2));
    for k in 0..2 {
        mat[[k, 0]] = u1[0][k];
        mat[[k, 1]] = u2[0][k];
    }
    let scale = linalg::max_abs(&mat);
    let sigma_min = *linalg::singular_values(&mat.mapv(|x| x / scale))
        .last()
        .unwrap();

    let space = sym_model(2, t, hbar).unwrap();
    let spec =
        make_connection(ConnectionKind::KzGl, &ConnectionInputs::Model(&space), hbar).unwrap();
    let align = kz_alignment();
    let eval = |zs: &[Vec<C64>]| {
        integral_solution_batch(t, hbar, &l1, zs, true, &dens)
            .map(|us| us.into_iter().map(|u| align.dot(&u)).collect())
    };
    let fit = central_fit(&eval, &spec, &base, 1, 5).unwrap();
    let exps: Vec<String> = fit
        .exponents
        .iter()
        .map(|&(i, j, e)| format!("({i},{j})={:+.4}{:+.4}i", e[0], e[1]))
        .collect();
    criterion(
        "criterion-05 integral-sections",
        sigma_min > 1e-6 && fit.residual < 1e-5,
        &format!(
            "sigma_min {sigma_min:.3e} (>1e-6), fit residual {:.3e} (tol 1e-5), exponents {}",
            fit.residual,
            exps.join(" ")
        ),
    );
}

/// Criterion 6: monodromy of the rank-one model matches exp(−2πi ℏ t) to
/// 1e−8; pure braid loop spectra match the local exponents to 1e−6; a loop
/// composed with its reverse transports to the identity to 1e−8.
fn criterion_06_monodromy() {
    let (t, hbar) = (c(0.8, 0.2), c(0.21, 0.05));
    let space1 = sym_model(1, t, hbar).unwrap();
    let spec1 =
        make_connection(ConnectionKind::KzGl, &ConnectionInputs::Model(&space1), hbar).unwrap();
    let bp1 = standard_basepoint(2);
    let m1 = transport(&spec1, &pure_braid_loop(1, 2, &bp1, RADIUS_FACTOR).unwrap()).unwrap();
    let oracle = (c(0.0, -std::f64::consts::TAU) * hbar * t).exp();
    let closed = (m1.matrix.matrix[[0, 0]] - oracle).norm();

    let space = sym_model(2, t, hbar).unwrap();
    let spec =
        make_connection(ConnectionKind::KzGl, &ConnectionInputs::Model(&space), hbar).unwrap();
    let bp = standard_basepoint(space.strand_count());
    let mut spectral = 0.0f64;
    for (i, j) in [(1usize, 2usize), (1, 4), (2, 3)] {
        let le = local_exponents(&spec, i, j).unwrap();
        let mono =
            transport(&spec, &pure_braid_loop(i, j, &bp, RADIUS_FACTOR).unwrap()).unwrap();
        let got = linalg::eigvals(&mono.matrix.matrix).unwrap();
        let want: Vec<C64> = le.multipliers.iter().map(|m| c(m[0], m[1])).collect();
        spectral = spectral.max(linalg::multiset_distance(&got, &want));
    }
    let lp = pure_braid_loop(1, 2, &bp, RADIUS_FACTOR).unwrap();
    let fwd = transport(&spec, &lp).unwrap();
    let bwd = transport(&spec, &lp.reversed()).unwrap();
    let prod = bwd.matrix.matrix.dot(&fwd.matrix.matrix);
    let group = linalg::max_abs(&(&prod - &linalg::identity(space.dim())));
    criterion(
        "criterion-06 monodromy",
        closed <= 1e-8 && spectral <= 1e-6 && group <= 1e-8,
        &format!(
            "closed form {closed:.3e} (tol 1e-8), spectra {spectral:.3e} (tol 1e-6), \
             group law {group:.3e} (tol 1e-8)"
        ),
    );
}

/// Criterion 7: KZ braid generators match the Hecke generators at
/// q = exp(iπℏ) up to a scalar to 1e−6, for the two- and three-point
/// symmetric models; a detuned q is rejected at the 1e−2 level.
fn criterion_07_braid_hecke() {
    let (t, hbar) = (c(0.8, 0.2), c(0.17, 0.03));
    let q = hecke_q(hbar);
    let mut worst = 0.0f64;
    let mut control = f64::INFINITY;
    for m in [2usize, 3] {
        let space = sym_model(m, t, hbar).unwrap();
        let spec =
            make_connection(ConnectionKind::KzGl, &ConnectionInputs::Model(&space), hbar)
                .unwrap();
        let bp = standard_basepoint(space.strand_count());
        let hecke = hecke_generators(&space, q).unwrap();
        for k in 1..m {
            let kz = kz_braid_generator(&spec, &space, m + k, &bp).unwrap();
            worst = worst.max(dk_compare(&kz.matrix, &hecke[k - 1].matrix).unwrap().deviation);
        }
        let bad = hecke_generators(&space, q * c(0.0, 0.1).exp()).unwrap();
        let kz1 = kz_braid_generator(&spec, &space, m + 1, &bp).unwrap();
        control = control.min(dk_compare(&kz1.matrix, &bad[0].matrix).unwrap().deviation);
    }
    criterion(
        "criterion-07 braid-hecke",
        worst <= 1e-6 && control >= 1e-2,
        &format!("max deviation {worst:.3e} (tol 1e-6), detuned control {control:.3e} (>=1e-2)"),
    );
}

/// Criterion 8: Gaudin Hamiltonians sum to zero (1e−12), commute (1e−10),
/// and have simple joint spectrum in at least 49 of 50 random draws for both
/// the two-point symmetric and four-point matching models.
fn criterion_08_gaudin() {
    let (t, hbar) = (c(0.8, 0.3), c(0.31, 0.07));
    let mut sum_norm = 0.0f64;
    let mut comm = 0.0f64;
    let mut min_distinct = usize::MAX;
    let spaces = [sym_model(2, t, hbar).unwrap(), matching_model(4, t, hbar).unwrap()];
    for space in &spaces {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = generic_points(&mut rng, space.strand_count());
        let hs = gaudin(space, &z).unwrap();
        let mut total = CMat::zeros((space.dim(), space.dim()));
        for h in &hs {
            total = total + &h.matrix;
        }
        sum_norm = sum_norm.max(linalg::max_abs(&total));
        for a in 0..hs.len() {
            for b in (a + 1)..hs.len() {
                comm = comm
                    .max(linalg::max_abs(&linalg::commutator(&hs[a].matrix, &hs[b].matrix)));
            }
        }
        let scan = spectrum_scan(space, 50, 8).unwrap();
        min_distinct = min_distinct.min(scan.distinct_count);
    }
    criterion(
        "criterion-08 gaudin",
        sum_norm <= 1e-12 && comm <= 1e-10 && min_distinct >= 49,
        &format!(
            "sum {sum_norm:.3e} (tol 1e-12), commutators {comm:.3e} (tol 1e-10), \
             distinct {min_distinct}/50 (>=49)"
        ),
    );
}

/// Criterion 9: Bethe critical points — the one-variable root matches the
/// closed form −t/(z₁−z₂) to 1e−10; multi-start Newton on the m = n = 2
/// system converges to residual 1e−6 and the aligned ω-vectors are Gaudin
/// eigenvectors to 1e−8, with both root orbits found.
fn criterion_09_bethe() {
    let (t, hbar) = (c(1.7, 0.0), c(0.3, 0.0));
    let data1 = master_m1n1(t);
    let z1 = [c(1.3, 0.2), c(-0.4, -0.1)];
    let sol1 = solve_bethe(&data1, &z1, &[c(-0.5, 0.1)], 60).unwrap();
    let root_err = (sol1.roots_c64()[0] - (-t / (z1[0] - z1[1]))).norm();

    let data = master_m2n2(t);
    let z = [c(3.1, 0.0), c(1.9, 0.1), c(0.8, -0.1), c(-0.6, 0.05)];
    let space = sym_model(2, t, hbar).unwrap();
    let hams = gaudin(&space, &z).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut orbits: Vec<Vec<C64>> = Vec::new();
    let mut worst_newton = f64::INFINITY;
    let mut worst_eig = 0.0f64;
    for _ in 0..40 {
        let start: Vec<C64> = (0..4)
            .map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            .collect();
        let sol = solve_bethe(&data, &z, &start, 80).unwrap();
        if sol.residual >= 1e-10 {
            continue;
        }
        worst_newton = worst_newton.min(sol.residual);
        let mut canon = sol.roots_c64();
        if (canon[1].re, canon[1].im) > (canon[2].re, canon[2].im) {
            canon.swap(1, 2);
        }
        if orbits.iter().all(|p| {
            p.iter().zip(&canon).map(|(a, b)| (a - b).norm()).fold(0.0f64, f64::max) > 1e-6
        }) {
            let res = gaudin_eigenvector_residuals(&data, &z, &sol.roots_c64(), &hams).unwrap();
            worst_eig = worst_eig.max(res.into_iter().fold(0.0, f64::max));
            orbits.push(canon);
        }
    }
    criterion(
        "criterion-09 bethe",
        root_err <= 1e-10 && worst_newton <= 1e-6 && worst_eig <= 1e-8 && orbits.len() >= 2,
        &format!(
            "closed form {root_err:.3e} (tol 1e-10), Newton {worst_newton:.3e} (tol 1e-6), \
             eigenvector {worst_eig:.3e} (tol 1e-8), orbits {} (>=2)",
            orbits.len()
        ),
    );
}

/// Criterion 10: the Gauss hypergeometric evaluator matches the elementary
/// closed form (1−x)^{−a} = F(a,b;b;x) on 1000 random inputs to 1e−12
/// relative, and its derivative matches central finite differences to 1e−9.
fn criterion_10_hypergeometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = c(rng.gen_range(-2.0..3.0), rng.gen_range(-1.0..1.0));
        let b = c(rng.gen_range(0.3..2.0), rng.gen_range(-0.5..0.5));
        // series oracle: Σ (a)_k x^k / k! = (1−x)^{−a} inside the radius
        let xs = c(rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45));
        let got = hyp2f1_series(a, b, b, xs).unwrap();
        let want = (c(1.0, 0.0) - xs).powc(-a);
        worst = worst.max((got - want).norm() / want.norm().max(1e-30));
        // dispatcher oracle on the pole-free series/Pfaff branches (c = b
        // makes the other connection formulas legitimately degenerate)
        let x = c(rng.gen_range(-0.9..0.85), rng.gen_range(0.05..0.9));
        let one = c(1.0, 0.0);
        let images = [x, x / (x - one), one - x, one / x, one / (one - x), (x - one) / x];
        let argmin = (0..6)
            .min_by(|&p, &q| images[p].norm().partial_cmp(&images[q].norm()).unwrap())
            .unwrap();
        if argmin <= 1 {
            let got = hyp2f1(a, b, b, x).unwrap();
            let want = (one - x).powc(-a);
            worst = worst.max((got - want).norm() / want.norm().max(1e-30));
        }
        // dispatcher vs raw series on their overlap, with generic c
        if x.norm() < 0.45 {
            let cc = b + c(1.3, 0.2);
            let direct = hyp2f1_series(a, b, cc, x).unwrap();
            let dispatched = hyp2f1(a, b, cc, x).unwrap();
            worst = worst.max((direct - dispatched).norm() / direct.norm().max(1e-30));
        }
    }
    let (a, b, cc) = (c(0.31, 0.17), c(-0.42, 0.23), c(1.27, -0.11));
    let mut worst_d = 0.0f64;
    for &x in &[c(0.2, 0.1), c(-0.6, 0.3), c(0.7, 0.4)] {
        let h = 1e-5;
        let fd = (hyp2f1(a, b, cc, x + c(h, 0.0)).unwrap()
            - hyp2f1(a, b, cc, x - c(h, 0.0)).unwrap())
            / c(2.0 * h, 0.0);
        let got = hyp2f1_deriv(a, b, cc, x).unwrap();
        worst_d = worst_d.max((got - fd).norm());
    }
    criterion(
        "criterion-10 hypergeometric",
        worst <= 1e-12 && worst_d <= 1e-9,
        &format!("value error {worst:.3e} (tol 1e-12), derivative error {worst_d:.3e} (tol 1e-9)"),
    );
}
