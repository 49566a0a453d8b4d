//! Critical points of the master function (Bethe equations) and the
//! eigenvector property: at each critical point the ω-vector is a joint
//! eigenvector of the Gaudin Hamiltonians.

use kzlab::algebra::{gaudin, sym_model};
use kzlab::solutions::bethe::{gaudin_eigenvector_residuals, solve_bethe};
use kzlab::solutions::master::{master_m1n1, master_m2n2};
use kzlab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let t = C64::new(1.7, 0.0);
    let hbar = C64::new(0.3, 0.0);

    let data1 = master_m1n1(t);
    let z1 = [C64::new(1.3, 0.2), C64::new(-0.4, -0.1)];
    let sol = solve_bethe(&data1, &z1, &[C64::new(-0.5, 0.1)], 60).unwrap();
    println!(
        "one variable: root {:.10}, closed form {:.10}",
        sol.roots_c64()[0],
        -t / (z1[0] - z1[1])
    );

    let data = master_m2n2(t);
    let z = [
        C64::new(3.1, 0.0),
        C64::new(1.9, 0.1),
        C64::new(0.8, -0.1),
        C64::new(-0.6, 0.05),
    ];
    let space = sym_model(2, t, hbar).unwrap();
    let hams = gaudin(&space, &z).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut orbits: Vec<Vec<C64>> = Vec::new();
    for _ in 0..40 {
        let start: Vec<C64> = (0..4)
            .map(|_| C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            .collect();
        let sol = solve_bethe(&data, &z, &start, 80).unwrap();
        if sol.residual >= 1e-10 {
            continue;
        }
        let mut canon = sol.roots_c64();
        if (canon[1].re, canon[1].im) > (canon[2].re, canon[2].im) {
            canon.swap(1, 2);
        }
        if orbits.iter().all(|p| {
            p.iter().zip(&canon).map(|(a, b)| (a - b).norm()).fold(0.0f64, f64::max) > 1e-6
        }) {
            let res = gaudin_eigenvector_residuals(&data, &z, &sol.roots_c64(), &hams).unwrap();
            println!(
                "orbit {}: roots {:?}, Newton residual {:.2e}, eigenvector residuals {:?}",
                orbits.len() + 1,
                canon.iter().map(|r| format!("{r:.5}")).collect::<Vec<_>>(),
                sol.residual,
                res.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>()
            );
            orbits.push(canon);
        }
    }
    println!("{} distinct root orbits found", orbits.len());
}
