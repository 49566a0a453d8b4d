//! The Casimir operator Ω_ij on a fermionic Fock space satisfies
//! 2Ω_ij = −κ_ij + E_ii + E_jj, where κ_ij is the quadratic element built
//! from the cross generators and E_kk are the diagonal ones. This example
//! checks the identity exactly on a few small spaces.

use kzlab::fock::{glw_generator, kappa, max_action_difference, omega_fock, FockSpace};
use kzlab::C64;

fn main() {
    for (t, d) in [(2usize, 2usize), (3, 2), (2, 3), (3, 3), (4, 3)] {
        let sp = FockSpace::new(t, d).unwrap();
        let mut worst = 0.0f64;
        for i in 1..=d {
            for j in (i + 1)..=d {
                let lhs = omega_fock(&sp, i, j).unwrap().scale(C64::new(2.0, 0.0));
                let rhs = &(&glw_generator(&sp, i, i).unwrap()
                    + &glw_generator(&sp, j, j).unwrap())
                    - &kappa(&sp, i, j).unwrap();
                worst = worst.max(max_action_difference(&sp, &lhs, &rhs));
            }
        }
        println!("t = {t}, points = {d}: max |2Ω − (−κ + E_ii + E_jj)| = {worst:.3e}");
    }
}
