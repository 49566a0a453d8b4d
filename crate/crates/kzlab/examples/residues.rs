//! Quadrature over nested hairpin contours picks out iterated residues: for
//! the test integrand exp(Σ w_k t_k) ω_σ only one permutation σ survives per
//! variable ordering, with exact value (−2πi)^m̄. This example evaluates all
//! four combinations in two variables.

use itertools::Itertools;
use kzlab::solutions::contour::ContourDensity;
use kzlab::solutions::integral::{residue_integral, VariableOrdering};
use kzlab::C64;

fn main() {
    let density = ContourDensity::fine();
    let tau = std::f64::consts::TAU;
    let oracle = C64::new(0.0, -tau).powu(2);
    let w = [C64::new(1.1, 0.07), C64::new(0.8, -0.05)];
    println!("exact surviving value: (-2 pi i)^2 = {oracle:.6}");
    for l_inv in (1..=2).permutations(2) {
        let ordering = VariableOrdering::new(l_inv.clone()).unwrap();
        let survivor = ordering.surviving_sigma();
        for sigma in (1..=2).permutations(2) {
            let got = residue_integral(&sigma, &ordering, &w, &density).unwrap();
            println!(
                "ordering {l_inv:?}, sigma {sigma:?}: integral {got:.8} ({})",
                if sigma == survivor { "survives" } else { "dies" }
            );
        }
    }
}
