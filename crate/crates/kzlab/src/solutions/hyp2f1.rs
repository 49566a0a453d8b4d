//! Complex Gauss hypergeometric function `₂F₁(a,b;c;x)` for generic complex
//! parameters, with the principal branch cut along `[1, ∞)`.
//!
//! Strategy: power series inside `|x| ≤ 0.7`; otherwise the Pfaff map
//! `x ↦ x/(x−1)`, the `1−x` connection formula (Abramowitz–Stegun 15.3.6) or
//! the `1/x` formula (15.3.7), whichever lands in the series disc.

use crate::{C64, KzError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal `log Γ(z)` (Lanczos approximation, reflection for `Re z < 0.5`).
pub fn lgamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // log Γ(z) = log(π / sin(πz)) − log Γ(1−z)
        let pi = std::f64::consts::PI;
        let s = (C64::new(pi, 0.0) * z).sin();
        C64::new(pi, 0.0).ln() - s.ln() - lgamma(C64::new(1.0, 0.0) - z)
    } else {
        let z = z - 1.0;
        let mut x = C64::new(LANCZOS[0], 0.0);
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            x += C64::new(c, 0.0) / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * C64::new(std::f64::consts::TAU, 0.0).ln() + (z + 0.5) * t.ln() - t + x.ln()
    }
}

/// `Γ(z)` on the principal branch.
pub fn gamma(z: C64) -> C64 {
    lgamma(z).exp()
}

fn is_nonpositive_integer(z: C64, tol: f64) -> bool {
    z.im.abs() < tol && z.re < 0.5 && (z.re - z.re.round()).abs() < tol
}

const SERIES_RADIUS: f64 = 0.7;
const MAX_TERMS: usize = 4000;

/// Raw power series, valid for `|x| ≤ SERIES_RADIUS`.
pub fn hyp2f1_series(a: C64, b: C64, c: C64, x: C64) -> Result<C64> {
    if is_nonpositive_integer(c, 1e-12) {
        return Err(KzError::Domain(format!(
            "hyp2f1: c = {c} is a non-positive integer"
        )));
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-30) {
            return Ok(sum);
        }
    }
    Err(KzError::Numerical(format!(
        "hyp2f1 series did not converge at x = {x}"
    )))
}

fn pow(base: C64, exp: C64) -> C64 {
    if base.norm() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    (exp * base.ln()).exp()
}

fn gamma_ratio(num: &[C64], den: &[C64]) -> Result<C64> {
    for &d in den {
        if is_nonpositive_integer(d, 1e-9) {
            return Err(KzError::Domain(format!(
                "hyp2f1 connection formula hits Γ pole at {d}; parameters too close to degenerate"
            )));
        }
    }
    let mut l = C64::new(0.0, 0.0);
    for &n in num {
        l += lgamma(n);
    }
    for &d in den {
        l -= lgamma(d);
    }
    Ok(l.exp())
}

/// `₂F₁(a,b;c;x)` for generic parameters. Dispatches on whichever of the six
/// Möbius images of `x` has the smallest modulus; near `e^{±iπ/3}` (where all
/// six approach 1) the series radius is relaxed and more terms are allowed.
pub fn hyp2f1(a: C64, b: C64, c: C64, x: C64) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    let args = [
        x,
        x / (x - one),
        one - x,
        one / x,
        one / (one - x),
        (x - one) / x,
    ];
    let best = (0..6)
        .min_by(|&p, &q| {
            args[p]
                .norm()
                .partial_cmp(&args[q].norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let w = args[best];
    if x.norm() <= SERIES_RADIUS {
        return hyp2f1_series(a, b, c, x);
    }
    if w.norm() > 0.99 {
        return Err(KzError::Numerical(format!(
            "hyp2f1: x = {x} too close to e^(+-i pi/3); no transformation converges"
        )));
    }
    match best {
        0 => hyp2f1_series(a, b, c, x),
        // Pfaff (15.3.4)
        1 => Ok(pow(one - x, -a) * hyp2f1_series(a, c - b, c, w)?),
        // 15.3.6
        2 => {
            let g1 = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
            let g2 = gamma_ratio(&[c, a + b - c], &[a, b])?;
            let f1 = hyp2f1_series(a, b, a + b - c + one, w)?;
            let f2 = hyp2f1_series(c - a, c - b, c - a - b + one, w)?;
            Ok(g1 * f1 + g2 * pow(w, c - a - b) * f2)
        }
        // 15.3.7
        3 => {
            let g1 = gamma_ratio(&[c, b - a], &[b, c - a])?;
            let g2 = gamma_ratio(&[c, a - b], &[a, c - b])?;
            let f1 = hyp2f1_series(a, a - c + one, a - b + one, w)?;
            let f2 = hyp2f1_series(b, b - c + one, b - a + one, w)?;
            Ok(g1 * pow(-x, -a) * f1 + g2 * pow(-x, -b) * f2)
        }
        // 15.3.8
        4 => {
            let g1 = gamma_ratio(&[c, b - a], &[b, c - a])?;
            let g2 = gamma_ratio(&[c, a - b], &[a, c - b])?;
            let f1 = hyp2f1_series(a, c - b, a - b + one, w)?;
            let f2 = hyp2f1_series(b, c - a, b - a + one, w)?;
            Ok(g1 * pow(one - x, -a) * f1 + g2 * pow(one - x, -b) * f2)
        }
        // 15.3.9
        _ => {
            let g1 = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
            let g2 = gamma_ratio(&[c, a + b - c], &[a, b])?;
            let f1 = hyp2f1_series(a, a - c + one, a + b - c + one, w)?;
            let f2 = hyp2f1_series(c - a, one - a, c - a - b + one, w)?;
            Ok(g1 * pow(x, -a) * f1 + g2 * pow(x, a - c) * pow(one - x, c - a - b) * f2)
        }
    }
}

/// `d/dx ₂F₁(a,b;c;x) = (ab/c) ₂F₁(a+1,b+1;c+1;x)`.
pub fn hyp2f1_deriv(a: C64, b: C64, c: C64, x: C64) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    Ok(a * b / c * hyp2f1(a + one, b + one, c + one, x)?)
}
