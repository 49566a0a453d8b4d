//! Nested hairpin contours and product quadrature for the integral
//! solutions.
//!
//! A hairpin of radius `r` runs from `Re t = −T` at height `−ir`, around the
//! origin along the semicircle `|t| = r`, and back out at height `+ir` —
//! counterclockwise, so `∮ dt/t = +2πi`. Hairpins are nested by the radii
//! `r_k = 0.3 · 2.2^{k−1}`, the innermost first.

use crate::{C64, KzError, Result};

/// Innermost hairpin radius.
pub const BASE_RADIUS: f64 = 0.3;
/// Ratio between consecutive nested radii.
pub const RADIUS_RATIO: f64 = 2.2;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on the
/// Legendre recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Node density controls for the contour quadrature.
#[derive(Debug, Clone, Copy)]
pub struct ContourDensity {
    /// Gauss order per cap panel (the cap is split in two panels).
    pub cap_order: usize,
    /// Gauss order per tail panel.
    pub tail_order: usize,
    /// Geometric growth of tail panel widths away from the cap.
    pub panel_ratio: f64,
}

impl ContourDensity {
    pub fn coarse() -> Self {
        ContourDensity { cap_order: 10, tail_order: 6, panel_ratio: 3.0 }
    }
    pub fn medium() -> Self {
        ContourDensity { cap_order: 16, tail_order: 8, panel_ratio: 2.5 }
    }
    pub fn fine() -> Self {
        ContourDensity { cap_order: 24, tail_order: 12, panel_ratio: 2.0 }
    }
}

/// Quadrature nodes `(t, dt·weight)` along one hairpin, in path order:
/// lower tail inbound, cap counterclockwise, upper tail outbound.
pub fn hairpin(radius: f64, tail_len: f64, density: &ContourDensity) -> Result<Vec<(C64, C64)>> {
    if tail_len <= radius {
        return Err(KzError::Quadrature(format!(
            "hairpin tail length {tail_len} must exceed radius {radius}"
        )));
    }
    let (gx, gw) = gauss_legendre(density.tail_order);
    let (cx, cw) = gauss_legendre(density.cap_order);
    // tail panel breakpoints measured from the cap junction outward
    let mut breaks = vec![0.0, radius.min(tail_len)];
    while *breaks.last().unwrap() < tail_len {
        let w = (breaks[breaks.len() - 1] - breaks[breaks.len() - 2]) * density.panel_ratio;
        breaks.push((breaks.last().unwrap() + w).min(tail_len));
    }
    let mut nodes = Vec::new();
    // lower tail: x from −T to 0 at height −r
    for p in (1..breaks.len()).rev() {
        let (a, b) = (-breaks[p], -breaks[p - 1]);
        for (x, w) in gx.iter().zip(gw.iter()) {
            let xx = 0.5 * (a + b) + 0.5 * (b - a) * x;
            nodes.push((C64::new(xx, -radius), C64::new(0.5 * (b - a) * w, 0.0)));
        }
    }
    // cap: θ from −π/2 to +π/2 in two panels
    for panel in 0..2 {
        let (a, b) = (
            -std::f64::consts::FRAC_PI_2 + panel as f64 * std::f64::consts::FRAC_PI_2,
            panel as f64 * std::f64::consts::FRAC_PI_2,
        );
        for (x, w) in cx.iter().zip(cw.iter()) {
            let th = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let t = C64::from_polar(radius, th);
            let dt = t * C64::new(0.0, 1.0) * (0.5 * (b - a) * w);
            nodes.push((t, dt));
        }
    }
    // upper tail: x from 0 to −T at height +r (path direction is −x)
    for p in 1..breaks.len() {
        let (a, b) = (-breaks[p - 1], -breaks[p]);
        for (x, w) in gx.iter().zip(gw.iter()) {
            let xx = 0.5 * (a + b) - 0.5 * (b - a) * x;
            nodes.push((C64::new(xx, radius), C64::new(-0.5 * (b - a).abs() * w, 0.0)));
        }
    }
    Ok(nodes)
}

/// Hairpins for all variables. `inner_to_outer` lists 0-based variable
/// indices by nesting depth; `tail_len[v]` is the per-variable tail length.
pub fn nested_hairpins(
    inner_to_outer: &[usize],
    tail_len: &[f64],
    density: &ContourDensity,
) -> Result<Vec<Vec<(C64, C64)>>> {
    let m = inner_to_outer.len();
    let mut out: Vec<Vec<(C64, C64)>> = vec![Vec::new(); m];
    for (depth, &v) in inner_to_outer.iter().enumerate() {
        let r = BASE_RADIUS * RADIUS_RATIO.powi(depth as i32);
        out[v] = hairpin(r, tail_len[v].max(2.0 * r), density)?;
    }
    Ok(out)
}

/// Serpentine iterator over the product grid: consecutive index tuples
/// differ in exactly one coordinate by one step, so branch data can be
/// carried continuously across the whole grid.
pub struct Serpentine {
    dims: Vec<usize>,
    idx: Vec<usize>,
    dir: Vec<isize>,
    started: bool,
    done: bool,
}

impl Serpentine {
    pub fn new(dims: Vec<usize>) -> Self {
        let n = dims.len();
        Serpentine {
            dims,
            idx: vec![0; n],
            dir: vec![1; n],
            started: false,
            done: false,
        }
    }

    /// Advance; returns `(indices, changed_coordinate)`. The first call
    /// yields the origin with `changed = None`.
    pub fn next_node(&mut self) -> Option<(&[usize], Option<usize>)> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some((&self.idx, None));
        }
        for k in 0..self.dims.len() {
            let next = self.idx[k] as isize + self.dir[k];
            if next >= 0 && (next as usize) < self.dims[k] {
                self.idx[k] = next as usize;
                return Some((&self.idx, Some(k)));
            }
            self.dir[k] = -self.dir[k];
        }
        self.done = true;
        None
    }
}

/// Continuous branch of `Δ log(a − b)` as `a` moves linearly `a0 → a1` with
/// `b` fixed, bisecting until each increment stays clear of the cut.
pub fn chord_log(a0: C64, a1: C64, b: C64, depth: u32) -> C64 {
    let ratio = (a1 - b) / (a0 - b);
    if ratio.arg().abs() < 1.0 || depth >= 48 {
        ratio.ln()
    } else {
        let mid = 0.5 * (a0 + a1);
        chord_log(a0, mid, b, depth + 1) + chord_log(mid, a1, b, depth + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        // ∫_{-1}^{1} x^14 dx = 2/15, exact for order 8 (degree ≤ 15)
        let s: f64 = x.iter().zip(w.iter()).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hairpin_residue_of_exponential() {
        // ∮ e^t dt / t = 2πi once the tails are long enough to close at −∞
        let density = ContourDensity::fine();
        let nodes = hairpin(0.3, 40.0, &density).unwrap();
        let mut s = C64::new(0.0, 0.0);
        for &(t, dt) in &nodes {
            s += t.exp() / t * dt;
        }
        let expected = C64::new(0.0, std::f64::consts::TAU);
        assert!(
            (s - expected).norm() < 1e-10,
            "got {s}, expected {expected}"
        );
    }

    #[test]
    fn hairpin_no_pole_vanishes()
    {
        // ∮ e^t dt over the hairpin is 0 (entire integrand)
        let nodes = hairpin(0.5, 45.0, &ContourDensity::medium()).unwrap();
        let s: C64 = nodes.iter().map(|&(t, dt)| t.exp() * dt).sum();
        assert!(s.norm() < 1e-10, "got {s}");
    }

    #[test]
    fn serpentine_visits_every_node_continuously() {
        let mut it = Serpentine::new(vec![3, 4, 2]);
        let mut seen = std::collections::HashSet::new();
        let mut prev: Option<Vec<usize>> = None;
        while let Some((idx, changed)) = it.next_node() {
            let v = idx.to_vec();
            assert!(seen.insert(v.clone()), "revisited {v:?}");
            if let Some(p) = prev {
                let k = changed.unwrap();
                let diff: usize = p
                    .iter()
                    .zip(v.iter())
                    .map(|(a, b)| (*a as isize - *b as isize).unsigned_abs())
                    .sum();
                assert_eq!(diff, 1);
                assert_ne!(p[k], v[k]);
            }
            prev = Some(v);
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn chord_log_tracks_winding() {
        // move a around b along a half circle approximated by chords
        let b = C64::new(0.0, 0.0);
        let mut total = C64::new(0.0, 0.0);
        let n = 12;
        for k in 0..n {
            let th0 = std::f64::consts::PI * k as f64 / n as f64;
            let th1 = std::f64::consts::PI * (k + 1) as f64 / n as f64;
            total += chord_log(C64::from_polar(1.0, th0), C64::from_polar(1.0, th1), b, 0);
        }
        assert!((total - C64::new(0.0, std::f64::consts::PI)).norm() < 1e-2);
    }
}
