//! Parallel transport of flat sections along piecewise-smooth paths in the
//! configuration space `{z_i != z_j}`, and pure-braid / half-twist path
//! constructors.
//!
//! The fundamental matrix of `dF = Σ (A_ij + c_ij·Id) dlog(z_i−z_j) F` is
//! integrated with an adaptive Dormand–Prince 5(4) scheme at local
//! tolerance 1e−10; the scalar central part is integrated exactly through
//! accumulated logarithm increments (never per-point principal values).

use crate::connections::ConnectionSpec;
use crate::operator::LinearOperator;
use crate::{linalg, C64, CMat, KzError, Result};
use ndarray::Array2;
use serde::Serialize;

/// Minimal certified distance to every hyperplane along a path.
pub const CLEARANCE: f64 = 1e-3;
/// Local integration tolerance.
pub const LOCAL_TOL: f64 = 1e-10;
/// Default radius factor for pure-braid loops.
pub const RADIUS_FACTOR: f64 = 0.4;
/// Detour height for pure-braid approach segments.
const DETOUR_HEIGHT: f64 = 0.7;

/// One smooth parametrized piece of a configuration-space path, `s ∈ [0,1]`.
#[derive(Debug, Clone)]
pub enum Segment {
    /// Straight chord between two configurations.
    Line { from: Vec<C64>, to: Vec<C64> },
    /// One coordinate moves on a circular arc, the rest stay fixed.
    Arc {
        coord: usize,
        center: C64,
        radius: f64,
        theta0: f64,
        theta1: f64,
        /// Full configuration; entry `coord` is ignored.
        others: Vec<C64>,
    },
    /// Coordinates `i` and `j` move on opposite points of one circle
    /// (used by half twists).
    DoubleArc {
        i: usize,
        j: usize,
        center: C64,
        radius: f64,
        theta0: f64,
        dtheta: f64,
        others: Vec<C64>,
    },
}

impl Segment {
    /// Position and velocity at parameter `s`.
    pub fn at(&self, s: f64) -> (Vec<C64>, Vec<C64>) {
        match self {
            Segment::Line { from, to } => {
                let z: Vec<C64> = from
                    .iter()
                    .zip(to.iter())
                    .map(|(&a, &b)| a + (b - a) * s)
                    .collect();
                let dz: Vec<C64> = from.iter().zip(to.iter()).map(|(&a, &b)| b - a).collect();
                (z, dz)
            }
            Segment::Arc {
                coord,
                center,
                radius,
                theta0,
                theta1,
                others,
            } => {
                let th = theta0 + (theta1 - theta0) * s;
                let mut z = others.clone();
                let mut dz = vec![C64::new(0.0, 0.0); others.len()];
                let e = C64::from_polar(*radius, th);
                z[*coord] = center + e;
                dz[*coord] = e * C64::new(0.0, theta1 - theta0);
                (z, dz)
            }
            Segment::DoubleArc {
                i,
                j,
                center,
                radius,
                theta0,
                dtheta,
                others,
            } => {
                let th = theta0 + dtheta * s;
                let mut z = others.clone();
                let mut dz = vec![C64::new(0.0, 0.0); others.len()];
                let e = C64::from_polar(*radius, th);
                z[*i] = center + e;
                z[*j] = center - e;
                dz[*i] = e * C64::new(0.0, *dtheta);
                dz[*j] = -dz[*i];
                (z, dz)
            }
        }
    }

    pub fn start(&self) -> Vec<C64> {
        self.at(0.0).0
    }

    pub fn end(&self) -> Vec<C64> {
        self.at(1.0).0
    }

    pub fn reversed(&self) -> Segment {
        match self.clone() {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc {
                coord,
                center,
                radius,
                theta0,
                theta1,
                others,
            } => Segment::Arc {
                coord,
                center,
                radius,
                theta0: theta1,
                theta1: theta0,
                others,
            },
            Segment::DoubleArc {
                i,
                j,
                center,
                radius,
                theta0,
                dtheta,
                others,
            } => Segment::DoubleArc {
                i,
                j,
                center,
                radius,
                theta0: theta0 + dtheta,
                dtheta: -dtheta,
                others,
            },
        }
    }
}

/// A continuous, clearance-certified path in configuration space.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub segments: Vec<Segment>,
    pub basepoint: Vec<C64>,
    /// Certified minimal hyperplane distance (by dense sampling).
    pub min_gap: f64,
    pub label: String,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>, label: impl Into<String>) -> Result<Self> {
        if segments.is_empty() {
            return Err(KzError::PathConstruction("empty path".into()));
        }
        let basepoint = segments[0].start();
        let d = basepoint.len();
        for w in segments.windows(2) {
            let (e, s) = (w[0].end(), w[1].start());
            let jump = e
                .iter()
                .zip(s.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if jump > 1e-9 {
                return Err(KzError::PathConstruction(format!(
                    "discontinuous segments (jump {jump:.2e})"
                )));
            }
        }
        let mut min_gap = f64::INFINITY;
        for seg in &segments {
            for k in 0..=400 {
                let (z, _) = seg.at(k as f64 / 400.0);
                for a in 0..d {
                    for b in (a + 1)..d {
                        min_gap = min_gap.min((z[a] - z[b]).norm());
                    }
                }
            }
        }
        if min_gap < CLEARANCE {
            return Err(KzError::PathConstruction(format!(
                "path clearance {min_gap:.2e} below {CLEARANCE:.0e}"
            )));
        }
        Ok(PathSpec {
            segments,
            basepoint,
            min_gap,
            label: label.into(),
        })
    }

    pub fn endpoint(&self) -> Vec<C64> {
        self.segments.last().unwrap().end()
    }

    pub fn reversed(&self) -> PathSpec {
        let segments: Vec<Segment> = self.segments.iter().rev().map(|s| s.reversed()).collect();
        PathSpec {
            basepoint: self.endpoint(),
            min_gap: self.min_gap,
            label: format!("({})^-1", self.label),
            segments,
        }
    }

    pub fn concat(&self, other: &PathSpec) -> Result<PathSpec> {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        PathSpec::new(segments, format!("{}*{}", self.label, other.label))
    }
}

/// Standard basepoint `z_k = (k−1) + k·1e−2·i`.
pub fn standard_basepoint(d: usize) -> Vec<C64> {
    (1..=d)
        .map(|k| C64::new((k - 1) as f64, k as f64 * 1e-2))
        .collect()
}

/// Closed loop generating the pure braid `A_{ij}`: `z_i` travels once
/// counterclockwise around `z_j` along a circle of radius
/// `radius_factor × (min gap at the basepoint)`, connected by detour
/// segments above the configuration.
pub fn pure_braid_loop(
    i: usize,
    j: usize,
    basepoint: &[C64],
    radius_factor: f64,
) -> Result<PathSpec> {
    let d = basepoint.len();
    if i == j || i < 1 || j < 1 || i > d || j > d {
        return Err(KzError::IndexRange(format!(
            "pure_braid_loop pair ({i},{j}) outside 1..={d}"
        )));
    }
    let mut min_gap = f64::INFINITY;
    for a in 0..d {
        for b in (a + 1)..d {
            min_gap = min_gap.min((basepoint[a] - basepoint[b]).norm());
        }
    }
    let r = radius_factor * min_gap;
    let (im, jm) = (i - 1, j - 1);
    let pi = basepoint[im];
    let pj = basepoint[jm];
    let up = C64::new(0.0, DETOUR_HEIGHT);
    let line = |from: Vec<C64>, to: Vec<C64>| Segment::Line { from, to };
    let with_i = |v: C64, z: &[C64]| {
        let mut out = z.to_vec();
        out[im] = v;
        out
    };
    let z0 = basepoint.to_vec();
    let z1 = with_i(pi + up, &z0);
    let z2 = with_i(pj + up, &z0);
    let circle_top = pj + C64::new(0.0, r);
    let z3 = with_i(circle_top, &z0);
    let approach = vec![
        line(z0.clone(), z1.clone()),
        line(z1.clone(), z2.clone()),
        line(z2.clone(), z3.clone()),
    ];
    let circle = Segment::Arc {
        coord: im,
        center: pj,
        radius: r,
        theta0: std::f64::consts::FRAC_PI_2,
        theta1: std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU,
        others: z0.clone(),
    };
    let mut segments = approach.clone();
    segments.push(circle);
    segments.extend(approach.iter().rev().map(|s| s.reversed()));
    PathSpec::new(segments, format!("A_{{{i},{j}}}"))
}

/// Path exchanging `z_i` and `z_{i+1}` by counterclockwise semicircles
/// around their midpoint (the geometric braid generator `σ_i`).
pub fn half_twist(i: usize, basepoint: &[C64]) -> Result<PathSpec> {
    let d = basepoint.len();
    if i < 1 || i + 1 > d {
        return Err(KzError::IndexRange(format!(
            "half_twist strand {i} outside 1..={}",
            d - 1
        )));
    }
    let (im, jm) = (i - 1, i);
    let center = (basepoint[im] + basepoint[jm]) / 2.0;
    let offset = basepoint[im] - center;
    let seg = Segment::DoubleArc {
        i: im,
        j: jm,
        center,
        radius: offset.norm(),
        theta0: offset.arg(),
        dtheta: std::f64::consts::PI,
        others: basepoint.to_vec(),
    };
    PathSpec::new(vec![seg], format!("sigma_{i}"))
}

/// The closed loop `σ_i²` as a single full rotation of the two strands.
pub fn full_twist(i: usize, basepoint: &[C64]) -> Result<PathSpec> {
    let first = half_twist(i, basepoint)?;
    let second = half_twist(i, &first.endpoint())?;
    first.concat(&second)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub max_local_error: f64,
}

/// Fundamental matrix along a path, with integrator statistics.
#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub matrix: LinearOperator,
    pub braid_word: String,
    pub basepoint: Vec<C64>,
    pub stats: TransportStats,
    pub condition_number: f64,
}

// Dormand-Prince 5(4) tableau
const DP_C: [f64; 6] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0];
const DP_A: [[f64; 5]; 5] = [
    [0.2, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
];
const DP_B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Continuous branch of `Δ log(z_i − z_j)` over `[s0, s1]`, bisecting until
/// each increment has a small principal argument (so no winding is lost even
/// when the matrix part lets the integrator take large steps).
fn log_increment(seg: &Segment, i: usize, j: usize, s0: f64, s1: f64, depth: u32) -> C64 {
    let w0 = {
        let (z, _) = seg.at(s0);
        z[i - 1] - z[j - 1]
    };
    let w1 = {
        let (z, _) = seg.at(s1);
        z[i - 1] - z[j - 1]
    };
    let ratio = w1 / w0;
    if ratio.arg().abs() < 0.5 || depth >= 40 {
        ratio.ln()
    } else {
        let mid = 0.5 * (s0 + s1);
        log_increment(seg, i, j, s0, mid, depth + 1) + log_increment(seg, i, j, mid, s1, depth + 1)
    }
}

/// Transport with the default local tolerance.
pub fn transport(spec: &ConnectionSpec, path: &PathSpec) -> Result<MonodromyResult> {
    transport_with_tol(spec, path, LOCAL_TOL)
}

pub fn transport_with_tol(
    spec: &ConnectionSpec,
    path: &PathSpec,
    tol: f64,
) -> Result<MonodromyResult> {
    if path.basepoint.len() != spec.dim_base {
        return Err(KzError::DimensionMismatch(format!(
            "path in C^{}, connection over C^{}",
            path.basepoint.len(),
            spec.dim_base
        )));
    }
    let n = spec.fiber_dim;
    let mut y = linalg::identity(n);
    let mut stats = TransportStats {
        accepted_steps: 0,
        rejected_steps: 0,
        max_local_error: 0.0,
    };
    // exact central accumulation: continuous log increments per pair
    let mut central_log: Vec<C64> = vec![C64::new(0.0, 0.0); spec.central.len()];

    let field = |seg: &Segment, s: f64| -> CMat {
        let (z, dz) = seg.at(s);
        let mut g: CMat = Array2::zeros((n, n));
        for t in &spec.terms {
            let dw = dz[t.i - 1] - dz[t.j - 1];
            if dw.norm() == 0.0 {
                continue;
            }
            let w = z[t.i - 1] - z[t.j - 1];
            let c = dw / w;
            g = g + t.op.mapv(|x| x * c);
        }
        g
    };

    for seg in &path.segments {
        let mut s = 0.0f64;
        let mut h = 0.05f64;
        let mut k1 = field(seg, s).dot(&y);
        while s < 1.0 {
            if h < 1e-12 {
                return Err(KzError::StepUnderflow {
                    s,
                    detail: format!("segment of path {}", path.label),
                });
            }
            if s + h > 1.0 {
                h = 1.0 - s;
            }
            let mut k = vec![k1.clone()];
            for stage in 0..5 {
                let mut yn = y.clone();
                for (m, km) in k.iter().enumerate() {
                    let a = DP_A[stage][m];
                    if a != 0.0 {
                        yn = yn + km.mapv(|x| x * (h * a));
                    }
                }
                k.push(field(seg, s + DP_C[stage + 1] * h).dot(&yn));
            }
            // 5th order solution
            let mut y5 = y.clone();
            for (m, km) in k.iter().enumerate() {
                if DP_B5[m] != 0.0 {
                    y5 = y5 + km.mapv(|x| x * (h * DP_B5[m]));
                }
            }
            // FSAL stage at (s+h, y5)
            let k7 = field(seg, s + h).dot(&y5);
            let mut y4 = y.clone();
            for (m, km) in k.iter().enumerate() {
                if DP_B4[m] != 0.0 {
                    y4 = y4 + km.mapv(|x| x * (h * DP_B4[m]));
                }
            }
            y4 = y4 + k7.mapv(|x| x * (h * DP_B4[6]));
            let scale = linalg::max_abs(&y5).max(1.0);
            let err = linalg::max_abs(&(&y5 - &y4)) / scale;
            if err <= tol {
                // accumulate central logs across the accepted step
                if !spec.central.is_empty() {
                    for (idx, &(i, j, _)) in spec.central.iter().enumerate() {
                        central_log[idx] += log_increment(seg, i, j, s, s + h, 0);
                    }
                }
                s += h;
                y = y5;
                k1 = k7;
                stats.accepted_steps += 1;
                stats.max_local_error = stats.max_local_error.max(err);
            } else {
                stats.rejected_steps += 1;
            }
            let factor = if err > 0.0 {
                0.9 * (tol / err).powf(0.2)
            } else {
                5.0
            };
            h *= factor.clamp(0.2, 5.0);
        }
    }
    // exact central scalar
    let mut scalar = C64::new(0.0, 0.0);
    for (idx, &(_, _, c)) in spec.central.iter().enumerate() {
        scalar += c * central_log[idx];
    }
    let y = y.mapv(|x| x * scalar.exp());
    let cond = linalg::condition_number(&y);
    Ok(MonodromyResult {
        matrix: LinearOperator::new(spec.basis_id.clone(), y)?,
        braid_word: path.label.clone(),
        basepoint: path.basepoint.clone(),
        stats,
        condition_number: cond,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalExponents {
    /// Eigenvalues of `A_ij + c_ij·Id`.
    pub exponents: Vec<[f64; 2]>,
    /// Predicted local monodromy eigenvalues `exp(2πi λ)`.
    pub multipliers: Vec<[f64; 2]>,
    /// Pairs of exponents differing by a nonzero integer within 1e−4.
    pub resonant: bool,
}

/// Predicted local monodromy spectrum around `z_i = z_j`.
pub fn local_exponents(spec: &ConnectionSpec, i: usize, j: usize) -> Result<LocalExponents> {
    let a = spec.coefficient(i, j);
    let vals = linalg::eigvals(&a)?;
    let mut resonant = false;
    for p in 0..vals.len() {
        for q in 0..vals.len() {
            if p == q {
                continue;
            }
            let diff = vals[p] - vals[q];
            let nearest = diff.re.round();
            if nearest != 0.0 && (diff - C64::new(nearest, 0.0)).norm() < 1e-4 {
                resonant = true;
            }
        }
    }
    let tau = C64::new(0.0, std::f64::consts::TAU);
    Ok(LocalExponents {
        exponents: vals.iter().map(|z| [z.re, z.im]).collect(),
        multipliers: vals.iter().map(|z| {
            let m = (tau * z).exp();
            [m.re, m.im]
        }).collect(),
        resonant,
    })
}

/// Numeric curvature probe: transport around small coordinate squares and
/// report the worst deviation from the identity.
pub fn curvature_probe(spec: &ConnectionSpec, probes: usize, seed: u64) -> Result<f64> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dim_base;
    if d < 2 {
        return Ok(0.0);
    }
    let side = 0.05;
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let base: Vec<C64> = standard_basepoint(d)
            .iter()
            .map(|&z| z + C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)))
            .collect();
        let k = rng.gen_range(0..d);
        let mut l = rng.gen_range(0..d - 1);
        if l >= k {
            l += 1;
        }
        let shift = |z: &[C64], k: usize, dv: C64| {
            let mut out = z.to_vec();
            out[k] += dv;
            out
        };
        let dx = C64::new(side, 0.0);
        let dy = C64::new(0.0, side);
        let p0 = base.clone();
        let p1 = shift(&p0, k, dx);
        let p2 = shift(&p1, l, dy);
        let p3 = shift(&p2, k, -dx);
        let square = PathSpec::new(
            vec![
                Segment::Line {
                    from: p0.clone(),
                    to: p1.clone(),
                },
                Segment::Line {
                    from: p1,
                    to: p2.clone(),
                },
                Segment::Line {
                    from: p2,
                    to: p3.clone(),
                },
                Segment::Line {
                    from: p3,
                    to: p0,
                },
            ],
            "curvature square",
        )?;
        let t = transport(spec, &square)?;
        let dev = linalg::max_abs(&(&t.matrix.matrix - &linalg::identity(spec.fiber_dim)));
        worst = worst.max(dev);
    }
    Ok(worst)
}
