//! Uniform representation of the flat connections: a list of hyperplane
//! terms `(i,j) ↦ A_ij` plus scalar central exponents, with the convention
//! that flat sections satisfy
//! `dF = Σ_{i<j} (A_ij + c_ij·Id) · dlog(z_i − z_j) · F`.
//!
//! Translations into this convention:
//! `kz_gl`/`kz_o` (`∇ = d − ℏ Σ Ω dlog`) give `A = ℏΩ`;
//! `kappa` (`∇ = d + (ℏ/2) Σ κ dlog`) gives `A = −(ℏ/2)κ`;
//! `dynamical` (`∇ = d + ℏ Σ e_{−α}e_α dlog`) gives `A = −ℏ e_{−α}e_α`;
//! `dual_so` gives `A = −ℏ(e_{ε_b−ε_a}e_{ε_a−ε_b} + e_{−ε_a−ε_b}e_{ε_a+ε_b})`.

use crate::algebra::{self, ModelKind, MultiplicitySpace};
use crate::fock::{self, FockSpace, SubspaceBasis};
use crate::{linalg, C64, CMat, CVec, KzError, Result};
use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct ConnectionTerm {
    pub i: usize,
    pub j: usize,
    pub op: CMat,
}

/// A flat-connection datum over the configuration space of `dim_base`
/// points.
#[derive(Debug, Clone)]
pub struct ConnectionSpec {
    pub dim_base: usize,
    pub basis_id: String,
    pub fiber_dim: usize,
    pub terms: Vec<ConnectionTerm>,
    /// Scalar exponents `c_ij` contributing `c_ij · dlog(z_i−z_j) · Id`.
    pub central: Vec<(usize, usize, C64)>,
}

impl ConnectionSpec {
    pub fn new(dim_base: usize, basis_id: String, terms: Vec<ConnectionTerm>) -> Result<Self> {
        let fiber_dim = terms
            .first()
            .map(|t| t.op.nrows())
            .ok_or_else(|| KzError::Domain("connection needs at least one term".into()))?;
        for t in &terms {
            if t.i >= t.j || t.j > dim_base {
                return Err(KzError::IndexRange(format!(
                    "term pair ({},{}) invalid for base dimension {dim_base}",
                    t.i, t.j
                )));
            }
            if t.op.nrows() != fiber_dim || t.op.ncols() != fiber_dim {
                return Err(KzError::DimensionMismatch(
                    "connection terms of mixed fiber dimension".into(),
                ));
            }
        }
        Ok(ConnectionSpec {
            dim_base,
            basis_id,
            fiber_dim,
            terms,
            central: Vec::new(),
        })
    }

    pub fn term(&self, i: usize, j: usize) -> Option<&CMat> {
        self.terms
            .iter()
            .find(|t| (t.i, t.j) == (i, j))
            .map(|t| &t.op)
    }

    pub fn central_exponent(&self, i: usize, j: usize) -> C64 {
        self.central
            .iter()
            .filter(|&&(a, b, _)| (a, b) == (i, j))
            .map(|&(_, _, c)| c)
            .sum()
    }

    /// `A_ij + c_ij · Id`.
    pub fn coefficient(&self, i: usize, j: usize) -> CMat {
        let c = self.central_exponent(i, j);
        match self.term(i, j) {
            Some(a) => a + &linalg::identity(self.fiber_dim).mapv(|x| x * c),
            None => linalg::identity(self.fiber_dim).mapv(|x| x * c),
        }
    }

    /// All pairs appearing in either terms or central exponents.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.terms.iter().map(|t| (t.i, t.j)).collect();
        for &(i, j, _) in &self.central {
            out.push((i, j));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConnectionKind {
    KzGl,
    KzO,
    Kappa,
    Dynamical,
    DualSo,
}

/// Coefficient data for `make_connection`: a diagram model or a Fock
/// subspace.
pub enum ConnectionInputs<'a> {
    Model(&'a MultiplicitySpace),
    Subspace {
        space: &'a FockSpace,
        sub: &'a SubspaceBasis,
    },
}

pub fn make_connection(
    kind: ConnectionKind,
    inputs: &ConnectionInputs,
    hbar: C64,
) -> Result<ConnectionSpec> {
    match (kind, inputs) {
        (ConnectionKind::KzGl, ConnectionInputs::Model(space)) => {
            if space.model != ModelKind::Symmetric {
                return Err(KzError::Domain("kz_gl needs the symmetric model".into()));
            }
            let d = space.strand_count();
            let mut terms = Vec::new();
            for i in 1..=d {
                for j in (i + 1)..=d {
                    let om = algebra::casimir_gl(space, i, j)?;
                    terms.push(ConnectionTerm {
                        i,
                        j,
                        op: om.matrix.mapv(|x| x * hbar),
                    });
                }
            }
            ConnectionSpec::new(d, space.basis_id(), terms)
        }
        (ConnectionKind::KzO, ConnectionInputs::Model(space)) => {
            if space.model != ModelKind::Matching {
                return Err(KzError::Domain("kz_o needs the matching model".into()));
            }
            let n = space.params.n;
            let mut terms = Vec::new();
            for a in 1..=n {
                for b in (a + 1)..=n {
                    let om = algebra::casimir_o(space, a, b)?;
                    terms.push(ConnectionTerm {
                        i: a,
                        j: b,
                        op: om.matrix.mapv(|x| x * hbar),
                    });
                }
            }
            ConnectionSpec::new(n, space.basis_id(), terms)
        }
        (ConnectionKind::Kappa, ConnectionInputs::Subspace { space, sub }) => {
            let d = space.d;
            let mut terms = Vec::new();
            for i in 1..=d {
                for j in (i + 1)..=d {
                    let k = sub.restrict(&fock::kappa(space, i, j)?, 1e-9)?;
                    terms.push(ConnectionTerm {
                        i,
                        j,
                        op: k.matrix.mapv(|x| x * (-hbar / 2.0)),
                    });
                }
            }
            ConnectionSpec::new(d, sub.basis_id(), terms)
        }
        (ConnectionKind::Dynamical, ConnectionInputs::Subspace { space, sub }) => {
            let d = space.d;
            let mut terms = Vec::new();
            for i in 1..=d {
                for j in (i + 1)..=d {
                    let tc = fock::truncated_casimir(space, sub, i, j)?;
                    terms.push(ConnectionTerm {
                        i,
                        j,
                        op: tc.matrix.mapv(|x| x * (-hbar)),
                    });
                }
            }
            ConnectionSpec::new(d, sub.basis_id(), terms)
        }
        (ConnectionKind::DualSo, ConnectionInputs::Subspace { space, sub }) => {
            let n = space.d;
            let mut terms = Vec::new();
            for a in 1..=n {
                for b in (a + 1)..=n {
                    let coef = fock::so_dual_coefficient(space, sub, a, b)?;
                    terms.push(ConnectionTerm {
                        i: a,
                        j: b,
                        op: coef.matrix.mapv(|x| x * (-hbar)),
                    });
                }
            }
            ConnectionSpec::new(n, sub.basis_id(), terms)
        }
        _ => Err(KzError::Domain(
            "connection kind incompatible with supplied inputs".into(),
        )),
    }
}

/// Algebraic flatness: for `Σ A_ij dlog(z_i−z_j)` connections, flatness is
/// equivalent to the infinitesimal braid relations
/// `[A_ij, A_ik + A_jk] = 0` and `[A_ij, A_kl] = 0` for disjoint pairs.
#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport {
    pub max_triple_norm: f64,
    pub max_disjoint_norm: f64,
    pub triples_checked: usize,
    pub disjoint_pairs_checked: usize,
}

impl FlatnessReport {
    pub fn max_norm(&self) -> f64 {
        self.max_triple_norm.max(self.max_disjoint_norm)
    }
}

pub fn flatness_check(spec: &ConnectionSpec) -> FlatnessReport {
    let d = spec.dim_base;
    let get = |i: usize, j: usize| -> CMat {
        spec.term(i, j)
            .cloned()
            .unwrap_or_else(|| Array2::zeros((spec.fiber_dim, spec.fiber_dim)))
    };
    let mut max_triple = 0.0f64;
    let mut triples = 0usize;
    for i in 1..=d {
        for j in (i + 1)..=d {
            for k in (j + 1)..=d {
                let (aij, aik, ajk) = (get(i, j), get(i, k), get(j, k));
                let c1 = linalg::commutator(&aij, &(&aik + &ajk));
                let c2 = linalg::commutator(&aik, &(&aij + &ajk));
                max_triple = max_triple
                    .max(linalg::max_abs(&c1))
                    .max(linalg::max_abs(&c2));
                triples += 1;
            }
        }
    }
    let mut max_disjoint = 0.0f64;
    let mut disjoint = 0usize;
    for i in 1..=d {
        for j in (i + 1)..=d {
            for k in (i + 1)..=d {
                for l in (k + 1)..=d {
                    if k == i || k == j || l == i || l == j || (i, j) >= (k, l) {
                        continue;
                    }
                    let c = linalg::commutator(&get(i, j), &get(k, l));
                    max_disjoint = max_disjoint.max(linalg::max_abs(&c));
                    disjoint += 1;
                }
            }
        }
    }
    FlatnessReport {
        max_triple_norm: max_triple,
        max_disjoint_norm: max_disjoint,
        triples_checked: triples,
        disjoint_pairs_checked: disjoint,
    }
}

/// Scalar multiplicative prefactor `∏ (z_i−z_j)^{e_ij}`.
#[derive(Debug, Clone, Default)]
pub struct GaugeFactor {
    pub exponents: HashMap<(usize, usize), C64>,
}

impl GaugeFactor {
    pub fn new(exponents: HashMap<(usize, usize), C64>) -> Self {
        GaugeFactor { exponents }
    }

    pub fn compose(&self, other: &GaugeFactor) -> GaugeFactor {
        let mut exps = self.exponents.clone();
        for (&k, &v) in &other.exponents {
            *exps.entry(k).or_insert(C64::new(0.0, 0.0)) += v;
        }
        GaugeFactor { exponents: exps }
    }
}

/// Multiplying flat sections by the gauge factor shifts the central
/// exponents: sections of the result are `F · ∏(z_i−z_j)^{e_ij}`.
pub fn apply_gauge(spec: &ConnectionSpec, gauge: &GaugeFactor) -> ConnectionSpec {
    let mut out = spec.clone();
    for (&(i, j), &e) in &gauge.exponents {
        if e.norm() > 0.0 {
            out.central.push((i, j, e));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralFitResult {
    pub exponents: Vec<(usize, usize, [f64; 2])>,
    /// Post-fit RMS residual of the connection equation, relative to the
    /// mean section magnitude.
    pub residual: f64,
    pub sample_points: usize,
}

impl CentralFitResult {
    pub fn exponent(&self, i: usize, j: usize) -> C64 {
        self.exponents
            .iter()
            .find(|&&(a, b, _)| (a, b) == (i, j))
            .map(|&(_, _, c)| C64::new(c[0], c[1]))
            .unwrap_or_default()
    }
}

const FD_STEP: f64 = 0.0125;
const FIT_RADIUS: f64 = 0.05;

/// Least-squares fit of central exponents `c_ij` such that
/// `dF − Σ(A_ij + c_ij·Id) dlog(z_i−z_j) F` is minimal over a small
/// polydisk around `base`. The section is supplied as a batch evaluator so
/// expensive quadrature-backed sections can share work across the grid.
pub fn central_fit<F>(
    eval: F,
    spec: &ConnectionSpec,
    base: &[C64],
    samples: usize,
    seed: u64,
) -> Result<CentralFitResult>
where
    F: Fn(&[Vec<C64>]) -> Result<Vec<CVec>>,
{
    if base.len() != spec.dim_base {
        return Err(KzError::DimensionMismatch(format!(
            "base point has {} coordinates, connection expects {}",
            base.len(),
            spec.dim_base
        )));
    }
    if samples == 0 {
        return Err(KzError::Domain("central_fit needs samples >= 1".into()));
    }
    let d = spec.dim_base;
    let fdim = spec.fiber_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // sample centers on the polydisk around the base point
    let mut centers: Vec<Vec<C64>> = Vec::with_capacity(samples);
    for s in 0..samples {
        let z: Vec<C64> = if s == 0 {
            base.to_vec()
        } else {
            base.iter()
                .map(|&z| {
                    let r = FIT_RADIUS * rng.gen_range(0.3..1.0);
                    let th = rng.gen_range(0.0..std::f64::consts::TAU);
                    z + C64::from_polar(r, th)
                })
                .collect()
        };
        centers.push(z);
    }
    // full evaluation schedule: center plus 4 stencil shifts per variable
    let mut schedule: Vec<Vec<C64>> = Vec::with_capacity(samples * (1 + 4 * d));
    for z in &centers {
        schedule.push(z.clone());
        for k in 0..d {
            for m in [-2.0f64, -1.0, 1.0, 2.0] {
                let mut zs = z.clone();
                zs[k] += C64::new(m * FD_STEP, 0.0);
                schedule.push(zs);
            }
        }
    }
    let values = eval(&schedule)?;
    if values.len() != schedule.len() {
        return Err(KzError::Numerical(
            "section evaluator returned wrong batch size".into(),
        ));
    }
    for v in &values {
        if v.len() != fdim {
            return Err(KzError::DimensionMismatch(
                "section values of wrong fiber dimension".into(),
            ));
        }
    }
    let pairs = spec.pairs();
    let npairs = pairs.len();
    let rows = samples * d * fdim;
    let mut m: CMat = Array2::zeros((rows, npairs));
    let mut rhs = ndarray::Array1::<C64>::zeros(rows);
    let mut mean_mag = 0.0f64;
    let mut row = 0usize;
    for (s, z) in centers.iter().enumerate() {
        let at = s * (1 + 4 * d);
        let f0 = &values[at];
        mean_mag += f0.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for k in 0..d {
            let fm2 = &values[at + 1 + 4 * k];
            let fm1 = &values[at + 2 + 4 * k];
            let fp1 = &values[at + 3 + 4 * k];
            let fp2 = &values[at + 4 + 4 * k];
            // 4th-order five-point derivative in variable k
            let deriv = (fm2 - &(fm1 * 8.0) + &(fp1 * 8.0) - fp2).mapv(|x| x / (12.0 * FD_STEP));
            // known connection part
            let mut known = CVec::zeros(fdim);
            for t in &spec.terms {
                let sgn = pair_sign(k + 1, t.i, t.j);
                if sgn != 0.0 {
                    let w = C64::new(sgn, 0.0) / (z[t.i - 1] - z[t.j - 1]);
                    known = known + t.op.dot(f0).mapv(|x| x * w);
                }
            }
            for &(i, j, c) in &spec.central {
                let sgn = pair_sign(k + 1, i, j);
                if sgn != 0.0 {
                    let w = C64::new(sgn, 0.0) * c / (z[i - 1] - z[j - 1]);
                    known = known + f0.mapv(|x| x * w);
                }
            }
            let resid = &deriv - &known;
            for r in 0..fdim {
                for (p, &(i, j)) in pairs.iter().enumerate() {
                    let sgn = pair_sign(k + 1, i, j);
                    if sgn != 0.0 {
                        m[[row, p]] = C64::new(sgn, 0.0) / (z[i - 1] - z[j - 1]) * f0[r];
                    }
                }
                rhs[row] = resid[r];
                row += 1;
            }
        }
    }
    mean_mag /= samples as f64;
    if mean_mag == 0.0 {
        return Err(KzError::Numerical(
            "central_fit: section vanishes on the sample grid".into(),
        ));
    }
    let c = linalg::lstsq(&m, &rhs)?;
    let post = &m.dot(&c) - &rhs;
    let residual = post.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
        / (rows as f64).sqrt()
        / mean_mag;
    let exponents = pairs
        .iter()
        .enumerate()
        .map(|(p, &(i, j))| (i, j, [c[p].re, c[p].im]))
        .collect();
    Ok(CentralFitResult {
        exponents,
        residual,
        sample_points: samples,
    })
}

/// `∂_k log(z_i − z_j)` carries sign `+1` for `k = i`, `−1` for `k = j`.
fn pair_sign(k: usize, i: usize, j: usize) -> f64 {
    if k == i {
        1.0
    } else if k == j {
        -1.0
    } else {
        0.0
    }
}

/// Serialization form: operator matrices inline, complex entries as
/// `[re, im]`.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionJson {
    pub dim_base: usize,
    pub basis_id: String,
    pub terms: Vec<TermJson>,
    pub central: Vec<(usize, usize, [f64; 2])>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TermJson {
    pub pair: (usize, usize),
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl ConnectionSpec {
    pub fn to_json(&self) -> ConnectionJson {
        ConnectionJson {
            dim_base: self.dim_base,
            basis_id: self.basis_id.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    pair: (t.i, t.j),
                    matrix: t
                        .op
                        .rows()
                        .into_iter()
                        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                        .collect(),
                })
                .collect(),
            central: self
                .central
                .iter()
                .map(|&(i, j, c)| (i, j, [c.re, c.im]))
                .collect(),
        }
    }
}

/// The `(γ, β)` weight data of the diagram models realized at integer `t`:
/// `γ = (n,…,n)` (t entries) and `β = (t−1,…,t−1,1,…,1)` for the gl case.
pub fn gl_duality_weights(t: usize, m: usize, n: usize) -> (Vec<usize>, Vec<usize>) {
    let gamma = vec![n; t];
    let mut beta = vec![t - 1; n];
    beta.extend(std::iter::repeat(1).take(m));
    (gamma, beta)
}

/// The gl-side singular subspace modeling `Hom(1, V*^{(x)n} (x) V^{(x)m})`
/// at integer `t`.
pub fn gl_duality_subspace(t: usize, m: usize, n: usize) -> Result<(FockSpace, SubspaceBasis)> {
    let space = FockSpace::new(t, m + n)?;
    let (gamma, beta) = gl_duality_weights(t, m, n);
    let states = fock::weight_states(&space, Some(&gamma), Some(&beta))?;
    if states.is_empty() {
        return Err(KzError::Domain(format!(
            "empty duality weight space for t={t}, m={m}, n={n}"
        )));
    }
    let sub = SubspaceBasis::from_states(space, states);
    let sing = fock::singular_vectors(&sub, fock::SingularSide::GlV)?;
    Ok((space, sing))
}

/// The so-side subspace for λ = ∅: so(V)-invariant vectors of column
/// weight `(1,…,1)` (so(2n) weight `β = (1−t/2,…,1−t/2)`).
pub fn so_duality_subspace(t: usize, n: usize) -> Result<(FockSpace, SubspaceBasis)> {
    let space = FockSpace::new(t, n)?;
    let cols = vec![1usize; n];
    let states = fock::weight_states(&space, None, Some(&cols))?;
    let sub = SubspaceBasis::from_states(space, states);
    let inv = fock::so_invariant_vectors(&sub)?;
    if inv.dim() == 0 {
        return Err(KzError::Domain(format!(
            "no so-invariant vectors for t={t}, n={n}"
        )));
    }
    Ok((space, inv))
}
