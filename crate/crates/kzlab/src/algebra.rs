//! Diagrammatic multiplicity-space models valid for arbitrary complex rank
//! parameter `t`: the symmetric-group model on permutation bases and the
//! perfect-matching model, together with the Casimir operators acting on
//! them, the Gaudin hamiltonians, and a joint-spectrum simplicity scan.

use crate::linalg;
use crate::operator::LinearOperator;
use crate::{C64, CMat, KzError, Result};
use itertools::Itertools;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    /// `Hom(1, V*^{(x)m} (x) V^{(x)m})`, basis the permutations of `S_m`.
    Symmetric,
    /// `Hom(V_empty, V^{(x)n})` for the orthogonal interpolation, basis the
    /// perfect matchings of `{1..n}`.
    Matching,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Number of V factors (symmetric model; equals n there).
    pub m: usize,
    /// Number of V* factors, or the strand count of the matching model.
    pub n: usize,
    /// Interpolation parameter.
    pub t: C64,
    /// Coupling constant.
    pub hbar: C64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// One-line notation, 1-based images.
    Perm(Vec<usize>),
    /// Perfect matching as sorted pairs (a < b), sorted by first element.
    Matching(Vec<(usize, usize)>),
}

impl BasisLabel {
    pub fn to_string_label(&self) -> String {
        match self {
            BasisLabel::Perm(p) => p.iter().map(|x| x.to_string()).join(","),
            BasisLabel::Matching(pairs) => {
                pairs.iter().map(|(a, b)| format!("{a}-{b}")).join("|")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MultiplicitySpace {
    pub model: ModelKind,
    pub params: ModelParams,
    pub basis: Vec<BasisLabel>,
}

impl MultiplicitySpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of strands the configuration points are attached to.
    pub fn strand_count(&self) -> usize {
        match self.model {
            ModelKind::Symmetric => 2 * self.params.m,
            ModelKind::Matching => self.params.n,
        }
    }

    pub fn basis_id(&self) -> String {
        match self.model {
            ModelKind::Symmetric => format!("sym(m={})", self.params.m),
            ModelKind::Matching => format!("matching(n={})", self.params.n),
        }
    }

    pub fn basis_labels(&self) -> Vec<String> {
        self.basis.iter().map(|b| b.to_string_label()).collect()
    }

    pub(crate) fn index_of(&self, label: &BasisLabel) -> usize {
        self.basis
            .iter()
            .position(|b| b == label)
            .expect("basis label produced by operator action must be in the basis")
    }
}

/// Symmetric model on `C[S_m]`, basis in lexicographic one-line order.
pub fn sym_model(m: usize, t: C64, hbar: C64) -> Result<MultiplicitySpace> {
    if m == 0 {
        return Err(KzError::Domain("sym_model requires m >= 1".into()));
    }
    let basis = (1..=m)
        .permutations(m)
        .map(BasisLabel::Perm)
        .collect::<Vec<_>>();
    Ok(MultiplicitySpace {
        model: ModelKind::Symmetric,
        params: ModelParams { m, n: m, t, hbar },
        basis,
    })
}

fn enumerate_matchings(elems: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if elems.is_empty() {
        return vec![vec![]];
    }
    let first = elems[0];
    let mut out = Vec::new();
    for k in 1..elems.len() {
        let partner = elems[k];
        let rest: Vec<usize> = elems[1..]
            .iter()
            .copied()
            .filter(|&x| x != partner)
            .collect();
        for mut sub in enumerate_matchings(&rest) {
            let mut m = vec![(first, partner)];
            m.append(&mut sub);
            out.push(m);
        }
    }
    out
}

/// Matching model: basis of perfect matchings of `{1..n}` in the
/// deterministic order produced by pairing the least free point with each
/// larger partner in increasing order.
pub fn matching_model(n: usize, t: C64, hbar: C64) -> Result<MultiplicitySpace> {
    if n == 0 || n % 2 != 0 {
        return Err(KzError::Domain(format!(
            "matching_model requires even n >= 2, got {n}"
        )));
    }
    let elems: Vec<usize> = (1..=n).collect();
    let basis = enumerate_matchings(&elems)
        .into_iter()
        .map(BasisLabel::Matching)
        .collect();
    Ok(MultiplicitySpace {
        model: ModelKind::Matching,
        params: ModelParams { m: 0, n, t, hbar },
        basis,
    })
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    // (outer o inner)(x) = outer(inner(x))
    inner.iter().map(|&x| outer[x - 1]).collect()
}

fn transposition(m: usize, a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=m).collect();
    p.swap(a - 1, b - 1);
    p
}

/// Casimir operator on the symmetric model, strand indices `1 <= i < j <= 2m`
/// with the V* block first.
pub fn casimir_gl(space: &MultiplicitySpace, i: usize, j: usize) -> Result<LinearOperator> {
    if space.model != ModelKind::Symmetric {
        return Err(KzError::Domain("casimir_gl needs the symmetric model".into()));
    }
    let m = space.params.m;
    let t = space.params.t;
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    if i == j || i < 1 || j > 2 * m {
        return Err(KzError::IndexRange(format!(
            "casimir_gl indices ({i},{j}) outside 1..={}",
            2 * m
        )));
    }
    let dim = space.dim();
    let mut mat: CMat = Array2::zeros((dim, dim));
    for (col, label) in space.basis.iter().enumerate() {
        let BasisLabel::Perm(sigma) = label else {
            unreachable!()
        };
        if j <= m {
            // flip inside the V* block: (i,j) o sigma
            let img = compose(&transposition(m, i, j), sigma);
            let row = space.index_of(&BasisLabel::Perm(img));
            mat[[row, col]] += C64::new(1.0, 0.0);
        } else if i > m {
            // flip inside the V block: sigma o (i-m, j-m)
            let img = compose(sigma, &transposition(m, i - m, j - m));
            let row = space.index_of(&BasisLabel::Perm(img));
            mat[[row, col]] += C64::new(1.0, 0.0);
        } else {
            // mixed pair: -coev o ev
            let sj = sigma[j - m - 1];
            if sj == i {
                mat[[col, col]] += -t;
            } else {
                let img = compose(&transposition(m, i, sj), sigma);
                let row = space.index_of(&BasisLabel::Perm(img));
                mat[[row, col]] += C64::new(-1.0, 0.0);
            }
        }
    }
    LinearOperator::new(space.basis_id(), mat)
}

fn relabel_matching(pairs: &[(usize, usize)], a: usize, b: usize) -> BasisLabel {
    let swap = |x: usize| {
        if x == a {
            b
        } else if x == b {
            a
        } else {
            x
        }
    };
    let mut out: Vec<(usize, usize)> = pairs
        .iter()
        .map(|&(p, q)| {
            let (p, q) = (swap(p), swap(q));
            if p < q { (p, q) } else { (q, p) }
        })
        .collect();
    out.sort_unstable();
    BasisLabel::Matching(out)
}

fn partner(pairs: &[(usize, usize)], x: usize) -> usize {
    for &(p, q) in pairs {
        if p == x {
            return q;
        }
        if q == x {
            return p;
        }
    }
    unreachable!("perfect matching covers every point")
}

/// Relabeling operator a <-> b on the matching model (`P` diagram).
pub fn matching_relabel(space: &MultiplicitySpace, a: usize, b: usize) -> Result<LinearOperator> {
    check_matching_indices(space, a, b)?;
    let dim = space.dim();
    let mut mat: CMat = Array2::zeros((dim, dim));
    for (col, label) in space.basis.iter().enumerate() {
        let BasisLabel::Matching(pairs) = label else {
            unreachable!()
        };
        let row = space.index_of(&relabel_matching(pairs, a, b));
        mat[[row, col]] = C64::new(1.0, 0.0);
    }
    LinearOperator::new(space.basis_id(), mat)
}

/// Contraction operator (`C` diagram): multiplies by `t` when `{a,b}` is a
/// pair of the matching, else reconnects `{a,c},{b,d}` into `{a,b},{c,d}`.
pub fn matching_contract(space: &MultiplicitySpace, a: usize, b: usize) -> Result<LinearOperator> {
    check_matching_indices(space, a, b)?;
    let t = space.params.t;
    let dim = space.dim();
    let mut mat: CMat = Array2::zeros((dim, dim));
    for (col, label) in space.basis.iter().enumerate() {
        let BasisLabel::Matching(pairs) = label else {
            unreachable!()
        };
        if partner(pairs, a) == b {
            mat[[col, col]] = t;
        } else {
            let c = partner(pairs, a);
            let d = partner(pairs, b);
            let mut out: Vec<(usize, usize)> = pairs
                .iter()
                .copied()
                .filter(|&(p, q)| p != a && q != a && p != b && q != b)
                .collect();
            out.push(if a < b { (a, b) } else { (b, a) });
            out.push(if c < d { (c, d) } else { (d, c) });
            out.sort_unstable();
            let row = space.index_of(&BasisLabel::Matching(out));
            mat[[row, col]] = C64::new(1.0, 0.0);
        }
    }
    LinearOperator::new(space.basis_id(), mat)
}

fn check_matching_indices(space: &MultiplicitySpace, a: usize, b: usize) -> Result<()> {
    if space.model != ModelKind::Matching {
        return Err(KzError::Domain("matching-model operator on wrong model".into()));
    }
    let n = space.params.n;
    if a == b || a < 1 || b < 1 || a > n || b > n {
        return Err(KzError::IndexRange(format!(
            "matching indices ({a},{b}) outside 1..={n}"
        )));
    }
    Ok(())
}

/// Casimir operator `Omega_{a,b} = P_{a,b} - C_{a,b}` on the matching model.
pub fn casimir_o(space: &MultiplicitySpace, a: usize, b: usize) -> Result<LinearOperator> {
    let p = matching_relabel(space, a, b)?;
    let c = matching_contract(space, a, b)?;
    LinearOperator::new(space.basis_id(), p.matrix - c.matrix)
}

/// Casimir for either model by strand pair.
pub fn casimir(space: &MultiplicitySpace, i: usize, j: usize) -> Result<LinearOperator> {
    match space.model {
        ModelKind::Symmetric => casimir_gl(space, i, j),
        ModelKind::Matching => casimir_o(space, i, j),
    }
}

/// Strand-swap (flip) operator for adjacent strands `i, i+1` lying in the
/// same block; this is the permutation part of a braiding half twist.
pub fn strand_swap(space: &MultiplicitySpace, i: usize) -> Result<LinearOperator> {
    match space.model {
        ModelKind::Matching => matching_relabel(space, i, i + 1),
        ModelKind::Symmetric => {
            let m = space.params.m;
            if i + 1 <= m || i > m {
                // flips within a block act exactly like the block Casimir
                casimir_gl(space, i, i + 1)
            } else {
                Err(KzError::Domain(
                    "strand_swap across the V*/V wall is not a flip".into(),
                ))
            }
        }
    }
}

/// Gaudin hamiltonians `H_i = sum_{j != i} Omega_ij / (z_i - z_j)`.
pub fn gaudin(space: &MultiplicitySpace, z: &[C64]) -> Result<Vec<LinearOperator>> {
    let d = space.strand_count();
    if z.len() != d {
        return Err(KzError::DimensionMismatch(format!(
            "gaudin expects {d} points, got {}",
            z.len()
        )));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if (z[i] - z[j]).norm() == 0.0 {
                return Err(KzError::CoincidentPoints(format!(
                    "z_{} == z_{}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let dim = space.dim();
    let mut omegas: Vec<Vec<Option<CMat>>> = vec![vec![None; d + 1]; d + 1];
    let mut hs = Vec::with_capacity(d);
    for i in 1..=d {
        let mut h: CMat = Array2::zeros((dim, dim));
        for j in 1..=d {
            if j == i {
                continue;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if omegas[a][b].is_none() {
                omegas[a][b] = Some(casimir(space, a, b)?.matrix);
            }
            let om = omegas[a][b].as_ref().unwrap();
            let w = (z[i - 1] - z[j - 1]).inv();
            h = h + om.mapv(|x| x * w);
        }
        hs.push(LinearOperator::new(space.basis_id(), h)?);
    }
    Ok(hs)
}

/// Draw points uniformly from the complex box `[-1,1]^2` per coordinate,
/// rejecting configurations with a gap below `1e-3`.
pub fn generic_points(rng: &mut impl Rng, count: usize) -> Vec<C64> {
    loop {
        let z: Vec<C64> = (0..count)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let ok = (0..count)
            .all(|i| ((i + 1)..count).all(|j| (z[i] - z[j]).norm() >= 1e-3));
        if ok {
            return z;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumTrial {
    pub t: [f64; 2],
    pub z: Vec<[f64; 2]>,
    /// Smallest max-over-i gap between distinct joint eigenvalue tuples.
    pub min_gap: f64,
    pub distinct: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumScanReport {
    pub trials: Vec<SpectrumTrial>,
    pub distinct_count: usize,
    pub gap_threshold: f64,
}

/// Joint-spectrum simplicity scan over random generic `(t, z)` draws.
///
/// Joint tuples come from the eigenvectors of `H_1` perturbed by a tiny
/// random combination of all hamiltonians; the per-trial gap is reported
/// against a fixed `1e-6` threshold, never asserted.
pub fn spectrum_scan(
    space: &MultiplicitySpace,
    trials: usize,
    seed: u64,
) -> Result<SpectrumScanReport> {
    if trials == 0 {
        return Err(KzError::Domain("spectrum_scan needs trials >= 1".into()));
    }
    let gap_threshold = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = space.strand_count();
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let t = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let z = generic_points(&mut rng, d);
        let trial_space = match space.model {
            ModelKind::Symmetric => sym_model(space.params.m, t, space.params.hbar)?,
            ModelKind::Matching => matching_model(space.params.n, t, space.params.hbar)?,
        };
        let hs = gaudin(&trial_space, &z)?;
        let dim = trial_space.dim();
        // perturbed operator whose eigenvectors define the joint tuples
        let mut probe: CMat = hs[0].matrix.clone();
        for h in &hs {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 1e-6;
            probe = probe + h.matrix.mapv(|x| x * c);
        }
        let (_, vecs) = linalg::eig(&probe)?;
        let mut tuples: Vec<Vec<C64>> = Vec::with_capacity(dim);
        for k in 0..dim {
            let v = vecs.column(k).to_owned();
            let nrm: C64 = v.iter().map(|x| x.conj() * x).sum();
            let tuple = hs
                .iter()
                .map(|h| {
                    let hv = h.matrix.dot(&v);
                    let num: C64 = v.iter().zip(hv.iter()).map(|(a, b)| a.conj() * b).sum();
                    num / nrm
                })
                .collect::<Vec<_>>();
            tuples.push(tuple);
        }
        let mut min_gap = f64::INFINITY;
        for p in 0..dim {
            for q in (p + 1)..dim {
                let gap = tuples[p]
                    .iter()
                    .zip(tuples[q].iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                min_gap = min_gap.min(gap);
            }
        }
        if dim <= 1 {
            min_gap = f64::INFINITY;
        }
        out.push(SpectrumTrial {
            t: [t.re, t.im],
            z: z.iter().map(|w| [w.re, w.im]).collect(),
            min_gap,
            distinct: min_gap > gap_threshold,
        });
    }
    let distinct_count = out.iter().filter(|tr| tr.distinct).count();
    Ok(SpectrumScanReport {
        trials: out,
        distinct_count,
        gap_threshold,
    })
}

/// Conjugation of a strand index by a relabeling permutation, used by the
/// equivariance tests.
pub fn apply_perm_to_matching_space(
    space: &MultiplicitySpace,
    perm: &[usize],
) -> Result<LinearOperator> {
    if space.model != ModelKind::Matching {
        return Err(KzError::Domain("relabeling action needs matching model".into()));
    }
    let dim = space.dim();
    let mut mat: CMat = Array2::zeros((dim, dim));
    for (col, label) in space.basis.iter().enumerate() {
        let BasisLabel::Matching(pairs) = label else {
            unreachable!()
        };
        let mut out: Vec<(usize, usize)> = pairs
            .iter()
            .map(|&(p, q)| {
                let (p, q) = (perm[p - 1], perm[q - 1]);
                if p < q { (p, q) } else { (q, p) }
            })
            .collect();
        out.sort_unstable();
        let row = space.index_of(&BasisLabel::Matching(out));
        mat[[row, col]] = C64::new(1.0, 0.0);
    }
    LinearOperator::new(space.basis_id(), mat)
}

/// Rayleigh-quotient eigen-residual `||H v - lambda v|| / ||v||` used by the
/// Bethe diagnostics.
pub fn eigen_residual(h: &CMat, v: &Array1<C64>) -> (C64, f64) {
    let hv = h.dot(v);
    let nrm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    let lam: C64 = v
        .iter()
        .zip(hv.iter())
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        / nrm2;
    let res = (&hv - &v.mapv(|x| x * lam))
        .iter()
        .map(|x| x.norm_sqr())
        .sum::<f64>()
        .sqrt()
        / nrm2.sqrt();
    (lam, res)
}
