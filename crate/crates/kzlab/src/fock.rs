//! Fermionic Fock space Λ•(V ⊗ W) for integer `t = dim V`, `d = dim W`,
//! with the commuting gl(V)/gl(W) (and so(V)/so(2n)) actions realized by
//! symbolic polynomials in creation/annihilation operators.
//!
//! States are bitmasks over a `t × d` mode grid in column-major order
//! (column `i` first, then row `a`), and operators are kept symbolic so
//! identities can be verified by streaming over basis states without ever
//! materializing `2^(t d)`-dimensional matrices.

use crate::operator::LinearOperator;
use crate::{linalg, C64, CMat, KzError, Result};
use ndarray::Array2;
use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

/// Mode grid of fermionic modes `x_{a,i}`, `1 <= a <= t`, `1 <= i <= d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    pub t: usize,
    pub d: usize,
}

/// Largest grid: dimension cap 2^24.
const MODE_CAP: usize = 24;
/// Largest grid for which dense matrices may be formed.
const DENSE_MODE_CAP: usize = 10;

impl FockSpace {
    pub fn new(t: usize, d: usize) -> Result<Self> {
        if t == 0 || d == 0 {
            return Err(KzError::Domain("fock_space requires t, d >= 1".into()));
        }
        if t * d > MODE_CAP {
            return Err(KzError::Domain(format!(
                "fock_space mode count {} exceeds cap {MODE_CAP}",
                t * d
            )));
        }
        Ok(FockSpace { t, d })
    }

    pub fn n_modes(&self) -> usize {
        self.t * self.d
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_modes()
    }

    /// Column-major mode index of `x_{a,i}`.
    pub fn mode(&self, a: usize, i: usize) -> u32 {
        debug_assert!(1 <= a && a <= self.t && 1 <= i && i <= self.d);
        ((i - 1) * self.t + (a - 1)) as u32
    }

    fn check_mode(&self, a: usize, i: usize) -> Result<()> {
        if a < 1 || a > self.t || i < 1 || i > self.d {
            return Err(KzError::IndexRange(format!(
                "mode (a={a}, i={i}) outside {}x{} grid",
                self.t, self.d
            )));
        }
        Ok(())
    }

    /// Occupation count of each row (gl(V) weight of a basis state).
    pub fn row_counts(&self, mask: u32) -> Vec<usize> {
        let mut out = vec![0usize; self.t];
        for i in 1..=self.d {
            for a in 1..=self.t {
                if mask & (1 << self.mode(a, i)) != 0 {
                    out[a - 1] += 1;
                }
            }
        }
        out
    }

    /// Occupation count of each column (gl(W) weight of a basis state).
    pub fn col_counts(&self, mask: u32) -> Vec<usize> {
        let mut out = vec![0usize; self.d];
        for i in 1..=self.d {
            for a in 1..=self.t {
                if mask & (1 << self.mode(a, i)) != 0 {
                    out[i - 1] += 1;
                }
            }
        }
        out
    }

    pub fn basis_id(&self) -> String {
        format!("fock(t={},d={})", self.t, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Factor {
    /// Creation (exterior multiplication) on a mode.
    X(u32),
    /// Annihilation (contraction) on a mode.
    D(u32),
}

impl Factor {
    fn apply(self, mask: u32) -> Option<(u32, f64)> {
        let (mode, create) = match self {
            Factor::X(m) => (m, true),
            Factor::D(m) => (m, false),
        };
        let bit = 1u32 << mode;
        if create == (mask & bit != 0) {
            return None;
        }
        let preceding = (mask & (bit - 1)).count_ones();
        let sign = if preceding % 2 == 0 { 1.0 } else { -1.0 };
        Some((mask ^ bit, sign))
    }
}

#[derive(Debug, Clone)]
struct Monomial {
    coeff: C64,
    /// Applied right-to-left, like written composition.
    factors: Vec<Factor>,
}

/// Symbolic sum of monomials in the creation/annihilation operators.
#[derive(Debug, Clone, Default)]
pub struct FermionOp {
    terms: Vec<Monomial>,
}

impl FermionOp {
    pub fn zero() -> Self {
        FermionOp { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        FermionOp {
            terms: vec![Monomial {
                coeff: C64::new(1.0, 0.0),
                factors: Vec::new(),
            }],
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        FermionOp {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff * c,
                    factors: m.factors.clone(),
                })
                .collect(),
        }
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Merge monomials with identical factor strings and drop zeros.
    pub fn compress(&self) -> Self {
        let mut map: HashMap<Vec<Factor>, C64> = HashMap::new();
        for m in &self.terms {
            *map.entry(m.factors.clone()).or_insert(C64::new(0.0, 0.0)) += m.coeff;
        }
        let mut terms: Vec<Monomial> = map
            .into_iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(factors, coeff)| Monomial { coeff, factors })
            .collect();
        terms.sort_by(|a, b| a.factors.len().cmp(&b.factors.len()));
        FermionOp { terms }
    }

    /// Action on a single basis state, as a sparse image.
    pub fn apply_mask(&self, mask: u32) -> HashMap<u32, C64> {
        let mut out: HashMap<u32, C64> = HashMap::new();
        'term: for m in &self.terms {
            let mut cur = mask;
            let mut sign = 1.0;
            for f in m.factors.iter().rev() {
                match f.apply(cur) {
                    Some((next, s)) => {
                        cur = next;
                        sign *= s;
                    }
                    None => continue 'term,
                }
            }
            *out.entry(cur).or_insert(C64::new(0.0, 0.0)) += m.coeff * sign;
        }
        out
    }

    /// Action on a sparse vector.
    pub fn apply_sparse(&self, vec: &HashMap<u32, C64>) -> HashMap<u32, C64> {
        let mut out: HashMap<u32, C64> = HashMap::new();
        for (&mask, &c) in vec {
            for (img, v) in self.apply_mask(mask) {
                *out.entry(img).or_insert(C64::new(0.0, 0.0)) += c * v;
            }
        }
        out
    }

    /// Dense matrix on a small Fock space.
    pub fn dense(&self, space: &FockSpace) -> Result<LinearOperator> {
        if space.n_modes() > DENSE_MODE_CAP {
            return Err(KzError::Domain(format!(
                "dense matrix refused for {} modes (cap {DENSE_MODE_CAP})",
                space.n_modes()
            )));
        }
        let dim = space.dim();
        let mut mat: CMat = Array2::zeros((dim, dim));
        for col in 0..dim {
            for (row, v) in self.apply_mask(col as u32) {
                mat[[row as usize, col]] += v;
            }
        }
        LinearOperator::new(space.basis_id(), mat)
    }
}

impl Add for &FermionOp {
    type Output = FermionOp;
    fn add(self, rhs: &FermionOp) -> FermionOp {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        FermionOp { terms }
    }
}

impl Sub for &FermionOp {
    type Output = FermionOp;
    fn sub(self, rhs: &FermionOp) -> FermionOp {
        self + &rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &FermionOp {
    type Output = FermionOp;
    fn mul(self, rhs: &FermionOp) -> FermionOp {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().copied());
                terms.push(Monomial {
                    coeff: a.coeff * b.coeff,
                    factors,
                });
            }
        }
        FermionOp { terms }
    }
}

/// Creation operator `x_{a,i}`.
pub fn xop(space: &FockSpace, a: usize, i: usize) -> Result<FermionOp> {
    space.check_mode(a, i)?;
    Ok(FermionOp {
        terms: vec![Monomial {
            coeff: C64::new(1.0, 0.0),
            factors: vec![Factor::X(space.mode(a, i))],
        }],
    })
}

/// Annihilation operator `∂_{a,i}`.
pub fn dop(space: &FockSpace, a: usize, i: usize) -> Result<FermionOp> {
    space.check_mode(a, i)?;
    Ok(FermionOp {
        terms: vec![Monomial {
            coeff: C64::new(1.0, 0.0),
            factors: vec![Factor::D(space.mode(a, i))],
        }],
    })
}

/// gl(W) generator `E_{ij} = Σ_a x_{a,i} ∂_{a,j}`.
pub fn glw_generator(space: &FockSpace, i: usize, j: usize) -> Result<FermionOp> {
    space.check_mode(1, i)?;
    space.check_mode(1, j)?;
    let mut op = FermionOp::zero();
    for a in 1..=space.t {
        op = &op + &(&xop(space, a, i)? * &dop(space, a, j)?);
    }
    Ok(op)
}

/// gl(V) generator `E_{ab} = Σ_i x_{a,i} ∂_{b,i}`.
pub fn glv_generator(space: &FockSpace, a: usize, b: usize) -> Result<FermionOp> {
    space.check_mode(a, 1)?;
    space.check_mode(b, 1)?;
    let mut op = FermionOp::zero();
    for i in 1..=space.d {
        op = &op + &(&xop(space, a, i)? * &dop(space, b, i)?);
    }
    Ok(op)
}

/// Casimir action `Ω_ij = Σ_{a,b} x_{a,i} ∂_{b,i} x_{b,j} ∂_{a,j}`.
pub fn omega_fock(space: &FockSpace, i: usize, j: usize) -> Result<FermionOp> {
    space.check_mode(1, i)?;
    space.check_mode(1, j)?;
    if i == j {
        return Err(KzError::IndexRange("omega_fock needs i != j".into()));
    }
    let mut op = FermionOp::zero();
    for a in 1..=space.t {
        for b in 1..=space.t {
            let term = &(&xop(space, a, i)? * &dop(space, b, i)?)
                * &(&xop(space, b, j)? * &dop(space, a, j)?);
            op = &op + &term;
        }
    }
    Ok(op)
}

/// `κ_ij = e_α e_{−α} + e_{−α} e_α` with `α = θ_i − θ_j` and the
/// normalization Tr(e_α e_{−α}) = 1, i.e. `E_{ij}E_{ji} + E_{ji}E_{ij}`.
pub fn kappa(space: &FockSpace, i: usize, j: usize) -> Result<FermionOp> {
    if i == j {
        return Err(KzError::IndexRange("kappa needs i != j".into()));
    }
    let eij = glw_generator(space, i, j)?;
    let eji = glw_generator(space, j, i)?;
    Ok(&(&eij * &eji) + &(&eji * &eij))
}

/// Truncated Casimir `e_{−α} e_α = E_{ji} E_{ij}` for `α = θ_i − θ_j`, `i < j`.
pub fn truncated_casimir_op(space: &FockSpace, i: usize, j: usize) -> Result<FermionOp> {
    if i >= j {
        return Err(KzError::IndexRange("truncated casimir needs i < j".into()));
    }
    let eij = glw_generator(space, i, j)?;
    let eji = glw_generator(space, j, i)?;
    Ok(&eji * &eij)
}

/// so(2n) generator `M_{i,j}` on the Fock realization, signed indices
/// `i, j ∈ {−d..−1, 1..d}` (with `d = n` columns):
/// `M^{(k)}_{i,j} = (x_{ki}∂_{kj} − ∂_{kj}x_{ki})/2`,
/// `M^{(k)}_{−i,j} = (∂_{ki}∂_{kj} − ∂_{kj}∂_{ki})/2`,
/// `M^{(k)}_{i,−j} = (x_{ki}x_{kj} − x_{kj}x_{ki})/2`,
/// and `M_{−i,−j} = −M_{j,i}` summed over `k = 1..t`.
pub fn so_generator(space: &FockSpace, i: i64, j: i64) -> Result<FermionOp> {
    let n = space.d as i64;
    let valid = |x: i64| x != 0 && x.unsigned_abs() as i64 <= n;
    if !valid(i) || !valid(j) {
        return Err(KzError::IndexRange(format!(
            "so_generator indices ({i},{j}) outside ±1..±{n}"
        )));
    }
    if i < 0 && j < 0 {
        return Ok(so_generator(space, -j, -i)?.scale(C64::new(-1.0, 0.0)));
    }
    let half = C64::new(0.5, 0.0);
    let mut op = FermionOp::zero();
    for k in 1..=space.t {
        let term = if i > 0 && j > 0 {
            let x = xop(space, k, i as usize)?;
            let d = dop(space, k, j as usize)?;
            &(&x * &d) - &(&d * &x)
        } else if i < 0 && j > 0 {
            let di = dop(space, k, (-i) as usize)?;
            let dj = dop(space, k, j as usize)?;
            &(&di * &dj) - &(&dj * &di)
        } else {
            // i > 0, j < 0
            let xi = xop(space, k, i as usize)?;
            let xj = xop(space, k, (-j) as usize)?;
            &(&xi * &xj) - &(&xj * &xi)
        };
        op = &op + &term.scale(half);
    }
    Ok(op)
}

/// Orthogonal Casimir `Ω_{a,b} = Σ_{i<j} (F_ij)^{(a)} (F_ji)^{(b)} / 2` with
/// `F_ij = E_ij − E_ji ∈ so(V)` acting in columns `a` and `b`.
pub fn omega_so_direct(space: &FockSpace, a: usize, b: usize) -> Result<FermionOp> {
    space.check_mode(1, a)?;
    space.check_mode(1, b)?;
    if a == b {
        return Err(KzError::IndexRange("omega_so needs a != b".into()));
    }
    let half = C64::new(0.5, 0.0);
    let mut op = FermionOp::zero();
    for i in 1..=space.t {
        for j in (i + 1)..=space.t {
            let fa = &(&xop(space, i, a)? * &dop(space, j, a)?)
                - &(&xop(space, j, a)? * &dop(space, i, a)?);
            let fb = &(&xop(space, j, b)? * &dop(space, i, b)?)
                - &(&xop(space, i, b)? * &dop(space, j, b)?);
            op = &op + &(&fa * &fb).scale(half);
        }
    }
    Ok(op)
}

/// Orthogonal Casimir via the so(2n) quadratic identity
/// `Ω_{a,b} = −(M_{a,b}M_{b,a} + M_{−a,b}M_{b,−a})/2 + (t/2 − M_{bb})/2`.
pub fn omega_so_dual_form(space: &FockSpace, a: usize, b: usize) -> Result<FermionOp> {
    let (ai, bi) = (a as i64, b as i64);
    let quad = &(&so_generator(space, ai, bi)? * &so_generator(space, bi, ai)?)
        + &(&so_generator(space, -ai, bi)? * &so_generator(space, bi, -ai)?);
    let scalar =
        &FermionOp::identity().scale(C64::new(space.t as f64 / 2.0, 0.0)) - &so_generator(space, bi, bi)?;
    Ok(&quad.scale(C64::new(-0.5, 0.0)) + &scalar.scale(C64::new(0.5, 0.0)))
}

/// Dual so connection coefficient
/// `e_{ε_b−ε_a}e_{ε_a−ε_b} + e_{−ε_a−ε_b}e_{ε_a+ε_b}
///   = (M_{b,a}M_{a,b} + M_{−a,b}M_{b,−a})/2`.
pub fn so_dual_coefficient_op(space: &FockSpace, a: usize, b: usize) -> Result<FermionOp> {
    if a >= b || b > space.d {
        return Err(KzError::IndexRange(format!(
            "so_dual_coefficient needs 1 <= a < b <= {}, got ({a},{b})",
            space.d
        )));
    }
    let (ai, bi) = (a as i64, b as i64);
    let quad = &(&so_generator(space, bi, ai)? * &so_generator(space, ai, bi)?)
        + &(&so_generator(space, -ai, bi)? * &so_generator(space, bi, -ai)?);
    Ok(quad.scale(C64::new(0.5, 0.0)))
}

/// Maximum matrix-entry difference between two operators over the whole
/// space, computed by streaming columns (never forming dense matrices).
pub fn max_action_difference(space: &FockSpace, lhs: &FermionOp, rhs: &FermionOp) -> f64 {
    let diff = lhs - rhs;
    let mut max = 0.0f64;
    for mask in 0..space.dim() as u32 {
        for (_, v) in diff.apply_mask(mask) {
            max = max.max(v.norm());
        }
    }
    max
}

/// All basis states with prescribed row/column occupation counts
/// (`None` leaves the corresponding weight free).
pub fn weight_states(
    space: &FockSpace,
    rows: Option<&[usize]>,
    cols: Option<&[usize]>,
) -> Result<Vec<u32>> {
    if let Some(r) = rows {
        if r.len() != space.t {
            return Err(KzError::DimensionMismatch(format!(
                "row weight length {} != t = {}",
                r.len(),
                space.t
            )));
        }
    }
    if let Some(c) = cols {
        if c.len() != space.d {
            return Err(KzError::DimensionMismatch(format!(
                "column weight length {} != d = {}",
                c.len(),
                space.d
            )));
        }
    }
    let mut out = Vec::new();
    for mask in 0..space.dim() as u32 {
        if let Some(r) = rows {
            if space.row_counts(mask) != r {
                continue;
            }
        }
        if let Some(c) = cols {
            if space.col_counts(mask) != c {
                continue;
            }
        }
        out.push(mask);
    }
    Ok(out)
}

/// A linearly independent family of vectors supported on a list of basis
/// states of an ambient Fock space.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub space: FockSpace,
    /// Sorted ambient support.
    pub states: Vec<u32>,
    /// `states.len() × k`; columns are the subspace basis vectors.
    pub vectors: CMat,
}

/// Which raising operators define singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularSide {
    /// gl(V) raising operators `E_{ab}`, `a < b`.
    GlV,
    /// so(V) raising operators for the Borel built from the isotropic basis
    /// `u_k = (e_{2k−1} − i e_{2k})/√2`.
    SoV,
}

impl SubspaceBasis {
    /// Coordinate subspace spanned by the listed basis states.
    pub fn from_states(space: FockSpace, states: Vec<u32>) -> Self {
        let k = states.len();
        let mut vectors: CMat = Array2::zeros((k, k));
        for i in 0..k {
            vectors[[i, i]] = C64::new(1.0, 0.0);
        }
        SubspaceBasis {
            space,
            states,
            vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn basis_id(&self) -> String {
        format!("{} subspace dim {}", self.space.basis_id(), self.dim())
    }

    fn column_as_sparse(&self, j: usize) -> HashMap<u32, C64> {
        let mut out = HashMap::new();
        for (s, &mask) in self.states.iter().enumerate() {
            let c = self.vectors[[s, j]];
            if c.norm() > 0.0 {
                out.insert(mask, c);
            }
        }
        out
    }

    /// Images of all basis columns under `op`, over a common support.
    fn images(&self, op: &FermionOp) -> (Vec<u32>, CMat) {
        let k = self.dim();
        let images: Vec<HashMap<u32, C64>> = (0..k)
            .map(|j| op.apply_sparse(&self.column_as_sparse(j)))
            .collect();
        let mut support: Vec<u32> = self.states.clone();
        for img in &images {
            support.extend(img.keys().copied());
        }
        support.sort_unstable();
        support.dedup();
        let index: HashMap<u32, usize> =
            support.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mut w: CMat = Array2::zeros((support.len(), k));
        for (j, img) in images.iter().enumerate() {
            for (&mask, &c) in img {
                w[[index[&mask], j]] = c;
            }
        }
        (support, w)
    }

    /// Matrix of `op` restricted to the subspace, in the subspace basis.
    /// Fails if the subspace is not invariant within `tol` (relative).
    pub fn restrict(&self, op: &FermionOp, tol: f64) -> Result<LinearOperator> {
        let (support, w) = self.images(op);
        let index: HashMap<u32, usize> =
            support.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mut b: CMat = Array2::zeros((support.len(), self.dim()));
        for (s, &mask) in self.states.iter().enumerate() {
            for j in 0..self.dim() {
                b[[index[&mask], j]] = self.vectors[[s, j]];
            }
        }
        let coeffs = linalg::lstsq_mat(&b, &w)?;
        let resid = &b.dot(&coeffs) - &w;
        let scale = linalg::frob(&b).max(linalg::frob(&w)).max(1.0);
        let residual = linalg::frob(&resid) / scale;
        if residual > tol {
            return Err(KzError::InvarianceViolation {
                what: "subspace not invariant under restricted operator".into(),
                residual,
                tolerance: tol,
            });
        }
        LinearOperator::new(self.basis_id(), coeffs)
    }

    /// Joint kernel of a family of operators, as a subspace of `self`.
    pub fn joint_kernel(&self, ops: &[FermionOp], rel_tol: f64) -> Result<SubspaceBasis> {
        if ops.is_empty() {
            return Ok(self.clone());
        }
        let mut blocks: Vec<CMat> = Vec::new();
        let mut rows = 0usize;
        for op in ops {
            let (_, w) = self.images(op);
            rows += w.nrows();
            blocks.push(w);
        }
        let mut stacked: CMat = Array2::zeros((rows, self.dim()));
        let mut at = 0usize;
        for w in blocks {
            let n = w.nrows();
            stacked.slice_mut(ndarray::s![at..at + n, ..]).assign(&w);
            at += n;
        }
        let kernel = linalg::nullspace(&stacked, rel_tol);
        Ok(SubspaceBasis {
            space: self.space,
            states: self.states.clone(),
            vectors: self.vectors.dot(&kernel),
        })
    }
}

/// so(V) structure for a chosen Borel: raising and Cartan operators as
/// `t × t` matrices in the standard basis of `V`, lifted by `lift_glv`.
pub fn so_v_borel(t: usize) -> (Vec<CMat>, Vec<CMat>) {
    let r = t / 2;
    let odd = t % 2 == 1;
    // isotropic basis columns: u_1..u_r, v_1..v_r, (e_t)
    let s2 = 1.0 / 2f64.sqrt();
    let mut s: CMat = Array2::zeros((t, t));
    for k in 0..r {
        s[[2 * k, k]] = C64::new(s2, 0.0);
        s[[2 * k + 1, k]] = C64::new(0.0, -s2);
        s[[2 * k, r + k]] = C64::new(s2, 0.0);
        s[[2 * k + 1, r + k]] = C64::new(0.0, s2);
    }
    if odd {
        s[[t - 1, t - 1]] = C64::new(1.0, 0.0);
    }
    // s is unitary, so the inverse is the conjugate transpose
    let sinv = s.t().mapv(|x| x.conj());
    let iso = |i: usize| -> usize { i }; // u_k at k, v_k at r+k, e_t at t-1
    let m_elem = |p: usize, q: usize| -> CMat {
        let mut a: CMat = Array2::zeros((t, t));
        a[[p, q]] = C64::new(1.0, 0.0);
        a
    };
    // m_{i,j} = E_{i,j} − E_{−j,−i} in iso indices
    let neg = |k: usize| -> usize {
        if k < r {
            r + k
        } else if k < 2 * r {
            k - r
        } else {
            k
        }
    };
    let lift = |a_iso: CMat| -> CMat { s.dot(&a_iso).dot(&sinv) };
    let mut raising = Vec::new();
    for k in 0..r {
        for l in (k + 1)..r {
            // ε_k − ε_l
            raising.push(lift(&m_elem(iso(k), iso(l)) - &m_elem(neg(l), neg(k))));
            // ε_k + ε_l
            raising.push(lift(&m_elem(iso(k), neg(l)) - &m_elem(iso(l), neg(k))));
        }
        if odd {
            // ε_k (type B short root)
            raising.push(lift(&m_elem(iso(k), t - 1) - &m_elem(t - 1, neg(k))));
        }
    }
    let mut cartan = Vec::new();
    for k in 0..r {
        cartan.push(lift(&m_elem(iso(k), iso(k)) - &m_elem(neg(k), neg(k))));
    }
    (raising, cartan)
}

/// Lift of a `t × t` gl(V) matrix to the Fock space: `Σ A_{ab} E_{ab}`.
pub fn lift_glv(space: &FockSpace, mat: &CMat) -> Result<FermionOp> {
    if mat.nrows() != space.t || mat.ncols() != space.t {
        return Err(KzError::DimensionMismatch(format!(
            "lift_glv expects a {0}x{0} matrix",
            space.t
        )));
    }
    let mut op = FermionOp::zero();
    for a in 1..=space.t {
        for b in 1..=space.t {
            let c = mat[[a - 1, b - 1]];
            if c.norm() > 0.0 {
                op = &op + &glv_generator(space, a, b)?.scale(c);
            }
        }
    }
    Ok(op)
}

/// Raising operators of the chosen side, as symbolic operators.
pub fn raising_ops(space: &FockSpace, side: SingularSide) -> Result<Vec<FermionOp>> {
    match side {
        SingularSide::GlV => {
            let mut ops = Vec::new();
            for a in 1..=space.t {
                for b in (a + 1)..=space.t {
                    ops.push(glv_generator(space, a, b)?);
                }
            }
            Ok(ops)
        }
        SingularSide::SoV => {
            let (raise, _) = so_v_borel(space.t);
            raise.iter().map(|m| lift_glv(space, m)).collect()
        }
    }
}

/// Vectors of `sub` annihilated by every raising operator of the chosen
/// side, at relative rank threshold 1e−10.
pub fn singular_vectors(sub: &SubspaceBasis, side: SingularSide) -> Result<SubspaceBasis> {
    let ops = raising_ops(&sub.space, side)?;
    sub.joint_kernel(&ops, 1e-10)
}

/// Vectors of `sub` annihilated by all of so(V) (the trivial-isotypic part),
/// used for the λ = ∅ orthogonal sector.
pub fn so_invariant_vectors(sub: &SubspaceBasis) -> Result<SubspaceBasis> {
    let t = sub.space.t;
    let mut ops = Vec::new();
    for i in 1..=t {
        for j in (i + 1)..=t {
            let mut f: CMat = Array2::zeros((t, t));
            f[[i - 1, j - 1]] = C64::new(1.0, 0.0);
            f[[j - 1, i - 1]] = C64::new(-1.0, 0.0);
            ops.push(lift_glv(&sub.space, &f)?);
        }
    }
    sub.joint_kernel(&ops, 1e-10)
}

/// `e_{−α}e_α` restricted to an invariant subspace (`α = θ_i − θ_j`, `i<j`).
pub fn truncated_casimir(
    space: &FockSpace,
    sub: &SubspaceBasis,
    i: usize,
    j: usize,
) -> Result<LinearOperator> {
    sub.restrict(&truncated_casimir_op(space, i, j)?, 1e-9)
}

/// Dual-so connection coefficient restricted to an invariant subspace.
pub fn so_dual_coefficient(
    space: &FockSpace,
    sub: &SubspaceBasis,
    a: usize,
    b: usize,
) -> Result<LinearOperator> {
    sub.restrict(&so_dual_coefficient_op(space, a, b)?, 1e-9)
}

/// Weyl dimension of the gl_k irreducible with partition highest weight.
pub fn gl_irrep_dim(k: usize, partition: &[usize]) -> u64 {
    let mut lam = partition.to_vec();
    lam.resize(k, 0);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        for j in (i + 1)..k {
            num *= (lam[i] + j - i - lam[j]) as u64;
            den *= (j - i) as u64;
        }
    }
    num / den
}

/// Conjugate (transpose) of a partition.
pub fn conjugate_partition(partition: &[usize]) -> Vec<usize> {
    let max = partition.iter().copied().max().unwrap_or(0);
    (1..=max)
        .map(|c| partition.iter().filter(|&&p| p >= c).count())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fock_dimensions_and_cap() {
        assert_eq!(FockSpace::new(1, 1).unwrap().dim(), 2);
        assert_eq!(FockSpace::new(2, 2).unwrap().dim(), 16);
        assert_eq!(FockSpace::new(3, 4).unwrap().dim(), 4096);
        assert!(FockSpace::new(5, 5).is_err());
        assert!(FockSpace::new(0, 3).is_err());
    }

    #[test]
    fn car_relations_dense() {
        let sp = FockSpace::new(2, 2).unwrap();
        let modes: Vec<(usize, usize)> = vec![(1, 1), (2, 1), (1, 2), (2, 2)];
        for &(a, i) in &modes {
            for &(b, j) in &modes {
                let x = xop(&sp, a, i).unwrap();
                let d = dop(&sp, b, j).unwrap();
                let anti = &(&x * &d) + &(&d * &x);
                let m = anti.dense(&sp).unwrap().matrix;
                let expected = if (a, i) == (b, j) {
                    linalg::identity(sp.dim())
                } else {
                    Array2::zeros((sp.dim(), sp.dim()))
                };
                assert!(linalg::max_abs(&(&m - &expected)) < 1e-14);
                // x's anticommute, d's anticommute
                let x2 = xop(&sp, b, j).unwrap();
                let xx = &(&x * &x2) + &(&x2 * &x);
                assert!(linalg::max_abs(&xx.dense(&sp).unwrap().matrix) < 1e-14);
            }
        }
    }

    #[test]
    fn vacuum_actions() {
        let sp = FockSpace::new(2, 2).unwrap();
        let d = dop(&sp, 1, 1).unwrap();
        assert!(d.apply_mask(0).is_empty());
        let om = omega_fock(&sp, 1, 2).unwrap();
        assert!(om
            .apply_mask(0)
            .values()
            .all(|v| v.norm() < 1e-15));
        let k = kappa(&sp, 1, 2).unwrap();
        assert!(k.apply_mask(0).values().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn lemma_identity_small_spaces() {
        for (t, d) in [(1usize, 2usize), (2, 2), (4, 2), (2, 3), (3, 2)] {
            let sp = FockSpace::new(t, d).unwrap();
            for i in 1..=d {
                for j in (i + 1)..=d {
                    let lhs = omega_fock(&sp, i, j).unwrap().scale(c(2., 0.));
                    let rhs = &(&glw_generator(&sp, i, i).unwrap()
                        + &glw_generator(&sp, j, j).unwrap())
                        - &kappa(&sp, i, j).unwrap();
                    let diff = max_action_difference(&sp, &lhs, &rhs);
                    assert!(diff < 1e-12, "t={t} d={d} ({i},{j}): {diff}");
                }
            }
        }
    }

    #[test]
    fn glw_bracket_relations() {
        let sp = FockSpace::new(2, 2).unwrap();
        let e = |i, j| glw_generator(&sp, i, j).unwrap().dense(&sp).unwrap().matrix;
        for i in 1..=2usize {
            for j in 1..=2usize {
                for k in 1..=2usize {
                    for l in 1..=2usize {
                        let comm = linalg::commutator(&e(i, j), &e(k, l));
                        let mut expected: CMat = Array2::zeros((16, 16));
                        if j == k {
                            expected = expected + &e(i, l);
                        }
                        if l == i {
                            expected = expected - &e(k, j);
                        }
                        assert!(linalg::max_abs(&(&comm - &expected)) < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn glv_glw_commute() {
        let sp = FockSpace::new(2, 2).unwrap();
        for a in 1..=2usize {
            for b in 1..=2usize {
                for i in 1..=2usize {
                    for j in 1..=2usize {
                        let gv = glv_generator(&sp, a, b).unwrap().dense(&sp).unwrap().matrix;
                        let gw = glw_generator(&sp, i, j).unwrap().dense(&sp).unwrap().matrix;
                        assert!(linalg::max_abs(&linalg::commutator(&gv, &gw)) < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn weight_subspace_examples() {
        let sp = FockSpace::new(2, 2).unwrap();
        let st = weight_states(&sp, Some(&[1, 1]), Some(&[1, 1])).unwrap();
        assert_eq!(st.len(), 2);
        let vac = weight_states(&sp, Some(&[0, 0]), Some(&[0, 0])).unwrap();
        assert_eq!(vac, vec![0]);
        let none = weight_states(&sp, Some(&[2, 0]), Some(&[0, 1])).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn singular_m1n1_t2() {
        // m = n = 1: gamma = (1,..,1), beta = (t-1, 1)
        let t = 2usize;
        let sp = FockSpace::new(t, 2).unwrap();
        let states = weight_states(&sp, Some(&vec![1; t]), Some(&[t - 1, 1])).unwrap();
        let sub = SubspaceBasis::from_states(sp, states);
        let sing = singular_vectors(&sub, SingularSide::GlV).unwrap();
        assert_eq!(sing.dim(), 1);
        // truncated Casimir value t on this line
        let tc = truncated_casimir(&sp, &sing, 1, 2).unwrap();
        assert!((tc.matrix[[0, 0]] - c(t as f64, 0.)).norm() < 1e-10);
        // Fock-side Omega has the det-twisted value 1 - t there
        let om = sing.restrict(&omega_fock(&sp, 1, 2).unwrap(), 1e-9).unwrap();
        assert!((om.matrix[[0, 0]] - c(1.0 - t as f64, 0.)).norm() < 1e-10);
    }

    #[test]
    fn singular_omega_eigenvalue_one_minus_t() {
        for t in [2usize, 3, 4] {
            let sp = FockSpace::new(t, 2).unwrap();
            let states = weight_states(&sp, Some(&vec![1; t]), Some(&[t - 1, 1])).unwrap();
            let sub = SubspaceBasis::from_states(sp, states);
            let sing = singular_vectors(&sub, SingularSide::GlV).unwrap();
            assert_eq!(sing.dim(), 1);
            let om = sing.restrict(&omega_fock(&sp, 1, 2).unwrap(), 1e-9).unwrap();
            assert!((om.matrix[[0, 0]] - c(1.0 - t as f64, 0.)).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_m2n2_t4_dim2() {
        // m = n = 2, t = 4: gamma = (2,2,2,2), beta = (3,3,1,1); the singular
        // subspace models C[S_2], dimension 2
        let sp = FockSpace::new(4, 4).unwrap();
        let states = weight_states(&sp, Some(&[2, 2, 2, 2]), Some(&[3, 3, 1, 1])).unwrap();
        let sub = SubspaceBasis::from_states(sp, states);
        let sing = singular_vectors(&sub, SingularSide::GlV).unwrap();
        assert_eq!(sing.dim(), 2);
        // invariance of the singular subspace under all truncated Casimirs
        for i in 1..=4usize {
            for j in (i + 1)..=4usize {
                truncated_casimir(&sp, &sing, i, j).unwrap();
            }
        }
    }

    #[test]
    fn kappa_truncated_relation() {
        // kappa = 2 e_{-a}e_a + h_a with h_a = E_ii - E_jj
        let sp = FockSpace::new(2, 2).unwrap();
        let k = kappa(&sp, 1, 2).unwrap();
        let h = &glw_generator(&sp, 1, 1).unwrap() - &glw_generator(&sp, 2, 2).unwrap();
        let rhs = &truncated_casimir_op(&sp, 1, 2).unwrap().scale(c(2., 0.)) + &h;
        assert!(max_action_difference(&sp, &k, &rhs) < 1e-13);
    }

    #[test]
    fn so_generator_antisymmetry_and_vacuum() {
        let sp = FockSpace::new(3, 2).unwrap();
        for &(i, j) in &[(1i64, 2i64), (-1, 2), (1, -2), (-2, -1), (1, 1), (2, 2)] {
            let lhs = so_generator(&sp, i, j).unwrap();
            let rhs = so_generator(&sp, -j, -i).unwrap().scale(c(-1., 0.));
            assert!(max_action_difference(&sp, &lhs, &rhs) < 1e-13, "({i},{j})");
        }
        // vacuum: M_{i,j} (i,j>0) acts by -(t/2) delta_ij
        for i in 1..=2i64 {
            for j in 1..=2i64 {
                let img = so_generator(&sp, i, j).unwrap().apply_mask(0);
                let val = img.get(&0).copied().unwrap_or(c(0., 0.));
                let expected = if i == j { c(-1.5, 0.) } else { c(0., 0.) };
                assert!((val - expected).norm() < 1e-13);
                assert!(img
                    .iter()
                    .all(|(&m, v)| m == 0 || v.norm() < 1e-13));
            }
        }
    }

    #[test]
    fn so_bracket_example() {
        // [M_{1,2}, M_{2,1}] = M_{1,1} - M_{2,2}
        let sp = FockSpace::new(2, 2).unwrap();
        let m12 = so_generator(&sp, 1, 2).unwrap();
        let m21 = so_generator(&sp, 2, 1).unwrap();
        let comm = &(&m12 * &m21) - &(&m21 * &m12);
        let rhs = &so_generator(&sp, 1, 1).unwrap() - &so_generator(&sp, 2, 2).unwrap();
        assert!(max_action_difference(&sp, &comm, &rhs) < 1e-13);
        // [M_{1,-2}, M_{-2,1}] = M_{1,1} + M_{2,2} (h_{eps1+eps2})
        let a = so_generator(&sp, 1, -2).unwrap();
        let b = so_generator(&sp, -2, 1).unwrap();
        let comm = &(&a * &b) - &(&b * &a);
        let rhs = &so_generator(&sp, 1, 1).unwrap() + &so_generator(&sp, 2, 2).unwrap();
        assert!(max_action_difference(&sp, &comm, &rhs) < 1e-13);
    }

    #[test]
    fn so_duality_identity_chain() {
        for t in [2usize, 3] {
            let sp = FockSpace::new(t, 2).unwrap();
            let direct = omega_so_direct(&sp, 1, 2).unwrap();
            let dual = omega_so_dual_form(&sp, 1, 2).unwrap();
            let diff = max_action_difference(&sp, &direct, &dual);
            assert!(diff < 1e-12, "t={t}: {diff}");
        }
    }

    #[test]
    fn so_scalar_term_identity() {
        // sum_i (M_ab M_ba + M_{-a,b} M_{b,-a})^{(i)} = t/2 - M_bb,
        // with the left side written out in same-slot CAR products
        let sp = FockSpace::new(3, 2).unwrap();
        let (a, b) = (1usize, 2usize);
        let mut lhs = FermionOp::zero();
        for i in 1..=sp.t {
            let xa = xop(&sp, i, a).unwrap();
            let xb = xop(&sp, i, b).unwrap();
            let da = dop(&sp, i, a).unwrap();
            let db = dop(&sp, i, b).unwrap();
            // x_{ia} d_{ib} x_{ib} d_{ia} + d_{ia} d_{ib} x_{ib} x_{ia}
            lhs = &lhs + &(&(&(&xa * &db) * &xb) * &da);
            lhs = &lhs + &(&(&(&da * &db) * &xb) * &xa);
        }
        let rhs = &FermionOp::identity().scale(c(sp.t as f64 / 2.0, 0.))
            - &so_generator(&sp, b as i64, b as i64).unwrap();
        assert!(max_action_difference(&sp, &lhs, &rhs) < 1e-13);
    }

    #[test]
    fn so_invariants_n2() {
        // t = 2, n = 2, lambda = empty: beta = (0,0) means column counts (1,1)
        let sp = FockSpace::new(2, 2).unwrap();
        let states = weight_states(&sp, None, Some(&[1, 1])).unwrap();
        let sub = SubspaceBasis::from_states(sp, states);
        let inv = so_invariant_vectors(&sub).unwrap();
        assert!(inv.dim() >= 1);
        // the dual coefficient restricts without invariance violation
        so_dual_coefficient(&sp, &inv, 1, 2).unwrap();
    }

    #[test]
    fn skew_howe_bookkeeping() {
        // singular-vector count of glV-weight delta equals dim W_{delta'},
        // and sum over delta of dim V_delta * dim W_{delta'} = 2^(t d)
        for (t, d) in [(2usize, 2usize), (2, 3), (3, 2), (3, 3)] {
            let sp = FockSpace::new(t, d).unwrap();
            let mut total = 0u64;
            // enumerate partitions delta with at most t rows, entries <= d
            let mut stack: Vec<Vec<usize>> = vec![vec![]];
            let mut partitions = Vec::new();
            while let Some(p) = stack.pop() {
                if p.len() <= t {
                    partitions.push(p.clone());
                }
                if p.len() < t {
                    let hi = p.last().copied().unwrap_or(d);
                    for next in 1..=hi {
                        let mut q = p.clone();
                        q.push(next);
                        stack.push(q);
                    }
                }
            }
            for delta in &partitions {
                let mut rows = delta.clone();
                rows.resize(t, 0);
                let states = weight_states(&sp, Some(&rows), None).unwrap();
                if states.is_empty() {
                    continue;
                }
                let sub = SubspaceBasis::from_states(sp, states);
                let sing = singular_vectors(&sub, SingularSide::GlV).unwrap();
                let dual = conjugate_partition(delta);
                assert_eq!(
                    sing.dim() as u64,
                    gl_irrep_dim(d, &dual),
                    "t={t} d={d} delta={delta:?}"
                );
                total += gl_irrep_dim(t, delta) * gl_irrep_dim(d, &dual);
            }
            assert_eq!(total, 1u64 << (t * d), "t={t} d={d}");
        }
    }

    #[test]
    fn restrict_rejects_noninvariant() {
        // the (1,1)-row-weight space of fock(2,2) is not invariant under a
        // single creation operator
        let sp = FockSpace::new(2, 2).unwrap();
        let states = weight_states(&sp, Some(&[1, 1]), Some(&[1, 1])).unwrap();
        let sub = SubspaceBasis::from_states(sp, states);
        let bad = xop(&sp, 1, 1).unwrap();
        assert!(matches!(
            sub.restrict(&bad, 1e-9),
            Err(KzError::InvarianceViolation { .. })
        ));
    }

    #[test]
    fn gl_dim_formula() {
        assert_eq!(gl_irrep_dim(2, &[1]), 2);
        assert_eq!(gl_irrep_dim(3, &[1, 1]), 3);
        assert_eq!(gl_irrep_dim(3, &[2, 1]), 8);
        assert_eq!(conjugate_partition(&[3, 1]), vec![2, 1, 1]);
    }
}
