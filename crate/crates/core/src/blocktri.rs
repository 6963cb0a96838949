//! Exact derivatives of `f(A(x))` through block upper triangular matrices.
//!
//! For directions `d₁, …, d_k` the matrix `X_k` is built by
//! `X_i = [[X_{i−1}, ∂_{d_i} X_{i−1}], [0, X_{i−1}]]`, `X_0 = A(x̄)`. The
//! upper-right `n × n` block of `f(X_k)` is `∂_{d₁}⋯∂_{d_k} f(A(x))` at `x̄`.
//! Every block of `X_k` is either zero or a partial `A^(β)` of the path, so
//! `X_k` is assembled from a [`PathJet`] by tracking multi-index labels.
//!
//! `X_k` has dimension `2^k·n`; `k` is capped at [`MAX_LEVELS`].

use std::collections::BTreeMap;

use crate::blocks::{assemble_2x2, assemble_grid, kron_identity_left};
use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::matrix::ComplexMatrix;
use crate::multiindex::{s_partitions, MultiIndex};

/// Maximum number of block levels (`X_k` has dimension `2^k·n`).
pub const MAX_LEVELS: usize = 6;

/// Partial derivatives `A^(α)(x̄)` of a matrix path for `|α| ≤ order`.
///
/// Missing terms are an error unless [`PathJet::missing_as_zero`] is set,
/// which is how sparse (e.g. polynomial) paths are expressed.
#[derive(Debug, Clone)]
pub struct PathJet {
    nvars: usize,
    order: usize,
    base_dim: usize,
    terms: BTreeMap<MultiIndex, ComplexMatrix>,
    missing_as_zero: bool,
}

impl PathJet {
    pub fn new(base: ComplexMatrix, nvars: usize, order: usize) -> Result<Self> {
        let n = base.ensure_square()?;
        let mut terms = BTreeMap::new();
        terms.insert(MultiIndex::zero(nvars), base);
        Ok(Self { nvars, order, base_dim: n, terms, missing_as_zero: false })
    }

    /// The affine path `A₀ + Σ xᵢ Eᵢ`.
    pub fn linear(a0: ComplexMatrix, es: &[ComplexMatrix]) -> Result<Self> {
        let k = es.len();
        let mut jet = Self::new(a0, k, k.max(1))?.missing_as_zero(true);
        for (i, e) in es.iter().enumerate() {
            jet.insert(MultiIndex::unit(k, i), e.clone())?;
        }
        Ok(jet)
    }

    pub fn missing_as_zero(mut self, yes: bool) -> Self {
        self.missing_as_zero = yes;
        self
    }

    pub fn allows_missing(&self) -> bool {
        self.missing_as_zero
    }

    pub fn with_term(mut self, alpha: MultiIndex, m: ComplexMatrix) -> Result<Self> {
        self.insert(alpha, m)?;
        Ok(self)
    }

    pub fn insert(&mut self, alpha: MultiIndex, m: ComplexMatrix) -> Result<()> {
        if alpha.nvars() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "multi-index {alpha} has {} variables, jet has {}",
                alpha.nvars(),
                self.nvars
            )));
        }
        if alpha.order() > self.order {
            return Err(Error::OrderExceeded { requested: alpha.order(), available: self.order });
        }
        if m.rows() != self.base_dim || m.cols() != self.base_dim {
            return Err(Error::DimensionMismatch(format!(
                "jet term {alpha} is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols(),
                n = self.base_dim
            )));
        }
        self.terms.insert(alpha, m);
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.terms[&MultiIndex::zero(self.nvars)]
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ComplexMatrix)> {
        self.terms.iter()
    }

    /// `Some(A^(α))`, `None` for a term defaulted to zero, or
    /// `MissingJetTerm`.
    pub fn get(&self, alpha: &MultiIndex) -> Result<Option<&ComplexMatrix>> {
        match self.terms.get(alpha) {
            Some(m) => Ok(Some(m)),
            None if self.missing_as_zero => Ok(None),
            None => Err(Error::MissingJetTerm(alpha.to_string())),
        }
    }

    /// `A^(α)` with defaulted terms materialized as zeros.
    pub fn get_or_zero(&self, alpha: &MultiIndex) -> Result<ComplexMatrix> {
        Ok(self.get(alpha)?.cloned().unwrap_or_else(|| ComplexMatrix::zeros(self.base_dim, self.base_dim)))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|m| m.hermitian_defect() <= tol)
    }
}

/// Which derivative to take: a multi-index or an explicit direction
/// sequence `d₁, …, d_k` (0-based variable indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivativeRequest {
    Alpha(MultiIndex),
    Dirs(Vec<usize>),
}

impl DerivativeRequest {
    pub fn dirs(&self) -> Vec<usize> {
        match self {
            DerivativeRequest::Alpha(a) => a.to_dirs(),
            DerivativeRequest::Dirs(d) => d.clone(),
        }
    }

    pub fn alpha(&self, nvars: usize) -> Result<MultiIndex> {
        match self {
            DerivativeRequest::Alpha(a) => Ok(a.clone()),
            DerivativeRequest::Dirs(d) => MultiIndex::from_dirs(d, nvars),
        }
    }
}

impl From<MultiIndex> for DerivativeRequest {
    fn from(a: MultiIndex) -> Self {
        DerivativeRequest::Alpha(a)
    }
}

fn check_levels(k: usize) -> Result<()> {
    if k > MAX_LEVELS {
        return Err(Error::OrderExceeded { requested: k, available: MAX_LEVELS });
    }
    Ok(())
}

/// Multi-index labels of the blocks of `X_k`; `None` marks a zero block.
pub fn block_labels(nvars: usize, dirs: &[usize]) -> Vec<Vec<Option<MultiIndex>>> {
    let mut labels = vec![vec![Some(MultiIndex::zero(nvars))]];
    for &d in dirs {
        let unit = MultiIndex::unit(nvars, d);
        let s = labels.len();
        let mut next = vec![vec![None; 2 * s]; 2 * s];
        for i in 0..s {
            for j in 0..s {
                if let Some(l) = &labels[i][j] {
                    next[i][j] = Some(l.clone());
                    next[i][j + s] = Some(l + &unit);
                    next[i + s][j + s] = Some(l.clone());
                }
            }
        }
        labels = next;
    }
    labels
}

/// Assembles `X_k` for the direction sequence `dirs`.
pub fn build_xk(jet: &PathJet, dirs: &[usize]) -> Result<ComplexMatrix> {
    let k = dirs.len();
    check_levels(k)?;
    if k > jet.order {
        return Err(Error::OrderExceeded { requested: k, available: jet.order });
    }
    if let Some(&d) = dirs.iter().find(|&&d| d >= jet.nvars) {
        return Err(Error::InvalidArgument(format!("direction {d} out of range for {} variables", jet.nvars)));
    }
    let labels = block_labels(jet.nvars, dirs);
    let grid = labels
        .iter()
        .map(|row| {
            row.iter()
                .map(|label| match label {
                    Some(alpha) => Ok(jet.get(alpha)?.cloned()),
                    None => Ok(None),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    assemble_grid(&grid, jet.base_dim)
}

/// Upper-right `n × n` block of `f(X_k)`.
pub fn partial_via_blocktri(f: &dyn MatrixFunction, jet: &PathJet, req: &DerivativeRequest) -> Result<ComplexMatrix> {
    let dirs = req.dirs();
    let x = build_xk(jet, &dirs)?;
    let fx = f.apply(&x)?;
    Ok(fx.block(0, (1 << dirs.len()) - 1, jet.base_dim))
}

/// Block matrix whose `f` carries `L_f^(k)(A₀, E₁, …, E_k)` in its
/// upper-right block: `X_i = [[X_{i−1}, I_{2^{i−1}} ⊗ E_i], [0, X_{i−1}]]`.
pub fn frechet_block_matrix(a0: &ComplexMatrix, es: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let n = a0.ensure_square()?;
    if es.is_empty() {
        return Err(Error::InvalidArgument("at least one direction is required".into()));
    }
    check_levels(es.len())?;
    for e in es {
        a0.ensure_same_shape(e, "Fréchet direction")?;
    }
    let mut x = a0.clone();
    for (i, e) in es.iter().enumerate() {
        let dim = n << i;
        x = assemble_2x2(&x, &kron_identity_left(1 << i, e)?, &ComplexMatrix::zeros(dim, dim), &x)?;
    }
    Ok(x)
}

/// `L_f^(k)(A₀, E₁, …, E_k)` as the `(1, 2^k)` block of `f(X_k)`.
pub fn frechet_via_blocktri(f: &dyn MatrixFunction, a0: &ComplexMatrix, es: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let x = frechet_block_matrix(a0, es)?;
    let fx = f.apply(&x)?;
    Ok(fx.block(0, (1 << es.len()) - 1, a0.rows()))
}

/// `∂^α f(A(x̄)) = Σᵢ Σ_{s ∈ S_α^i} L_f^(i)(A, A^(s₁), …, A^(sᵢ))`, summed in
/// canonical partition order. Terms with a defaulted-zero argument vanish by
/// multilinearity and are skipped.
pub fn partial_via_frechet_sum(f: &dyn MatrixFunction, jet: &PathJet, alpha: &MultiIndex) -> Result<ComplexMatrix> {
    if alpha.order() == 0 {
        return Err(Error::EmptyIndex);
    }
    if alpha.order() > jet.order {
        return Err(Error::OrderExceeded { requested: alpha.order(), available: jet.order });
    }
    let n = jet.base_dim;
    let mut total = ComplexMatrix::zeros(n, n);
    for i in 1..=alpha.order() {
        for s in s_partitions(alpha, i).iter() {
            let mut args = Vec::with_capacity(i);
            for member in s {
                match jet.get(member)? {
                    Some(m) => args.push(m.clone()),
                    None => break,
                }
            }
            if args.len() == i {
                total += &frechet_via_blocktri(f, jet.base(), &args)?;
            }
        }
    }
    Ok(total)
}

/// Number of vertices on the longest path of a DAG given by a strictly
/// upper triangular adjacency matrix (a single vertex counts 1).
pub fn longest_path(adj: &[Vec<bool>]) -> Result<usize> {
    let n = adj.len();
    for (i, row) in adj.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!("adjacency row {i} has {} entries, expected {n}", row.len())));
        }
        if let Some(j) = row.iter().take(i + 1).position(|&e| e) {
            return Err(Error::NotDag { row: i, col: j });
        }
    }
    let mut p = vec![1usize; n];
    for v in 0..n {
        for u in 0..v {
            if adj[u][v] {
                p[v] = p[v].max(p[u] + 1);
            }
        }
    }
    Ok(p.into_iter().max().unwrap_or(0))
}

/// `G₀ = 0`, `G_i = [[G_{i−1}, I + G_{i−1}], [0, G_{i−1}]]`: the reduced
/// graph of the block structure of `X_i`.
pub fn graph_recursion(i: usize) -> Vec<Vec<bool>> {
    let mut g = vec![vec![false]];
    for _ in 0..i {
        let s = g.len();
        let mut next = vec![vec![false; 2 * s]; 2 * s];
        for r in 0..s {
            for c in 0..s {
                next[r][c] = g[r][c];
                next[r + s][c + s] = g[r][c];
                next[r][c + s] = g[r][c] || r == c;
            }
        }
        g = next;
    }
    g
}

/// Reduced graph of a block matrix: an edge `i → j` for every nonzero
/// off-diagonal block.
pub fn block_graph(x: &ComplexMatrix, block_size: usize) -> Vec<Vec<bool>> {
    let nb = x.rows() / block_size;
    (0..nb).map(|i| (0..nb).map(|j| i != j && x.block(i, j, block_size).max_abs() != 0.0).collect()).collect()
}
