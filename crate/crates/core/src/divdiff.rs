//! Divided differences and the formulas built on them.
//!
//! - [`descloux_eval`]: entries of `f(U)` for upper triangular `U` as sums over
//!   increasing index paths weighted by divided differences of the diagonal.
//! - [`dk_first_order`], [`dk_second_order`], [`dk_general`]: partial
//!   derivatives of `f(A(x))` for Hermitian `A(x̄) = QΛQᴴ`, from the path
//!   terms rotated into the eigenbasis (`U^(t) = Qᴴ A^(t) Q`).

use crate::blocktri::PathJet;
use crate::eig::{hermitian_eig, SpectralDecomp};
use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::multiindex::{t_permutations, MultiIndex};

/// Relative distance below which two nodes are treated as coincident.
pub const CONFLUENCE_TOL: f64 = 1e-8;

/// Default work cap for [`dk_general`], compared against `n^{|α|+1}`.
pub const DEFAULT_COMPLEXITY_CAP: u128 = 10_000_000;

fn confluent(a: C64, b: C64) -> bool {
    (a - b).norm() <= CONFLUENCE_TOL * (1.0 + a.norm())
}

/// Reorders nodes so that coincident ones are adjacent.
fn cluster(nodes: &[C64]) -> Vec<C64> {
    let mut rest: Vec<C64> = nodes.to_vec();
    rest.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let head = rest.remove(0);
        out.push(head);
        let mut i = 0;
        while i < rest.len() {
            if confluent(head, rest[i]) {
                out.push(rest.remove(i));
            } else {
                i += 1;
            }
        }
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `f[z₁, …, z_k]`, with confluent groups resolved through derivatives
/// (`f[z, …, z] = f^{(m)}(z)/m!`).
pub fn divided_difference(f: &dyn ScalarFunction, nodes: &[C64]) -> Result<C64> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("divided difference of zero nodes".into()));
    }
    let z = cluster(nodes);
    let k = z.len();
    // col[i] holds f[z_i, …, z_{i+m}] after pass m
    let mut col = Vec::with_capacity(k);
    for &zi in &z {
        col.push(f.eval(zi)?);
    }
    for m in 1..k {
        for i in 0..k - m {
            let (a, b) = (z[i], z[i + m]);
            col[i] = if confluent(a, b) {
                if m > f.max_order() {
                    return Err(Error::InsufficientDerivatives { needed: m, available: f.max_order() });
                }
                f.deriv(a, m)? / factorial(m)
            } else {
                (col[i + 1] - col[i]) / (b - a)
            };
        }
    }
    Ok(col[0])
}

pub fn divided_difference_real(f: &dyn ScalarFunction, nodes: &[f64]) -> Result<C64> {
    let z: Vec<C64> = nodes.iter().map(|&x| C64::new(x, 0.0)).collect();
    divided_difference(f, &z)
}

/// Divided differences over every contiguous range of a node sequence.
#[derive(Debug, Clone)]
pub struct DividedDifferenceTable {
    nodes: Vec<C64>,
    // row-major upper triangle: table[i * n + j] = f[z_i, …, z_j] for i ≤ j
    table: Vec<C64>,
}

impl DividedDifferenceTable {
    pub fn new(f: &dyn ScalarFunction, nodes: &[C64]) -> Result<Self> {
        let n = nodes.len();
        let mut table = vec![ZERO; n * n];
        for i in 0..n {
            for j in i..n {
                table[i * n + j] = divided_difference(f, &nodes[i..=j])?;
            }
        }
        Ok(Self { nodes: nodes.to_vec(), table })
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    /// `f[z_i, …, z_j]`.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(i <= j && j < self.nodes.len(), "range {i}..={j} out of bounds");
        self.table[i * self.nodes.len() + j]
    }
}

/// `f(U)` for upper triangular `U`:
/// `f(U)ᵢⱼ = Σ U_{i,k₁} ⋯ U_{k_{m−1},j} f[u_ii, u_{k₁k₁}, …, u_jj]` over all
/// increasing paths `i < k₁ < ⋯ < j`.
pub fn descloux_eval(f: &dyn ScalarFunction, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = u.ensure_square()?;
    if !u.is_upper_triangular() {
        return Err(Error::NotTriangular);
    }
    let diag = u.diagonal();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = f.eval(diag[i])?;
    }
    let mut path = Vec::with_capacity(n);
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        for j in i + 1..n {
            path.clear();
            path.push(i);
            let mut acc = ZERO;
            path_sum(f, u, &diag, j, &mut path, &mut nodes, C64::new(1.0, 0.0), &mut acc)?;
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn path_sum(
    f: &dyn ScalarFunction,
    u: &ComplexMatrix,
    diag: &[C64],
    target: usize,
    path: &mut Vec<usize>,
    nodes: &mut Vec<C64>,
    weight: C64,
    acc: &mut C64,
) -> Result<()> {
    let last = *path.last().expect("path starts at i");
    for next in last + 1..=target {
        let w = weight * u[(last, next)];
        if w == ZERO {
            continue;
        }
        path.push(next);
        if next == target {
            nodes.clear();
            nodes.extend(path.iter().map(|&k| diag[k]));
            *acc += w * divided_difference(f, nodes)?;
        } else {
            path_sum(f, u, diag, target, path, nodes, w, acc)?;
        }
        path.pop();
    }
    Ok(())
}

/// Loewner matrix `Gᵢⱼ = f[λᵢ, λⱼ]`.
pub fn loewner_matrix(f: &dyn ScalarFunction, lambda: &[f64]) -> Result<ComplexMatrix> {
    let n = lambda.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = divided_difference_real(f, &[lambda[i], lambda[j]])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

fn check_eigen_shape(d: &SpectralDecomp, ms: &[&ComplexMatrix]) -> Result<()> {
    let n = d.dim();
    for m in ms {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "eigenbasis term is {}x{}, decomposition has dimension {n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// `Q (G ∘ U^(α)) Qᴴ` with `G` the Loewner matrix.
pub fn dk_first_order(f: &dyn ScalarFunction, d: &SpectralDecomp, u_alpha: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_eigen_shape(d, &[u_alpha])?;
    let g = loewner_matrix(f, &d.lambda)?;
    d.from_eigenbasis(&g.hadamard(u_alpha)?)
}

/// Second-order partial for `α = β + γ` from eigenbasis terms.
pub fn dk_second_order(
    f: &dyn ScalarFunction,
    d: &SpectralDecomp,
    u_beta: &ComplexMatrix,
    u_gamma: &ComplexMatrix,
    u_alpha: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_eigen_shape(d, &[u_beta, u_gamma, u_alpha])?;
    let n = d.dim();
    let lam: Vec<C64> = d.lambda.iter().map(|&l| C64::new(l, 0.0)).collect();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = u_alpha[(i, j)] * divided_difference(f, &[lam[i], lam[j]])?;
            for k in 0..n {
                let w = u_beta[(i, k)] * u_gamma[(k, j)] + u_gamma[(i, k)] * u_beta[(k, j)];
                if w != ZERO {
                    acc += w * divided_difference(f, &[lam[i], lam[k], lam[j]])?;
                }
            }
            m[(i, j)] = acc;
        }
    }
    d.from_eigenbasis(&m)
}

/// Rotates every term of a jet into the eigenbasis of `d`.
pub fn jet_to_eigenbasis(jet: &PathJet, d: &SpectralDecomp) -> Result<PathJet> {
    let base = d.to_eigenbasis(jet.base())?;
    let zero = MultiIndex::zero(jet.nvars());
    let mut out = PathJet::new(base, jet.nvars(), jet.order())?;
    for (alpha, m) in jet.terms() {
        if *alpha != zero {
            out.insert(alpha.clone(), d.to_eigenbasis(m)?)?;
        }
    }
    Ok(out.missing_as_zero(jet.allows_missing()))
}

/// `∂^α f(A(x̄))` from eigenbasis terms:
/// `Σ_m Σ_{t ∈ T_α^m} Σ_k U^(t₁)_{i,k₁} ⋯ U^(t_m)_{k_{m−1},j} f[λᵢ, λ_{k₁}, …, λⱼ]`,
/// rotated back by `Q`. Refuses when `n^{|α|+1}` exceeds `cap`.
pub fn dk_general_capped(
    f: &dyn ScalarFunction,
    d: &SpectralDecomp,
    jet_eig: &PathJet,
    alpha: &MultiIndex,
    cap: u128,
) -> Result<ComplexMatrix> {
    let order = alpha.order();
    if order == 0 {
        return Err(Error::EmptyIndex);
    }
    if order > jet_eig.order() {
        return Err(Error::OrderExceeded { requested: order, available: jet_eig.order() });
    }
    let n = d.dim();
    if jet_eig.base_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "jet dimension {} differs from decomposition dimension {n}",
            jet_eig.base_dim()
        )));
    }
    let estimate = (n as u128).checked_pow(order as u32 + 1).unwrap_or(u128::MAX);
    if estimate > cap {
        return Err(Error::ComplexityRefusal { estimate, cap });
    }
    let lam: Vec<C64> = d.lambda.iter().map(|&l| C64::new(l, 0.0)).collect();
    let mut m_total = ComplexMatrix::zeros(n, n);
    for m in 1..=order {
        let terms = t_permutations(alpha, m);
        if terms.is_empty() {
            continue;
        }
        let dd = DividedDifferenceTensor::new(f, &lam, m)?;
        for t in &terms {
            let mut factors = Vec::with_capacity(m);
            for member in t {
                match jet_eig.get(member)? {
                    Some(u) => factors.push(u),
                    None => break,
                }
            }
            if factors.len() == m {
                accumulate_chain(&mut m_total, &factors, &dd);
            }
        }
    }
    d.from_eigenbasis(&m_total)
}

pub fn dk_general(
    f: &dyn ScalarFunction,
    d: &SpectralDecomp,
    jet_eig: &PathJet,
    alpha: &MultiIndex,
) -> Result<ComplexMatrix> {
    dk_general_capped(f, d, jet_eig, alpha, DEFAULT_COMPLEXITY_CAP)
}

/// Diagonalizes the (Hermitian) base of `jet`, rotates the jet, and
/// evaluates [`dk_general`].
pub fn dk_partial(f: &dyn ScalarFunction, jet: &PathJet, alpha: &MultiIndex) -> Result<ComplexMatrix> {
    let d = hermitian_eig(jet.base())?;
    let jet_eig = jet_to_eigenbasis(jet, &d)?;
    dk_general(f, &d, &jet_eig, alpha)
}

/// `f[λ_{k₀}, …, λ_{k_m}]` for every index tuple, flattened with `k₀` most
/// significant.
struct DividedDifferenceTensor {
    n: usize,
    values: Vec<C64>,
}

impl DividedDifferenceTensor {
    fn new(f: &dyn ScalarFunction, lam: &[C64], m: usize) -> Result<Self> {
        let n = lam.len();
        let len = n.pow(m as u32 + 1);
        let mut values = Vec::with_capacity(len);
        let mut idx = vec![0usize; m + 1];
        let mut nodes = vec![ZERO; m + 1];
        for _ in 0..len {
            for (z, &k) in nodes.iter_mut().zip(&idx) {
                *z = lam[k];
            }
            values.push(divided_difference(f, &nodes)?);
            odometer(&mut idx, n);
        }
        Ok(Self { n, values })
    }
}

fn odometer(idx: &mut [usize], n: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return;
        }
        *slot = 0;
    }
}

/// `out_ij += Σ_k F₁_{i,k₁} F₂_{k₁,k₂} ⋯ F_m_{k_{m−1},j} · dd[i, k₁, …, j]`,
/// indices visited lexicographically.
fn accumulate_chain(out: &mut ComplexMatrix, factors: &[&ComplexMatrix], dd: &DividedDifferenceTensor) {
    let n = dd.n;
    let m = factors.len();
    let mut idx = vec![0usize; m + 1];
    for flat in 0..dd.values.len() {
        let mut w = C64::new(1.0, 0.0);
        for (s, fac) in factors.iter().enumerate() {
            w *= fac[(idx[s], idx[s + 1])];
            if w == ZERO {
                break;
            }
        }
        if w != ZERO {
            out[(idx[0], idx[m])] += w * dd.values[flat];
        }
        odometer(&mut idx, n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::matrix_exp;
    use crate::function::StemFunction;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn trivial_divided_differences() {
        assert_eq!(divided_difference(&StemFunction::Exp, &[c(0.0)]).unwrap(), c(1.0));
        let v = divided_difference(&StemFunction::Power(2), &[c(0.3), c(1.9)]).unwrap();
        assert!((v - c(2.2)).norm() < 1e-15);
        assert_eq!(divided_difference(&StemFunction::Exp, &[c(0.0), c(0.0)]).unwrap(), c(1.0));
    }

    #[test]
    fn confluent_second_order() {
        // f[x, x, x] = f''(x)/2
        let v = divided_difference(&StemFunction::Cos, &[c(0.4), c(0.4), c(0.4)]).unwrap();
        assert!((v - c(-0.4f64.cos() / 2.0)).norm() < 1e-15);
        // mixed: f[a, a, b] for x³ = a + a + b
        let v = divided_difference(&StemFunction::Power(3), &[c(1.0), c(2.0), c(1.0)]).unwrap();
        assert!((v - c(4.0)).norm() < 1e-13);
    }

    #[test]
    fn table_matches_direct() {
        let nodes = [c(0.1), c(0.7), c(1.5), c(0.7)];
        let t = DividedDifferenceTable::new(&StemFunction::Exp, &nodes).unwrap();
        assert_eq!(t.get(1, 1), c(0.7f64.exp()));
        let direct = divided_difference(&StemFunction::Exp, &nodes).unwrap();
        assert_eq!(t.get(0, 3), direct);
    }

    #[test]
    fn descloux_two_by_two_and_diagonal() {
        let u = ComplexMatrix::from_real_rows(&[&[0.5, 2.0], &[0.0, 1.5]]);
        let fu = descloux_eval(&StemFunction::Exp, &u).unwrap();
        let dd = (1.5f64.exp() - 0.5f64.exp()) / 1.0;
        assert!((fu[(0, 1)] - c(2.0 * dd)).norm() < 1e-14);
        let d = ComplexMatrix::from_real_diagonal(&[0.1, 0.2]);
        let fd = descloux_eval(&StemFunction::Exp, &d).unwrap();
        assert_eq!(fd, ComplexMatrix::from_real_diagonal(&[0.1f64.exp(), 0.2f64.exp()]));
        assert_eq!(descloux_eval(&StemFunction::Exp, &u.transpose()), Err(Error::NotTriangular));
    }

    #[test]
    fn descloux_repeated_diagonal_matches_exp() {
        let u = ComplexMatrix::from_real_rows(&[&[1.0, 0.3, -0.2], &[0.0, 1.0, 0.5], &[0.0, 0.0, 1.0]]);
        let fu = descloux_eval(&StemFunction::Exp, &u).unwrap();
        assert!(fu.rel_diff(&matrix_exp(&u).unwrap()) < 1e-14);
    }

    #[test]
    fn first_order_diagonal_and_identity() {
        let d = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[0.2, 1.0])).unwrap();
        let e = ComplexMatrix::from_real_diagonal(&[3.0, -1.0]);
        let l = dk_first_order(&StemFunction::Exp, &d, &e).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[3.0 * 0.2f64.exp(), -(1f64.exp())]);
        assert!(l.rel_diff(&expected) < 1e-15);
        let e = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.5]]);
        assert!(dk_first_order(&StemFunction::Identity, &d, &e).unwrap().rel_diff(&e) < 1e-15);
    }

    #[test]
    fn complexity_cap_refuses() {
        let d = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        let jet = PathJet::linear(ComplexMatrix::identity(4), &[ComplexMatrix::identity(4)]).unwrap();
        let jet = PathJet::new(jet.base().clone(), 1, 3).unwrap().missing_as_zero(true);
        let r = dk_general_capped(&StemFunction::Exp, &d, &jet, &MultiIndex::new(vec![3]), 100);
        assert_eq!(r, Err(Error::ComplexityRefusal { estimate: 256, cap: 100 }));
    }
}
