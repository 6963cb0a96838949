//! Hermitian eigendecomposition by the cyclic complex Jacobi method.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

/// Relative Hermitian tolerance admitting a matrix to the spectral routes.
pub const HERMITIAN_TOL: f64 = 1e-12;

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 50;

/// `A = Q · diag(λ) · Qᴴ` with `λ` ascending and `Q` unitary.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub q: ComplexMatrix,
    pub lambda: Vec<f64>,
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// `Qᴴ · m · Q`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.q.adjoint().matmul(m)?.matmul(&self.q)
    }

    /// `Q · m · Qᴴ`.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.q.matmul(m)?.matmul(&self.q.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diagonal(&self.lambda);
        self.from_eigenbasis(&d).expect("square by construction")
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.q.column(i)
    }
}

pub fn ensure_hermitian(a: &ComplexMatrix) -> Result<()> {
    a.ensure_square()?;
    let asymmetry = a.hermitian_defect();
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<SpectralDecomp> {
    ensure_hermitian(a)?;
    let n = a.rows();
    let mut m = a.clone();
    // exact Hermitian starting point
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut q = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                rotate(&mut m, &mut q, p, r);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let lambda = order.iter().map(|&i| m[(i, i)].re).collect();
    let q = ComplexMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(SpectralDecomp { q, lambda })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `m[p, r]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)`
/// acting on coordinates `p, r`, updating `m ← Gᴴ m G` and `q ← q G`.
fn rotate(m: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize) {
    let b = m[(p, r)];
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return;
    }
    let phase = b / abs_b;
    let app = m[(p, p)].re;
    let arr = m[(r, r)].re;
    let tau = (arr - app) / (2.0 * abs_b);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = [[g_pp, g_pr], [g_rp, g_rr]]
    let g_pp = C64::new(c, 0.0);
    let g_pr = C64::new(s, 0.0);
    let g_rp = -phase.conj() * s;
    let g_rr = phase.conj() * c;

    let n = m.rows();
    for k in 0..n {
        let mp = m[(k, p)];
        let mr = m[(k, r)];
        m[(k, p)] = mp * g_pp + mr * g_rp;
        m[(k, r)] = mp * g_pr + mr * g_rr;
    }
    for k in 0..n {
        let mp = m[(p, k)];
        let mr = m[(r, k)];
        m[(p, k)] = g_pp.conj() * mp + g_rp.conj() * mr;
        m[(r, k)] = g_pr.conj() * mp + g_rr.conj() * mr;
    }
    m[(p, r)] = ZERO;
    m[(r, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
    for k in 0..n {
        let qp = q[(k, p)];
        let qr = q[(k, r)];
        q[(k, p)] = qp * g_pp + qr * g_rp;
        q[(k, r)] = qp * g_pr + qr * g_rr;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_defect(q: &ComplexMatrix) -> f64 {
        (&q.matmul(&q.adjoint()).unwrap() - &ComplexMatrix::identity(q.rows())).frobenius_norm()
    }

    #[test]
    fn diagonal_input_sorted() {
        let d = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(d.lambda, vec![1.0, 2.0, 3.0]);
        // permutation matrix
        for j in 0..3 {
            let col = d.q.column(j);
            assert_eq!(col.iter().filter(|z| z.norm() == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|z| z.norm() == 0.0).count(), 2);
        }
    }

    #[test]
    fn identity_input() {
        let d = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(d.lambda, vec![1.0; 4]);
        assert!(unitarity_defect(&d.q) < 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        )
        .unwrap();
        let d = hermitian_eig(&a).unwrap();
        assert!((d.lambda[0] - 1.0).abs() < 1e-15 && (d.lambda[1] - 3.0).abs() < 1e-15);
        assert!(d.reconstruct().rel_diff(&a) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }
}
