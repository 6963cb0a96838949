use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Solves `a · x = b` by LU with partial pivoting.
pub(crate) fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!("solve: {n}x{n} system, rhs has {} rows", b.rows())));
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (p, pmax) =
            (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax == 0.0 {
            return Err(Error::InvalidArgument("singular matrix in linear solve".into()));
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            for j in 0..m {
                let t = x[(k, j)];
                x[(k, j)] = x[(p, j)];
                x[(p, j)] = t;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            if l == ZERO {
                continue;
            }
            lu[(i, k)] = l;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
            for j in 0..m {
                let v = x[(k, j)];
                x[(i, j)] -= l * v;
            }
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[(k, k)];
        for j in 0..m {
            let mut s = x[(k, j)];
            for c in k + 1..n {
                s -= lu[(k, c)] * x[(c, j)];
            }
            x[(k, j)] = s / pivot;
        }
    }
    Ok(x)
}
