//! Block-matrix assembly helpers.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// `I_k ⊗ e`: block diagonal with `e` repeated `k` times.
pub fn kron_identity_left(k: usize, e: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = e.ensure_square()?;
    let mut out = ComplexMatrix::zeros(k * n, k * n);
    for b in 0..k {
        out.set_submatrix(b * n, b * n, e);
    }
    Ok(out)
}

/// Assembles `[[a11, a12], [a21, a22]]`.
pub fn assemble_2x2(
    a11: &ComplexMatrix,
    a12: &ComplexMatrix,
    a21: &ComplexMatrix,
    a22: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let conformable =
        a11.rows() == a12.rows() && a21.rows() == a22.rows() && a11.cols() == a21.cols() && a12.cols() == a22.cols();
    if !conformable {
        return Err(Error::DimensionMismatch(format!(
            "2x2 block assembly of {}x{}, {}x{}, {}x{}, {}x{}",
            a11.rows(),
            a11.cols(),
            a12.rows(),
            a12.cols(),
            a21.rows(),
            a21.cols(),
            a22.rows(),
            a22.cols()
        )));
    }
    let (r1, c1) = (a11.rows(), a11.cols());
    let mut out = ComplexMatrix::zeros(r1 + a21.rows(), c1 + a12.cols());
    out.set_submatrix(0, 0, a11);
    out.set_submatrix(0, c1, a12);
    out.set_submatrix(r1, 0, a21);
    out.set_submatrix(r1, c1, a22);
    Ok(out)
}

/// Assembles a square grid of `n × n` blocks; `None` entries are zero and
/// are skipped.
pub fn assemble_grid(grid: &[Vec<Option<ComplexMatrix>>], n: usize) -> Result<ComplexMatrix> {
    let nb = grid.len();
    let mut out = ComplexMatrix::zeros(nb * n, nb * n);
    for (bi, row) in grid.iter().enumerate() {
        if row.len() != nb {
            return Err(Error::DimensionMismatch(format!(
                "block grid row {bi} has {} entries, expected {nb}",
                row.len()
            )));
        }
        for (bj, block) in row.iter().enumerate() {
            if let Some(b) = block {
                if b.rows() != n || b.cols() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({bi}, {bj}) is {}x{}, expected {n}x{n}",
                        b.rows(),
                        b.cols()
                    )));
                }
                out.set_submatrix(bi * n, bj * n, b);
            }
        }
    }
    Ok(out)
}
