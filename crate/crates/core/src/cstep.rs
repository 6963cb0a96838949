//! Complex-step, multicomplex-step and finite-difference approximations.
//!
//! Multicomplex numbers are represented by real-style block embeddings:
//! `X_i = [[X_{i−1}, I ⊗ hE_i], [−I ⊗ hE_i, X_{i−1}]]`. The first block row
//! of `f(X_j)` holds the multicomplex components of the result, so the
//! embedding stays valid when `A` and `E_i` are complex.

use log::warn;

use crate::blocks::{assemble_2x2, assemble_grid, kron_identity_left};
use crate::blocktri::{frechet_via_blocktri, partial_via_blocktri, DerivativeRequest, PathJet};
use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::matrix::{ComplexMatrix, C64};
use crate::multiindex::MultiIndex;

/// Default step for first-order schemes.
pub const DEFAULT_STEP_FIRST: f64 = 1e-8;
/// Default step for second-order schemes.
pub const DEFAULT_STEP_SECOND: f64 = 1e-5;
/// Largest imaginary part tolerated as "real" input.
pub const REAL_TOL: f64 = 1e-14;

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive and finite, got {h}")));
    }
    Ok(())
}

fn underflow_guard(h: f64, a: &ComplexMatrix) {
    if h * h <= f64::MIN_POSITIVE * a.frobenius_norm() {
        warn!("step {h:e} squared underflows relative to the base matrix");
    }
}

/// Block embedding of `A₀ + h(i₁E₁ + ⋯ + i_jE_j)`; `terms = (A₀, E₁, …, E_j)`.
pub fn multicomplex_embed(terms: &[ComplexMatrix], h: f64) -> Result<ComplexMatrix> {
    let (a0, es) = terms.split_first().ok_or_else(|| Error::InvalidArgument("embedding needs a base matrix".into()))?;
    a0.ensure_square()?;
    let mut x = a0.clone();
    for (i, e) in es.iter().enumerate() {
        a0.ensure_same_shape(e, "embedding direction")?;
        let off = kron_identity_left(1 << i, &e.scale_real(h))?;
        x = assemble_2x2(&x, &off, &-&off, &x)?;
    }
    Ok(x)
}

/// `(1/h)·[f([[A₀, hE], [−hE, A₀]])]_{1,2}`.
pub fn cs_frechet_1(f: &dyn MatrixFunction, a0: &ComplexMatrix, e1: &ComplexMatrix, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    let x = multicomplex_embed(&[a0.clone(), e1.clone()], h)?;
    Ok(f.apply(&x)?.block(0, 1, a0.rows()).scale_real(1.0 / h))
}

/// `(1/h²)·[f(Y)]_{1,4}` for the two-level embedding `Y` of `(A₀, E₁, E₂)`.
pub fn cs_frechet_2(
    f: &dyn MatrixFunction,
    a0: &ComplexMatrix,
    e1: &ComplexMatrix,
    e2: &ComplexMatrix,
    h: f64,
) -> Result<ComplexMatrix> {
    check_step(h)?;
    underflow_guard(h, a0);
    let y = multicomplex_embed(&[a0.clone(), e1.clone(), e2.clone()], h)?;
    Ok(f.apply(&y)?.block(0, 3, a0.rows()).scale_real(1.0 / (h * h)))
}

/// Base, first-direction, second-direction and mixed terms of a
/// second-order request.
fn second_order_terms(
    jet: &PathJet,
    alpha: &MultiIndex,
) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let dirs = alpha.to_dirs();
    if dirs.is_empty() {
        return Err(Error::EmptyIndex);
    }
    if dirs.len() != 2 {
        return Err(Error::InvalidArgument(format!("second-order scheme needs |α| = 2, got {alpha}")));
    }
    if jet.order() < 2 {
        return Err(Error::OrderExceeded { requested: 2, available: jet.order() });
    }
    let nv = jet.nvars();
    let beta = jet.get_or_zero(&MultiIndex::unit(nv, dirs[0]))?;
    let gamma = jet.get_or_zero(&MultiIndex::unit(nv, dirs[1]))?;
    let mixed = jet.get_or_zero(alpha)?;
    Ok((jet.base().clone(), beta, gamma, mixed))
}

fn grid4(rows: [[Option<ComplexMatrix>; 4]; 4]) -> Vec<Vec<Option<ComplexMatrix>>> {
    rows.into_iter().map(|r| r.into_iter().collect()).collect()
}

/// `(1/h²)·[f(X)]_{1,4}` with `X` the bicomplex embedding of
/// `A + i₁hA_β + i₂hA_γ + i₁i₂h²A_α`.
pub fn cs_partial_2(f: &dyn MatrixFunction, jet: &PathJet, alpha: &MultiIndex, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    let (a, ab, ag, aa) = second_order_terms(jet, alpha)?;
    underflow_guard(h, &a);
    let h2 = h * h;
    let (hb, hg, ha) = (ab.scale_real(h), ag.scale_real(h), aa.scale_real(h2));
    let (nb, ng, na) = (-&hb, -&hg, -&ha);
    let x = assemble_grid(
        &grid4([
            [Some(a.clone()), Some(hb.clone()), Some(hg.clone()), Some(ha.clone())],
            [Some(nb.clone()), Some(a.clone()), Some(na.clone()), Some(hg.clone())],
            [Some(ng.clone()), Some(na), Some(a.clone()), Some(hb)],
            [Some(ha), Some(ng), Some(nb), Some(a.clone())],
        ]),
        a.rows(),
    )?;
    Ok(f.apply(&x)?.block(0, 3, a.rows()).scale_real(1.0 / h2))
}

/// `(1/h)·[f(X)]_{1,4}` with `X` mixing one block triangular level (first
/// direction) and one complex-step level (second direction).
pub fn hybrid_partial_2(f: &dyn MatrixFunction, jet: &PathJet, alpha: &MultiIndex, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    let (a, ab, ag, aa) = second_order_terms(jet, alpha)?;
    let (hg, ha) = (ag.scale_real(h), aa.scale_real(h));
    let (ng, na) = (-&hg, -&ha);
    let x = assemble_grid(
        &grid4([
            [Some(a.clone()), Some(ab.clone()), Some(hg.clone()), Some(ha)],
            [None, Some(a.clone()), None, Some(hg)],
            [Some(ng.clone()), Some(na), Some(a.clone()), Some(ab)],
            [None, Some(ng), None, Some(a.clone())],
        ]),
        a.rows(),
    )?;
    Ok(f.apply(&x)?.block(0, 3, a.rows()).scale_real(1.0 / h))
}

/// `(f(A + hE) − f(A − hE)) / (2h)`.
pub fn central_fd_1(f: &dyn MatrixFunction, a: &ComplexMatrix, e: &ComplexMatrix, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    a.ensure_same_shape(e, "direction")?;
    let he = e.scale_real(h);
    let plus = f.apply(&(a + &he))?;
    let minus = f.apply(&(a - &he))?;
    Ok((&plus - &minus).scale_real(0.5 / h))
}

/// Four-point mixed stencil on the surrogate path
/// `A + xA_β + yA_γ + xyA_α`, divided by `4h²`.
pub fn central_fd_2_mixed(f: &dyn MatrixFunction, jet: &PathJet, alpha: &MultiIndex, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    let (a, ab, ag, aa) = second_order_terms(jet, alpha)?;
    let (hb, hg, ha) = (ab.scale_real(h), ag.scale_real(h), aa.scale_real(h * h));
    let eval = |sb: f64, sg: f64| -> Result<ComplexMatrix> {
        let mut x = a.clone();
        x += &hb.scale_real(sb);
        x += &hg.scale_real(sg);
        x += &ha.scale_real(sb * sg);
        f.apply(&x)
    };
    let mut acc = eval(1.0, 1.0)?;
    acc -= &eval(1.0, -1.0)?;
    acc -= &eval(-1.0, 1.0)?;
    acc += &eval(-1.0, -1.0)?;
    Ok(acc.scale_real(0.25 / (h * h)))
}

/// `Im f(A + ihE) / h` for real `A`, `E`.
pub fn regular_cs_1(f: &dyn MatrixFunction, a: &ComplexMatrix, e: &ComplexMatrix, h: f64) -> Result<ComplexMatrix> {
    let max_imag = a.max_abs_imag().max(e.max_abs_imag());
    if max_imag > REAL_TOL {
        return Err(Error::NotReal { max_imag });
    }
    regular_cs_1_unchecked(f, a, e, h)
}

/// [`regular_cs_1`] without the real-input check; on complex input the
/// result is meaningless, which is what the comparison experiments show.
pub fn regular_cs_1_unchecked(
    f: &dyn MatrixFunction,
    a: &ComplexMatrix,
    e: &ComplexMatrix,
    h: f64,
) -> Result<ComplexMatrix> {
    check_step(h)?;
    a.ensure_same_shape(e, "direction")?;
    let x = a + &e.scale(C64::new(0.0, h));
    Ok(f.apply(&x)?.imag_part().scale_real(1.0 / h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    RegularCs,
    BlockCs,
    Hybrid,
    CentralFd,
    BlocktriExact,
}

impl StepKind {
    pub fn name(&self) -> &'static str {
        match self {
            StepKind::RegularCs => "regular_cs",
            StepKind::BlockCs => "block_cs",
            StepKind::Hybrid => "hybrid",
            StepKind::CentralFd => "central_fd",
            StepKind::BlocktriExact => "blocktri",
        }
    }
}

/// A derivative scheme with its step (ignored by the exact route).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepScheme {
    pub kind: StepKind,
    pub h: f64,
}

impl StepScheme {
    pub fn new(kind: StepKind, h: f64) -> Result<Self> {
        if kind != StepKind::BlocktriExact {
            check_step(h)?;
        }
        Ok(Self { kind, h })
    }

    /// `L_f(A, E)` by this scheme.
    pub fn first_order(&self, f: &dyn MatrixFunction, a: &ComplexMatrix, e: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self.kind {
            StepKind::RegularCs => regular_cs_1(f, a, e, self.h),
            StepKind::BlockCs => cs_frechet_1(f, a, e, self.h),
            StepKind::CentralFd => central_fd_1(f, a, e, self.h),
            StepKind::BlocktriExact => frechet_via_blocktri(f, a, std::slice::from_ref(e)),
            StepKind::Hybrid => Err(Error::InvalidArgument("hybrid scheme is second order only".into())),
        }
    }

    /// `∂^α f(A(x))` with `|α| = 2` by this scheme.
    pub fn second_order(&self, f: &dyn MatrixFunction, jet: &PathJet, alpha: &MultiIndex) -> Result<ComplexMatrix> {
        match self.kind {
            StepKind::BlockCs => cs_partial_2(f, jet, alpha, self.h),
            StepKind::Hybrid => hybrid_partial_2(f, jet, alpha, self.h),
            StepKind::CentralFd => central_fd_2_mixed(f, jet, alpha, self.h),
            StepKind::BlocktriExact => partial_via_blocktri(f, jet, &DerivativeRequest::Alpha(alpha.clone())),
            StepKind::RegularCs => Err(Error::InvalidArgument("regular complex step is first order only".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::StemFunction;

    fn s(re: f64, im: f64) -> ComplexMatrix {
        ComplexMatrix::scalar(C64::new(re, im))
    }

    fn mi(c: &[u32]) -> MultiIndex {
        MultiIndex::new(c.to_vec())
    }

    fn sample(n: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            C64::new((seed * (1 + i + 3 * j) as f64).sin() * 0.5, (seed + (i * j) as f64).cos() * 0.3)
        })
    }

    #[test]
    fn embedding_one_level() {
        let (a, e) = (sample(2, 0.3), sample(2, 0.8));
        let x = multicomplex_embed(&[a.clone(), e.clone()], 0.5).unwrap();
        let he = e.scale_real(0.5);
        assert_eq!(x, assemble_2x2(&a, &he, &-&he, &a).unwrap());
    }

    #[test]
    fn embedding_zero_directions_is_block_diagonal() {
        let a = sample(2, 0.3);
        let z = ComplexMatrix::zeros(2, 2);
        let x = multicomplex_embed(&[a.clone(), z.clone(), z], 1e-3).unwrap();
        assert_eq!(x, kron_identity_left(4, &a).unwrap());
    }

    #[test]
    fn scalar_cos_first_order() {
        let d = cs_frechet_1(&StemFunction::Cos, &s(1.0, 0.0), &s(1.0, 0.0), 1e-8).unwrap();
        assert!((d[(0, 0)].re + 1f64.sin()).abs() <= 1e-13 * 1f64.sin());
        let z = cs_frechet_1(&StemFunction::Cos, &sample(3, 0.2), &ComplexMatrix::zeros(3, 3), 1e-8).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn quadratic_second_order_forms() {
        let (a, e1, e2) = (sample(3, 0.1), sample(3, 0.4), sample(3, 0.7));
        let l2 = cs_frechet_2(&StemFunction::Power(2), &a, &e1, &e2, 1e-4).unwrap();
        let expected = &(&e1 * &e2) + &(&e2 * &e1);
        assert!((&l2 - &expected).max_abs() < 1e-6);
    }

    #[test]
    fn sign_pattern_golden_scalar() {
        // f = x²: ∂xy (a + x b + y c + xy m)² = 2am + 2bc at the origin
        let (a, b, c, m) = (s(0.3, 0.1), s(-0.7, 0.2), s(0.4, -0.5), s(1.1, 0.6));
        let jet = PathJet::new(a.clone(), 2, 2)
            .unwrap()
            .with_term(mi(&[1, 0]), b.clone())
            .unwrap()
            .with_term(mi(&[0, 1]), c.clone())
            .unwrap()
            .with_term(mi(&[1, 1]), m.clone())
            .unwrap();
        let exact = (a[(0, 0)] * m[(0, 0)] + b[(0, 0)] * c[(0, 0)]) * 2.0;
        let f = StemFunction::Power(2);
        for (name, v) in [
            ("cs", cs_partial_2(&f, &jet, &mi(&[1, 1]), 1e-3).unwrap()),
            ("hybrid", hybrid_partial_2(&f, &jet, &mi(&[1, 1]), 1e-3).unwrap()),
            ("fd", central_fd_2_mixed(&f, &jet, &mi(&[1, 1]), 1e-3).unwrap()),
        ] {
            assert!((v[(0, 0)] - exact).norm() < 1e-5, "{name}: {} vs {exact}", v[(0, 0)]);
        }
    }

    #[test]
    fn central_fd_exact_cases() {
        let (a, e) = (sample(3, 0.2), sample(3, 0.9));
        assert!(central_fd_1(&StemFunction::Identity, &a, &e, 1e-3).unwrap().rel_diff(&e) < 1e-12);
        let expected = &(&a * &e) + &(&e * &a);
        assert!(central_fd_1(&StemFunction::Power(2), &a, &e, 0.5).unwrap().rel_diff(&expected) < 1e-14);
    }

    #[test]
    fn regular_cs_requires_real_input() {
        let a = ComplexMatrix::from_real_rows(&[&[0.2, 0.5], &[-0.1, 0.3]]);
        let e = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.4, -0.2]]);
        let l = regular_cs_1(&StemFunction::Power(2), &a, &e, 1e-3).unwrap();
        assert!(l.rel_diff(&(&(&a * &e) + &(&e * &a))) < 1e-14);
        assert!(matches!(regular_cs_1(&StemFunction::Cos, &sample(2, 0.3), &e, 1e-8), Err(Error::NotReal { .. })));
    }

    #[test]
    fn scheme_validation() {
        assert!(StepScheme::new(StepKind::BlockCs, 0.0).is_err());
        assert!(StepScheme::new(StepKind::BlocktriExact, 0.0).is_ok());
        let sch = StepScheme::new(StepKind::Hybrid, 1e-3).unwrap();
        assert!(sch.first_order(&StemFunction::Exp, &s(1.0, 0.0), &s(1.0, 0.0)).is_err());
    }
}
