mod common;

use common::{full_jet, mi, random_complex, random_hermitian, rng, taylor_point};
use matderiv::blocktri::{block_graph, frechet_block_matrix};
use matderiv::divdiff::dk_partial;
use matderiv::{
    build_xk, frechet_via_blocktri, graph_recursion, longest_path, partial_via_blocktri, partial_via_frechet_sum,
    ComplexMatrix, DerivativeRequest, MatrixFunction, MultiIndex, PathJet, StemFunction,
};
use proptest::prelude::*;

fn richardson(coarse: &ComplexMatrix, fine: &ComplexMatrix) -> ComplexMatrix {
    (&fine.scale_real(4.0) - coarse).scale_real(1.0 / 3.0)
}

/// Finite-difference oracle for `|α| ≤ 2` on the Taylor polynomial of the jet.
fn fd_oracle(f: &dyn MatrixFunction, jet: &PathJet, alpha: &MultiIndex, h: f64) -> ComplexMatrix {
    let nv = jet.nvars();
    let g = |x: Vec<f64>| f.apply(&taylor_point(jet, &x)).unwrap();
    let point = |pairs: &[(usize, f64)]| {
        let mut x = vec![0.0; nv];
        for &(v, t) in pairs {
            x[v] += t;
        }
        x
    };
    let dirs = alpha.to_dirs();
    let stencil = |h: f64| -> ComplexMatrix {
        match dirs.as_slice() {
            [v] => (&g(point(&[(*v, h)])) - &g(point(&[(*v, -h)]))).scale_real(0.5 / h),
            [v, w] if v == w => {
                let mut acc = g(point(&[(*v, h)]));
                acc += &g(point(&[(*v, -h)]));
                acc -= &g(point(&[])).scale_real(2.0);
                acc.scale_real(1.0 / (h * h))
            }
            [v, w] => {
                let mut acc = g(point(&[(*v, h), (*w, h)]));
                acc -= &g(point(&[(*v, h), (*w, -h)]));
                acc -= &g(point(&[(*v, -h), (*w, h)]));
                acc += &g(point(&[(*v, -h), (*w, -h)]));
                acc.scale_real(0.25 / (h * h))
            }
            _ => unreachable!(),
        }
    };
    richardson(&stencil(h), &stencil(0.5 * h))
}

#[test]
fn blocktri_matches_fd_oracle() {
    let mut r = rng(11);
    for f in [StemFunction::Exp, StemFunction::Cos] {
        for alpha in [mi(&[1, 0]), mi(&[0, 1]), mi(&[1, 1]), mi(&[2, 0])] {
            let jet = full_jet(&mut r, 3, &mi(&[2, 2]), random_complex);
            let exact = partial_via_blocktri(&f, &jet, &alpha.clone().into()).unwrap();
            let fd = fd_oracle(&f, &jet, &alpha, 1e-3);
            assert!(exact.rel_diff(&fd) < 1e-8, "{f} {alpha}: {}", exact.rel_diff(&fd));
        }
    }
}

#[test]
fn scalar_chain_rule_third_order() {
    // exp(a(x)) with a(x) = a0 + a1 x + a2 x²/2 + a3 x³/6: third derivative is
    // exp(a0)(a1³ + 3a1a2 + a3)
    let (a0, a1, a2, a3) = (0.3, -0.7, 0.4, 1.1);
    let s = |v: f64| ComplexMatrix::scalar(matderiv::C64::new(v, 0.0));
    let jet = PathJet::new(s(a0), 1, 3)
        .unwrap()
        .with_term(mi(&[1]), s(a1))
        .unwrap()
        .with_term(mi(&[2]), s(a2))
        .unwrap()
        .with_term(mi(&[3]), s(a3))
        .unwrap();
    let expected = a0.exp() * (a1 * a1 * a1 + 3.0 * a1 * a2 + a3);
    for got in [
        partial_via_blocktri(&StemFunction::Exp, &jet, &mi(&[3]).into()).unwrap(),
        partial_via_frechet_sum(&StemFunction::Exp, &jet, &mi(&[3])).unwrap(),
        dk_partial(&StemFunction::Exp, &jet, &mi(&[3])).unwrap(),
    ] {
        assert!((got[(0, 0)].re - expected).abs() < 1e-14, "{} vs {expected}", got[(0, 0)]);
    }
}

#[test]
fn frechet_sum_matches_blocktri_up_to_third_order() {
    let mut r = rng(12);
    for alpha in [mi(&[1, 1]), mi(&[2, 0]), mi(&[2, 1]), mi(&[1, 1, 1]), mi(&[0, 3])] {
        let jet = full_jet(&mut r, 3, &alpha, random_complex);
        let a = partial_via_blocktri(&StemFunction::Cos, &jet, &alpha.clone().into()).unwrap();
        let b = partial_via_frechet_sum(&StemFunction::Cos, &jet, &alpha).unwrap();
        assert!(a.rel_diff(&b) < 1e-12, "{alpha}: {}", a.rel_diff(&b));
    }
}

#[test]
fn direction_order_is_irrelevant() {
    let mut r = rng(13);
    let jet = full_jet(&mut r, 2, &mi(&[2, 1]), random_complex);
    let a = partial_via_blocktri(&StemFunction::Exp, &jet, &DerivativeRequest::Dirs(vec![0, 0, 1])).unwrap();
    for dirs in [vec![0, 1, 0], vec![1, 0, 0]] {
        let b = partial_via_blocktri(&StemFunction::Exp, &jet, &DerivativeRequest::Dirs(dirs)).unwrap();
        assert!(a.rel_diff(&b) < 1e-12);
    }
}

#[test]
fn truncated_jet_terms_do_not_matter() {
    // terms not dominated by α never enter X_k
    let mut r = rng(14);
    let jet = full_jet(&mut r, 3, &mi(&[1, 1]), random_complex);
    let mut ext = PathJet::new(jet.base().clone(), 2, 3).unwrap();
    for (beta, m) in jet.terms() {
        ext.insert(beta.clone(), m.clone()).unwrap();
    }
    ext.insert(mi(&[2, 0]), random_complex(&mut r, 3)).unwrap();
    ext.insert(mi(&[0, 2]), random_complex(&mut r, 3)).unwrap();
    let a = partial_via_blocktri(&StemFunction::Exp, &jet, &mi(&[1, 1]).into()).unwrap();
    let b = partial_via_blocktri(&StemFunction::Exp, &ext, &mi(&[1, 1]).into()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dk_matches_blocktri_for_hermitian_jets() {
    let mut r = rng(15);
    for alpha in [mi(&[1, 0]), mi(&[1, 1]), mi(&[2, 0]), mi(&[2, 1]), mi(&[1, 1, 1])] {
        for n in [2, 4, 6] {
            let jet = full_jet(&mut r, n, &alpha, random_hermitian);
            let a = partial_via_blocktri(&StemFunction::Exp, &jet, &alpha.clone().into()).unwrap();
            let b = dk_partial(&StemFunction::Exp, &jet, &alpha).unwrap();
            assert!(a.rel_diff(&b) < 1e-10, "{alpha}, n={n}: {}", a.rel_diff(&b));
        }
    }
}

#[test]
fn quadratic_closed_forms() {
    let mut r = rng(16);
    let sq = StemFunction::Power(2);
    for n in 1..6 {
        let (a, e, e2) = (random_complex(&mut r, n), random_complex(&mut r, n), random_complex(&mut r, n));
        let l = frechet_via_blocktri(&sq, &a, std::slice::from_ref(&e)).unwrap();
        assert!(l.rel_diff(&(&(&a * &e) + &(&e * &a))) < 1e-13);
        let l2 = frechet_via_blocktri(&sq, &a, &[e.clone(), e2.clone()]).unwrap();
        assert!(l2.rel_diff(&(&(&e * &e2) + &(&e2 * &e))) < 1e-13);
        let l3 = frechet_via_blocktri(&sq, &a, &[e.clone(), e2.clone(), e]).unwrap();
        assert!(l3.max_abs() < 1e-13);
    }
}

#[test]
fn block_pattern_and_longest_paths() {
    for i in 0..=6 {
        assert_eq!(longest_path(&graph_recursion(i)).unwrap(), i + 1);
    }
    let mut r = rng(17);
    let es: Vec<ComplexMatrix> = (0..3).map(|_| random_complex(&mut r, 2)).collect();
    let x = frechet_block_matrix(&random_complex(&mut r, 2), &es).unwrap();
    let fg = block_graph(&x, 2);
    let g3 = graph_recursion(3);
    assert_eq!(longest_path(&fg).unwrap(), 4);
    assert!(fg.iter().flatten().zip(g3.iter().flatten()).all(|(&a, &b)| !a || b));
    let jet = full_jet(&mut r, 2, &mi(&[1, 1, 1]), random_complex);
    assert_eq!(block_graph(&build_xk(&jet, &[0, 1, 2]).unwrap(), 2), graph_recursion(3));
}

fn small_matrix() -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 9).prop_map(|v| {
        ComplexMatrix::from_vec(3, 3, v.into_iter().map(|(a, b)| matderiv::C64::new(a, b)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frechet_is_linear_in_each_direction(a in small_matrix(), e1 in small_matrix(), e2 in small_matrix(), g in small_matrix(), c in -2.0f64..2.0) {
        let f = StemFunction::Exp;
        let combo = &e1.scale_real(c) + &g;
        let lhs = frechet_via_blocktri(&f, &a, &[combo, e2.clone()]).unwrap();
        let rhs = &frechet_via_blocktri(&f, &a, &[e1.clone(), e2.clone()]).unwrap().scale_real(c)
            + &frechet_via_blocktri(&f, &a, &[g, e2]).unwrap();
        prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-12 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn second_frechet_is_symmetric(a in small_matrix(), e1 in small_matrix(), e2 in small_matrix()) {
        let f = StemFunction::Cos;
        let l12 = frechet_via_blocktri(&f, &a, &[e1.clone(), e2.clone()]).unwrap();
        let l21 = frechet_via_blocktri(&f, &a, &[e2, e1]).unwrap();
        prop_assert!((&l12 - &l21).frobenius_norm() <= 1e-11 * (1.0 + l12.frobenius_norm()));
    }
}
