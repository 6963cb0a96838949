#![allow(dead_code)]

use matderiv::{ComplexMatrix, MultiIndex, PathJet, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)))
}

pub fn random_real(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-0.5..0.5), 0.0))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = random_complex(rng, n);
    (&m + &m.adjoint()).scale_real(0.5)
}

pub fn mi(c: &[u32]) -> MultiIndex {
    MultiIndex::new(c.to_vec())
}

/// Complete jet over every `β ≤ top`, filled by `gen`.
pub fn full_jet(
    rng: &mut ChaCha8Rng,
    n: usize,
    top: &MultiIndex,
    mut gen: impl FnMut(&mut ChaCha8Rng, usize) -> ComplexMatrix,
) -> PathJet {
    let base = gen(rng, n);
    let mut jet = PathJet::new(base, top.nvars(), top.order()).unwrap();
    for beta in top.lower_set() {
        if !beta.is_zero() {
            jet.insert(beta, gen(rng, n)).unwrap();
        }
    }
    jet
}

/// Evaluates the Taylor polynomial `Σ_β A^(β) x^β / β!` of a jet.
pub fn taylor_point(jet: &PathJet, x: &[f64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(jet.base_dim(), jet.base_dim());
    for (beta, m) in jet.terms() {
        let mut w = 1.0;
        for (&b, &xi) in beta.components().iter().zip(x) {
            let fact: f64 = (1..=b).map(|k| k as f64).product();
            w *= xi.powi(b as i32) / fact;
        }
        out += &m.scale_real(w);
    }
    out
}
