use matderiv::{ComplexMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded generator used by every experiment.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform range for each real and imaginary component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryRange {
    /// `[−0.5, 0.5]`
    Centered,
    /// `[0, 1]`
    Unit,
}

impl EntryRange {
    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            EntryRange::Centered => rng.random_range(-0.5..=0.5),
            EntryRange::Unit => rng.random_range(0.0..=1.0),
        }
    }
}

pub fn complex_matrix(rng: &mut ChaCha8Rng, n: usize, range: EntryRange) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        let re = range.sample(rng);
        C64::new(re, range.sample(rng))
    })
}

pub fn hermitian_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = complex_matrix(rng, n, EntryRange::Centered);
    (&m + &m.adjoint()).scale_real(0.5)
}
