//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants, and the cosine and sine built on it.
//!
//! The Padé degree is chosen from {3, 5, 7, 9, 13} by comparing the 1-norm
//! against the backward-error thresholds θ_m for double precision; above θ₁₃
//! the argument is scaled by 2⁻ˢ and the result squared `s` times.

use crate::error::{Error, Result};
use crate::lu::solve;
use crate::matrix::{ComplexMatrix, C64};

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17_297_280.0, 8_648_640.0, 1_995_840.0, 277_200.0, 25_200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Degree of the Padé approximant and number of squarings used for `a`.
pub fn expm_parameters(a: &ComplexMatrix) -> (usize, u32) {
    let norm = a.one_norm();
    for (theta, m) in [(THETA_3, 3), (THETA_5, 5), (THETA_7, 7), (THETA_9, 9)] {
        if norm <= theta {
            return (m, 0);
        }
    }
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil().max(0.0) as u32 } else { 0 };
    (13, s)
}

pub fn matrix_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix_exp input"));
    }
    let (m, s) = expm_parameters(a);
    let scaled;
    let arg = if s > 0 {
        scaled = a.scale_real(0.5f64.powi(s as i32));
        &scaled
    } else {
        a
    };
    let (u, v) = match m {
        3 => pade_low(arg, &B3),
        5 => pade_low(arg, &B5),
        7 => pade_low(arg, &B7),
        9 => pade_low(arg, &B9),
        _ => pade13(arg),
    };
    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::NonFinite("matrix_exp"));
    }
    Ok(r)
}

/// Odd/even split `(U, V)` of the degree-m Padé numerator for m ≤ 9.
fn pade_low(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let a2 = a * a;
    let mut u = ComplexMatrix::identity(n).scale_real(b[1]);
    let mut v = ComplexMatrix::identity(n).scale_real(b[0]);
    let mut power = ComplexMatrix::identity(n);
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        u += &power.scale_real(b[2 * k + 1]);
        v += &power.scale_real(b[2 * k]);
    }
    (a * &u, v)
}

fn pade13(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let b = &B13;
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &(&a6.scale_real(b[13]) + &a4.scale_real(b[11])) + &a2.scale_real(b[9]);
    let u_tail = &(&(&a6.scale_real(b[7]) + &a4.scale_real(b[5])) + &a2.scale_real(b[3])) + &id.scale_real(b[1]);
    let u = a * &(&(&a6 * &inner_u) + &u_tail);
    let inner_v = &(&a6.scale_real(b[12]) + &a4.scale_real(b[10])) + &a2.scale_real(b[8]);
    let v_tail = &(&(&a6.scale_real(b[6]) + &a4.scale_real(b[4])) + &a2.scale_real(b[2])) + &id.scale_real(b[0]);
    let v = &(&a6 * &inner_v) + &v_tail;
    (u, v)
}

/// `cos(A) = (e^{iA} + e^{−iA}) / 2`.
pub fn matrix_cos(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let i = C64::new(0.0, 1.0);
    let ep = matrix_exp(&a.scale(i))?;
    let em = matrix_exp(&a.scale(-i))?;
    Ok((&ep + &em).scale_real(0.5))
}

/// `sin(A) = (e^{iA} − e^{−iA}) / 2i`.
pub fn matrix_sin(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let i = C64::new(0.0, 1.0);
    let ep = matrix_exp(&a.scale(i))?;
    let em = matrix_exp(&a.scale(-i))?;
    Ok((&ep - &em).scale(C64::new(0.0, -0.5)))
}
