//! Scalar stem functions and the matrix-function backends built from them.
//!
//! Regularity of `f` on the spectrum (enough continuous derivatives for the
//! Jordan structure of the block matrices involved) is a caller obligation;
//! nothing here can verify it.

use std::fmt;

use crate::eig::{hermitian_eig, SpectralDecomp};
use crate::error::{Error, Result};
use crate::expm::{matrix_cos, matrix_exp, matrix_sin};
use crate::matrix::{ComplexMatrix, C64};

/// A scalar function with derivatives, used by divided differences and
/// spectral evaluation. `deriv(z, 0)` must equal `eval(z)`.
pub trait ScalarFunction {
    fn eval(&self, z: C64) -> Result<C64>;

    fn deriv(&self, z: C64, order: usize) -> Result<C64>;

    /// Highest derivative order `deriv` can supply.
    fn max_order(&self) -> usize;
}

/// Evaluates `f(A)` for square complex `A`.
pub trait MatrixFunction {
    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix>;
}

impl<F> MatrixFunction for F
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self(a)
    }
}

/// The analytic stem functions the library knows how to evaluate on
/// arbitrary square matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StemFunction {
    Identity,
    Exp,
    /// Evaluated as `(e^{iA} + e^{−iA}) / 2`.
    Cos,
    Sin,
    /// `x^p`, evaluated by repeated multiplication.
    Power(u32),
}

impl StemFunction {
    pub fn name(&self) -> String {
        match self {
            StemFunction::Identity => "identity".into(),
            StemFunction::Exp => "exp".into(),
            StemFunction::Cos => "cos".into(),
            StemFunction::Sin => "sin".into(),
            StemFunction::Power(p) => format!("x^{p}"),
        }
    }

    /// Parses `identity`, `exp`, `cos`, `sin`, `x^p`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" | "id" | "x" => Ok(StemFunction::Identity),
            "exp" => Ok(StemFunction::Exp),
            "cos" => Ok(StemFunction::Cos),
            "sin" => Ok(StemFunction::Sin),
            other => other
                .strip_prefix("x^")
                .and_then(|p| p.parse::<u32>().ok())
                .map(StemFunction::Power)
                .ok_or_else(|| Error::Parse(format!("unknown function '{other}'"))),
        }
    }
}

impl fmt::Display for StemFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl ScalarFunction for StemFunction {
    fn eval(&self, z: C64) -> Result<C64> {
        self.deriv(z, 0)
    }

    fn deriv(&self, z: C64, order: usize) -> Result<C64> {
        let one = C64::new(1.0, 0.0);
        Ok(match *self {
            StemFunction::Identity => match order {
                0 => z,
                1 => one,
                _ => C64::new(0.0, 0.0),
            },
            StemFunction::Exp => z.exp(),
            StemFunction::Cos => match order % 4 {
                0 => z.cos(),
                1 => -z.sin(),
                2 => -z.cos(),
                _ => z.sin(),
            },
            StemFunction::Sin => match order % 4 {
                0 => z.sin(),
                1 => z.cos(),
                2 => -z.sin(),
                _ => -z.cos(),
            },
            StemFunction::Power(p) => {
                let p = p as usize;
                if order > p {
                    C64::new(0.0, 0.0)
                } else {
                    let falling: f64 = ((p - order + 1)..=p).map(|k| k as f64).product();
                    z.powu((p - order) as u32) * falling
                }
            }
        })
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }
}

impl MatrixFunction for StemFunction {
    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = a.ensure_square()?;
        match *self {
            StemFunction::Identity => Ok(a.clone()),
            StemFunction::Exp => matrix_exp(a),
            StemFunction::Cos => matrix_cos(a),
            StemFunction::Sin => matrix_sin(a),
            StemFunction::Power(p) => {
                let mut result = ComplexMatrix::identity(n);
                let mut base = a.clone();
                let mut e = p;
                while e > 0 {
                    if e & 1 == 1 {
                        result = &result * &base;
                    }
                    e >>= 1;
                    if e > 0 {
                        base = &base * &base;
                    }
                }
                Ok(result)
            }
        }
    }
}

/// `Q · diag(f(λᵢ)) · Qᴴ`.
pub fn spectral_apply(f: &dyn ScalarFunction, d: &SpectralDecomp) -> Result<ComplexMatrix> {
    let values = d.lambda.iter().map(|&l| f.eval(C64::new(l, 0.0))).collect::<Result<Vec<_>>>()?;
    d.from_eigenbasis(&ComplexMatrix::from_diagonal(&values))
}

/// Matrix-function backend that diagonalizes its (Hermitian) argument.
#[derive(Debug, Clone)]
pub struct Spectral<F>(pub F);

impl<F: ScalarFunction> MatrixFunction for Spectral<F> {
    fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        spectral_apply(&self.0, &hermitian_eig(a)?)
    }
}
