//! Response of the density matrix `P = θ(μ − H)` of a Hermitian operator.
//!
//! With `H = QΛQᴴ` and a gap around the chemical potential `μ`, the
//! derivatives of `P(H(x))` follow from closed-form divided differences of
//! the step function. Occupied (`λ < μ`) and virtual (`λ > μ`) blocks are
//! handled with masks in the eigenbasis.
//!
//! Eigenvector corrections use the derivative convention: `q^(2)` is the
//! second derivative of `P(ε)q₁`, twice the perturbation-series coefficient.

use crate::eig::{hermitian_eig, SpectralDecomp};
use crate::error::{Error, Result};
use crate::function::{spectral_apply, ScalarFunction};
use crate::matrix::{ComplexMatrix, C64, ZERO};

pub const DEFAULT_GAP_MIN: f64 = 1e-8;

/// `f(x) = 1` for `x < μ`, `0` otherwise. Derivatives vanish away from `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFunction {
    pub mu: f64,
}

impl ScalarFunction for StepFunction {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(if z.re < self.mu { C64::new(1.0, 0.0) } else { ZERO })
    }

    fn deriv(&self, z: C64, order: usize) -> Result<C64> {
        if order == 0 {
            self.eval(z)
        } else {
            Ok(ZERO)
        }
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }
}

/// Position of `μ` in a sorted spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChemicalPotentialSplit {
    pub mu: f64,
    pub n_occ: usize,
    /// `λ_{n_occ} − λ_{n_occ−1}` (0-based), infinite if either side is empty.
    pub gap: f64,
}

impl ChemicalPotentialSplit {
    pub fn new(lambda: &[f64], mu: f64, gap_min: f64) -> Result<Self> {
        for &l in lambda {
            check_away(l, mu, gap_min)?;
        }
        let n_occ = lambda.iter().filter(|&&l| l < mu).count();
        let gap = if n_occ == 0 || n_occ == lambda.len() { f64::INFINITY } else { lambda[n_occ] - lambda[n_occ - 1] };
        Ok(Self { mu, n_occ, gap })
    }

    /// `μ` halfway between `λ_{n_occ−1}` and `λ_{n_occ}`.
    pub fn mid_gap(lambda: &[f64], n_occ: usize) -> Result<Self> {
        if n_occ == 0 || n_occ >= lambda.len() {
            return Err(Error::InvalidArgument(format!("occupation {n_occ} outside 1..{}", lambda.len())));
        }
        Self::new(lambda, 0.5 * (lambda[n_occ - 1] + lambda[n_occ]), DEFAULT_GAP_MIN)
    }
}

fn check_away(lambda: f64, mu: f64, gap_min: f64) -> Result<()> {
    if (lambda - mu).abs() <= 0.5 * gap_min {
        return Err(Error::TooCloseToMu { eigenvalue: lambda, mu, gap_min });
    }
    Ok(())
}

/// `θ[λᵢ, λⱼ]`: `−1/|λᵢ − λⱼ|` across `μ`, zero on the same side.
pub fn step_divdiff_1(li: f64, lj: f64, mu: f64) -> Result<f64> {
    check_away(li, mu, DEFAULT_GAP_MIN)?;
    check_away(lj, mu, DEFAULT_GAP_MIN)?;
    Ok(if (li < mu) != (lj < mu) { -1.0 / (li - lj).abs() } else { 0.0 })
}

/// `θ[λᵢ, λⱼ, λₖ]`, symmetric in its arguments.
pub fn step_divdiff_2(li: f64, lj: f64, lk: f64, mu: f64) -> Result<f64> {
    let xs = [li, lj, lk];
    for &x in &xs {
        check_away(x, mu, DEFAULT_GAP_MIN)?;
    }
    let below = xs.iter().filter(|&&x| x < mu).count();
    let odd_one = |want_below: bool| {
        let c = *xs.iter().find(|&&x| (x < mu) == want_below).expect("class is nonempty");
        let others: Vec<f64> = xs.iter().copied().filter(|&x| (x < mu) != want_below).collect();
        1.0 / ((c - others[0]).abs() * (c - others[1]).abs())
    };
    Ok(match below {
        2 => -odd_one(false),
        1 => odd_one(true),
        _ => 0.0,
    })
}

/// Density-matrix derivatives around a fixed Hermitian `H`.
#[derive(Debug, Clone)]
pub struct DensityPerturbation {
    pub decomp: SpectralDecomp,
    pub split: ChemicalPotentialSplit,
    /// `Dᵢⱼ = θ[λᵢ, λⱼ]`.
    pub d: ComplexMatrix,
}

impl DensityPerturbation {
    pub fn new(decomp: SpectralDecomp, mu: f64) -> Result<Self> {
        let split = ChemicalPotentialSplit::new(&decomp.lambda, mu, DEFAULT_GAP_MIN)?;
        let n = decomp.dim();
        let mut d = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                d[(i, j)] = C64::new(step_divdiff_1(decomp.lambda[i], decomp.lambda[j], mu)?, 0.0);
            }
        }
        Ok(Self { decomp, split, d })
    }

    pub fn from_hamiltonian(h: &ComplexMatrix, mu: f64) -> Result<Self> {
        Self::new(hermitian_eig(h)?, mu)
    }

    fn occupied(&self, i: usize) -> bool {
        i < self.split.n_occ
    }

    /// Keeps entries whose row/column classes match (`true` = occupied).
    fn mask(&self, m: &ComplexMatrix, rows_occ: bool, cols_occ: bool) -> ComplexMatrix {
        ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            if self.occupied(i) == rows_occ && self.occupied(j) == cols_occ {
                m[(i, j)]
            } else {
                ZERO
            }
        })
    }

    /// `P = Q diag(θ(μ − λ)) Qᴴ`.
    pub fn projector(&self) -> Result<ComplexMatrix> {
        spectral_apply(&StepFunction { mu: self.split.mu }, &self.decomp)
    }

    /// First-order response in the eigenbasis: `D ∘ U`.
    pub fn first_eigenbasis(&self, u_alpha: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.d.hadamard(u_alpha)
    }

    /// `P^(α) = Q (D ∘ QᴴH^(α)Q) Qᴴ`.
    pub fn first(&self, h_alpha: &ComplexMatrix) -> Result<ComplexMatrix> {
        let u = self.decomp.to_eigenbasis(h_alpha)?;
        self.decomp.from_eigenbasis(&self.first_eigenbasis(&u)?)
    }

    /// Second-order response for `α = β + γ` in the eigenbasis.
    pub fn second_eigenbasis(
        &self,
        ub: &ComplexMatrix,
        ug: &ComplexMatrix,
        ua: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        let vb = self.first_eigenbasis(ub)?;
        let vg = self.first_eigenbasis(ug)?;
        let mut out = self.d.hadamard(ua)?;
        for (u1, v1, u2, v2) in [(ub, &vb, ug, &vg), (ug, &vg, ub, &vb)] {
            let vu = v1.matmul(u2)?;
            let uv = u1.matmul(v2)?;
            let vv = v1.matmul(v2)?;
            let ov = &self.mask(&vu, true, false) - &self.mask(&uv, true, false);
            let vo = &self.mask(&uv, false, true) - &self.mask(&vu, false, true);
            out += &self.d.hadamard(&ov)?;
            out += &self.d.hadamard(&vo)?;
            out += &self.mask(&vv, false, false);
            out -= &self.mask(&vv, true, true);
        }
        Ok(out)
    }

    pub fn second(
        &self,
        h_beta: &ComplexMatrix,
        h_gamma: &ComplexMatrix,
        h_alpha: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        let t = |m: &ComplexMatrix| self.decomp.to_eigenbasis(m);
        let m = self.second_eigenbasis(&t(h_beta)?, &t(h_gamma)?, &t(h_alpha)?)?;
        self.decomp.from_eigenbasis(&m)
    }
}

pub fn density_deriv_1(d: &SpectralDecomp, h_alpha: &ComplexMatrix, mu: f64) -> Result<ComplexMatrix> {
    DensityPerturbation::new(d.clone(), mu)?.first(h_alpha)
}

pub fn density_deriv_2(
    d: &SpectralDecomp,
    h_beta: &ComplexMatrix,
    h_gamma: &ComplexMatrix,
    h_alpha: &ComplexMatrix,
    mu: f64,
) -> Result<ComplexMatrix> {
    DensityPerturbation::new(d.clone(), mu)?.second(h_beta, h_gamma, h_alpha)
}

fn ground_state_gap(d: &SpectralDecomp) -> Result<()> {
    if d.dim() >= 2 {
        let gap = d.lambda[1] - d.lambda[0];
        if gap <= DEFAULT_GAP_MIN {
            return Err(Error::DegenerateGroundState { gap });
        }
    }
    Ok(())
}

fn combine_columns(q: &ComplexMatrix, coeffs: &[C64]) -> Vec<C64> {
    q.matvec(coeffs).expect("coefficient count matches dimension")
}

/// `q^(1) = −Σ_{i≥2} (qᵢᴴH¹q₁ / |λ₁ − λᵢ|) qᵢ`.
pub fn eigvec_correction_1(d: &SpectralDecomp, h1: &ComplexMatrix) -> Result<Vec<C64>> {
    ground_state_gap(d)?;
    let u = d.to_eigenbasis(h1)?;
    let l = &d.lambda;
    let coeffs: Vec<C64> = (0..d.dim()).map(|i| if i == 0 { ZERO } else { -u[(i, 0)] / (l[0] - l[i]).abs() }).collect();
    Ok(combine_columns(&d.q, &coeffs))
}

/// Second derivative of `P(ε)q₁` for `H(ε) = H + εH¹`.
pub fn eigvec_correction_2(d: &SpectralDecomp, h1: &ComplexMatrix) -> Result<Vec<C64>> {
    ground_state_gap(d)?;
    let u = d.to_eigenbasis(h1)?;
    let l = &d.lambda;
    let n = d.dim();
    let mut coeffs = vec![ZERO; n];
    for j in 1..n {
        let dj = (l[0] - l[j]).abs();
        let mut acc = ZERO;
        for i in 1..n {
            acc += u[(j, i)] * u[(i, 0)] / ((l[0] - l[i]).abs() * dj);
        }
        acc -= u[(j, 0)] * u[(0, 0)] / (dj * dj);
        coeffs[j] = acc * 2.0;
    }
    let mut c0 = ZERO;
    for i in 1..n {
        let di = l[0] - l[i];
        c0 += u[(0, i)] * u[(i, 0)] / (di * di);
    }
    coeffs[0] = -c0 * 2.0;
    Ok(combine_columns(&d.q, &coeffs))
}

/// `(4D(ε) − D(2ε)) / 3` for a central difference `D` with an `ε²` error.
fn richardson(coarse: &ComplexMatrix, fine: &ComplexMatrix) -> ComplexMatrix {
    (&fine.scale_real(4.0) - coarse).scale_real(1.0 / 3.0)
}

/// The unperturbed spectrum and the perturbation in its eigenbasis.
///
/// Projector differences are formed without the eigensolver: the occupied
/// subspace of `Λ + εU` is the range of `[I; X]`, with `X` solving the
/// invariant-subspace Riccati equation by fixed-point iteration. Every block
/// of `P(ε) − P(0)` is then assembled from `X`, so its rounding error scales
/// with `ε` instead of with `‖P‖`.
struct EigenFrame {
    d: SpectralDecomp,
    u: ComplexMatrix,
    n_occ: usize,
}

const RICCATI_MAX_ITER: usize = 200;

impl EigenFrame {
    fn new(h: &ComplexMatrix, h1: &ComplexMatrix, mu: Option<f64>) -> Result<Self> {
        let d = hermitian_eig(h)?;
        let u = d.to_eigenbasis(h1)?;
        let u = (&u + &u.adjoint()).scale_real(0.5);
        let n_occ = match mu {
            Some(mu) => ChemicalPotentialSplit::new(&d.lambda, mu, DEFAULT_GAP_MIN)?.n_occ,
            None => {
                ground_state_gap(&d)?;
                1
            }
        };
        Ok(Self { d, u, n_occ })
    }

    /// `X` with `range([I; X])` the occupied subspace of `Λ + εU`.
    fn riccati(&self, eps: f64) -> Result<ComplexMatrix> {
        let (no, n) = (self.n_occ, self.d.dim());
        let nv = n - no;
        let lam = &self.d.lambda;
        let eu = self.u.scale_real(eps);
        let b = eu.submatrix(no, 0, nv, no);
        let uoo = eu.submatrix(0, 0, no, no);
        let uvv = eu.submatrix(no, no, nv, nv);
        let bh = b.adjoint();
        let mut x = ComplexMatrix::zeros(nv, no);
        let mut last_change = f64::INFINITY;
        for _ in 0..RICCATI_MAX_ITER {
            // X Λo − Λv X = B − X Bᴴ X − X Uoo + Uvv X
            let rhs = &(&(&b - &(&(&x * &bh) * &x)) - &(&x * &uoo)) + &(&uvv * &x);
            let next = ComplexMatrix::from_fn(nv, no, |i, j| rhs[(i, j)] / (lam[j] - lam[no + i]));
            let change = (&next - &x).frobenius_norm();
            x = next;
            // contraction stalls once the update reaches rounding level
            if change <= f64::EPSILON * x.frobenius_norm() || change >= last_change {
                return Ok(x);
            }
            last_change = change;
        }
        Err(Error::NoConvergence { sweeps: RICCATI_MAX_ITER })
    }

    /// `Qᴴ (P(H + εH¹) − P(H)) Q`.
    fn projector_shift(&self, eps: f64) -> Result<ComplexMatrix> {
        let (no, n) = (self.n_occ, self.d.dim());
        let x = self.riccati(eps)?;
        let xhx = &x.adjoint() * &x;
        let nrm = crate::lu::solve(&(&ComplexMatrix::identity(no) + &xhx), &ComplexMatrix::identity(no))?;
        // N − I = −XᴴX·N
        let oo = -&(&xhx * &nrm);
        let vo = &x * &nrm;
        let vv = &vo * &x.adjoint();
        let mut out = ComplexMatrix::zeros(n, n);
        out.set_submatrix(0, 0, &oo);
        out.set_submatrix(no, 0, &vo);
        out.set_submatrix(0, no, &vo.adjoint());
        out.set_submatrix(no, no, &vv);
        Ok(out)
    }

    fn first(&self, eps: f64) -> Result<ComplexMatrix> {
        Ok((&self.projector_shift(eps)? - &self.projector_shift(-eps)?).scale_real(0.5 / eps))
    }

    fn second(&self, eps: f64) -> Result<ComplexMatrix> {
        let mut acc = self.projector_shift(eps)?;
        acc += &self.projector_shift(-eps)?;
        Ok(acc.scale_real(1.0 / (eps * eps)))
    }
}

/// Richardson-extrapolated central difference of `P(H + εH¹)` at `ε = 0`.
pub fn density_fd_1(h: &ComplexMatrix, h1: &ComplexMatrix, mu: f64, eps: f64) -> Result<ComplexMatrix> {
    let frame = EigenFrame::new(h, h1, Some(mu))?;
    frame.d.from_eigenbasis(&richardson(&frame.first(2.0 * eps)?, &frame.first(eps)?))
}

/// Richardson-extrapolated second central difference of `P(H + εH¹)`.
pub fn density_fd_2(h: &ComplexMatrix, h1: &ComplexMatrix, mu: f64, eps: f64) -> Result<ComplexMatrix> {
    let frame = EigenFrame::new(h, h1, Some(mu))?;
    frame.d.from_eigenbasis(&richardson(&frame.second(2.0 * eps)?, &frame.second(eps)?))
}

/// Finite-difference oracles for `q^(1)` and `q^(2)`, from `P(ε)q₁` with
/// `P(ε)` the ground-state projector of `H + εH¹`. The projector is
/// phase-free, so no gauge fixing of eigenvectors is needed.
pub fn ground_state_fd(h: &ComplexMatrix, h1: &ComplexMatrix, eps: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    let frame = EigenFrame::new(h, h1, None)?;
    // q₁ is the first unit vector in the eigenbasis
    let pick = |m: ComplexMatrix| -> Result<Vec<C64>> { frame.d.q.matvec(&m.column(0)) };
    let d1 = pick(richardson(&frame.first(2.0 * eps)?, &frame.first(eps)?))?;
    let d2 = pick(richardson(&frame.second(2.0 * eps)?, &frame.second(eps)?))?;
    Ok((d1, d2))
}
