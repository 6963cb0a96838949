use std::time::Instant;

use log::warn;
use matderiv::cstep::{
    central_fd_1, central_fd_2_mixed, cs_frechet_1, cs_partial_2, hybrid_partial_2, regular_cs_1,
    regular_cs_1_unchecked, StepKind,
};
use matderiv::divdiff::{dk_first_order, dk_second_order};
use matderiv::qperturb::{
    density_fd_1, density_fd_2, eigvec_correction_1, eigvec_correction_2, ground_state_fd, ChemicalPotentialSplit,
    DensityPerturbation, StepFunction,
};
use matderiv::{
    frechet_via_blocktri, partial_via_blocktri, ComplexMatrix, MatrixFunction, MultiIndex, PathJet, StemFunction, C64,
};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::records::{sort_records, ConvergenceRecord};
use crate::sampling::{complex_matrix, hermitian_matrix, seeded, EntryRange};

/// Step used for the Richardson-extrapolated check of the second-order reference.
pub const REFERENCE_CHECK_STEP: f64 = 1e-3;
/// Disagreement above which the second-order run is aborted.
pub const REFERENCE_FAIL: f64 = 1e-6;
/// Disagreement above which a warning is logged.
pub const REFERENCE_WARN: f64 = 1e-9;

/// `‖X̃ − X_ref‖₂ / ‖X_ref‖₂`.
pub fn spectral_rel_error(approx: &ComplexMatrix, reference: &ComplexMatrix) -> f64 {
    let diff = (approx - reference).spectral_norm();
    let scale = reference.spectral_norm();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Least-squares slope of `log err` against `log h` over steps in `[lo, hi]`.
pub fn fitted_order(records: &[ConvergenceRecord], method: &str, lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.method == method && r.h >= lo && r.h <= hi && r.rel_error > 0.0)
        .map(|r| (r.h.ln(), r.rel_error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Smallest error recorded for `method`.
pub fn min_error(records: &[ConvergenceRecord], method: &str) -> Option<f64> {
    records.iter().filter(|r| r.method == method).map(|r| r.rel_error).min_by(f64::total_cmp)
}

pub fn error_at(records: &[ConvergenceRecord], method: &str, h: f64) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.method == method)
        .min_by(|a, b| (a.h.ln() - h.ln()).abs().total_cmp(&(b.h.ln() - h.ln()).abs()))
        .map(|r| r.rel_error)
}

struct Timer {
    deterministic: bool,
}

impl Timer {
    fn run<T>(&self, f: impl FnOnce() -> T) -> (T, f64) {
        let start = Instant::now();
        let out = f();
        let micros = if self.deterministic { 0.0 } else { start.elapsed().as_secs_f64() * 1e6 };
        (out, micros)
    }
}

fn record(h: f64, method: &str, approx: &ComplexMatrix, reference: &ComplexMatrix, micros: f64) -> ConvergenceRecord {
    ConvergenceRecord {
        h,
        method: method.to_string(),
        rel_error: spectral_rel_error(approx, reference),
        runtime_micros: micros,
    }
}

#[derive(Debug, Clone)]
pub struct Fig1Outcome {
    pub records: Vec<ConvergenceRecord>,
    /// Methods whose output is known to be meaningless for this input.
    pub flagged: Vec<String>,
}

/// First-order derivative of the cosine on scalar input, four methods over the step grid.
pub fn run_fig1(cfg: &ExperimentConfig) -> CliResult<Fig1Outcome> {
    cfg.validate()?;
    let complex = match cfg.experiment {
        Experiment::Fig1Real => false,
        Experiment::Fig1Complex => true,
        other => return Err(CliError::Config(format!("{other:?} is not a first-order experiment"))),
    };
    let (a, e) = if complex {
        let mut rng = seeded(cfg.seed);
        let a = complex_matrix(&mut rng, 1, EntryRange::Unit);
        (a, complex_matrix(&mut rng, 1, EntryRange::Unit))
    } else {
        let one = ComplexMatrix::scalar(C64::new(1.0, 0.0));
        (one.clone(), one)
    };
    let reference = ComplexMatrix::scalar(-a[(0, 0)].sin() * e[(0, 0)]);
    let f = StemFunction::Cos;
    let timer = Timer { deterministic: cfg.deterministic };
    let mut flagged = Vec::new();
    if complex {
        let name = StepKind::RegularCs.name();
        warn!("{name} discards the imaginary part of the result and cannot represent complex derivatives");
        flagged.push(name.to_string());
    }
    let mut records = Vec::new();
    for h in cfg.grid.values() {
        let (fd, t) = timer.run(|| central_fd_1(&f, &a, &e, h));
        records.push(record(h, StepKind::CentralFd.name(), &fd?, &reference, t));
        let (rcs, t) =
            timer.run(|| if complex { regular_cs_1_unchecked(&f, &a, &e, h) } else { regular_cs_1(&f, &a, &e, h) });
        records.push(record(h, StepKind::RegularCs.name(), &rcs?, &reference, t));
        let (bcs, t) = timer.run(|| cs_frechet_1(&f, &a, &e, h));
        records.push(record(h, StepKind::BlockCs.name(), &bcs?, &reference, t));
        let (bt, t) = timer.run(|| frechet_via_blocktri(&f, &a, &[e.scale_real(h)]).map(|m| m.scale_real(1.0 / h)));
        records.push(record(h, StepKind::BlocktriExact.name(), &bt?, &reference, t));
    }
    sort_records(&mut records);
    Ok(Fig1Outcome { records, flagged })
}

/// `A(x, y)` through second order in `(x, y)`: base, both first partials and the mixed partial.
pub fn mixed_jet(a: ComplexMatrix, ax: ComplexMatrix, ay: ComplexMatrix, axy: ComplexMatrix) -> CliResult<PathJet> {
    Ok(PathJet::new(a, 2, 2)?
        .with_term(MultiIndex::new(vec![1, 0]), ax)?
        .with_term(MultiIndex::new(vec![0, 1]), ay)?
        .with_term(MultiIndex::new(vec![1, 1]), axy)?)
}

pub fn mixed_index() -> MultiIndex {
    MultiIndex::new(vec![1, 1])
}

/// Seeded random jet with every entry uniform in `[−0.5, 0.5] + i[−0.5, 0.5]`.
pub fn random_mixed_jet(seed: u64, n: usize) -> CliResult<PathJet> {
    let mut rng = seeded(seed);
    let mut draw = || complex_matrix(&mut rng, n, EntryRange::Centered);
    let (a, ax, ay, axy) = (draw(), draw(), draw(), draw());
    mixed_jet(a, ax, ay, axy)
}

/// Jet of `A(hx, hy)`.
fn scaled_jet(jet: &PathJet, h: f64) -> CliResult<PathJet> {
    let mut out = PathJet::new(jet.base().clone(), jet.nvars(), jet.order())?;
    for (beta, m) in jet.terms() {
        out.insert(beta.clone(), m.scale_real(h.powi(beta.order() as i32)))?;
    }
    Ok(out)
}

/// Richardson-extrapolated four-point stencil.
pub fn extrapolated_fd(f: &dyn MatrixFunction, jet: &PathJet, alpha: &MultiIndex, h: f64) -> CliResult<ComplexMatrix> {
    let coarse = central_fd_2_mixed(f, jet, alpha, h)?;
    let fine = central_fd_2_mixed(f, jet, alpha, 0.5 * h)?;
    Ok((&fine.scale_real(4.0) - &coarse).scale_real(1.0 / 3.0))
}

#[derive(Debug, Clone)]
pub struct Fig2Outcome {
    pub records: Vec<ConvergenceRecord>,
    pub reference: ComplexMatrix,
    /// Relative disagreement between the exact reference and the extrapolated stencil.
    pub reference_discrepancy: f64,
}

/// Mixed second partial of the cosine along a random complex jet.
pub fn run_fig2(cfg: &ExperimentConfig) -> CliResult<Fig2Outcome> {
    cfg.validate()?;
    let jet = random_mixed_jet(cfg.seed, cfg.n)?;
    fig2_on_jet(cfg, &jet)
}

pub fn fig2_on_jet(cfg: &ExperimentConfig, jet: &PathJet) -> CliResult<Fig2Outcome> {
    cfg.grid.validate()?;
    let f = StemFunction::Cos;
    let alpha = mixed_index();
    let reference = partial_via_blocktri(&f, jet, &alpha.clone().into())?;
    let check = extrapolated_fd(&f, jet, &alpha, REFERENCE_CHECK_STEP)?;
    let discrepancy = spectral_rel_error(&check, &reference);
    if discrepancy > REFERENCE_FAIL {
        return Err(CliError::ReferenceValidation {
            check: "exact route vs extrapolated stencil".into(),
            discrepancy,
            limit: REFERENCE_FAIL,
        });
    }
    if discrepancy > REFERENCE_WARN {
        warn!("reference and extrapolated stencil differ by {discrepancy:.3e}");
    }
    let timer = Timer { deterministic: cfg.deterministic };
    let mut records = Vec::new();
    for h in cfg.grid.values() {
        let (fd, t) = timer.run(|| central_fd_2_mixed(&f, jet, &alpha, h));
        records.push(record(h, StepKind::CentralFd.name(), &fd?, &reference, t));
        let (cs, t) = timer.run(|| cs_partial_2(&f, jet, &alpha, h));
        records.push(record(h, StepKind::BlockCs.name(), &cs?, &reference, t));
        let (hy, t) = timer.run(|| hybrid_partial_2(&f, jet, &alpha, h));
        records.push(record(h, StepKind::Hybrid.name(), &hy?, &reference, t));
        let (bt, t) = timer.run(|| -> CliResult<ComplexMatrix> {
            let scaled = scaled_jet(jet, h)?;
            Ok(partial_via_blocktri(&f, &scaled, &alpha.clone().into())?.scale_real(1.0 / (h * h)))
        });
        records.push(record(h, StepKind::BlocktriExact.name(), &bt?, &reference, t));
    }
    sort_records(&mut records);
    Ok(Fig2Outcome { records, reference, reference_discrepancy: discrepancy })
}

/// Step used by the density finite-difference checks.
pub const DENSITY_FD_STEP: f64 = 1e-5;
/// Step used by the eigenvector finite-difference checks.
pub const EIGVEC_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCheck {
    pub name: &'static str,
    /// Finite-difference step, or 0 for step-free checks.
    pub step: f64,
    pub value: f64,
    pub threshold: f64,
}

impl DensityCheck {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

#[derive(Debug, Clone)]
pub struct DensityReport {
    pub n: usize,
    pub n_occ: usize,
    pub mu: f64,
    pub gap: f64,
    pub checks: Vec<DensityCheck>,
}

impl DensityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(DensityCheck::passed)
    }

    pub fn worst(&self) -> Option<&DensityCheck> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .max_by(|a, b| (a.value / a.threshold).total_cmp(&(b.value / b.threshold)))
    }

    pub fn to_records(&self) -> Vec<ConvergenceRecord> {
        let mut out: Vec<ConvergenceRecord> = self
            .checks
            .iter()
            .map(|c| ConvergenceRecord {
                h: c.step,
                method: c.name.to_string(),
                rel_error: c.value,
                runtime_micros: 0.0,
            })
            .collect();
        sort_records(&mut out);
        out
    }

    pub fn table(&self) -> String {
        let mut s = format!("n = {}, occupied = {}, mu = {:.6}, gap = {:.3e}\n", self.n, self.n_occ, self.mu, self.gap);
        s.push_str(&format!("{:<22} {:>10} {:>12} {:>12}  status\n", "check", "step", "value", "threshold"));
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "FAIL" };
            s.push_str(&format!(
                "{:<22} {:>10.1e} {:>12.3e} {:>12.1e}  {status}\n",
                c.name, c.step, c.value, c.threshold
            ));
        }
        s
    }
}

fn vec_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Density-matrix and eigenvector response for a random Hermitian Hamiltonian.
pub fn run_density_demo(cfg: &ExperimentConfig, mu: Option<f64>) -> CliResult<DensityReport> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = seeded(cfg.seed);
    let h = hermitian_matrix(&mut rng, n);
    let hb = hermitian_matrix(&mut rng, n);
    let hg = hermitian_matrix(&mut rng, n);
    let ha = hermitian_matrix(&mut rng, n);
    let d = matderiv::hermitian_eig(&h)?;
    let mu = match mu {
        Some(mu) => mu,
        None => ChemicalPotentialSplit::mid_gap(&d.lambda, n / 2)?.mu,
    };
    let pert = DensityPerturbation::new(d.clone(), mu)?;
    let p = pert.projector()?;
    let p1 = pert.first(&hb)?;
    let p2 = pert.second(&hb, &hg, &ha)?;
    let p2_line = pert.second(&hb, &hb, &ComplexMatrix::zeros(n, n))?;

    let step = StepFunction { mu };
    let t = |m: &ComplexMatrix| d.to_eigenbasis(m);
    let dk1 = dk_first_order(&step, &d, &t(&hb)?)?;
    let dk2 = dk_second_order(&step, &d, &t(&hb)?, &t(&hg)?, &t(&ha)?)?;
    let fd1 = density_fd_1(&h, &hb, mu, DENSITY_FD_STEP)?;
    let fd2 = density_fd_2(&h, &hb, mu, DENSITY_FD_STEP)?;

    let id1 = &(&(&p * &p1) + &(&p1 * &p)) - &p1;
    let id2 = &(&(&(&(&p * &p2) + &(&p2 * &p)) + &(&p1 * &pert.first(&hg)?)) + &(&pert.first(&hg)? * &p1)) - &p2;

    let q1 = eigvec_correction_1(&d, &hb)?;
    let q2 = eigvec_correction_2(&d, &hb)?;
    let (fq1, fq2) = ground_state_fd(&h, &hb, EIGVEC_FD_STEP)?;

    let checks = vec![
        DensityCheck { name: "p1_vs_fd", step: DENSITY_FD_STEP, value: p1.rel_diff(&fd1), threshold: 1e-5 },
        DensityCheck { name: "p2_vs_fd", step: DENSITY_FD_STEP, value: p2_line.rel_diff(&fd2), threshold: 1e-5 },
        DensityCheck { name: "p1_vs_divdiff", step: 0.0, value: p1.rel_diff(&dk1), threshold: 1e-10 },
        DensityCheck { name: "p2_vs_divdiff", step: 0.0, value: p2.rel_diff(&dk2), threshold: 1e-10 },
        DensityCheck { name: "p1_idempotency", step: 0.0, value: id1.frobenius_norm(), threshold: 1e-9 },
        DensityCheck { name: "p2_idempotency", step: 0.0, value: id2.frobenius_norm(), threshold: 1e-9 },
        DensityCheck { name: "p1_trace", step: 0.0, value: p1.trace().norm(), threshold: 1e-9 },
        DensityCheck { name: "q1_vs_fd", step: EIGVEC_FD_STEP, value: vec_distance(&q1, &fq1), threshold: 1e-6 },
        DensityCheck { name: "q2_vs_fd", step: EIGVEC_FD_STEP, value: vec_distance(&q2, &fq2), threshold: 1e-4 },
    ];
    Ok(DensityReport { n, n_occ: pert.split.n_occ, mu, gap: pert.split.gap, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(h: f64, err: f64) -> ConvergenceRecord {
        ConvergenceRecord { h, method: "m".into(), rel_error: err, runtime_micros: 0.0 }
    }

    #[test]
    fn order_fit_recovers_power_law() {
        let rs: Vec<_> = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5].iter().map(|&h| rec(h, 3.0 * h * h)).collect();
        assert!((fitted_order(&rs, "m", 1e-4, 1e-2).unwrap() - 2.0).abs() < 1e-12);
        assert!(fitted_order(&rs, "m", 2e-2, 5e-2).is_none());
        assert_eq!(error_at(&rs, "m", 1.1e-3), Some(3.0 * 1e-3 * 1e-3));
        assert_eq!(min_error(&rs, "m"), Some(3.0 * 1e-5 * 1e-5));
    }

    #[test]
    fn second_order_run_rejects_wrong_kind() {
        let cfg = ExperimentConfig::new(Experiment::Fig2Partial);
        assert!(matches!(run_fig1(&cfg), Err(CliError::Config(_))));
    }
}
