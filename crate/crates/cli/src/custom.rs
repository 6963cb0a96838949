use std::path::{Path, PathBuf};
use std::time::Instant;

use matderiv::cstep::{central_fd_1, central_fd_2_mixed, cs_frechet_1, cs_partial_2, hybrid_partial_2};
use matderiv::divdiff::dk_partial;
use matderiv::textio::from_text;
use matderiv::{partial_via_blocktri, partial_via_frechet_sum, ComplexMatrix, MultiIndex, PathJet, StemFunction};

use crate::error::{CliError, CliResult};
use crate::experiments::spectral_rel_error;
use crate::records::ConvergenceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Blocktri,
    FrechetSum,
    Dk,
    Cs,
    Hybrid,
    Fd,
}

impl Route {
    pub const ALL: [Route; 6] = [Route::Blocktri, Route::FrechetSum, Route::Dk, Route::Cs, Route::Hybrid, Route::Fd];

    pub fn name(self) -> &'static str {
        match self {
            Route::Blocktri => "blocktri",
            Route::FrechetSum => "frechet_sum",
            Route::Dk => "dk",
            Route::Cs => "cs",
            Route::Hybrid => "hybrid",
            Route::Fd => "fd",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| CliError::Config(format!("unknown route '{s}'")))
    }

    fn uses_step(self) -> bool {
        matches!(self, Route::Cs | Route::Hybrid | Route::Fd)
    }

    pub fn evaluate(self, f: &StemFunction, jet: &PathJet, alpha: &MultiIndex, h: f64) -> CliResult<ComplexMatrix> {
        let first_order = |g: fn(
            &dyn matderiv::MatrixFunction,
            &ComplexMatrix,
            &ComplexMatrix,
            f64,
        ) -> matderiv::Result<ComplexMatrix>| {
            let e = jet.get_or_zero(alpha)?;
            Ok::<_, CliError>(g(f, jet.base(), &e, h)?)
        };
        Ok(match (self, alpha.order()) {
            (Route::Blocktri, _) => partial_via_blocktri(f, jet, &alpha.clone().into())?,
            (Route::FrechetSum, _) => partial_via_frechet_sum(f, jet, alpha)?,
            (Route::Dk, _) => dk_partial(f, jet, alpha)?,
            (Route::Cs, 1) => first_order(cs_frechet_1)?,
            (Route::Fd, 1) => first_order(central_fd_1)?,
            (Route::Cs, 2) => cs_partial_2(f, jet, alpha, h)?,
            (Route::Hybrid, 2) => hybrid_partial_2(f, jet, alpha, h)?,
            (Route::Fd, 2) => central_fd_2_mixed(f, jet, alpha, h)?,
            (route, k) => {
                return Err(matderiv::Error::InvalidArgument(format!(
                    "route {} supports orders 1-2 (hybrid: 2), got {k}",
                    route.name()
                ))
                .into())
            }
        })
    }
}

/// Parses `"1,0,2"` into a multi-index.
pub fn parse_multi_index(s: &str) -> CliResult<MultiIndex> {
    let comps: Result<Vec<u32>, _> = s.split(',').map(|c| c.trim().parse::<u32>()).collect();
    match comps {
        Ok(c) if !c.is_empty() => Ok(MultiIndex::new(c)),
        _ => Err(CliError::Config(format!("malformed multi-index '{s}'"))),
    }
}

/// Parses `"1,0=path"`.
pub fn parse_term(s: &str) -> CliResult<(MultiIndex, PathBuf)> {
    let (idx, path) =
        s.split_once('=').ok_or_else(|| CliError::Config(format!("term '{s}' must look like 1,0=file")))?;
    Ok((parse_multi_index(idx)?, PathBuf::from(path)))
}

pub fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    let text = std::fs::read_to_string(path)?;
    from_text(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone)]
pub struct CustomRequest {
    pub function: StemFunction,
    pub routes: Vec<Route>,
    pub alpha: MultiIndex,
    pub base: ComplexMatrix,
    pub terms: Vec<(MultiIndex, ComplexMatrix)>,
    pub h: f64,
    pub deterministic: bool,
}

#[derive(Debug, Clone)]
pub struct CustomOutcome {
    /// Result of the first requested route.
    pub result: ComplexMatrix,
    /// One row per route: discrepancy against the first route.
    pub comparison: Vec<ConvergenceRecord>,
}

/// Missing jet terms are treated as zero.
pub fn run_custom(req: &CustomRequest) -> CliResult<CustomOutcome> {
    if req.routes.is_empty() {
        return Err(CliError::Config("no route requested".into()));
    }
    if req.alpha.is_zero() {
        return Err(CliError::Config("multi-index must have positive order".into()));
    }
    let mut jet = PathJet::new(req.base.clone(), req.alpha.nvars(), req.alpha.order())?.missing_as_zero(true);
    for (beta, m) in &req.terms {
        if beta.nvars() != req.alpha.nvars() {
            return Err(CliError::Config(format!(
                "term {beta} has {} variables, expected {}",
                beta.nvars(),
                req.alpha.nvars()
            )));
        }
        if beta.order() <= req.alpha.order() {
            jet.insert(beta.clone(), m.clone())?;
        }
    }
    let mut results = Vec::with_capacity(req.routes.len());
    for &route in &req.routes {
        let start = Instant::now();
        let m = route.evaluate(&req.function, &jet, &req.alpha, req.h)?;
        let micros = if req.deterministic { 0.0 } else { start.elapsed().as_secs_f64() * 1e6 };
        results.push((route, m, micros));
    }
    let reference = results[0].1.clone();
    let comparison = results
        .iter()
        .map(|(route, m, micros)| ConvergenceRecord {
            h: if route.uses_step() { req.h } else { 0.0 },
            method: route.name().to_string(),
            rel_error: spectral_rel_error(m, &reference),
            runtime_micros: *micros,
        })
        .collect();
    Ok(CustomOutcome { result: reference, comparison })
}
