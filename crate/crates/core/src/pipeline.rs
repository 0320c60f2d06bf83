//! The full audit of one representation: algebra, chain, metrics,
//! hermitization and the dense-eigensolver cross-check of the chain labels.

use crate::algebra::{check_identities, derived_ops, validate_rep, FdpbRep};
use crate::chain::{build_system, verify_system, BiorthogonalSystem};
use crate::error::Error;
use crate::matrix::{c64, eig_general, sort_complex, Tolerance, C64};
use crate::metric::{build_metrics, hermitize, verify_metrics, HermitianSystem, MetricPair};
use crate::report::ValidationReport;

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub report: ValidationReport,
    pub system: Option<BiorthogonalSystem>,
    pub metrics: Option<MetricPair>,
    pub hermitian: Option<HermitianSystem>,
    /// Failing stage and its error, if a stage could not produce output.
    pub failed_stage: Option<(&'static str, String)>,
}

/// Eigenvalues of `h` from the dense solver paired against the chain labels,
/// both sorted by real part.
pub fn spectrum_oracle(
    rep: &FdpbRep,
    sys: &BiorthogonalSystem,
    tol: Tolerance,
) -> crate::Result<(Vec<C64>, Vec<f64>, ValidationReport)> {
    let d = derived_ops(rep);
    let mut computed = eig_general(&d.h)?.values;
    sort_complex(&mut computed);
    let mut labels: Vec<f64> = sys.labels.iter().map(|l| l.h()).collect();
    labels.sort_by(f64::total_cmp);
    let n = rep.n() as f64;
    let scale = computed.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut r = ValidationReport::new();
    let spread = computed
        .iter()
        .zip(&labels)
        .map(|(z, &h)| (z - c64(h, 0.0)).norm())
        .fold(0.0, f64::max);
    r.record("eig(h) − chain labels", spread, tol.threshold(scale));
    r.record(
        "tr(h) − n(n−1)/2",
        (d.h.trace() - c64(n * (n - 1.0) / 2.0, 0.0)).norm(),
        tol.threshold(n * d.h.max_abs()),
    );
    Ok((computed, labels, r))
}

fn fail(out: &mut PipelineOutput, stage: &'static str, err: Error) {
    out.report.record_failure(format!("{stage}: {err}"));
    out.failed_stage = Some((stage, err.to_string()));
}

/// Runs every stage in order. A stage that cannot produce its output stops
/// the run; a stage whose checks fail is recorded and the run continues.
/// A representation that fails the defining relations stops after them.
pub fn run_pipeline(rep: &FdpbRep, tol: Tolerance) -> PipelineOutput {
    let mut out = PipelineOutput {
        report: ValidationReport::new(),
        system: None,
        metrics: None,
        hermitian: None,
        failed_stage: None,
    };
    let base = validate_rep(rep, tol);
    let valid = base.pass;
    out.report.absorb("rep", base);
    if !valid {
        out.failed_stage = Some(("rep", "defining relations fail".into()));
        return out;
    }
    out.report.absorb("identities", check_identities(rep, tol));

    let sys = match build_system(rep, tol) {
        Ok(s) => s,
        Err(e) => {
            fail(&mut out, "chain", e);
            return out;
        }
    };
    out.report.absorb("chain", verify_system(rep, &sys, tol));
    match spectrum_oracle(rep, &sys, tol) {
        Ok((_, _, r)) => out.report.absorb("spectrum", r),
        Err(e) => fail(&mut out, "spectrum", e),
    }

    let mp = match build_metrics(&sys, tol) {
        Ok(m) => m,
        Err(e) => {
            out.system = Some(sys);
            fail(&mut out, "metric", e);
            return out;
        }
    };
    out.report.absorb("metric", verify_metrics(rep, &sys, &mp, tol));

    match hermitize(rep, &sys, &mp, tol) {
        Ok(hs) => {
            out.report.absorb("hermitize", hs.report(tol));
            out.report.absorb(
                "hermitize/round-trip",
                validate_rep(&hs.as_hermitian_rep().as_fdpb(), tol),
            );
            out.hermitian = Some(hs);
        }
        Err(e) => fail(&mut out, "hermitize", e),
    }
    out.system = Some(sys);
    out.metrics = Some(mp);
    out
}
