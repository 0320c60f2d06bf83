//! Command implementations behind the `fdpb` binary.
//!
//! Every command writes its human-readable or JSON output to a caller-supplied
//! writer and returns an exit code: 0 when all checks pass, 1 when a
//! mathematical check fails, 2 for usage, I/O and parse errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fdpb_core::algebra::{buchdahl_rep, random_s0, similarity_deform, validate_rep, FdpbRep};
use fdpb_core::chain::build_system;
use fdpb_core::matrix::{Tolerance, C64};
use fdpb_core::models::{n4_alpha, shifted_oscillator, swanson, swanson_spectrum_report, ComplexValue};
use fdpb_core::pipeline::{run_pipeline, spectrum_oracle};
use fdpb_core::{Label, Meta, RepresentationDoc, ValidationReport};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const DEFAULT_CONDITION_CAP: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Buchdahl,
    Similarity,
    N4Alpha,
    Swanson,
    Shifted,
}

impl Generator {
    pub fn as_str(self) -> &'static str {
        match self {
            Generator::Buchdahl => "buchdahl",
            Generator::Similarity => "similarity",
            Generator::N4Alpha => "n4-alpha",
            Generator::Swanson => "swanson",
            Generator::Shifted => "shifted",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub n: Option<usize>,
    pub generator: Generator,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub tol_abs: Option<f64>,
    #[serde(default)]
    pub tol_rel: Option<f64>,
    #[serde(default)]
    pub output_path: Option<String>,
}

/// Anything that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Tolerance flags; unset fields fall back to the config, then the defaults.
#[derive(Clone, Copy, Debug, Default)]
pub struct TolFlags {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
}

impl TolFlags {
    pub fn resolve(self, config: Option<&RunConfig>) -> Result<Tolerance, UsageError> {
        let d = Tolerance::default();
        let abs = self.abs.or(config.and_then(|c| c.tol_abs)).unwrap_or(d.abs_eps);
        let rel = self.rel.or(config.and_then(|c| c.tol_rel)).unwrap_or(d.rel_eps);
        Tolerance::new(abs, rel).map_err(|e| usage(e.to_string()))
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

pub fn read_representation(path: &Path) -> Result<(RepresentationDoc, FdpbRep), UsageError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let doc: RepresentationDoc =
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid representation {}: {e}", path.display())))?;
    let rep = doc
        .to_rep()
        .map_err(|e| usage(format!("invalid representation {}: {e}", path.display())))?;
    Ok((doc, rep))
}

/// Pretty JSON with a trailing newline; identical values give identical bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize infallibly");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), UsageError> {
    out.write_all(text.as_bytes())
        .map_err(|e| usage(format!("write failed: {e}")))
}

fn write_artifact(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), UsageError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => emit(out, text),
    }
}

fn param(config: &RunConfig, key: &str) -> Result<f64, UsageError> {
    config
        .params
        .get(key)
        .copied()
        .ok_or_else(|| usage(format!("generator {} requires params.{key}", config.generator.as_str())))
}

fn seed_param(config: &RunConfig, seed: Option<u64>) -> Result<Option<u64>, UsageError> {
    if seed.is_some() {
        return Ok(seed);
    }
    match config.params.get("seed") {
        None => Ok(None),
        Some(&s) if s >= 0.0 && s.fract() == 0.0 && s <= u64::MAX as f64 => Ok(Some(s as u64)),
        Some(&s) => Err(usage(format!("params.seed must be a non-negative integer, got {s}"))),
    }
}

fn required_n(config: &RunConfig) -> Result<usize, UsageError> {
    match config.n {
        Some(n) if n >= 2 => Ok(n),
        Some(n) => Err(usage(format!("n must be at least 2, got {n}"))),
        None => Err(usage(format!("generator {} requires n", config.generator.as_str()))),
    }
}

/// Buchdahl base, deformed when a seed is given.
fn base_rep(config: &RunConfig, n: usize, seed: Option<u64>, tol: Tolerance) -> Result<FdpbRep, UsageError> {
    let base = buchdahl_rep(n).map_err(|e| usage(e.to_string()))?;
    match seed {
        None => Ok(base.as_fdpb()),
        Some(seed) => {
            let cap = config
                .params
                .get("condition_cap")
                .copied()
                .unwrap_or(DEFAULT_CONDITION_CAP);
            let s0 = random_s0(n, seed, cap).map_err(|e| usage(e.to_string()))?;
            similarity_deform(&base, &s0, C64::ONE, tol).map_err(|e| usage(e.to_string()))
        }
    }
}

/// Builds the representation a config describes. For `swanson` and `shifted`
/// the stored triple is the base representation; the model parameter travels
/// in `meta.params` and is picked up by `spectrum`.
pub fn build_representation(
    config: &RunConfig,
    seed: Option<u64>,
    tol: Tolerance,
) -> Result<RepresentationDoc, UsageError> {
    let seed = seed_param(config, seed)?;
    let mut params = BTreeMap::new();
    let (rep, seed) = match config.generator {
        Generator::Buchdahl => (base_rep(config, required_n(config)?, None, tol)?, None),
        Generator::Similarity => {
            let seed = seed.unwrap_or(0);
            if let Some(&cap) = config.params.get("condition_cap") {
                params.insert("condition_cap".to_string(), cap);
            }
            (base_rep(config, required_n(config)?, Some(seed), tol)?, Some(seed))
        }
        Generator::N4Alpha => {
            if let Some(n) = config.n.filter(|&n| n != 4) {
                return Err(usage(format!("generator n4-alpha is four-dimensional, got n = {n}")));
            }
            let alpha = param(config, "alpha")?;
            params.insert("alpha".to_string(), alpha);
            (n4_alpha(alpha).map_err(|e| usage(e.to_string()))?, None)
        }
        Generator::Swanson => {
            let theta = param(config, "theta")?;
            let rep = base_rep(config, required_n(config)?, seed, tol)?;
            swanson(&rep, theta, tol).map_err(|e| usage(e.to_string()))?;
            params.insert("theta".to_string(), theta);
            (rep, seed)
        }
        Generator::Shifted => {
            let beta = param(config, "beta")?;
            let rep = base_rep(config, required_n(config)?, seed, tol)?;
            shifted_oscillator(&rep, beta).map_err(|e| usage(e.to_string()))?;
            params.insert("beta".to_string(), beta);
            (rep, seed)
        }
    };
    let meta = Meta {
        generator: config.generator.as_str().to_string(),
        params,
        seed,
    };
    Ok(RepresentationDoc::new(&rep, meta))
}

pub struct BuildOptions {
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub tol: TolFlags,
}

pub fn cmd_build(opts: &BuildOptions, out: &mut dyn Write) -> Result<u8, UsageError> {
    let tol = opts.tol.resolve(Some(&opts.config))?;
    // Construction never runs tighter than the defaults, so a tight user
    // tolerance yields a written file with a failing report instead of no file.
    let d = Tolerance::default();
    let construct =
        Tolerance::new(tol.abs_eps.max(d.abs_eps), tol.rel_eps.max(d.rel_eps)).map_err(|e| usage(e.to_string()))?;
    let mut doc = build_representation(&opts.config, opts.seed, construct)?;
    let rep = doc.to_rep().map_err(|e| usage(e.to_string()))?;
    let report = validate_rep(&rep, tol);
    let pass = report.pass;
    doc.report = Some(report);
    let path = opts.output.clone().or_else(|| {
        opts.config
            .output_path
            .clone()
            .filter(|p| !p.is_empty())
            .map(PathBuf::from)
    });
    write_artifact(path.as_deref(), &to_json(&doc), out)?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    pass: bool,
    failed_stage: Option<&'a str>,
    error: Option<&'a str>,
    report: &'a ValidationReport,
}

pub fn cmd_verify(input: &Path, tol: TolFlags, json: bool, out: &mut dyn Write) -> Result<u8, UsageError> {
    let (_, rep) = read_representation(input)?;
    let tol = tol.resolve(None)?;
    let result = run_pipeline(&rep, tol);
    let report = &result.report;
    if json {
        let v = VerifyJson {
            pass: report.pass,
            failed_stage: result.failed_stage.as_ref().map(|s| s.0),
            error: result.failed_stage.as_ref().map(|s| s.1.as_str()),
            report,
        };
        emit(out, &to_json(&v))?;
    } else {
        emit(out, &format!("{report}\n"))?;
        if let Some((stage, err)) = &result.failed_stage {
            emit(out, &format!("stopped at stage {stage}: {err}\n"))?;
        }
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// `h`, `swanson:θ` or `shifted:β`; a bare `swanson`/`shifted` takes its
/// parameter from the representation metadata.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumModel {
    H,
    Swanson(f64),
    Shifted(f64),
}

impl SpectrumModel {
    pub fn parse(text: Option<&str>, meta: &Meta) -> Result<Self, UsageError> {
        let from_meta = |key: &str| {
            meta.params
                .get(key)
                .copied()
                .ok_or_else(|| usage(format!("model needs a parameter: use {}:<value>", meta_model_name(key))))
        };
        let text = match text {
            Some(s) => s.trim().to_string(),
            None => match meta.generator.as_str() {
                "swanson" => "swanson".to_string(),
                "shifted" => "shifted".to_string(),
                _ => "h".to_string(),
            },
        };
        let (name, value) = match text.split_once(':') {
            Some((name, v)) => {
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| usage(format!("invalid model parameter in {text:?}")))?;
                (name.to_string(), Some(v))
            }
            None => (text.clone(), None),
        };
        match (name.as_str(), value) {
            ("h", None) => Ok(SpectrumModel::H),
            ("swanson", Some(t)) => Ok(SpectrumModel::Swanson(t)),
            ("swanson", None) => Ok(SpectrumModel::Swanson(from_meta("theta")?)),
            ("shifted", Some(b)) => Ok(SpectrumModel::Shifted(b)),
            ("shifted", None) => Ok(SpectrumModel::Shifted(from_meta("beta")?)),
            _ => Err(usage(format!(
                "unknown model {text:?}; expected h, swanson:<theta> or shifted:<beta>"
            ))),
        }
    }
}

fn meta_model_name(key: &str) -> &'static str {
    if key == "theta" {
        "swanson"
    } else {
        "shifted"
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    h2: i64,
    k: u8,
    chain: f64,
    computed: ComplexValue,
}

#[derive(Serialize)]
struct HSpectrumJson {
    model: &'static str,
    rows: Vec<SpectrumRow>,
    pass: bool,
    report: ValidationReport,
}

#[derive(Serialize)]
struct ShiftedJson {
    model: &'static str,
    beta: f64,
    spectrum: Vec<ComplexValue>,
    max_imag: f64,
}

fn fmt_c(z: ComplexValue) -> String {
    format!("{:+.12}{:+.12}i", z.re, z.im)
}

pub fn cmd_spectrum(
    input: &Path,
    model: Option<&str>,
    tol: TolFlags,
    json: bool,
    out: &mut dyn Write,
) -> Result<u8, UsageError> {
    let (doc, rep) = read_representation(input)?;
    let tol = tol.resolve(None)?;
    match SpectrumModel::parse(model, &doc.meta)? {
        SpectrumModel::H => spectrum_h(&rep, tol, json, out),
        SpectrumModel::Swanson(theta) => {
            let m = match swanson(&rep, theta, tol) {
                Ok(m) => m,
                Err(fdpb_core::Error::InvalidParameter(e)) => return Err(usage(e)),
                Err(e) => return fail(out, "swanson", &e),
            };
            let r = match swanson_spectrum_report(&m, tol) {
                Ok(r) => r,
                Err(e) => return fail(out, "swanson", &e),
            };
            if json {
                emit(out, &to_json(&r))?;
            } else {
                let mut s = format!("swanson theta={} omega={:.12}\n", r.theta, r.omega);
                for z in &r.computed {
                    s += &format!("  {}\n", fmt_c(*z));
                }
                s += &format!(
                    "match_scaled={} match_unscaled={} max_imag={:.3e} intertwiner_residual={:.3e}\n",
                    r.match_scaled, r.match_unscaled, r.max_imag, r.intertwiner_residual
                );
                s += &format!(
                    "all_real={} intertwines={} biconditional={}\n",
                    r.all_real,
                    r.intertwines,
                    r.biconditional_holds()
                );
                emit(out, &s)?;
            }
            Ok(EXIT_OK)
        }
        SpectrumModel::Shifted(beta) => {
            let s = match shifted_oscillator(&rep, beta) {
                Ok(s) => s,
                Err(fdpb_core::Error::InvalidParameter(e)) => return Err(usage(e)),
                Err(e) => return fail(out, "shifted", &e),
            };
            let spectrum: Vec<ComplexValue> = s.spectrum.iter().map(|&z| z.into()).collect();
            if json {
                let v = ShiftedJson {
                    model: "shifted",
                    beta,
                    spectrum,
                    max_imag: s.max_imag,
                };
                emit(out, &to_json(&v))?;
            } else {
                let mut text = format!("shifted beta={beta}\n");
                for z in spectrum {
                    text += &format!("  {}\n", fmt_c(z));
                }
                text += &format!("max_imag={:.3e}\n", s.max_imag);
                emit(out, &text)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn fail(out: &mut dyn Write, stage: &str, e: &fdpb_core::Error) -> Result<u8, UsageError> {
    emit(out, &format!("stage {stage} failed: {e}\n"))?;
    Ok(EXIT_CHECK_FAILED)
}

fn spectrum_h(rep: &FdpbRep, tol: Tolerance, json: bool, out: &mut dyn Write) -> Result<u8, UsageError> {
    let sys = match build_system(rep, tol) {
        Ok(s) => s,
        Err(e) => return fail(out, "chain", &e),
    };
    let (computed, _, report) = match spectrum_oracle(rep, &sys, tol) {
        Ok(x) => x,
        Err(e) => return fail(out, "spectrum", &e),
    };
    let mut labels: Vec<Label> = sys.labels.clone();
    labels.sort();
    let rows: Vec<SpectrumRow> = labels
        .iter()
        .zip(&computed)
        .map(|(l, &z)| SpectrumRow {
            h2: l.h2,
            k: l.k,
            chain: l.h(),
            computed: z.into(),
        })
        .collect();
    let pass = report.pass;
    if json {
        let v = HSpectrumJson {
            model: "h",
            rows,
            pass,
            report,
        };
        emit(out, &to_json(&v))?;
    } else {
        let mut s = format!("{:<12} {:>10}   {}\n", "(h', k')", "chain", "eigensolver");
        for (l, r) in labels.iter().zip(&rows) {
            s += &format!("{:<12} {:>10.6}   {}\n", l.to_string(), r.chain, fmt_c(r.computed));
        }
        s += &format!("{report}\n");
        emit(out, &s)?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_hermitize(
    input: &Path,
    output: Option<&Path>,
    tol: TolFlags,
    json: bool,
    out: &mut dyn Write,
) -> Result<u8, UsageError> {
    let (_, rep) = read_representation(input)?;
    let tol = tol.resolve(None)?;
    let result = run_pipeline(&rep, tol);
    let Some(hs) = result.hermitian else {
        let (stage, err) = result
            .failed_stage
            .unwrap_or(("hermitize", "upstream checks failed".to_string()));
        emit(out, &format!("stage {stage} failed: {err}\n"))?;
        if !json {
            emit(out, &format!("{}\n", result.report))?;
        }
        return Ok(EXIT_CHECK_FAILED);
    };
    let report = hs.report(tol);
    match output {
        Some(p) => {
            fs::write(p, to_json(&hs)).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
            if json {
                emit(out, &to_json(&report))?;
            } else {
                emit(out, &format!("{report}\n"))?;
            }
        }
        None => emit(out, &to_json(&hs))?,
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(generator: &str, params: &[(&str, f64)]) -> Meta {
        Meta {
            generator: generator.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            seed: None,
        }
    }

    #[test]
    fn config_uses_kebab_case_generators() {
        let c: RunConfig = serde_json::from_str(r#"{"n":4,"generator":"n4-alpha","params":{"alpha":0.5}}"#).unwrap();
        assert_eq!(c.generator, Generator::N4Alpha);
        assert_eq!(c.params["alpha"], 0.5);
        assert!(serde_json::from_str::<RunConfig>(r#"{"n":4,"generator":"N4Alpha"}"#).is_err());
    }

    #[test]
    fn model_parsing() {
        let plain = meta("buchdahl", &[]);
        assert_eq!(SpectrumModel::parse(None, &plain).unwrap(), SpectrumModel::H);
        assert_eq!(
            SpectrumModel::parse(Some("swanson:0.25"), &plain).unwrap(),
            SpectrumModel::Swanson(0.25)
        );
        assert_eq!(
            SpectrumModel::parse(Some(" shifted:2 "), &plain).unwrap(),
            SpectrumModel::Shifted(2.0)
        );
        assert!(SpectrumModel::parse(Some("swanson"), &plain).is_err());
        assert!(SpectrumModel::parse(Some("h:1"), &plain).is_err());
        assert!(SpectrumModel::parse(Some("swanson:abc"), &plain).is_err());
        let sw = meta("swanson", &[("theta", 0.1)]);
        assert_eq!(SpectrumModel::parse(None, &sw).unwrap(), SpectrumModel::Swanson(0.1));
    }

    #[test]
    fn tolerance_precedence() {
        let c: RunConfig = serde_json::from_str(r#"{"n":3,"generator":"buchdahl","tol_abs":1e-6}"#).unwrap();
        let t = TolFlags::default().resolve(Some(&c)).unwrap();
        assert_eq!((t.abs_eps, t.rel_eps), (1e-6, 1e-10));
        let t = TolFlags {
            abs: Some(1e-3),
            rel: None,
        }
        .resolve(Some(&c))
        .unwrap();
        assert_eq!(t.abs_eps, 1e-3);
        assert!(TolFlags {
            abs: Some(-1.0),
            rel: None
        }
        .resolve(None)
        .is_err());
    }

    #[test]
    fn similarity_defaults_to_seed_zero() {
        let c: RunConfig = serde_json::from_str(r#"{"n":3,"generator":"similarity"}"#).unwrap();
        let doc = build_representation(&c, None, Tolerance::default()).unwrap();
        assert_eq!(doc.meta.seed, Some(0));
        let again = build_representation(&c, Some(0), Tolerance::default()).unwrap();
        assert_eq!(to_json(&doc), to_json(&again));
    }
}
