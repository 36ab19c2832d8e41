//! Command implementations behind the `wavereduce` binary, and the TOML spec
//! formats they read. Each command returns a [`Report`]; input problems are
//! errors (exit code 2), failed checks are reports with `pass = false`
//! (exit code 1).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::{self, export_spec, get_entry, CatalogEntry};
use crate::compatibility::{
    first_order_check, theorem1_build, theorem2_build, theorem3_check, CompatReport,
    EllipticCompatData, HyperbolicCompatData,
};
use crate::error::{Error, Result};
use crate::expr::{parse, parse_with, Expr, Symbols};
use crate::lemma::{hamilton_cayley_pair, lemma1_check, lemma2_check, lemma3_check};
use crate::minkowski::{random_frame, validate_frame, Frame};
use crate::reduction::{
    assemble_reduced_equation, classify, reconstruction_residual, sample_points,
    substitute_ansatz, verify_with_tolerance, AnsatzPair, ReductionProfile, SampleConfig,
};
use crate::sample::ZERO_TOL;
use crate::solutions::{
    compose, free_wave_solution, liouville_solution, radial_free_wave, residual_verify,
    sine_gordon_kink, ComposedSolution, FdConfig, RESIDUAL_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Options shared by all commands; `None` falls back to the spec file or
/// the built-in default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub bounds: Option<(f64, f64)>,
    pub fd_step: Option<f64>,
    pub tol: Option<f64>,
}

impl RunOptions {
    fn sample_config(&self, spec: Option<&AnsatzSpec>) -> SampleConfig {
        let d = SampleConfig::default();
        SampleConfig {
            count: self.samples.or(spec.and_then(|s| s.samples)).unwrap_or(d.count),
            seed: self.seed.or(spec.and_then(|s| s.seed)).unwrap_or(d.seed),
            bounds: self
                .bounds
                .or(spec.and_then(|s| s.sample_box.map(|b| (b[0], b[1]))))
                .unwrap_or(d.bounds),
        }
    }

    fn fd_config(&self) -> FdConfig {
        let d = FdConfig::default();
        FdConfig {
            step: self.fd_step.unwrap_or(d.step),
            samples: self.samples.unwrap_or(d.samples),
            seed: self.seed.unwrap_or(d.seed),
            bounds: self.bounds.unwrap_or(d.bounds),
            locus_margin: d.locus_margin,
        }
    }
}

/// Machine-readable result of one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub pass: bool,
    pub results: Value,
    /// One-line human summary (printed to stderr by the binary).
    #[serde(skip)]
    pub summary: String,
}

impl Report {
    fn new(command: &str, inputs: Value, pass: bool, results: Value, summary: String) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            pass,
            results,
            summary,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

// ---------------------------------------------------------------------------
// Spec files

/// `[profile]` table of an ansatz spec, in the variables `y`, `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub r: String,
    pub q: String,
    pub s: String,
    #[serde(rename = "R")]
    pub box_y: String,
    #[serde(rename = "S")]
    pub box_z: String,
}

/// Ansatz spec file:
///
/// ```toml
/// n = 3
/// y = "x0"
/// z = "sqrt(x1^2 + x2^2 + x3^2)"
/// F = "sin(phi)"               # optional, in phi
/// loci = ["sqrt(x1^2 + x2^2 + x3^2)"]   # optional
/// frame = [[1,0,0,0], [0,1,0,0], [0,0,1,0], [0,0,0,1]]   # optional
/// box = [-2.0, 2.0]            # optional
/// samples = 20                 # optional
/// seed = 0                     # optional
///
/// [profile]
/// r = "1"
/// q = "0"
/// s = "-1"
/// R = "0"
/// S = "-2/z"
/// ```
///
/// With a frame, `y`, `z` and `loci` may use the parameters `a0..a3`,
/// `b0..`, `c0..`, `d0..`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub n: usize,
    pub y: String,
    pub z: String,
    pub profile: Option<ProfileSpec>,
    #[serde(rename = "F")]
    pub f: Option<String>,
    pub loci: Option<Vec<String>>,
    pub frame: Option<Vec<Vec<f64>>>,
    #[serde(rename = "box")]
    pub sample_box: Option<[f64; 2]>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

fn invalid(what: &str, e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{what}: {e}"))
}

impl AnsatzSpec {
    pub fn from_toml(text: &str) -> Result<AnsatzSpec> {
        toml::from_str(text).map_err(|e| invalid("ansatz spec", e))
    }

    pub fn load(path: &Path) -> Result<AnsatzSpec> {
        AnsatzSpec::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn frame(&self) -> Result<Option<Frame>> {
        let Some(rows) = &self.frame else {
            return Ok(None);
        };
        let frame = Frame::from_rows(rows)?;
        let report = validate_frame(&frame);
        if !report.pass {
            let failing: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.condition.as_str())
                .collect();
            return Err(Error::InvalidFrame(format!("failing conditions: {}", failing.join(", "))));
        }
        Ok(Some(frame))
    }

    fn expr(&self, text: &str, frame: Option<&Frame>) -> Result<Expr> {
        let e = parse(text, self.n).map_err(|e| Error::parse(text, e))?;
        Ok(match frame {
            Some(f) => {
                let bindings = f.bindings();
                let refs: Vec<(&str, Expr)> = bindings.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
                e.bind_params(&refs).simplify()
            }
            None => e,
        })
    }

    pub fn ansatz(&self) -> Result<AnsatzPair> {
        let frame = self.frame()?;
        AnsatzPair::new(self.expr(&self.y, frame.as_ref())?, self.expr(&self.z, frame.as_ref())?, self.n)
    }

    pub fn loci(&self) -> Result<Vec<Expr>> {
        let frame = self.frame()?;
        self.loci
            .iter()
            .flatten()
            .map(|l| self.expr(l, frame.as_ref()))
            .collect()
    }

    pub fn profile(&self) -> Result<Option<ReductionProfile>> {
        self.profile
            .as_ref()
            .map(|p| ReductionProfile::parse([&p.r, &p.q, &p.s, &p.box_y, &p.box_z]))
            .transpose()
    }

    pub fn rhs(&self) -> Result<Option<Expr>> {
        self.f
            .as_ref()
            .map(|t| parse_with(t, &Symbols::phi()).map_err(|e| Error::parse(t, e)))
            .transpose()
    }
}

/// Compatibility data file. Which keys are needed depends on the case:
///
/// - hyperbolic: `h`, `Phi`, `Psi` in `v`, `w`; or `R`, `f`, `g`
/// - elliptic: `h`, `Phi` in `v`, `vstar`; or `R`, `f`
/// - parabolic: `V`, `W`, `Phi`, `lambda`
/// - first-order: `V`, `W`
///
/// `n` is the number of space dimensions (default 3).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatSpec {
    pub n: Option<usize>,
    pub h: Option<String>,
    #[serde(rename = "Phi")]
    pub phi: Option<String>,
    #[serde(rename = "Psi")]
    pub psi: Option<String>,
    #[serde(rename = "V")]
    pub big_v: Option<String>,
    #[serde(rename = "W")]
    pub big_w: Option<String>,
    pub lambda: Option<i8>,
    #[serde(rename = "R")]
    pub r: Option<String>,
    pub f: Option<Vec<String>>,
    pub g: Option<Vec<String>>,
}

impl CompatSpec {
    pub fn from_toml(text: &str) -> Result<CompatSpec> {
        toml::from_str(text).map_err(|e| invalid("compatibility spec", e))
    }

    pub fn load(path: &Path) -> Result<CompatSpec> {
        CompatSpec::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompatCase {
    Elliptic,
    Hyperbolic,
    Parabolic,
    FirstOrder,
}

impl std::str::FromStr for CompatCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<CompatCase> {
        match s {
            "elliptic" => Ok(CompatCase::Elliptic),
            "hyperbolic" => Ok(CompatCase::Hyperbolic),
            "parabolic" => Ok(CompatCase::Parabolic),
            "first-order" => Ok(CompatCase::FirstOrder),
            _ => Err(Error::InvalidInput(format!(
                "unknown case `{s}` (elliptic, hyperbolic, parabolic, first-order)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Commands

/// Substitution, verification of the five conditions, classification and
/// assembly of the reduced equation.
pub fn cmd_reduce(spec: &AnsatzSpec, opts: &RunOptions) -> Result<Report> {
    let pair = spec.ansatz()?;
    let profile = spec
        .profile()?
        .ok_or_else(|| Error::InvalidInput("spec has no [profile]".into()))?;
    let rhs = spec.rhs()?;
    let loci = spec.loci()?;
    let config = opts.sample_config(Some(spec));
    let tol = opts.tol.unwrap_or(ZERO_TOL);
    let (points, rejected) = sample_points(&pair, Some(&profile), &loci, &Default::default(), &config);
    if points.is_empty() {
        return Err(Error::NoSamples("every candidate point hit a singular locus".into()));
    }
    let raw = substitute_ansatz(&pair);
    let verification = verify_with_tolerance(&pair, &profile, &points, tol);
    let classification = classify(&pair, &profile, &points);
    let equation = assemble_reduced_equation(&profile, rhs).with_case(classification.case);
    let probe = parse_with("exp(y/3)*cos(z/2)", &Symbols::yz()).expect("probe function");
    let reconstruction = reconstruction_residual(
        &pair,
        &equation,
        &probe,
        &points,
        opts.fd_step.unwrap_or(crate::fd::DEFAULT_STEP),
    )
    .ok();
    let pass = verification.pass;
    let results = json!({
        "raw_coefficients": {
            "yy": raw.yy.to_string(),
            "yz": raw.yz.to_string(),
            "zz": raw.zz.to_string(),
            "box_y": raw.box_y.to_string(),
            "box_z": raw.box_z.to_string(),
        },
        "verification": to_value(&verification),
        "points_rejected_by_guard": rejected,
        "classification": to_value(&classification),
        "reduced_equation": equation.to_string(),
        "reconstruction_residual": reconstruction,
    });
    let summary = format!(
        "reduce: {}  {}  {}",
        verdict(pass),
        classification.case,
        equation
    );
    Ok(Report::new("reduce", to_value(spec), pass, results, summary))
}

fn need<'a>(field: &'a Option<String>, name: &str) -> Result<&'a str> {
    field
        .as_deref()
        .ok_or_else(|| Error::InvalidInput(format!("compatibility spec needs `{name}`")))
}

fn exprs(texts: &[String], syms: &Symbols) -> Result<Vec<Expr>> {
    texts
        .iter()
        .map(|t| parse_with(t, syms).map_err(|e| Error::parse(t, e)))
        .collect()
}

pub fn cmd_compat(case: CompatCase, spec: &CompatSpec, opts: &RunOptions) -> Result<Report> {
    let n = spec.n.unwrap_or(3);
    let seed = opts.seed.unwrap_or(0);
    let syms = match case {
        CompatCase::Elliptic => Symbols::v_vstar(),
        _ => Symbols::vw(),
    };
    let p = |field: &Option<String>, name: &str| -> Result<Expr> {
        let t = need(field, name)?;
        parse_with(t, &syms).map_err(|e| Error::parse(t, e))
    };
    let report: CompatReport = match case {
        CompatCase::Hyperbolic => {
            let data = if spec.r.is_some() {
                theorem2_build(
                    &p(&spec.r, "R")?,
                    &exprs(spec.f.as_deref().unwrap_or(&[]), &syms)?,
                    &exprs(spec.g.as_deref().unwrap_or(&[]), &syms)?,
                    n,
                    seed,
                )?
            } else {
                HyperbolicCompatData::new(p(&spec.h, "h")?, p(&spec.phi, "Phi")?, p(&spec.psi, "Psi")?, n)?
            };
            data.check(seed)
        }
        CompatCase::Elliptic => {
            let data = if spec.r.is_some() {
                theorem1_build(&p(&spec.r, "R")?, &exprs(spec.f.as_deref().unwrap_or(&[]), &syms)?, n, seed)?
            } else {
                EllipticCompatData::new(p(&spec.h, "h")?, p(&spec.phi, "Phi")?, n)?
            };
            data.check(seed)
        }
        CompatCase::Parabolic => {
            let lambda = spec
                .lambda
                .ok_or_else(|| Error::InvalidInput("compatibility spec needs `lambda`".into()))?;
            if lambda.abs() != 1 {
                return Err(Error::InvalidInput("lambda must be ±1".into()));
            }
            theorem3_check(&p(&spec.big_v, "V")?, &p(&spec.big_w, "W")?, &p(&spec.phi, "Phi")?, lambda, n, seed)
        }
        CompatCase::FirstOrder => first_order_check(&p(&spec.big_v, "V")?, &p(&spec.big_w, "W")?, seed),
    };
    let pass = report.verdict.passed();
    let summary = if pass {
        format!("compat {}: {}", report.case, report.verdict.as_str())
    } else {
        format!("compat {}: {} ({})", report.case, report.verdict.as_str(), report.diagnostics.join("; "))
    };
    Ok(Report::new("compat", to_value(spec), pass, to_value(&report), summary))
}

pub fn cmd_lemmas(id: &str, opts: &RunOptions) -> Result<Report> {
    let pair = match get_entry(id, None, None)? {
        CatalogEntry::Pair(p) => p,
        other => {
            return Err(Error::InvalidInput(format!("{id} is a {} entry, not a solution pair", other.kind())))
        }
    };
    let config = opts.sample_config(None);
    let (points, rejected) = pair.sample(&config);
    if points.is_empty() {
        return Err(Error::NoSamples(format!("no admissible points for {id}")));
    }
    let system = pair.system_report(&points);
    let mut results = BTreeMap::new();
    results.insert("system", to_value(&system));
    results.insert("points_rejected_by_guard", json!(rejected));
    let mut pass = system.pass;
    let mut notes = Vec::new();
    let mut record = |name: &'static str, outcome: Result<(Value, bool)>, results: &mut BTreeMap<&str, Value>| match outcome {
        Ok((v, ok)) => {
            results.insert(name, v);
            ok
        }
        Err(Error::Precondition(msg)) => {
            notes.push(format!("{name} skipped: {msg}"));
            results.insert(name, json!({ "skipped": msg }));
            true
        }
        Err(e) => {
            notes.push(format!("{name} failed: {e}"));
            results.insert(name, json!({ "error": e.to_string() }));
            false
        }
    };
    if system.pass {
        pass &= record("lemma2", lemma2_check(&pair, &points).map(|r| (to_value(&r), r.pass)), &mut results);
        pass &= record("lemma3", lemma3_check(&pair, &points).map(|r| (to_value(&r), r.pass)), &mut results);
        pass &= record(
            "lemma1",
            lemma1_check(&pair, &points, pair.pair.n + 1).map(|r| (to_value(&r), true)),
            &mut results,
        );
        pass &= record(
            "hamilton_cayley",
            hamilton_cayley_pair(&pair, &points).map(|r| (to_value(&r), r.pass)),
            &mut results,
        );
    } else {
        notes.push("system check failed; lemma checks not run".into());
    }
    results.insert("notes", json!(notes));
    let summary = format!("lemmas {id}: {}", verdict(pass));
    Ok(Report::new(
        "lemmas",
        json!({ "entry": id, "samples": config.count, "seed": config.seed }),
        pass,
        to_value(&results),
        summary,
    ))
}

fn param_expr(params: &BTreeMap<String, String>, key: &str, default: &str) -> Result<Expr> {
    let text = params.get(key).map(String::as_str).unwrap_or(default);
    parse_with(text, &Symbols::t()).map_err(|e| Error::parse(text, e))
}

/// Parses `key=value` pairs.
pub fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, String>> {
    pairs
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidInput(format!("parameter `{p}` is not key=value")))
        })
        .collect()
}

/// Builds a reduced solution by id: `kink` (`velocity`), `liouville`
/// (`f`, `g`), `free-wave` (`g`, `h`), `radial` (`g`, `h`). Functions are
/// written in `t`.
pub fn reduced_solution(id: &str, params: &BTreeMap<String, String>) -> Result<crate::solutions::ReducedSolution> {
    match id {
        "kink" => {
            let v = params
                .get("velocity")
                .map(|s| s.parse::<f64>().map_err(|e| invalid("velocity", e)))
                .transpose()?
                .unwrap_or(0.0);
            sine_gordon_kink(v)
        }
        "liouville" => liouville_solution(&param_expr(params, "f", "t")?, &param_expr(params, "g", "t")?),
        "free-wave" => free_wave_solution(&param_expr(params, "g", "sin(t)")?, &param_expr(params, "h", "0")?),
        "radial" => radial_free_wave(&param_expr(params, "g", "sin(t)")?, &param_expr(params, "h", "0")?),
        _ => Err(Error::InvalidInput(format!(
            "unknown solution `{id}` (kink, liouville, free-wave, radial, witness)"
        ))),
    }
}

/// Composes an ansatz entry with a reduced solution (or takes a witness
/// entry with solution `witness`) and verifies `□u = F(u)`.
pub fn cmd_solve(entry_id: &str, solution_id: &str, params: &BTreeMap<String, String>, opts: &RunOptions) -> Result<Report> {
    let composed: ComposedSolution = match get_entry(entry_id, None, None)? {
        CatalogEntry::Witness(w) if solution_id == "witness" => ComposedSolution::from_witness(&w),
        CatalogEntry::Ansatz(a) => compose(&a, &reduced_solution(solution_id, params)?)?,
        other => {
            return Err(Error::InvalidInput(format!(
                "cannot solve with {} entry `{entry_id}` and solution `{solution_id}`",
                other.kind()
            )))
        }
    };
    let config = opts.fd_config();
    let mut report = residual_verify(&composed, &config)?;
    let tol = opts.tol.unwrap_or(RESIDUAL_TOL);
    report.pass = report.max_scaled_residual < tol;
    let f_syms = Symbols::u();
    let results = json!({
        "solution": {
            "u": composed.u.to_string(),
            "F": composed.f.display(&f_syms).to_string(),
            "n": composed.n,
            "loci": composed.loci.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        },
        "fd_config": to_value(&config),
        "tolerance": tol,
        "residual": to_value(&report),
    });
    let summary = format!(
        "solve {}: {}  max residual {:.3e}  u = {}",
        composed.name,
        verdict(report.pass),
        report.max_residual,
        composed.u
    );
    Ok(Report::new(
        "solve",
        json!({ "entry": entry_id, "solution": solution_id, "params": params }),
        report.pass,
        results,
        summary,
    ))
}

pub fn cmd_catalog_list() -> Report {
    let entries = catalog::list_entries();
    Report::new(
        "catalog list",
        json!({}),
        true,
        to_value(&entries),
        format!("{} entries", entries.len()),
    )
}

pub fn cmd_catalog_show(id: &str, frame: Option<&Frame>, arbitrary: Option<&str>) -> Result<Report> {
    let arbitrary = arbitrary
        .map(|t| parse_with(t, &Symbols::t()).map_err(|e| Error::parse(t, e)))
        .transpose()?;
    let entry = get_entry(id, frame, arbitrary.as_ref())?;
    let vw = Symbols::vw();
    let results = match &entry {
        CatalogEntry::Ansatz(a) => json!({
            "kind": entry.kind(),
            "summary": a.summary,
            "n": a.pair.n,
            "y": a.pair.y.to_string(),
            "z": a.pair.z.to_string(),
            "profile": a.profile.strings(),
            "case": to_value(&a.case),
            "reduced_equation": a.reduced_equation(None).to_string(),
            "expected_form": a.expected_form,
            "reduced_equation_id": a.equation.as_str(),
            "loci": a.loci.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "spec": export_spec(a, frame),
        }),
        CatalogEntry::Pair(p) => json!({
            "kind": entry.kind(),
            "n": p.pair.n,
            "v": p.pair.y.to_string(),
            "w": p.pair.z.to_string(),
            "system": to_value(&p.system),
            "h": p.h.display(&vw).to_string(),
            "V": p.big_v.display(&vw).to_string(),
            "W": p.big_w.display(&vw).to_string(),
            "Phi": p.phi.as_ref().map(|e| e.display(&vw).to_string()),
            "Psi": p.psi.as_ref().map(|e| e.display(&vw).to_string()),
        }),
        CatalogEntry::Witness(w) => json!({
            "kind": entry.kind(),
            "summary": w.summary,
            "n": w.n,
            "u": w.u.to_string(),
            "F": w.f.display(&Symbols::u()).to_string(),
            "lambda": w.lambda,
        }),
    };
    Ok(Report::new("catalog show", json!({ "entry": id }), true, results, format!("catalog entry {id}")))
}

pub fn cmd_frame_generate(seed: u64) -> Result<Report> {
    let frame = random_frame(3, seed)?;
    let validation = validate_frame(&frame);
    let pass = validation.pass;
    Ok(Report::new(
        "frame generate",
        json!({ "seed": seed }),
        pass,
        json!({ "frame": frame.to_text(), "rows": frame.rows(), "validation": to_value(&validation) }),
        format!("frame seed {seed}: {}", verdict(pass)),
    ))
}

pub fn cmd_frame_validate(text: &str) -> Result<Report> {
    let frame = Frame::from_text(text)?;
    let validation = validate_frame(&frame);
    let pass = validation.pass;
    Ok(Report::new(
        "frame validate",
        json!({ "frame": text }),
        pass,
        to_value(&validation),
        format!("frame: {}", verdict(pass)),
    ))
}
