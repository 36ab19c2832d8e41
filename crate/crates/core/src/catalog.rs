//! Built-in ansatzes, solution pairs and single-function witnesses.
//!
//! Frame-dependent entries take vectors `a, b, c, d` (standard basis by
//! default) and use the linear forms `ax = Σ a_μ x_μ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse, parse_with, Expr, Symbols};
use crate::lemma::{PairSystem, SolutionPair};
use crate::minkowski::{validate_frame, Frame};
use crate::reduction::{
    assemble_reduced_equation, AnsatzPair, Case, ReducedEquation, ReductionProfile,
};

/// Reduced equations with shipped closed-form solutions or printed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducedId {
    /// `φ_yy − φ_zz = F(φ)`.
    Wave,
    /// `φ_yy − φ_zz − (2/z)φ_z = F(φ)`.
    RadialWave,
    /// `−φ_yy − φ_zz = F(φ)`.
    NegativeLaplace,
    /// `−φ_yy − (1/y)φ_y = F(φ)`.
    AxialParabolic,
}

impl ReducedId {
    pub fn as_str(self) -> &'static str {
        match self {
            ReducedId::Wave => "wave",
            ReducedId::RadialWave => "radial-wave",
            ReducedId::NegativeLaplace => "negative-laplace",
            ReducedId::AxialParabolic => "axial-parabolic",
        }
    }
}

impl std::fmt::Display for ReducedId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzEntry {
    pub id: String,
    pub summary: String,
    pub pair: AnsatzPair,
    pub profile: ReductionProfile,
    pub case: Case,
    pub equation: ReducedId,
    /// Conventional printed form of the reduced equation; term order may
    /// differ from [`ReducedEquation`]'s canonical order.
    pub expected_form: &'static str,
    /// Expressions in `x` that must stay away from zero.
    pub loci: Vec<Expr>,
}

impl AnsatzEntry {
    pub fn reduced_equation(&self, rhs: Option<Expr>) -> ReducedEquation {
        assemble_reduced_equation(&self.profile, rhs).with_case(self.case)
    }
}

/// `u(x)` solving `□u = F(u)`, `u_μu_μ = λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessEntry {
    pub id: String,
    pub summary: String,
    pub n: usize,
    pub u: Expr,
    /// Right-hand side in the variable `u`.
    pub f: Expr,
    pub lambda: i8,
    pub loci: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CatalogEntry {
    Ansatz(AnsatzEntry),
    Pair(SolutionPair),
    Witness(WitnessEntry),
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        match self {
            CatalogEntry::Ansatz(a) => &a.id,
            CatalogEntry::Pair(p) => &p.name,
            CatalogEntry::Witness(w) => &w.id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CatalogEntry::Ansatz(_) => "ansatz",
            CatalogEntry::Pair(_) => "solution-pair",
            CatalogEntry::Witness(_) => "single-function-witness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntrySummary {
    pub id: &'static str,
    pub kind: &'static str,
    pub summary: &'static str,
}

const ENTRIES: &[EntrySummary] = &[
    EntrySummary { id: "s3_ex1", kind: "ansatz", summary: "y = ax, z = dx; φ_yy − φ_zz = F(φ)" },
    EntrySummary { id: "s3_ex2", kind: "ansatz", summary: "y = ax, z = ((bx)² + (cx)² + (dx)²)^(1/2); radial wave equation" },
    EntrySummary { id: "s3_ex3", kind: "ansatz", summary: "y = bx + Φ(ax + dx), z = cx; Φ arbitrary" },
    EntrySummary { id: "s3_ex4", kind: "ansatz", summary: "y = ((bx)² + (cx)²)^(1/2), z = ax + dx" },
    EntrySummary { id: "null_cone_pair", kind: "solution-pair", summary: "v = x0 − r, w = x0 + r, r = (x1² + x2² + x3²)^(1/2)" },
    EntrySummary { id: "linear_pair", kind: "solution-pair", summary: "v = x0 + x1, w = x0 − x1" },
    EntrySummary { id: "elliptic_linear_pair", kind: "solution-pair", summary: "v = x1 + i·x2, v* = x1 − i·x2" },
    EntrySummary { id: "parabolic_linear_pair", kind: "solution-pair", summary: "v = x1, w = x0 + x3, λ = −1" },
    EntrySummary { id: "stmt2_witness_N1", kind: "single-function-witness", summary: "u = (x0² − x1²)^(1/2), F = 1/u" },
    EntrySummary { id: "stmt2_witness_N2", kind: "single-function-witness", summary: "u = (x0² − x1² − x2²)^(1/2), F = 2/u" },
    EntrySummary { id: "stmt2_witness_N3", kind: "single-function-witness", summary: "u = (x0² − x1² − x2² − x3²)^(1/2), F = 3/u" },
];

pub fn list_entries() -> &'static [EntrySummary] {
    ENTRIES
}

/// Instantiates an entry. `frame` applies to the frame-dependent ansatzes;
/// `arbitrary` is the function `Φ(t)` of `s3_ex3` (default zero).
pub fn get_entry(id: &str, frame: Option<&Frame>, arbitrary: Option<&Expr>) -> Result<CatalogEntry> {
    let standard = Frame::standard(3);
    let frame = frame.unwrap_or(&standard);
    if id.starts_with("s3_") {
        let report = validate_frame(frame);
        if !report.pass || frame.n != 3 {
            return Err(Error::InvalidFrame(format!("{id} needs a valid frame with n = 3")));
        }
    }
    Ok(match id {
        "s3_ex1" => CatalogEntry::Ansatz(s3_ex1(frame)),
        "s3_ex2" => CatalogEntry::Ansatz(s3_ex2(frame)),
        "s3_ex3" => CatalogEntry::Ansatz(s3_ex3(frame, arbitrary)?),
        "s3_ex4" => CatalogEntry::Ansatz(s3_ex4(frame)),
        "null_cone_pair" => CatalogEntry::Pair(null_cone_pair()),
        "linear_pair" => CatalogEntry::Pair(linear_pair()),
        "elliptic_linear_pair" => CatalogEntry::Pair(elliptic_linear_pair()),
        "parabolic_linear_pair" => CatalogEntry::Pair(parabolic_linear_pair()),
        "stmt2_witness_N1" => CatalogEntry::Witness(stmt2_witness(1)),
        "stmt2_witness_N2" => CatalogEntry::Witness(stmt2_witness(2)),
        "stmt2_witness_N3" => CatalogEntry::Witness(stmt2_witness(3)),
        _ => return Err(Error::UnknownEntry(id.to_string())),
    })
}

pub fn ansatz_entry(id: &str, frame: Option<&Frame>, arbitrary: Option<&Expr>) -> Result<AnsatzEntry> {
    match get_entry(id, frame, arbitrary)? {
        CatalogEntry::Ansatz(a) => Ok(a),
        _ => Err(Error::InvalidInput(format!("{id} is not an ansatz entry"))),
    }
}

pub fn pair_entry(id: &str) -> Result<SolutionPair> {
    match get_entry(id, None, None)? {
        CatalogEntry::Pair(p) => Ok(p),
        _ => Err(Error::InvalidInput(format!("{id} is not a solution pair"))),
    }
}

fn profile(texts: [&str; 5]) -> ReductionProfile {
    ReductionProfile::parse(texts).expect("built-in profile")
}

fn sum_of_squares(forms: &[Expr]) -> Expr {
    forms
        .iter()
        .map(|f| f.powi(2))
        .reduce(|a, b| a + b)
        .expect("at least one form")
}

fn ansatz(y: Expr, z: Expr) -> AnsatzPair {
    AnsatzPair::new(y, z, 3).expect("built-in ansatz")
}

fn s3_ex1(f: &Frame) -> AnsatzEntry {
    AnsatzEntry {
        id: "s3_ex1".into(),
        summary: ENTRIES[0].summary.into(),
        pair: ansatz(Frame::form(&f.a), Frame::form(&f.d)),
        profile: ReductionProfile::constant([1, 0, -1, 0, 0]),
        case: Case::Hyperbolic,
        equation: ReducedId::Wave,
        expected_form: "φ_yy − φ_zz = F(φ)",
        loci: vec![],
    }
}

fn s3_ex2(f: &Frame) -> AnsatzEntry {
    let z = sum_of_squares(&[Frame::form(&f.b), Frame::form(&f.c), Frame::form(&f.d)]).sqrt();
    AnsatzEntry {
        id: "s3_ex2".into(),
        summary: ENTRIES[1].summary.into(),
        pair: ansatz(Frame::form(&f.a), z.clone()),
        profile: profile(["1", "0", "-1", "0", "-2/z"]),
        case: Case::Hyperbolic,
        equation: ReducedId::RadialWave,
        expected_form: "φ_yy − φ_zz − (2/z)φ_z = F(φ)",
        loci: vec![z],
    }
}

fn s3_ex3(f: &Frame, arbitrary: Option<&Expr>) -> Result<AnsatzEntry> {
    let phi = arbitrary.cloned().unwrap_or_else(Expr::zero);
    if phi.max_var().is_some_and(|i| i > 0) {
        return Err(Error::InvalidInput("the arbitrary function takes one variable t".into()));
    }
    let argument = Frame::form(&f.a) + Frame::form(&f.d);
    let y = (Frame::form(&f.b) + phi.substitute(&[argument])).simplify();
    Ok(AnsatzEntry {
        id: "s3_ex3".into(),
        summary: ENTRIES[2].summary.into(),
        pair: ansatz(y, Frame::form(&f.c)),
        profile: ReductionProfile::constant([-1, 0, -1, 0, 0]),
        case: Case::Elliptic,
        equation: ReducedId::NegativeLaplace,
        expected_form: "−φ_zz − φ_yy = F(φ)",
        loci: vec![],
    })
}

fn s3_ex4(f: &Frame) -> AnsatzEntry {
    let y = sum_of_squares(&[Frame::form(&f.b), Frame::form(&f.c)]).sqrt();
    AnsatzEntry {
        id: "s3_ex4".into(),
        summary: ENTRIES[3].summary.into(),
        pair: ansatz(y.clone(), (Frame::form(&f.a) + Frame::form(&f.d)).simplify()),
        profile: profile(["-1", "0", "0", "-1/y", "0"]),
        case: Case::Parabolic { lambda: -1 },
        equation: ReducedId::AxialParabolic,
        expected_form: "−φ_yy − (1/y)φ_y = F(φ)",
        loci: vec![y],
    }
}

fn x(text: &str) -> Expr {
    parse(text, 3).expect("built-in expression")
}

fn vw(text: &str) -> Expr {
    parse_with(text, &Symbols::vw()).expect("built-in expression")
}

/// `v = x0 − r`, `w = x0 + r`: `v·w = 2`, `□v = 4/(w − v)`,
/// `□w = −4/(w − v)`, with `Φ = Ψ = (w − v)²`.
pub fn null_cone_pair() -> SolutionPair {
    let r = x("sqrt(x1^2 + x2^2 + x3^2)");
    SolutionPair {
        name: "null_cone_pair".into(),
        pair: ansatz(Expr::var(0) - &r, Expr::var(0) + &r),
        system: PairSystem::Hyperbolic,
        h: Expr::int(2),
        big_v: vw("4/(w - v)"),
        big_w: vw("-4/(w - v)"),
        phi: Some(vw("(w - v)^2")),
        psi: Some(vw("(w - v)^2")),
        loci: vec![r],
    }
}

pub fn linear_pair() -> SolutionPair {
    SolutionPair {
        name: "linear_pair".into(),
        pair: ansatz(x("x0 + x1"), x("x0 - x1")),
        system: PairSystem::Hyperbolic,
        h: Expr::int(2),
        big_v: Expr::zero(),
        big_w: Expr::zero(),
        phi: Some(Expr::one()),
        psi: Some(Expr::one()),
        loci: vec![],
    }
}

/// Complex null pair with `v·v* = −2`.
pub fn elliptic_linear_pair() -> SolutionPair {
    SolutionPair {
        name: "elliptic_linear_pair".into(),
        pair: ansatz(x("x1 + i*x2"), x("x1 - i*x2")),
        system: PairSystem::Elliptic,
        h: Expr::int(-2),
        big_v: Expr::zero(),
        big_w: Expr::zero(),
        phi: Some(Expr::one()),
        psi: Some(Expr::one()),
        loci: vec![],
    }
}

pub fn parabolic_linear_pair() -> SolutionPair {
    SolutionPair {
        name: "parabolic_linear_pair".into(),
        pair: ansatz(x("x1"), x("x0 + x3")),
        system: PairSystem::Parabolic { lambda: -1 },
        h: Expr::zero(),
        big_v: Expr::zero(),
        big_w: Expr::zero(),
        phi: Some(Expr::one()),
        psi: None,
        loci: vec![],
    }
}

/// `u = (x0² − x1² − ⋯ − x_N²)^(1/2)` with `u_μu_μ = 1`, `□u = N/u`.
pub fn stmt2_witness(big_n: usize) -> WitnessEntry {
    let mut arg = x("x0^2");
    for a in 1..=big_n {
        arg = arg - Expr::var(a).powi(2);
    }
    let u = arg.sqrt();
    WitnessEntry {
        id: format!("stmt2_witness_N{big_n}"),
        summary: ENTRIES[7 + big_n].summary.into(),
        n: 3,
        u: u.clone(),
        f: Expr::int(big_n as i64) / Expr::var(0),
        lambda: 1,
        loci: vec![u],
    }
}

/// TOML ansatz spec text for an ansatz entry (the format read by
/// [`crate::cli::AnsatzSpec`]).
pub fn export_spec(entry: &AnsatzEntry, frame: Option<&Frame>) -> String {
    let profile = entry.profile.strings();
    let mut out = String::new();
    out.push_str(&format!("# {}: {}\n", entry.id, entry.summary));
    out.push_str(&format!("n = {}\n", entry.pair.n));
    out.push_str(&format!("y = {:?}\n", entry.pair.y.to_string()));
    out.push_str(&format!("z = {:?}\n", entry.pair.z.to_string()));
    if !entry.loci.is_empty() {
        let loci: Vec<String> = entry.loci.iter().map(|l| format!("{:?}", l.to_string())).collect();
        out.push_str(&format!("loci = [{}]\n", loci.join(", ")));
    }
    if let Some(f) = frame {
        let rows: Vec<String> = f
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(", ")))
            .collect();
        out.push_str(&format!("frame = [{}]\n", rows.join(", ")));
    }
    out.push_str("\n[profile]\n");
    for (key, value) in ["r", "q", "s", "R", "S"].iter().zip(profile) {
        out.push_str(&format!("{key} = {value:?}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{sample_points, verify_reduction_conditions, SampleConfig};

    #[test]
    fn listing_is_stable() {
        let ids: Vec<_> = list_entries().iter().map(|e| e.id).collect();
        for id in ["s3_ex1", "s3_ex2", "s3_ex3", "s3_ex4", "null_cone_pair", "stmt2_witness_N3"] {
            assert!(ids.contains(&id));
        }
        for e in list_entries() {
            assert_eq!(get_entry(e.id, None, None).unwrap().kind(), e.kind);
            assert_eq!(get_entry(e.id, None, None).unwrap().id(), e.id);
        }
        assert!(matches!(get_entry("nope", None, None), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn standard_frame_instances() {
        let e = ansatz_entry("s3_ex1", None, None).unwrap();
        assert_eq!(e.pair.y.to_string(), "x0");
        assert_eq!(e.pair.z.to_string(), "x3");
        let e = ansatz_entry("s3_ex2", None, None).unwrap();
        assert_eq!(e.pair.z.to_string(), "sqrt(x1^2 + x2^2 + x3^2)");
        let sin = parse_with("sin(t)", &Symbols::t()).unwrap();
        let e = ansatz_entry("s3_ex3", None, Some(&sin)).unwrap();
        assert_eq!(e.pair.y.to_string(), "x1 + sin(x0 + x3)");
        assert_eq!(e.pair.z.to_string(), "x2");
    }

    #[test]
    fn example_one_is_exact() {
        let e = ansatz_entry("s3_ex1", None, None).unwrap();
        let (pts, _) = sample_points(&e.pair, Some(&e.profile), &e.loci, &Default::default(), &SampleConfig::default());
        let rep = verify_reduction_conditions(&e.pair, &e.profile, &pts);
        assert!(rep.pass);
        assert!(rep.conditions.iter().all(|c| c.max_residual == 0.0));
    }

    #[test]
    fn bad_frame_is_rejected() {
        let f = Frame::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(matches!(get_entry("s3_ex1", Some(&f), None), Err(Error::InvalidFrame(_))));
    }

    #[test]
    fn exported_spec_mentions_profile() {
        let text = export_spec(&ansatz_entry("s3_ex2", None, None).unwrap(), None);
        assert!(text.contains("S = \"-2/z\""), "{text}");
    }
}
