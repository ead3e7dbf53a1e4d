//! Command-line front end. Every command prints one JSON report carrying
//! `schema_version`, the resolved run configuration and either a result or
//! an error; `run` returns the report and the process exit status.
//!
//! Exit status: 0 success, 1 verification failure, 2 input error,
//! 3 precision or budget failure.

use crate::corpus::{self, CorpusElement};
use crate::error::{Error, Result};
use crate::ff::FiniteField;
use crate::field::FieldData;
use crate::invariants::{elliptic_invariants, quasi_regular_invariants, Settings};
use crate::linalg::Mat;
use crate::mass::mass_sums;
use crate::matrix::{classify, Classification};
use crate::orders::HereditaryOrder;
use crate::poly::SeriesPoly;
use crate::series::Series;
use crate::strata::{
    approximate_given_beta, stratum_char_poly, stratum_flags, tame_corestriction, verify_min_approx_sequence,
    ApproxLevel, EmbeddedField, MinApproxSequence, Splitting, Stratum,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_PRECISION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "orbinv", version, about = "Invariants of elliptic elements and strata over F_q((T))")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// field order q (alternatively --p and --r)
    #[arg(long, global = true)]
    pub q: Option<u32>,
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub r: Option<u32>,
    /// defining polynomial of F_q over F_p, coefficients low to high, e.g. "1,1,0,1"
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// initial T-adic working precision
    #[arg(long, global = true, default_value_t = 48)]
    pub work: i64,
    /// precision is doubled on precision failures up to this bound
    #[arg(long, global = true, default_value_t = 400)]
    pub max_work: i64,
    /// k_0 scan window; chosen from the element when omitted
    #[arg(long, global = true)]
    pub window: Option<i64>,
    /// node budget for Eisenstein enumeration
    #[arg(long, global = true, default_value_t = 5_000_000)]
    pub budget: usize,
    /// seed for randomized corpora
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// One element: a matrix, or a polynomial standing for its companion matrix.
#[derive(Args, Debug, Clone)]
pub struct ElementInput {
    /// characteristic polynomial, e.g. "x^2 - T" or '["-T","0","1"]'
    #[arg(long, conflicts_with_all = ["matrix", "matrix_file"])]
    pub poly: Option<String>,
    /// matrix as JSON rows of series, e.g. '[["0","T"],["1","0"]]'
    #[arg(long, conflicts_with = "matrix_file")]
    pub matrix: Option<String>,
    /// file holding the JSON matrix
    #[arg(long)]
    pub matrix_file: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// closed / quasi-regular / elliptic / separable classification
    Classify(ElementInput),
    /// every invariant of a quasi-regular element
    Invariants(ElementInput),
    /// normalization factors η_G and η_g
    Eta(ElementInput),
    /// lattice indices μ and μ⁺
    Mu(ElementInput),
    /// check η_G·μ = 1 and η_g·μ⁺ = 1 on a seeded corpus
    VerifyEtaMu {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Eisenstein enumeration, isomorphism classes and mass sums
    MassFormula {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        precision: i64,
        /// largest discriminant exponent counted; defaults to precision − 2
        #[arg(long)]
        dmax: Option<i64>,
    },
    #[command(subcommand)]
    Stratum(StratumCommand),
    #[command(subcommand)]
    Approx(ApproxCommand),
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Subcommand, Debug)]
pub enum StratumCommand {
    /// purity, simplicity, k_0 and the characteristic polynomial of a stratum
    Verify {
        /// JSON stratum description, "-" for stdin
        #[arg(long)]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ApproxCommand {
    /// approximate γ against a given β and verify the induced sequence
    Run {
        /// JSON description, "-" for stdin
        #[arg(long)]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorpusCommand {
    /// seeded corpus of quasi-regular elliptic matrices
    Gen {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

/// Outcome of one command before rendering.
pub struct Report {
    pub exit: u8,
    pub body: Value,
    /// key of an array of flat records, rendered as rows in CSV output
    pub table: Option<&'static str>,
}

impl Report {
    fn ok(body: Value) -> Report {
        Report { exit: EXIT_OK, body, table: None }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::RelationViolated(_) | Error::InconsistentMinimality(_) => EXIT_VIOLATION,
        Error::InvalidInput(_)
        | Error::Parse(_)
        | Error::NotIrreducible
        | Error::Inseparable
        | Error::NotSublattice
        | Error::DivisionByZero
        | Error::Precondition(_) => EXIT_INPUT,
        _ if e.is_precision_like() => EXIT_PRECISION,
        _ => EXIT_PRECISION,
    }
}

fn field(cfg: &RunConfig) -> Result<Arc<FiniteField>> {
    let (p, r) = match (cfg.q, cfg.p, cfg.r) {
        (Some(q), None, None) => {
            let f = FiniteField::from_order(q)?;
            (f.p(), f.r())
        }
        (None, Some(p), r) => (p, r.unwrap_or(1)),
        (None, None, _) => return Err(Error::InvalidInput("give the field as --q or --p/--r".into())),
        _ => return Err(Error::InvalidInput("give either --q or --p/--r, not both".into())),
    };
    match &cfg.modulus {
        None => FiniteField::new(p, r),
        Some(m) => {
            let coeffs: std::result::Result<Vec<u32>, _> = m.split(',').map(|c| c.trim().parse::<u32>()).collect();
            let coeffs = coeffs.map_err(|e| Error::InvalidInput(format!("--modulus: {e}")))?;
            if coeffs.len() != r as usize + 1 {
                return Err(Error::InvalidInput(format!("--modulus needs {} coefficients", r + 1)));
            }
            FiniteField::with_modulus(p, coeffs)
        }
    }
}

fn settings(cfg: &RunConfig) -> Result<Settings> {
    if cfg.work <= 0 || cfg.max_work < cfg.work || cfg.window.is_some_and(|w| w <= 0) || cfg.budget == 0 {
        return Err(Error::InvalidInput(
            "precision caps and budgets must be positive, with --max-work ≥ --work".into(),
        ));
    }
    Ok(Settings { work: cfg.work, max_work: cfg.max_work, window: cfg.window })
}

fn config_json(cfg: &RunConfig, f: Option<&FiniteField>) -> Value {
    json!({
        "q": f.map(|f| f.q()),
        "p": f.map(|f| f.p()),
        "r": f.map(|f| f.r()),
        "modulus": f.map(|f| f.modulus().to_vec()),
        "work": cfg.work,
        "max_work": cfg.max_work,
        "window": cfg.window,
        "budget": cfg.budget,
        "seed": cfg.seed,
    })
}

fn parse_matrix_json(f: &Arc<FiniteField>, v: &Value) -> Result<Mat> {
    let rows: Vec<Vec<String>> =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("matrix must be rows of strings: {e}")))?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::InvalidInput("matrix must be square and nonempty".into()));
    }
    Mat::parse(f, &rows)
}

/// An expression in x, or a JSON list of coefficients from degree 0 up.
pub fn parse_poly(f: &Arc<FiniteField>, text: &str) -> Result<SeriesPoly> {
    if text.trim_start().starts_with('[') {
        let cs: Vec<String> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("coefficient list: {e}")))?;
        let refs: Vec<&str> = cs.iter().map(String::as_str).collect();
        return SeriesPoly::from_texts(f, &refs);
    }
    SeriesPoly::parse(f, text)
}

fn read_element(f: &Arc<FiniteField>, inp: &ElementInput) -> Result<Mat> {
    if let Some(p) = &inp.poly {
        return Mat::companion(&parse_poly(f, p)?);
    }
    let text = match (&inp.matrix, &inp.matrix_file) {
        (Some(m), _) => m.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Err(Error::InvalidInput("give --poly, --matrix or --matrix-file".into())),
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    parse_matrix_json(f, &v)
}

fn read_input(path: &str) -> Result<Value> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// q^k as an exact rational string, or "q^k" when it does not fit.
pub fn power_text(q: u32, k: i64) -> String {
    let mag = (q as i128).checked_pow(k.unsigned_abs().min(u32::MAX as u64) as u32);
    match mag {
        Some(m) if k >= 0 => m.to_string(),
        Some(m) => format!("1/{m}"),
        None => format!("{q}^{k}"),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn classification(g: &Mat, s: &Settings) -> Result<Classification> {
    classify(g, s.work)
}

/// Elliptic invariants when F[γ] is a field, block invariants when γ is
/// quasi-regular, an input error otherwise.
fn invariants_value(f: &FiniteField, g: &Mat, s: &Settings) -> Result<(Classification, Value)> {
    let cls = classification(g, s)?;
    let chi = g.char_poly();
    let q = f.q();
    if cls.quasi_regular_elliptic {
        let inv = elliptic_invariants(&chi, s)?;
        let mut v = to_value(&inv);
        let m = v.as_object_mut().unwrap();
        m.insert("kind".into(), json!("elliptic"));
        m.insert("eta_G".into(), json!(power_text(q, -inv.eta_group_exp)));
        m.insert("eta_g".into(), json!(power_text(q, -inv.eta_lie_exp)));
        m.insert("mu".into(), json!(power_text(q, inv.mu_exp)));
        m.insert("mu_plus".into(), json!(power_text(q, inv.mu_plus_exp)));
        return Ok((cls, v));
    }
    if cls.quasi_regular {
        let inv = quasi_regular_invariants(&chi, s)?;
        let mut v = to_value(&inv);
        let m = v.as_object_mut().unwrap();
        m.insert("kind".into(), json!("quasi_regular"));
        m.insert("eta_G".into(), json!(power_text(q, -inv.eta_group_exp)));
        m.insert("eta_g".into(), json!(power_text(q, -inv.eta_lie_exp)));
        return Ok((cls, v));
    }
    Err(Error::Precondition("γ is not quasi-regular: F[γ] is not a product of fields of total degree N".into()))
}

fn pick(v: &Value, keys: &[&str]) -> Value {
    let mut out = Map::new();
    for k in keys {
        if let Some(x) = v.get(*k) {
            out.insert((*k).to_string(), x.clone());
        }
    }
    Value::Object(out)
}

fn cmd_eta(f: &FiniteField, g: &Mat, s: &Settings) -> Result<Report> {
    let (_, v) = invariants_value(f, g, s)?;
    Ok(Report::ok(pick(&v, &["kind", "N", "eta_G_exp", "eta_g_exp", "eta_G", "eta_g"])))
}

fn cmd_mu(f: &FiniteField, g: &Mat, s: &Settings) -> Result<Report> {
    let (cls, v) = invariants_value(f, g, s)?;
    if !cls.quasi_regular_elliptic {
        return Err(Error::Precondition("μ is defined for quasi-regular elliptic elements only".into()));
    }
    Ok(Report::ok(pick(&v, &["N", "mu_exp", "mu_plus_exp", "mu", "mu_plus", "minimal", "k_tilde", "n_F"])))
}

fn cmd_verify_eta_mu(f: &Arc<FiniteField>, cfg: &RunConfig, s: &Settings, n: usize, count: usize) -> Result<Report> {
    let els = corpus::generate(f, n, count, cfg.seed, s.work)?;
    let mut rows = Vec::new();
    let mut violations = 0;
    for el in &els {
        let inv = elliptic_invariants(&el.char_poly(f)?, s)?;
        let ok = inv.eta_group_exp == inv.mu_exp && inv.eta_lie_exp == inv.mu_plus_exp;
        violations += !ok as usize;
        rows.push(json!({
            "id": el.id,
            "kind": el.kind,
            "chi": el.chi,
            "eta_G_exp": inv.eta_group_exp,
            "mu_exp": inv.mu_exp,
            "eta_g_exp": inv.eta_lie_exp,
            "mu_plus_exp": inv.mu_plus_exp,
            "minimal": inv.minimal,
            "separable": inv.separable,
            "ok": ok,
        }));
    }
    Ok(Report {
        exit: if violations == 0 { EXIT_OK } else { EXIT_VIOLATION },
        body: json!({ "N": n, "count": count, "violations": violations, "elements": rows }),
        table: Some("elements"),
    })
}

fn cmd_mass(cfg: &RunConfig, q: u32, n: usize, m: i64, dmax: Option<i64>) -> Result<Report> {
    let f = FiniteField::from_order(q)?;
    if m < 2 {
        return Err(Error::InvalidInput("--precision must be at least 2".into()));
    }
    let sums = mass_sums(q, n, m, dmax, cfg.budget)?;
    let tame = !n.is_multiple_of(f.p() as usize);
    let v = &sums.values;
    let exact = v.sum_totally_ramified == (n as i128).into() && v.weighted_sum == 1.into();
    let mut body = to_value(&sums);
    let classes = body["catalog"]["classes"].take();
    let b = body.as_object_mut().unwrap();
    b.insert("classes".into(), classes);
    b.insert("tame".into(), json!(tame));
    b.insert("tame_exact".into(), if tame { json!(exact) } else { Value::Null });
    b.insert("grand_matches".into(), json!(v.grand_sum == v.grand_target));
    Ok(Report { exit: if tame && !exact { EXIT_VIOLATION } else { EXIT_OK }, body, table: Some("classes") })
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum OrderSpec {
    /// the standard order of the given period on F^dim
    Standard { period: usize, dim: usize },
    /// 𝔄(E) in the power basis of E = F[x]/(poly)
    Field { poly: String },
    /// explicit adapted basis with lattice levels
    Basis { basis: Vec<Vec<String>>, levels: Vec<i64>, period: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StratumInput {
    q: Option<u32>,
    order: OrderSpec,
    n: i64,
    r: i64,
    /// defaults to the generator x for a field order
    gamma: Option<Value>,
}

fn field_from_input(cfg: &RunConfig, q: Option<u32>) -> Result<Arc<FiniteField>> {
    match q {
        Some(q) => {
            let f = FiniteField::from_order(q)?;
            if cfg.q.is_some_and(|c| c != q) {
                return Err(Error::InvalidInput("--q disagrees with the input file".into()));
            }
            Ok(f)
        }
        None => field(cfg),
    }
}

fn cmd_stratum(cfg: &RunConfig, s: &Settings, path: &str) -> Result<(Report, Arc<FiniteField>)> {
    let inp: StratumInput =
        serde_json::from_value(read_input(path)?).map_err(|e| Error::Parse(format!("stratum description: {e}")))?;
    let f = field_from_input(cfg, inp.q)?;
    let (order, default_gamma) = match &inp.order {
        OrderSpec::Standard { period, dim } => (HereditaryOrder::standard(&f, *period, *dim, s.work)?, None),
        OrderSpec::Field { poly } => {
            let fd = FieldData::new(&SeriesPoly::parse(&f, poly)?, s.work)?;
            let g = fd.mult(&fd.gamma());
            (fd.order()?, Some(g))
        }
        OrderSpec::Basis { basis, levels, period } => {
            (HereditaryOrder::with_basis(Mat::parse(&f, basis)?, levels.clone(), *period, s.work)?, None)
        }
    };
    let gamma = match (&inp.gamma, default_gamma) {
        (Some(v), _) => parse_matrix_json(&f, v)?,
        (None, Some(g)) => g,
        (None, None) => return Err(Error::InvalidInput("gamma is required for this order".into())),
    };
    let st = Stratum::new(order, inp.n, inp.r, gamma)?;
    let window = s.window.unwrap_or(4 * st.order.dim() as i64 + 2 * inp.n.abs() + 8);
    let flags = stratum_flags(&st, s.work, window)?;
    let cp = if flags.pure { Some(stratum_char_poly(&st)?) } else { None };
    let body = json!({
        "n": inp.n,
        "r": inp.r,
        "gamma": st.gamma.to_texts(),
        "flags": flags,
        "char_poly_mod_p": cp,
    });
    Ok((Report::ok(body), f))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxInput {
    q: Option<u32>,
    /// exact Eisenstein polynomial of E/F
    phi: String,
    /// V = E^d
    d: usize,
    /// β ∈ E as a series in the uniformizer, acting as a scalar
    beta: String,
    r: i64,
    gamma: Value,
    #[serde(default = "default_target")]
    target: i64,
    #[serde(default = "default_tolerance")]
    tolerance: i64,
}

fn default_target() -> i64 {
    24
}
fn default_tolerance() -> i64 {
    8
}

fn cmd_approx(cfg: &RunConfig, s: &Settings, path: &str) -> Result<(Report, Arc<FiniteField>)> {
    let inp: ApproxInput = serde_json::from_value(read_input(path)?)
        .map_err(|e| Error::Parse(format!("approximation description: {e}")))?;
    let f = field_from_input(cfg, inp.q)?;
    let emb = EmbeddedField::new(&SeriesPoly::parse(&f, &inp.phi)?, inp.d, s.work)?;
    let cor = tame_corestriction(&emb.fd)?;
    let order = emb.order()?;
    let x = emb.corrector(&cor);
    let beta = emb.scalar(&emb.elem_of_series(&Series::parse(emb.top(), &inp.beta)?));
    let n = -order.valuation(&beta)?;
    let gamma = parse_matrix_json(&f, &inp.gamma)?;
    if gamma.rows() != emb.big_n() {
        return Err(Error::InvalidInput(format!("gamma must be {0}×{0}", emb.big_n())));
    }
    let window = s.window.unwrap_or(4 * emb.big_n() as i64 + 2 * n.abs() + 8);
    let sp = Splitting::new(&order, &beta, &x, s.work, window)?;
    let ap = approximate_given_beta(&sp, inp.r, &gamma, inp.target)?;
    let cls = classify(&gamma, s.work)?;
    if !cls.quasi_regular_elliptic {
        return Err(Error::Precondition("γ is not quasi-regular elliptic".into()));
    }
    let (e, fdeg) = (cls.factors[0].e, cls.factors[0].f);
    let seq = MinApproxSequence {
        gammas: vec![gamma.clone(), beta.clone()],
        levels: vec![ApproxLevel {
            order,
            n,
            r: inp.r,
            field: emb.clone(),
            corestriction: cor.clone(),
            conjugator: ap.conjugator.clone(),
            x: x.clone(),
            b: ap.b.clone(),
            e,
            f: fdeg,
        }],
        tolerance: inp.tolerance,
    };
    let rep = verify_min_approx_sequence(&seq, s.work, window);
    let body = json!({
        "n": n,
        "r": inp.r,
        "k0": sp.k0,
        "tame": cor.tame,
        "approximation": {
            "conjugator": ap.conjugator.to_texts(),
            "b": ap.b.to_texts(),
            "b_E": emb.extract(&ap.b).to_texts(),
            "iterations": ap.iterations,
            "residual_level": ap.residual_level,
        },
        "sequence": {
            "gammas": [gamma.to_texts(), beta.to_texts()],
            "levels": [{ "n": n, "r": inp.r, "e": e, "f": fdeg, "x": x.to_texts() }],
            "tolerance": inp.tolerance,
        },
        "verification": rep,
    });
    Ok((Report { exit: if rep.valid { EXIT_OK } else { EXIT_VIOLATION }, body, table: None }, f))
}

fn cmd_corpus(f: &Arc<FiniteField>, cfg: &RunConfig, s: &Settings, n: usize, count: usize) -> Result<Report> {
    let els: Vec<CorpusElement> = corpus::generate(f, n, count, cfg.seed, s.work)?;
    Ok(Report { exit: EXIT_OK, body: json!({ "N": n, "count": count, "elements": els }), table: Some("elements") })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::Invariants(_) => "invariants",
        Command::Eta(_) => "eta",
        Command::Mu(_) => "mu",
        Command::VerifyEtaMu { .. } => "verify-eta-mu",
        Command::MassFormula { .. } => "mass-formula",
        Command::Stratum(_) => "stratum verify",
        Command::Approx(_) => "approx run",
        Command::Corpus(_) => "corpus gen",
    }
}

fn dispatch(cli: &Cli) -> (Result<Report>, Option<Arc<FiniteField>>) {
    let cfg = &cli.config;
    let s = match settings(cfg) {
        Ok(s) => s,
        Err(e) => return (Err(e), None),
    };
    match &cli.command {
        Command::MassFormula { n, precision, dmax } => {
            let q = match field(cfg) {
                Ok(_) if cfg.modulus.is_some() => {
                    return (
                        Err(Error::InvalidInput("mass-formula uses the standard field model; drop --modulus".into())),
                        None,
                    )
                }
                Ok(f) => f.q(),
                Err(e) => return (Err(e), None),
            };
            let f = FiniteField::from_order(q).ok();
            (cmd_mass(cfg, q, *n, *precision, *dmax), f)
        }
        Command::Stratum(StratumCommand::Verify { input }) => match cmd_stratum(cfg, &s, input) {
            Ok((r, f)) => (Ok(r), Some(f)),
            Err(e) => (Err(e), field(cfg).ok()),
        },
        Command::Approx(ApproxCommand::Run { input }) => match cmd_approx(cfg, &s, input) {
            Ok((r, f)) => (Ok(r), Some(f)),
            Err(e) => (Err(e), field(cfg).ok()),
        },
        cmd => {
            let f = match field(cfg) {
                Ok(f) => f,
                Err(e) => return (Err(e), None),
            };
            let res = match cmd {
                Command::Classify(inp) => {
                    read_element(&f, inp).and_then(|g| classification(&g, &s)).map(|c| Report::ok(to_value(&c)))
                }
                Command::Invariants(inp) => read_element(&f, inp).and_then(|g| {
                    let (cls, mut v) = invariants_value(&f, &g, &s)?;
                    v.as_object_mut().unwrap().insert("classification".into(), to_value(&cls));
                    Ok(Report::ok(v))
                }),
                Command::Eta(inp) => read_element(&f, inp).and_then(|g| cmd_eta(&f, &g, &s)),
                Command::Mu(inp) => read_element(&f, inp).and_then(|g| cmd_mu(&f, &g, &s)),
                Command::VerifyEtaMu { n, count } => cmd_verify_eta_mu(&f, cfg, &s, *n, *count),
                Command::Corpus(CorpusCommand::Gen { n, count }) => cmd_corpus(&f, cfg, &s, *n, *count),
                _ => unreachable!("handled above"),
            };
            (res, Some(f))
        }
    }
}

/// Run a parsed command line: the JSON report and the exit status.
pub fn run(cli: &Cli) -> (Value, u8, Option<&'static str>) {
    let (res, f) = dispatch(cli);
    let mut out = Map::new();
    out.insert("schema_version".into(), json!(SCHEMA_VERSION));
    out.insert("command".into(), json!(command_name(&cli.command)));
    out.insert("config".into(), config_json(&cli.config, f.as_deref()));
    match res {
        Ok(rep) => {
            let status = match rep.exit {
                EXIT_OK => "ok",
                _ => "verification_failed",
            };
            out.insert("status".into(), json!(status));
            out.insert("result".into(), rep.body);
            (Value::Object(out), rep.exit, rep.table)
        }
        Err(e) => {
            let code = exit_code(&e);
            out.insert("status".into(), json!("error"));
            out.insert("error".into(), json!({ "kind": e.kind(), "message": e.to_string() }));
            (Value::Object(out), code, None)
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

/// CSV rendering: the command's table as rows when it has one, otherwise
/// the report flattened to key,value pairs.
pub fn render_csv(report: &Value, table: Option<&str>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let rows = table.and_then(|t| report.get("result").and_then(|r| r.get(t))).and_then(|r| r.as_array());
    match rows {
        Some(rows) if !rows.is_empty() => {
            let mut header = Vec::new();
            let flat: Vec<Vec<(String, String)>> = rows
                .iter()
                .map(|r| {
                    let mut kv = Vec::new();
                    flatten("", r, &mut kv);
                    kv
                })
                .collect();
            for (k, _) in &flat[0] {
                header.push(k.clone());
            }
            w.write_record(&header).expect("in-memory write");
            for kv in flat {
                w.write_record(kv.iter().map(|(_, v)| v)).expect("in-memory write");
            }
        }
        _ => {
            let mut kv = Vec::new();
            flatten("", report, &mut kv);
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, v) in kv {
                w.write_record([k, v]).expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// What the binary prints and its exit status.
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parse argv, run, and render. Usage errors exit with status 2 and a
/// message on stderr; library errors also go to stderr with their kind.
pub fn main_with_args<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            return Output { stdout: String::new(), stderr: e.render().to_string(), code: EXIT_INPUT };
        }
        Err(e) => return Output { stdout: e.render().to_string(), stderr: String::new(), code: EXIT_OK },
    };
    let (report, code, table) = run(&cli);
    let stderr = match report.get("error") {
        Some(err) => format!("error [{}]: {}\n", scalar_text(&err["kind"]), scalar_text(&err["message"])),
        None if code == EXIT_VIOLATION => "verification failed\n".to_string(),
        None => String::new(),
    };
    let stdout = match cli.config.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("JSON values serialize") + "\n",
        Format::Csv => render_csv(&report, table),
    };
    Output { stdout, stderr, code }
}
