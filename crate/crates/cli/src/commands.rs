//! Subcommands. Each returns an [`Outcome`]: the text to print and the exit
//! code (0 all checks pass, 1 a mathematical check failed, 2 input error).

use std::collections::BTreeMap;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use toda_core::bridge::{check_roundtrip, compare_def1_def2, lift, rectify_variant, v, ComparisonReport, SquareCheck};
use toda_core::chain::{homology, induced_on_homology, is_zero_on_homology, Cx};
use toda_core::gen::{random_cofibrant_cubical, random_recursive};
use toda_core::random::rng;
use toda_core::toda_recursive::{RectifiedDiagram, RectifyOutcome};
use toda_core::{GradedMap, Matrix};

use crate::error::InputError;
use crate::format::{parse, serialize, to_file, to_json, System, SCHEMA};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "toda", about = "Higher Toda brackets of chain complexes over F_p", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Field characteristic; for files it must match the file.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Emit a JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest cube dimension (system order) accepted.
    #[arg(long = "max-cube", global = true, default_value_t = 3)]
    pub max_cube: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Cubical,
    Recursive,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Cubical,
    Recursive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, check every condition, and solve missing nullhomotopies.
    Validate { file: String },
    /// Compute the bracket.
    Bracket {
        #[arg(long, value_enum, default_value = "both")]
        style: Style,
        file: String,
    },
    /// Compare the cubical bracket with the recursive bracket of the reduction.
    Compare { file: String },
    /// Reduce a cubical system to a recursive one.
    Reduce { file: String },
    /// Lift a recursive system to a strongly cofibrant cubical one.
    Lift { file: String },
    /// Lift, reduce and compare.
    Roundtrip { file: String },
    /// Replace the sequence by one with strictly zero composites.
    Rectify {
        /// Keep the last object and rectify through the cubical data.
        #[arg(long)]
        variant: bool,
        file: String,
    },
    /// Generate a random valid system.
    Gen {
        #[arg(long)]
        order: usize,
        /// Number of maps; defaults to order + 2.
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, value_enum, default_value = "cubical")]
        kind: GenKind,
        /// Largest dimension per degree of the random complexes.
        #[arg(long = "max-dim", default_value_t = 2)]
        max_dim: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

enum Failure {
    Input(InputError),
    Core(toda_core::Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<toda_core::Error> for Failure {
    fn from(e: toda_core::Error) -> Self {
        Failure::Core(e)
    }
}

/// A finished report: fields, status and a short human summary.
struct Report {
    code: i32,
    fields: Map<String, Value>,
    lines: Vec<String>,
    /// Printed instead of the summary when not in JSON mode.
    document: Option<String>,
}

impl Report {
    fn new(code: i32) -> Report {
        Report { code, fields: Map::new(), lines: vec![], document: None }
    }

    fn set(&mut self, k: &str, v: Value) {
        self.fields.insert(k.to_string(), v);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn fail_if(&mut self, bad: bool) {
        if bad {
            self.code = EXIT_FAIL;
        }
    }
}

fn status(code: i32) -> &'static str {
    match code {
        EXIT_PASS => "pass",
        EXIT_FAIL => "fail",
        _ => "error",
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Bracket { .. } => "bracket",
        Command::Compare { .. } => "compare",
        Command::Reduce { .. } => "reduce",
        Command::Lift { .. } => "lift",
        Command::Roundtrip { .. } => "roundtrip",
        Command::Rectify { .. } => "rectify",
        Command::Gen { .. } => "gen",
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let result = dispatch(cli);
    let (code, mut fields, text) = match result {
        Ok(r) => {
            let text = match (&r.document, cli.json) {
                (Some(doc), false) => doc.clone(),
                _ => {
                    let mut t = format!("{name}: {}\n", status(r.code));
                    for l in &r.lines {
                        t.push_str(&format!("  {l}\n"));
                    }
                    t
                }
            };
            (r.code, r.fields, text)
        }
        Err(f) => {
            let (kind, msg, extra) = match f {
                Failure::Input(e) => {
                    let extra = match &e {
                        InputError::Nullhomotopy { differences, .. } => Some(Value::Array(
                            differences.iter().map(|(n, d)| json!({"equation": n, "difference": graded(d)})).collect(),
                        )),
                        _ => None,
                    };
                    (e.kind(), e.to_string(), extra)
                }
                Failure::Core(toda_core::Error::CubeCap(n, cap)) => {
                    ("cube-cap", format!("order {n} exceeds --max-cube {cap}"), None)
                }
                Failure::Core(e) => ("invalid-system", e.to_string(), None),
            };
            let mut fields = Map::new();
            let mut err = Map::new();
            err.insert("kind".into(), json!(kind));
            err.insert("message".into(), json!(msg));
            if let Some(x) = extra {
                err.insert("differences".into(), x);
            }
            fields.insert("error".into(), Value::Object(err));
            (EXIT_INPUT, fields, format!("error ({kind}): {msg}\n"))
        }
    };
    if !cli.json {
        return Outcome { code, text };
    }
    fields.insert("schema".into(), json!(SCHEMA));
    fields.insert("command".into(), json!(name));
    fields.insert("status".into(), json!(status(code)));
    fields.insert("exit_code".into(), json!(code));
    Outcome { code, text: to_json(&Value::Object(fields)) }
}

fn load(cli: &Cli, path: &str) -> Result<System, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.into(), msg: e.to_string() })?;
    let parsed = parse(&text)?;
    if let Some(p) = cli.p {
        if p != parsed.file.p {
            return Err(InputError::Usage(format!("--p {p} does not match the file's p = {}", parsed.file.p)).into());
        }
    }
    let s = parsed.system()?;
    if s.order() > cli.max_cube {
        return Err(toda_core::Error::CubeCap(s.order(), cli.max_cube).into());
    }
    Ok(s)
}

/// Solves missing nullhomotopies; `Err` carries the obstructed stage.
fn complete(s: &mut System) -> Result<std::result::Result<Vec<(usize, usize)>, (usize, usize)>, Failure> {
    match s {
        System::Cubical(c) => {
            let missing = c.validate().missing;
            match c.complete()? {
                Some(()) => Ok(Ok(missing)),
                None => Ok(Err(c.validate().missing[0])),
            }
        }
        System::Recursive(r) => {
            let missing = r.missing();
            match r.build_tower(BTreeMap::new())? {
                Some(()) => Ok(Ok(missing)),
                None => Ok(Err(r.missing()[0])),
            }
        }
    }
}

/// Loads a system and solves for missing data; an obstructed stage is a
/// failed check.
fn load_complete(cli: &Cli, path: &str, rep: &mut Report) -> Result<Option<System>, Failure> {
    let mut s = load(cli, path)?;
    match complete(&mut s)? {
        Ok(solved) => {
            if !solved.is_empty() {
                rep.line(format!("solved nullhomotopies {solved:?}"));
            }
            rep.set("solved", json!(solved));
            Ok(Some(s))
        }
        Err((k, j)) => {
            rep.code = EXIT_FAIL;
            rep.line(format!("stage ({k}, {j}) is obstructed: no nullhomotopy exists"));
            rep.set("obstructed_stage", json!([k, j]));
            Ok(None)
        }
    }
}

fn matrix(m: &Matrix) -> Value {
    json!(m.to_rows())
}

pub fn graded(f: &GradedMap) -> Value {
    let x = f.source();
    let comps: Vec<Value> = if x.is_zero() { vec![] } else { x.degrees().map(|n| matrix(&f.comp(n))).collect() };
    json!({"shift": f.shift(), "lo": if x.is_zero() { 0 } else { x.lo() }, "components": comps})
}

fn dims(x: &Cx) -> Value {
    let m: BTreeMap<String, usize> = x.dims().into_iter().map(|(n, d)| (n.to_string(), d)).collect();
    json!(m)
}

fn ranks_json(r: &BTreeMap<i32, usize>) -> Value {
    let m: BTreeMap<String, usize> = r.iter().map(|(n, d)| (n.to_string(), *d)).collect();
    json!(m)
}

fn bracket_json(t: &GradedMap) -> Value {
    let ranks: BTreeMap<i32, usize> =
        induced_on_homology(t).into_iter().map(|(n, m)| (n, m.rank())).filter(|&(_, r)| r > 0).collect();
    json!({
        "map": graded(t),
        "zero": t.is_zero(),
        "zero_on_homology": is_zero_on_homology(t),
        "homology_ranks": ranks_json(&ranks),
        "source_dims": dims(t.source()),
        "target_dims": dims(t.target()),
    })
}

fn square_json(s: &SquareCheck) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(s.name));
    m.insert("pass".into(), json!(s.pass));
    if let Some(h) = s.homotopic {
        m.insert("homotopic".into(), json!(h));
    }
    if !s.pass {
        m.insert("difference".into(), s.difference.as_ref().map_or(Value::Null, graded));
    }
    Value::Object(m)
}

fn comparison_json(r: &ComparisonReport) -> Value {
    let verdicts = |vs: &[toda_core::bridge::Verdict]| -> Value {
        Value::Array(vs.iter().map(|v| json!({"name": v.name, "pass": v.pass})).collect())
    };
    json!({
        "passed": r.passed(),
        "strongly_cofibrant": r.strongly_cofibrant,
        "literal": verdicts(&r.literal),
        "squares": Value::Array(r.squares.iter().map(square_json).collect()),
        "quasi_isos": verdicts(&r.quasi_isos),
        "cubical": r.cubical.as_ref().map_or(Value::Null, bracket_json),
        "recursive": r.recursive.as_ref().map_or(Value::Null, bracket_json),
        "failures": r.failures(),
        "flags": r.flags(),
    })
}

fn comparison_lines(rep: &mut Report, r: &ComparisonReport) {
    rep.line(format!(
        "{} squares, {} quasi-isos, {} identities checked; strongly cofibrant: {}",
        r.squares.len(),
        r.quasi_isos.len(),
        r.literal.len(),
        r.strongly_cofibrant
    ));
    for f in r.failures() {
        rep.line(format!("FAILED {f}"));
    }
    for f in r.flags() {
        rep.line(format!("holds only up to homotopy: {f}"));
    }
}

fn system_summary(s: &System) -> Value {
    let (kind, objects) = match s {
        System::Cubical(c) => ("cubical", c.objects()),
        System::Recursive(r) => ("recursive", r.objects().to_vec()),
    };
    json!({
        "kind": kind,
        "order": s.order(),
        "length": objects.len() - 1,
        "objects": Value::Array(objects.iter().map(|x| json!({"dims": dims(x), "homology": ranks_json(&homology(x))})).collect()),
    })
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Validate { file } => cmd_validate(cli, file),
        Command::Bracket { style, file } => cmd_bracket(cli, *style, file),
        Command::Compare { file } => cmd_compare(cli, file),
        Command::Reduce { file } => cmd_reduce(cli, file),
        Command::Lift { file } => cmd_lift(cli, file),
        Command::Roundtrip { file } => cmd_roundtrip(cli, file),
        Command::Rectify { variant, file } => cmd_rectify(cli, *variant, file),
        Command::Gen { order, length, kind, max_dim } => cmd_gen(cli, *order, *length, *kind, *max_dim),
    }
}

fn cmd_validate(cli: &Cli, file: &str) -> Result<Report, Failure> {
    let mut rep = Report::new(EXIT_PASS);
    let Some(s) = load_complete(cli, file, &mut rep)? else { return Ok(rep) };
    rep.set("system", system_summary(&s));
    match &s {
        System::Cubical(c) => {
            if c.length() == c.order() + 2 {
                let ok = c.is_strongly_cofibrant_system()?.ok;
                rep.set("strongly_cofibrant", json!(ok));
                rep.line(format!("strongly cofibrant: {ok}"));
            }
        }
        System::Recursive(r) => {
            let all = r.cofibrancy().values().all(|&b| b);
            rep.set("strongly_cofibrant", json!(all));
            rep.line(format!("strongly cofibrant squares: {all}"));
        }
    }
    rep.line(format!("order {} system of length {} is valid", s.order(), system_length(&s)));
    Ok(rep)
}

fn system_length(s: &System) -> usize {
    match s {
        System::Cubical(c) => c.length(),
        System::Recursive(r) => r.length(),
    }
}

fn cmd_bracket(cli: &Cli, style: Style, file: &str) -> Result<Report, Failure> {
    let mut rep = Report::new(EXIT_PASS);
    let Some(s) = load_complete(cli, file, &mut rep)? else { return Ok(rep) };
    let mut values = Map::new();
    match (&s, style) {
        (System::Cubical(c), Style::Cubical) => {
            let t = c.bracket_cubical()?.map;
            let h = c.bracket_via_hcof()?.map;
            let sq = SquareCheck { name: "T = hcof'(B) o hcof(A)".into(), pass: t == h, difference: t.try_sub(&h).ok(), homotopic: None };
            rep.fail_if(!sq.pass);
            rep.set("checks", json!([square_json(&sq)]));
            values.insert("cubical".into(), bracket_json(&t));
        }
        (System::Cubical(c), Style::Recursive) => {
            let t = v(c)?.bracket_recursive()?.map;
            values.insert("recursive".into(), bracket_json(&t));
        }
        (System::Cubical(c), Style::Both) => {
            let r = compare_def1_def2(c)?;
            let sq = r.squares.iter().find(|q| q.name == "bracket").expect("bracket square").clone();
            agreement(&mut rep, &sq);
            values.insert("cubical".into(), bracket_json(r.cubical.as_ref().expect("computed")));
            values.insert("recursive".into(), bracket_json(r.recursive.as_ref().expect("computed")));
        }
        (System::Recursive(r), Style::Recursive) => {
            values.insert("recursive".into(), bracket_json(&r.bracket_recursive()?.map));
        }
        (System::Recursive(r), Style::Cubical) => {
            let l = lift(r, cli.max_cube)?;
            values.insert("cubical".into(), bracket_json(&l.system.bracket_cubical()?.map));
        }
        (System::Recursive(r), Style::Both) => {
            let rt = check_roundtrip(r, cli.max_cube)?;
            let sq = rt.squares.iter().find(|q| q.name == "closing").expect("closing square").clone();
            agreement(&mut rep, &sq);
            values.insert("cubical".into(), bracket_json(rt.cubical.as_ref().expect("computed")));
            values.insert("recursive".into(), bracket_json(rt.recursive.as_ref().expect("computed")));
        }
    }
    for (k, v) in &values {
        let zero = v["zero"].as_bool().unwrap_or(false);
        let hz = v["zero_on_homology"].as_bool().unwrap_or(false);
        rep.line(format!("{k} bracket: {} matrix, {} on homology", if zero { "zero" } else { "nonzero" }, if hz { "zero" } else { "nonzero" }));
    }
    rep.set("values", Value::Object(values));
    Ok(rep)
}

fn agreement(rep: &mut Report, sq: &SquareCheck) {
    rep.fail_if(!sq.ok());
    rep.set("agreement", json!(sq.ok()));
    rep.set("checks", json!([square_json(sq)]));
    rep.line(format!("agreement: {}", sq.ok()));
}

fn cmd_compare(cli: &Cli, file: &str) -> Result<Report, Failure> {
    let mut rep = Report::new(EXIT_PASS);
    let Some(s) = load_complete(cli, file, &mut rep)? else { return Ok(rep) };
    let c = match s {
        System::Cubical(c) => c,
        System::Recursive(r) => {
            rep.line("recursive input: comparing its lift");
            rep.set("lifted", json!(true));
            lift(&r, cli.max_cube)?.system
        }
    };
    let r = compare_def1_def2(&c)?;
    rep.fail_if(!r.passed());
    comparison_lines(&mut rep, &r);
    rep.set("comparison", comparison_json(&r));
    Ok(rep)
}

fn document(rep: &mut Report, s: &System) {
    let f = to_file(s);
    rep.set("output", serde_json::to_value(&f).expect("json"));
    rep.document = Some(serialize(&f));
}

fn cmd_reduce(cli: &Cli, file: &str) -> Result<Report, Failure> {
    let mut rep = Report::new(EXIT_PASS);
    let Some(s) = load_complete(cli, file, &mut rep)? else { return Ok(rep) };
    let System::Cubical(c) = s else {
        return Err(InputError::Usage("reduce takes a cubical system".into()).into());
    };
    document(&mut rep, &System::Recursive(v(&c)?));
    Ok(rep)
}

fn cmd_lift(cli: &Cli, file: &str) -> Result<Report, Failure> {
    let mut rep = Report::new(EXIT_PASS);
    let Some(s) = load_complete(cli, file, &mut rep)? else { return Ok(rep) };
    let System::Recursive(r) = s else {
        return Err(InputError::Usage("lift takes a recursive system".into()).into());
    };
    let l = lift(&r, cli.max_cube)?;
    let ok = l.system.is_strongly_cofibrant_system()?.ok;
    rep.fail_if(!ok);
    rep.set("strongly_cofibrant", json!(ok));
    rep.line(format!("strongly cofibrant: {ok}"));
    document(&mut rep, &System::Cubical(l.system));
    Ok(rep)
}

fn cmd_roundtrip(cli: &Cli, file: &str) -> Result<Report, Failure> {
    let mut rep = Report::new(EXIT_PASS);
    let Some(s) = load_complete(cli, file, &mut rep)? else { return Ok(rep) };
    let r = match s {
        System::Recursive(r) => r,
        System::Cubical(c) => v(&c)?,
    };
    let c = check_roundtrip(&r, cli.max_cube)?;
    rep.fail_if(!c.passed());
    comparison_lines(&mut rep, &c);
    rep.set("comparison", comparison_json(&c));
    Ok(rep)
}

fn rectified_json(d: &RectifiedDiagram) -> Value {
    json!({
        "verified": d.verified(),
        "objects": Value::Array(d.objects.iter().map(dims).collect()),
        "maps": Value::Array(d.maps.iter().map(graded).collect()),
        "ladder": Value::Array(d.ladder.iter().map(graded).collect()),
        "squares": Value::Array(d.squares.iter().enumerate().map(|(i, s)| {
            let mut m = Map::new();
            m.insert("index".into(), json!(i + 1));
            m.insert("exact".into(), json!(s.exact));
            m.insert("homotopy".into(), json!(s.homotopy.is_some()));
            m.insert("pass".into(), json!(s.ok()));
            if !s.ok() {
                m.insert("difference".into(), graded(&s.difference));
            }
            Value::Object(m)
        }).collect()),
        "quasi_isos": d.quasi_isos,
        "composites_zero": d.composites_zero,
    })
}

fn cmd_rectify(cli: &Cli, variant: bool, file: &str) -> Result<Report, Failure> {
    let mut rep = Report::new(EXIT_PASS);
    let Some(s) = load_complete(cli, file, &mut rep)? else { return Ok(rep) };
    let out = if variant {
        let System::Cubical(c) = s else {
            return Err(InputError::Usage("rectify --variant takes a cubical system".into()).into());
        };
        rectify_variant(&c, None)?
    } else {
        match s {
            System::Recursive(r) => r.rectify(None)?,
            System::Cubical(c) => v(&c)?.rectify(None)?,
        }
    };
    match out {
        RectifyOutcome::Rectified(d) => {
            rep.fail_if(!d.verified());
            rep.line(format!(
                "rectified: composites zero {}, ladder squares {}, quasi-isos {}",
                d.composites_zero.iter().all(|&b| b),
                d.squares.iter().all(|s| s.ok()),
                d.quasi_isos.iter().all(|&b| b)
            ));
            rep.set("rectified", rectified_json(&d));
        }
        RectifyOutcome::Obstructed(o) => {
            rep.code = EXIT_FAIL;
            let classes: Vec<Value> = o.ranks.iter().map(|(n, r)| json!({"degree": n, "rank": r})).collect();
            for (n, r) in &o.ranks {
                rep.line(format!("obstructed: the bracket is nonzero on homology in degree {n} (rank {r})"));
            }
            rep.set("obstruction", json!({"homology_ranks": ranks_json(&o.ranks), "classes": classes}));
        }
    }
    Ok(rep)
}

fn cmd_gen(cli: &Cli, order: usize, length: Option<usize>, kind: GenKind, max_dim: usize) -> Result<Report, Failure> {
    let p = cli.p.unwrap_or(2);
    toda_core::linalg::check_prime(p as u64).map_err(|e| InputError::Usage(e.to_string()))?;
    let seed = cli.seed.unwrap_or(0);
    let length = length.unwrap_or(order + 2);
    if order == 0 || length < order + 1 {
        return Err(InputError::Usage(format!("need order >= 1 and length >= order + 1, got {order} and {length}")).into());
    }
    if order > cli.max_cube {
        return Err(toda_core::Error::CubeCap(order, cli.max_cube).into());
    }
    let mut r = rng(seed);
    let s = match kind {
        GenKind::Cubical => System::Cubical(random_cofibrant_cubical(&mut r, p, order, length, max_dim)),
        GenKind::Recursive => System::Recursive(random_recursive(&mut r, p, order, length, max_dim)),
    };
    let mut rep = Report::new(EXIT_PASS);
    document(&mut rep, &s);
    Ok(rep)
}
