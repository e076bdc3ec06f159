//! The `jetvariant` command line: argument parsing, dispatch and reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::corpus::{self, CorpusReport, Status};
use crate::equation::{format_table, is_symmetry, prolong_on_equation};
use crate::expr::{print, RatFun};
use crate::invariants::{
    apply_derivation, check_first_integral, commutator, decompose_commutator, find_invariants_linear,
    is_invariant, tresse_derivatives, Ansatz, Decomposition, Derivation, LieAlgebraSpec,
};
use crate::orbitdim::{hilbert_function, poincare_fit, FitStatus, HilbertProfile, PoincareFit, Sampling};
use crate::prolong::prolong_field;
use crate::scenario::Scenario;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "jetvariant", version, about = "Exact differential invariants of Lie algebra actions on jets")]
pub struct Cli {
    /// Emit a structured JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check invariance, first integrals or symmetries.
    Check(CheckArgs),
    /// Find all invariants of the shape c + P/q by linear algebra.
    Find(FindArgs),
    /// Print prolonged vector field coefficients.
    Prolong(ProlongArgs),
    /// Reduce expressions modulo the equation, or print its table.
    Reduce(ReduceArgs),
    /// Tresse derivatives dual to chosen invariants.
    Tresse(TresseArgs),
    /// Pairwise commutators of named derivations and their decompositions.
    Commutators(CommutatorArgs),
    /// Hilbert function of the action by exact orbit ranks.
    Hilbert(HilbertArgs),
    /// Fit R(z)/(1-z)^(d+1) to a Hilbert function.
    Poincare(PoincareArgs),
    /// Run the shipped worked examples.
    Corpus(CorpusArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Scenario file, or the name of a shipped corpus case.
    pub scenario: String,
    /// Expression or expression name to test for invariance.
    #[arg(long)]
    pub invariant: Vec<String>,
    /// Expression to test as a first integral of the equation.
    #[arg(long = "first-integral")]
    pub first_integral: Vec<String>,
    /// Check that every generator is a symmetry of the equation.
    #[arg(long)]
    pub symmetry: bool,
    /// Jet order (defaults to the order of each expression).
    #[arg(long)]
    pub order: Option<u32>,
    /// Restrict the algebra to these declared fields (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub fields: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    pub scenario: String,
    #[arg(long)]
    pub order: u32,
    #[arg(long = "num-degree")]
    pub num_degree: u32,
    /// Fixed denominator q.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub den: String,
    /// Restrict the numerator to these coordinates (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub fields: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct ProlongArgs {
    pub scenario: String,
    #[arg(long)]
    pub order: u32,
    /// Field name (all declared fields by default).
    #[arg(long)]
    pub field: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    pub scenario: String,
    /// Expression to reduce; without one the table is printed.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Vec<String>,
    /// Table order when printing the table.
    #[arg(long)]
    pub order: Option<u32>,
}

#[derive(Debug, Args)]
pub struct TresseArgs {
    pub scenario: String,
    /// n invariants (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub invariants: Vec<String>,
    /// Apply every Tresse derivative to this expression.
    #[arg(long, allow_hyphen_values = true)]
    pub apply: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CommutatorArgs {
    pub scenario: String,
    /// Derivation names (all declared by default).
    #[arg(long, value_delimiter = ',')]
    pub derivations: Option<Vec<String>>,
}

#[derive(Debug, Args, Clone)]
pub struct SamplingArgs {
    #[arg(long = "max-order", default_value_t = 4)]
    pub max_order: u32,
    #[arg(long, default_value_t = 8)]
    pub trials: u32,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Integer sampling range `lo..hi` (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub fields: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct HilbertArgs {
    pub scenario: String,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct PoincareArgs {
    /// Scenario to measure (omit when giving --profile).
    pub scenario: Option<String>,
    /// Use this profile instead of measuring one (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub profile: Option<Vec<i64>>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Only cases whose name contains this text.
    #[arg(long)]
    pub filter: Option<String>,
    /// Skip extended checks.
    #[arg(long)]
    pub fast: bool,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// A user input or scenario problem (exit code 2).
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<(Value, String, bool), InputError>;

/// Runs the command line given as `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let json = cli.json;
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Find(a) => cmd_find(a),
        Command::Prolong(a) => cmd_prolong(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Tresse(a) => cmd_tresse(a),
        Command::Commutators(a) => cmd_commutators(a),
        Command::Hilbert(a) => cmd_hilbert(a),
        Command::Poincare(a) => cmd_poincare(a),
        Command::Corpus(a) => cmd_corpus(a),
    };
    match result {
        Ok((value, text, ok)) => {
            let stdout = if json {
                let mut s = serde_json::to_string_pretty(&value).expect("serializable report");
                s.push('\n');
                s
            } else {
                text
            };
            Outcome {
                stdout,
                stderr: String::new(),
                code: if ok { 0 } else { 1 },
            }
        }
        Err(InputError(msg)) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: 2,
        },
    }
}

/// Loads a scenario file, falling back to a shipped case of that name.
pub fn load(spec: &str) -> Result<Scenario, InputError> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(c) = corpus::case(spec) {
            return Ok(c.load()?);
        }
    }
    Ok(Scenario::load(PathBuf::from(spec))?)
}

fn algebra(sc: &Scenario, fields: &Option<Vec<String>>) -> Result<LieAlgebraSpec, InputError> {
    let Some(names) = fields else {
        return Ok(sc.algebra.clone());
    };
    let mut out = LieAlgebraSpec {
        fields: Vec::new(),
        families: sc.algebra.families.clone(),
    };
    for n in names {
        let f = sc
            .algebra
            .fields
            .iter()
            .find(|f| &f.name == n)
            .ok_or_else(|| InputError(format!("unknown field `{n}`")))?;
        out.fields.push(f.clone());
    }
    Ok(out)
}

fn parse(sc: &Scenario, s: &str) -> Result<RatFun, InputError> {
    sc.expr(s).map_err(|e| InputError(format!("`{s}`: {e}")))
}

fn header(command: &str, sc: Option<&Scenario>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Some(sc) = sc {
        m.insert("scenario".into(), json!(sc.name));
    }
    m
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_check(a: &CheckArgs) -> CmdResult {
    let sc = load(&a.scenario)?;
    let g = algebra(&sc, &a.fields)?;
    let eq = sc.equation.as_ref();
    let ctx = &sc.ctx;
    if a.invariant.is_empty() && a.first_integral.is_empty() && !a.symmetry {
        return Err(InputError("nothing to check: give --invariant, --first-integral or --symmetry".into()));
    }
    let mut results = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    if a.symmetry {
        let eq = eq.ok_or_else(|| InputError("--symmetry needs an equation".into()))?;
        for x in g.generators(a.order.unwrap_or(2), ctx) {
            let ok = is_symmetry(&x, eq)?;
            all_ok &= ok;
            writeln!(text, "{}  symmetry  {}", status(ok), x.name).unwrap();
            results.push(json!({"kind": "symmetry", "target": x.name, "status": status(ok)}));
        }
    }
    for t in &a.invariant {
        let f = parse(&sc, t)?;
        let k = a.order.unwrap_or_else(|| f.max_order());
        let v = is_invariant(&g, &f, ctx, eq, k)?;
        all_ok &= v.invariant;
        let mut r = json!({
            "kind": "invariant",
            "target": t,
            "order": k,
            "generators": v.generators_checked,
            "status": status(v.invariant),
        });
        write!(text, "{}  invariant  {t}  (order {k}, {} generators)", status(v.invariant), v.generators_checked).unwrap();
        if let Some((name, res)) = &v.witness {
            let res = print(res, ctx);
            write!(text, "\n      `{name}` leaves residue {res}").unwrap();
            r["generator"] = json!(name);
            r["residue"] = json!(res);
        }
        text.push('\n');
        results.push(r);
    }
    for t in &a.first_integral {
        let eq = eq.ok_or_else(|| InputError("--first-integral needs an equation".into()))?;
        let f = parse(&sc, t)?;
        let ok = check_first_integral(&f, eq)?;
        all_ok &= ok;
        writeln!(text, "{}  first-integral  {t}", status(ok)).unwrap();
        results.push(json!({"kind": "first-integral", "target": t, "status": status(ok)}));
    }
    let mut m = header("check", Some(&sc));
    m.insert("results".into(), Value::Array(results));
    m.insert("status".into(), json!(status(all_ok)));
    Ok((Value::Object(m), text, all_ok))
}

fn cmd_find(a: &FindArgs) -> CmdResult {
    let sc = load(&a.scenario)?;
    let g = algebra(&sc, &a.fields)?;
    let variables = match &a.vars {
        None => None,
        Some(v) => Some(
            v.iter()
                .map(|n| sc.ctx.resolve(n).ok_or_else(|| InputError(format!("unknown coordinate `{n}`"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let ansatz = Ansatz {
        order: a.order,
        degree: a.num_degree,
        denominator: parse(&sc, &a.den)?,
        variables,
    };
    if ansatz.denominator.is_zero() {
        return Err(InputError("denominator is zero".into()));
    }
    let basis = find_invariants_linear(&g, &ansatz, &sc.ctx, sc.equation.as_ref())?;
    let shown: Vec<String> = basis.iter().map(|b| print(b, &sc.ctx)).collect();
    let mut text = format!("dimension {}\n", shown.len());
    for s in &shown {
        writeln!(text, "  {s}").unwrap();
    }
    let mut m = header("find", Some(&sc));
    m.insert("order".into(), json!(a.order));
    m.insert("num_degree".into(), json!(a.num_degree));
    m.insert("denominator".into(), json!(print(&ansatz.denominator, &sc.ctx)));
    m.insert("dimension".into(), json!(shown.len()));
    m.insert("basis".into(), json!(shown));
    Ok((Value::Object(m), text, true))
}

fn cmd_prolong(a: &ProlongArgs) -> CmdResult {
    let sc = load(&a.scenario)?;
    let ctx = &sc.ctx;
    let fields: Vec<_> = if a.field.is_empty() {
        sc.algebra.fields.clone()
    } else {
        algebra(&sc, &Some(a.field.clone()))?.fields
    };
    let mut text = String::new();
    let mut out = Vec::new();
    for x in &fields {
        let p = match &sc.equation {
            Some(eq) => prolong_on_equation(x, a.order, eq)?,
            None => prolong_field(x, a.order, ctx),
        };
        writeln!(text, "{} (order {})", x.name, a.order).unwrap();
        let mut coeffs = Vec::new();
        for (v, c) in &p.coeffs {
            if c.is_zero() {
                continue;
            }
            let name = ctx.name_of(*v);
            let value = print(c, ctx);
            writeln!(text, "  d_{name}: {value}").unwrap();
            coeffs.push(json!({"coordinate": name, "value": value}));
        }
        out.push(json!({"name": x.name, "order": a.order, "coefficients": coeffs}));
    }
    let mut m = header("prolong", Some(&sc));
    m.insert("fields".into(), Value::Array(out));
    Ok((Value::Object(m), text, true))
}

fn cmd_reduce(a: &ReduceArgs) -> CmdResult {
    let sc = load(&a.scenario)?;
    let eq = sc
        .equation
        .as_ref()
        .ok_or_else(|| InputError("scenario has no equation".into()))?;
    let mut m = header("reduce", Some(&sc));
    let mut text = String::new();
    if a.expr.is_empty() {
        let k = a.order.unwrap_or_else(|| eq.order());
        let table = eq.table(k)?;
        text = format_table(&table, &sc.ctx);
        if !text.is_empty() && !text.ends_with('\n') {
            text.push('\n');
        }
        let mut entries = Vec::new();
        for line in text.lines() {
            if let Some((l, r)) = line.split_once(" -> ") {
                entries.push(json!({"lead": l.trim(), "normal_form": r.trim()}));
            }
        }
        m.insert("order".into(), json!(k));
        m.insert("table".into(), Value::Array(entries));
    } else {
        let mut out = Vec::new();
        for e in &a.expr {
            let f = parse(&sc, e)?;
            let r = print(&eq.reduce(&f)?, &sc.ctx);
            writeln!(text, "{e} -> {r}").unwrap();
            out.push(json!({"input": e, "normal_form": r}));
        }
        m.insert("results".into(), Value::Array(out));
    }
    Ok((Value::Object(m), text, true))
}

fn derivation_json(d: &Derivation, sc: &Scenario) -> Value {
    json!(d.coefficients.iter().map(|c| print(c, &sc.ctx)).collect::<Vec<_>>())
}

fn derivation_text(d: &Derivation, sc: &Scenario) -> String {
    let terms: Vec<String> = d
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("({})*D_{}", print(c, &sc.ctx), sc.ctx.independents()[i]))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn cmd_tresse(a: &TresseArgs) -> CmdResult {
    let sc = load(&a.scenario)?;
    let eq = sc.equation.as_ref();
    let fs = a.invariants.iter().map(|s| parse(&sc, s)).collect::<Result<Vec<_>, _>>()?;
    let ds = tresse_derivatives(&fs, &sc.ctx, eq)?;
    let mut text = String::new();
    let mut out = Vec::new();
    for (i, d) in ds.iter().enumerate() {
        writeln!(text, "d/d{} = {}", a.invariants[i], derivation_text(d, &sc)).unwrap();
        let mut applied = Vec::new();
        for e in &a.apply {
            let v = print(&apply_derivation(d, &parse(&sc, e)?, &sc.ctx, eq)?, &sc.ctx);
            writeln!(text, "  applied to {e}: {v}").unwrap();
            applied.push(json!({"input": e, "value": v}));
        }
        out.push(json!({"invariant": a.invariants[i], "coefficients": derivation_json(d, &sc), "applied": applied}));
    }
    let mut m = header("tresse", Some(&sc));
    m.insert("derivations".into(), Value::Array(out));
    Ok((Value::Object(m), text, true))
}

fn cmd_commutators(a: &CommutatorArgs) -> CmdResult {
    let sc = load(&a.scenario)?;
    let eq = sc.equation.as_ref();
    let names: Vec<String> = match &a.derivations {
        Some(n) => n.clone(),
        None => sc.derivations.keys().cloned().collect(),
    };
    let basis = names
        .iter()
        .map(|n| {
            sc.derivations
                .get(n)
                .cloned()
                .ok_or_else(|| InputError(format!("unknown derivation `{n}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    let mut out = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let c = commutator(&basis[i], &basis[j], &sc.ctx, eq)?;
            let dec = decompose_commutator(&c, &basis, &sc.ctx, eq)?;
            writeln!(text, "[{}, {}] = {}", names[i], names[j], derivation_text(&c, &sc)).unwrap();
            let decomposition = match dec {
                Decomposition::NotInSpan => {
                    writeln!(text, "  not in the span").unwrap();
                    Value::Null
                }
                Decomposition::Coefficients(r) => {
                    let shown: Vec<String> = r.iter().map(|x| print(x, &sc.ctx)).collect();
                    let parts: Vec<String> = shown.iter().zip(&names).map(|(c, n)| format!("({c})*{n}")).collect();
                    writeln!(text, "  = {}", parts.join(" + ")).unwrap();
                    json!(shown)
                }
            };
            out.push(json!({
                "a": names[i],
                "b": names[j],
                "coefficients": derivation_json(&c, &sc),
                "decomposition": decomposition,
            }));
        }
    }
    let mut m = header("commutators", Some(&sc));
    m.insert("basis".into(), json!(names));
    m.insert("commutators".into(), Value::Array(out));
    Ok((Value::Object(m), text, true))
}

fn parse_range(s: &str) -> Result<(i64, i64), InputError> {
    let (lo, hi) = s
        .split_once("..")
        .or_else(|| s.split_once(','))
        .ok_or_else(|| InputError(format!("bad range `{s}`, expected lo..hi")))?;
    let lo: i64 = lo.trim().parse().map_err(|_| InputError(format!("bad range `{s}`")))?;
    let hi: i64 = hi.trim().parse().map_err(|_| InputError(format!("bad range `{s}`")))?;
    if lo > hi {
        return Err(InputError(format!("empty range `{s}`")));
    }
    Ok((lo, hi))
}

fn sampling(sc: &Scenario, a: &SamplingArgs) -> Result<Sampling, InputError> {
    let mut s = sc.sampling.clone();
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    if let Some(r) = &a.range {
        s.range = parse_range(r)?;
    }
    Ok(s)
}

fn measure(sc: &Scenario, a: &SamplingArgs) -> Result<HilbertProfile, InputError> {
    if a.max_order < 1 {
        return Err(InputError("--max-order must be at least 1".into()));
    }
    let g = algebra(sc, &a.fields)?;
    let s = sampling(sc, a)?;
    Ok(hilbert_function(&g, &sc.ctx, sc.equation.as_ref(), a.max_order, a.trials, &s)?)
}

fn profile_text(p: &HilbertProfile) -> String {
    let mut text = String::new();
    let d: Vec<String> = p.d.iter().map(|x| x.to_string()).collect();
    writeln!(text, "{}", d.join(" ")).unwrap();
    if !p.orbit.is_empty() {
        writeln!(text, "order  ambient  orbit  d").unwrap();
        for k in 0..p.d.len() {
            writeln!(text, "{:>5}  {:>7}  {:>5}  {}", k, p.ambient[k], p.orbit[k], p.d[k]).unwrap();
        }
    }
    text
}

fn cmd_hilbert(a: &HilbertArgs) -> CmdResult {
    let sc = load(&a.scenario)?;
    let p = measure(&sc, &a.sampling)?;
    let s = sampling(&sc, &a.sampling)?;
    let mut m = header("hilbert", Some(&sc));
    m.insert("max_order".into(), json!(a.sampling.max_order));
    m.insert("trials".into(), json!(a.sampling.trials));
    m.insert("seed".into(), json!(s.seed));
    m.insert("range".into(), json!([s.range.0, s.range.1]));
    m.insert("profile".into(), serde_json::to_value(&p)?);
    Ok((Value::Object(m), profile_text(&p), true))
}

fn fit_text(f: &PoincareFit) -> String {
    match f.status {
        FitStatus::Fits => {
            let r: Vec<String> = f
                .r
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| match i {
                    0 => c.to_string(),
                    1 => format!("{c}*z"),
                    _ => format!("{c}*z^{i}"),
                })
                .collect();
            let r = if r.is_empty() { "0".to_string() } else { r.join(" + ") };
            format!("fits: ({r})/(1-z)^{}\n", f.d.unwrap_or(0) + 1)
        }
        FitStatus::Unstable => format!("unstable in window {}..{}\n", f.window.0, f.window.1),
    }
}

fn cmd_poincare(a: &PoincareArgs) -> CmdResult {
    let (p, sc) = match (&a.profile, &a.scenario) {
        (Some(d), _) => (HilbertProfile::from_counts(d.clone()), None),
        (None, Some(s)) => {
            let sc = load(s)?;
            (measure(&sc, &a.sampling)?, Some(sc))
        }
        (None, None) => return Err(InputError("give a scenario or --profile".into())),
    };
    if p.d.len() < 4 {
        return Err(InputError("profile needs at least 4 entries".into()));
    }
    let fit = poincare_fit(&p);
    let text = format!("{}{}", profile_text(&p), fit_text(&fit));
    let mut m = header("poincare", sc.as_ref());
    m.insert("profile".into(), serde_json::to_value(&p)?);
    m.insert("fit".into(), serde_json::to_value(&fit)?);
    Ok((Value::Object(m), text, true))
}

/// Text table for a corpus report.
pub fn corpus_text(r: &CorpusReport) -> String {
    let mut text = String::new();
    for c in &r.cases {
        writeln!(text, "{}", c.name).unwrap();
        for o in &c.outcomes {
            let st = match o.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            writeln!(text, "  {st}  {:<17} {}", o.check, o.target).unwrap();
            writeln!(text, "        {}", o.detail).unwrap();
        }
    }
    writeln!(
        text,
        "{} passed, {} failed, {} skipped",
        r.passed, r.failed, r.skipped
    )
    .unwrap();
    text
}

fn cmd_corpus(a: &CorpusArgs) -> CmdResult {
    let r = corpus::run_corpus(a.filter.as_deref(), a.fast)?;
    if r.cases.is_empty() {
        return Err(InputError(format!(
            "no corpus case matches `{}`",
            a.filter.as_deref().unwrap_or("")
        )));
    }
    Ok((serde_json::to_value(&r)?, corpus_text(&r), r.all_passed()))
}
