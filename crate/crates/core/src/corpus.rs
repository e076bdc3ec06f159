//! Worked examples with expected outcomes, and the runner that checks them.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::equation::{is_symmetry, SolvedEquation};
use crate::expr::{print, rational, Monomial, Poly, RatFun, Rational, VarId};
use crate::linalg::rank;
use crate::invariants::{
    apply_derivation, check_first_integral, commutator, decompose_commutator, find_invariants_linear,
    is_invariant, tresse_derivatives, verify_invariant_derivation, Ansatz, Decomposition, Derivation,
    LieAlgebraSpec,
};
use crate::orbitdim::{generic_orbit_dimension, hilbert_function, poincare_fit, FitStatus};
use crate::prolong::prolong_point_map;
use crate::scenario::{Scenario, ScenarioError};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Literature,
    Trivial,
    Derived,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Symmetry { order: u32 },
    Invariant { target: String, order: u32, pass: bool },
    Pullback { map: String, target: String, factor: Rational },
    RadicalPullback { map: String, target: String, factor: Rational },
    Find {
        order: u32,
        degree: u32,
        denominator: String,
        variables: Option<Vec<String>>,
        basis: Option<Vec<String>>,
        dimension: Option<usize>,
    },
    Derivation { derivation: String, probes: Vec<String>, order: u32, pass: bool },
    FirstIntegral { target: String, order: Option<u32>, pass: bool },
    ReducesToZero { target: String },
    OperatorCommutes { operator: String, order: u32 },
    Hilbert { max_order: u32, trials: u32, profile: Vec<i64> },
    Poincare {
        max_order: u32,
        trials: u32,
        status: FitStatus,
        d: Option<usize>,
        r: Option<Vec<i64>>,
    },
    OrbitDimension { order: u32, trials: u32, value: usize },
    Tresse { targets: Vec<String> },
    Commutator { a: String, b: String, basis: Vec<String>, coefficients: Option<Vec<String>> },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Symmetry { .. } => "symmetry",
            Check::Invariant { .. } => "invariant",
            Check::Pullback { .. } => "pullback",
            Check::RadicalPullback { .. } => "radical-pullback",
            Check::Find { .. } => "find",
            Check::Derivation { .. } => "derivation",
            Check::FirstIntegral { .. } => "first-integral",
            Check::ReducesToZero { .. } => "reduces-to-zero",
            Check::OperatorCommutes { .. } => "operator-commutes",
            Check::Hilbert { .. } => "hilbert",
            Check::Poincare { .. } => "poincare",
            Check::OrbitDimension { .. } => "orbit-dimension",
            Check::Tresse { .. } => "tresse",
            Check::Commutator { .. } => "commutator",
        }
    }

    pub fn target(&self) -> String {
        match self {
            Check::Symmetry { .. } => "fields".into(),
            Check::Invariant { target, .. }
            | Check::FirstIntegral { target, .. }
            | Check::ReducesToZero { target } => target.clone(),
            Check::Pullback { map, target, .. } | Check::RadicalPullback { map, target, .. } => {
                format!("{map}*{target}")
            }
            Check::Find { order, degree, denominator, .. } => {
                format!("order {order}, degree {degree}, over {denominator}")
            }
            Check::Derivation { derivation, .. } => derivation.clone(),
            Check::OperatorCommutes { operator, .. } => operator.clone(),
            Check::Hilbert { max_order, .. } | Check::Poincare { max_order, .. } => {
                format!("orders 0..{max_order}")
            }
            Check::OrbitDimension { order, .. } => format!("order {order}"),
            Check::Tresse { targets } => targets.join(","),
            Check::Commutator { a, b, .. } => format!("[{a},{b}]"),
        }
    }
}

/// One expected outcome of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub check: Check,
    pub origin: Origin,
    pub note: String,
    /// Skipped under `--fast`.
    pub extended: bool,
    /// Restricts the algebra to these declared fields.
    pub fields: Option<Vec<String>>,
    /// Whether pseudogroup families take part.
    pub families: bool,
}

struct Table<'a> {
    t: &'a toml::Table,
    used: Vec<&'static str>,
    err: &'a dyn Fn(String) -> ScenarioError,
}

impl<'a> Table<'a> {
    fn get(&mut self, key: &'static str) -> Option<&'a toml::Value> {
        self.used.push(key);
        self.t.get(key)
    }

    fn fail(&self, msg: String) -> ScenarioError {
        (self.err)(msg)
    }

    fn opt_str(&mut self, key: &'static str) -> Result<Option<String>, ScenarioError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(self.fail(format!("`{key}` must be a string"))),
        }
    }

    fn str(&mut self, key: &'static str) -> Result<String, ScenarioError> {
        self.opt_str(key)?.ok_or_else(|| self.fail(format!("missing `{key}`")))
    }

    fn opt_int(&mut self, key: &'static str) -> Result<Option<i64>, ScenarioError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) => Ok(Some(*i)),
            Some(_) => Err(self.fail(format!("`{key}` must be an integer"))),
        }
    }

    fn opt_u32(&mut self, key: &'static str) -> Result<Option<u32>, ScenarioError> {
        self.opt_int(key)?
            .map(|i| u32::try_from(i).map_err(|_| self.fail(format!("`{key}` must be non-negative"))))
            .transpose()
    }

    fn u32(&mut self, key: &'static str) -> Result<u32, ScenarioError> {
        self.opt_u32(key)?.ok_or_else(|| self.fail(format!("missing `{key}`")))
    }

    fn opt_strs(&mut self, key: &'static str) -> Result<Option<Vec<String>>, ScenarioError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    toml::Value::String(s) => Ok(s.clone()),
                    _ => Err(self.fail(format!("`{key}` must be a list of strings"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(self.fail(format!("`{key}` must be a list of strings"))),
        }
    }

    fn strs(&mut self, key: &'static str) -> Result<Vec<String>, ScenarioError> {
        self.opt_strs(key)?.ok_or_else(|| self.fail(format!("missing `{key}`")))
    }

    fn opt_ints(&mut self, key: &'static str) -> Result<Option<Vec<i64>>, ScenarioError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(a)) => a
                .iter()
                .map(|v| v.as_integer().ok_or_else(|| self.fail(format!("`{key}` must be a list of integers"))))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(self.fail(format!("`{key}` must be a list of integers"))),
        }
    }

    fn opt_bool(&mut self, key: &'static str) -> Result<Option<bool>, ScenarioError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(b)) => Ok(Some(*b)),
            Some(_) => Err(self.fail(format!("`{key}` must be a boolean"))),
        }
    }

    fn factor(&mut self) -> Result<Rational, ScenarioError> {
        let f = match self.get("factor") {
            None => return Ok(Rational::one()),
            Some(toml::Value::Integer(i)) => i.to_string(),
            Some(toml::Value::String(s)) => s.clone(),
            Some(_) => return Err(self.fail("`factor` must be a rational".into())),
        };
        rational(&f).ok_or_else(|| self.fail(format!("bad factor `{f}`")))
    }

    fn pass(&mut self) -> Result<bool, ScenarioError> {
        match self.opt_str("expect")?.as_deref() {
            None | Some("pass") => Ok(true),
            Some("fail") => Ok(false),
            Some(o) => Err(self.fail(format!("`expect` must be \"pass\" or \"fail\", not `{o}`"))),
        }
    }

    fn finish(&self) -> Result<(), ScenarioError> {
        for k in self.t.keys() {
            if !self.used.contains(&k.as_str()) {
                return Err(self.fail(format!("unknown key `{k}`")));
            }
        }
        Ok(())
    }
}

impl Expectation {
    /// Interprets one `[[expect]]` table.
    pub fn from_table(t: &toml::Table, index: usize, file: &str) -> Result<Expectation, ScenarioError> {
        let err = |msg: String| ScenarioError::Schema {
            file: file.to_string(),
            msg: format!("expect #{}: {msg}", index + 1),
        };
        let mut tb = Table {
            t,
            used: Vec::new(),
            err: &err,
        };
        let kind = tb.str("check")?;
        let check = match kind.as_str() {
            "symmetry" => Check::Symmetry {
                order: tb.opt_u32("order")?.unwrap_or(2),
            },
            "invariant" => Check::Invariant {
                target: tb.str("target")?,
                order: tb.u32("order")?,
                pass: tb.pass()?,
            },
            "pullback" => Check::Pullback {
                map: tb.str("map")?,
                target: tb.str("target")?,
                factor: tb.factor()?,
            },
            "radical-pullback" => Check::RadicalPullback {
                map: tb.str("map")?,
                target: tb.str("target")?,
                factor: tb.factor()?,
            },
            "find" => Check::Find {
                order: tb.u32("order")?,
                degree: tb.u32("degree")?,
                denominator: tb.opt_str("denominator")?.unwrap_or_else(|| "1".into()),
                variables: tb.opt_strs("variables")?,
                basis: tb.opt_strs("basis")?,
                dimension: tb.opt_u32("dimension")?.map(|d| d as usize),
            },
            "derivation" => Check::Derivation {
                derivation: tb.str("derivation")?,
                probes: tb.strs("probes")?,
                order: tb.u32("order")?,
                pass: tb.pass()?,
            },
            "first-integral" => Check::FirstIntegral {
                target: tb.str("target")?,
                order: tb.opt_u32("order")?,
                pass: tb.pass()?,
            },
            "reduces-to-zero" => Check::ReducesToZero {
                target: tb.str("target")?,
            },
            "operator-commutes" => Check::OperatorCommutes {
                operator: tb.str("operator")?,
                order: tb.u32("order")?,
            },
            "hilbert" => Check::Hilbert {
                max_order: tb.u32("max_order")?,
                trials: tb.opt_u32("trials")?.unwrap_or(8),
                profile: tb.opt_ints("profile")?.ok_or_else(|| err("missing `profile`".into()))?,
            },
            "poincare" => Check::Poincare {
                max_order: tb.u32("max_order")?,
                trials: tb.opt_u32("trials")?.unwrap_or(8),
                status: match tb.str("status")?.as_str() {
                    "fits" => FitStatus::Fits,
                    "unstable" => FitStatus::Unstable,
                    o => return Err(err(format!("unknown status `{o}`"))),
                },
                d: tb.opt_u32("d")?.map(|d| d as usize),
                r: tb.opt_ints("r")?,
            },
            "orbit-dimension" => Check::OrbitDimension {
                order: tb.u32("order")?,
                trials: tb.opt_u32("trials")?.unwrap_or(8),
                value: tb.u32("value")? as usize,
            },
            "tresse" => Check::Tresse {
                targets: tb.strs("targets")?,
            },
            "commutator" => Check::Commutator {
                a: tb.str("a")?,
                b: tb.str("b")?,
                basis: tb.strs("basis")?,
                coefficients: tb.opt_strs("coefficients")?,
            },
            other => return Err(err(format!("unknown check `{other}`"))),
        };
        let origin = match tb.opt_str("origin")?.as_deref() {
            None | Some("derived") => Origin::Derived,
            Some("literature") => Origin::Literature,
            Some("trivial") => Origin::Trivial,
            Some(o) => return Err(err(format!("unknown origin `{o}`"))),
        };
        let exp = Expectation {
            check,
            origin,
            note: tb.opt_str("note")?.unwrap_or_default(),
            extended: tb.opt_bool("extended")?.unwrap_or(false),
            fields: tb.opt_strs("fields")?,
            families: tb.opt_bool("families")?.unwrap_or(true),
        };
        tb.finish()?;
        Ok(exp)
    }
}

/// Parses and cross-checks every expectation of a scenario.
pub fn expectations(sc: &Scenario) -> Result<Vec<Expectation>, ScenarioError> {
    let out: Vec<Expectation> = sc
        .expect
        .iter()
        .enumerate()
        .map(|(i, t)| Expectation::from_table(t, i, &sc.file))
        .collect::<Result<_, _>>()?;
    for (i, e) in out.iter().enumerate() {
        let err = |msg: String| ScenarioError::Schema {
            file: sc.file.clone(),
            msg: format!("expect #{}: {msg}", i + 1),
        };
        if let Some(names) = &e.fields {
            for n in names {
                if !sc.algebra.fields.iter().any(|f| &f.name == n) {
                    return Err(err(format!("unknown field `{n}`")));
                }
            }
        }
        let need = |kind: &str, name: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(err(format!("unknown {kind} `{name}`")))
            }
        };
        match &e.check {
            Check::Pullback { map, .. } => need("map", map, sc.maps.contains_key(map))?,
            Check::RadicalPullback { map, target, .. } => {
                need("map", map, sc.maps.contains_key(map))?;
                need("radical", target, sc.radicals.contains_key(target))?;
            }
            Check::Derivation { derivation, .. } => {
                need("derivation", derivation, sc.derivations.contains_key(derivation))?
            }
            Check::OperatorCommutes { operator, .. } => {
                need("operator", operator, sc.operators.contains_key(operator))?
            }
            Check::Commutator { a, b, basis, .. } => {
                for d in [a, b].into_iter().chain(basis) {
                    need("derivation", d, sc.derivations.contains_key(d))?;
                }
            }
            Check::FirstIntegral { .. } | Check::ReducesToZero { .. } if sc.equation.is_none() => {
                return Err(err("check needs an equation".into()));
            }
            _ => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub check: String,
    pub target: String,
    pub status: Status,
    pub detail: String,
    pub origin: Origin,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub schema_version: u32,
    pub command: String,
    pub fast: bool,
    pub cases: Vec<CaseReport>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// A corpus case shipped with the library.
#[derive(Debug, Clone, Copy)]
pub struct CorpusCase {
    pub name: &'static str,
    pub source: &'static str,
}

pub const CASES: &[CorpusCase] = &[
    CorpusCase {
        name: "euclidean-curves",
        source: include_str!("../corpus/euclidean-curves.toml"),
    },
    CorpusCase {
        name: "flux-sl3",
        source: include_str!("../corpus/flux-sl3.toml"),
    },
    CorpusCase {
        name: "flux-xyu",
        source: include_str!("../corpus/flux-xyu.toml"),
    },
    CorpusCase {
        name: "quadrics-monge",
        source: include_str!("../corpus/quadrics-monge.toml"),
    },
    CorpusCase {
        name: "birkhoff",
        source: include_str!("../corpus/birkhoff.toml"),
    },
    CorpusCase {
        name: "pseudogroup-ux0",
        source: include_str!("../corpus/pseudogroup-ux0.toml"),
    },
    CorpusCase {
        name: "pseudogroup-plane",
        source: include_str!("../corpus/pseudogroup-plane.toml"),
    },
    CorpusCase {
        name: "winding",
        source: include_str!("../corpus/winding.toml"),
    },
];

impl CorpusCase {
    pub fn load(&self) -> Result<Scenario, ScenarioError> {
        Scenario::from_str_named(self.source, &format!("corpus/{}.toml", self.name), self.name)
    }
}

/// Looks up a shipped case by exact name.
pub fn case(name: &str) -> Option<&'static CorpusCase> {
    CASES.iter().find(|c| c.name == name)
}

fn algebra_for(sc: &Scenario, e: &Expectation) -> LieAlgebraSpec {
    let fields = match &e.fields {
        None => sc.algebra.fields.clone(),
        Some(names) => names
            .iter()
            .filter_map(|n| sc.algebra.fields.iter().find(|f| &f.name == n).cloned())
            .collect(),
    };
    LieAlgebraSpec {
        fields,
        families: if e.families {
            sc.algebra.families.clone()
        } else {
            Vec::new()
        },
    }
}

type CheckResult = Result<(bool, String), String>;

fn expr(sc: &Scenario, s: &str) -> Result<RatFun, String> {
    sc.expr(s).map_err(|e| format!("`{s}`: {e}"))
}

fn show(sc: &Scenario, f: &RatFun) -> String {
    print(f, &sc.ctx)
}

fn derivation(sc: &Scenario, name: &str) -> Result<Derivation, String> {
    sc.derivations
        .get(name)
        .cloned()
        .ok_or_else(|| format!("unknown derivation `{name}`"))
}

fn verdict(ok: bool, expected: bool, detail: String) -> (bool, String) {
    (ok == expected, detail)
}

/// Evaluates one expectation against the engines.
pub fn run_check(sc: &Scenario, e: &Expectation) -> CheckResult {
    let g = algebra_for(sc, e);
    let ctx = &sc.ctx;
    let eq: Option<&SolvedEquation> = sc.equation.as_ref();
    let s = &sc.sampling;
    let err = |x: &dyn std::fmt::Display| x.to_string();
    match &e.check {
        Check::Symmetry { order } => {
            let Some(eq) = eq else {
                return Err("no equation".into());
            };
            let gens = g.generators(*order, ctx);
            let results: Vec<_> = gens.par_iter().map(|x| is_symmetry(x, eq)).collect();
            for (x, r) in gens.iter().zip(results) {
                if !r.map_err(|e| err(&e))? {
                    return Ok((false, format!("`{}` is not a symmetry", x.name)));
                }
            }
            Ok((true, format!("{} generators are symmetries", gens.len())))
        }
        Check::Invariant { target, order, pass } => {
            let f = expr(sc, target)?;
            let v = is_invariant(&g, &f, ctx, eq, *order).map_err(|e| err(&e))?;
            let detail = match &v.witness {
                None => format!("annihilated by {} generators", v.generators_checked),
                Some((name, r)) => format!("`{name}` leaves residue {}", show(sc, r)),
            };
            Ok(verdict(v.invariant, *pass, detail))
        }
        Check::Pullback { map, target, factor } => {
            let f = expr(sc, target)?;
            let m = prolong_point_map(&sc.maps[map], f.max_order(), ctx).map_err(|e| err(&e))?;
            let img = m.pull_back(&f).map_err(|e| err(&e))?;
            let ok = img.equals(&f.scale(factor));
            Ok((ok, format!("pullback is {}", show(sc, &img))))
        }
        Check::RadicalPullback { map, target, factor } => {
            let r = &sc.radicals[target];
            let k = r.rational.max_order().max(r.base.max_order());
            let m = prolong_point_map(&sc.maps[map], k, ctx).map_err(|e| err(&e))?;
            let base = m.pull_back(&r.base).map_err(|e| err(&e))?;
            let rat = m.pull_back(&r.rational).map_err(|e| err(&e))?;
            let base_fixed = base.equals(&r.base);
            let ok = base_fixed && rat.equals(&r.rational.scale(factor));
            Ok((
                ok,
                format!(
                    "({})*({})^({}) pulls back to ({})*({})^({})",
                    show(sc, &r.rational),
                    show(sc, &r.base),
                    r.exponent,
                    show(sc, &rat),
                    show(sc, &base),
                    r.exponent
                ),
            ))
        }
        Check::Find {
            order,
            degree,
            denominator,
            variables,
            basis,
            dimension,
        } => {
            let variables = match variables {
                None => None,
                Some(v) => Some(
                    v.iter()
                        .map(|n| ctx.resolve(n).ok_or_else(|| format!("unknown coordinate `{n}`")))
                        .collect::<Result<Vec<VarId>, _>>()?,
                ),
            };
            let ansatz = Ansatz {
                order: *order,
                degree: *degree,
                denominator: expr(sc, denominator)?,
                variables,
            };
            let found = find_invariants_linear(&g, &ansatz, ctx, eq).map_err(|e| err(&e))?;
            let shown: Vec<String> = found.iter().map(|f| show(sc, f)).collect();
            let mut ok = dimension.is_none_or(|d| d == found.len());
            if let Some(b) = basis {
                let want = b.iter().map(|s| expr(sc, s)).collect::<Result<Vec<_>, _>>()?;
                ok &= want.len() == found.len() && same_span(&want, &found);
            }
            Ok((ok, format!("dimension {}: {{{}}}", found.len(), shown.join(", "))))
        }
        Check::Derivation {
            derivation: name,
            probes,
            order,
            pass,
        } => {
            let d = derivation(sc, name)?;
            let probes = probes.iter().map(|p| expr(sc, p)).collect::<Result<Vec<_>, _>>()?;
            let v = verify_invariant_derivation(&d, &g, &probes, ctx, eq, *order).map_err(|e| err(&e))?;
            let detail = match &v.witness {
                None => format!("maps {} probes to invariants", probes.len()),
                Some((i, gen, r)) => format!("image of probe #{} fails under `{gen}`: {}", i + 1, show(sc, r)),
            };
            Ok(verdict(v.invariant, *pass, detail))
        }
        Check::FirstIntegral { target, order, pass } => {
            let eq = eq.ok_or("no equation")?;
            if let Some(k) = order {
                eq.table(*k).map_err(|e| err(&e))?;
            }
            let f = expr(sc, target)?;
            let ok = check_first_integral(&f, eq).map_err(|e| err(&e))?;
            Ok(verdict(
                ok,
                *pass,
                if ok {
                    "all total derivatives vanish on the equation".into()
                } else {
                    "some total derivative survives reduction".into()
                },
            ))
        }
        Check::ReducesToZero { target } => {
            let eq = eq.ok_or("no equation")?;
            let r = eq.reduce(&expr(sc, target)?).map_err(|e| err(&e))?;
            Ok((r.is_zero(), format!("normal form {}", show(sc, &r))))
        }
        Check::OperatorCommutes { operator, order } => {
            let op = &sc.operators[operator];
            let gens = g.generators(*order, ctx);
            let results: Vec<Result<bool, String>> = gens
                .par_iter()
                .map(|x| {
                    let c = op.commutator_with_field(x, ctx);
                    let c = match eq {
                        Some(eq) => c.restrict(eq).map_err(|e| err(&e))?,
                        None => c,
                    };
                    Ok(c.is_zero())
                })
                .collect();
            for (x, r) in gens.iter().zip(results) {
                if !r? {
                    return Ok((false, format!("commutator with `{}` is nonzero", x.name)));
                }
            }
            Ok((true, format!("commutes with {} generators", gens.len())))
        }
        Check::Hilbert {
            max_order,
            trials,
            profile,
        } => {
            let p = hilbert_function(&g, ctx, eq, *max_order, *trials, s).map_err(|e| err(&e))?;
            Ok((&p.d == profile, format!("d = {:?}", p.d)))
        }
        Check::Poincare {
            max_order,
            trials,
            status,
            d,
            r,
        } => {
            let p = hilbert_function(&g, ctx, eq, *max_order, *trials, s).map_err(|e| err(&e))?;
            let fit = poincare_fit(&p);
            let mut ok = fit.status == *status;
            if let Some(d) = d {
                ok &= fit.d == Some(*d);
            }
            if let Some(r) = r {
                ok &= &fit.r == r;
            }
            let detail = match fit.status {
                FitStatus::Fits => format!("fits with d = {}, R = {:?}", fit.d.unwrap_or(0), fit.r),
                FitStatus::Unstable => format!("unstable on d = {:?}", p.d),
            };
            Ok((ok, detail))
        }
        Check::OrbitDimension { order, trials, value } => {
            let v = generic_orbit_dimension(&g, *order, ctx, eq, *trials, s).map_err(|e| err(&e))?;
            Ok((v == *value, format!("generic orbit dimension {v}")))
        }
        Check::Tresse { targets } => {
            let fs = targets.iter().map(|t| expr(sc, t)).collect::<Result<Vec<_>, _>>()?;
            let ds = tresse_derivatives(&fs, ctx, eq).map_err(|e| err(&e))?;
            for (i, d) in ds.iter().enumerate() {
                for (j, f) in fs.iter().enumerate() {
                    let v = apply_derivation(d, f, ctx, eq).map_err(|e| err(&e))?;
                    let want = if i == j { RatFun::one() } else { RatFun::zero() };
                    if !v.equals(&want) {
                        return Ok((false, format!("duality fails at ({}, {})", i + 1, j + 1)));
                    }
                }
            }
            for i in 0..ds.len() {
                for j in i + 1..ds.len() {
                    if !commutator(&ds[i], &ds[j], ctx, eq).map_err(|e| err(&e))?.is_zero() {
                        return Ok((false, format!("derivations {} and {} do not commute", i + 1, j + 1)));
                    }
                }
            }
            Ok((true, format!("{} dual commuting derivations", ds.len())))
        }
        Check::Commutator {
            a,
            b,
            basis,
            coefficients,
        } => {
            let c = commutator(&derivation(sc, a)?, &derivation(sc, b)?, ctx, eq).map_err(|e| err(&e))?;
            let basis = basis.iter().map(|n| derivation(sc, n)).collect::<Result<Vec<_>, _>>()?;
            match decompose_commutator(&c, &basis, ctx, eq).map_err(|e| err(&e))? {
                Decomposition::NotInSpan => Ok((coefficients.is_none(), "not in span".into())),
                Decomposition::Coefficients(rho) => {
                    let shown: Vec<String> = rho.iter().map(|r| show(sc, r)).collect();
                    let ok = match coefficients {
                        None => false,
                        Some(want) => {
                            let want = want.iter().map(|s| expr(sc, s)).collect::<Result<Vec<_>, _>>()?;
                            want.len() == rho.len() && want.iter().zip(&rho).all(|(a, b)| a.equals(b))
                        }
                    };
                    Ok((ok, format!("coefficients ({})", shown.join(", "))))
                }
            }
        }
    }
}

/// Runs every expectation of one scenario, in declaration order.
pub fn run_scenario(sc: &Scenario, fast: bool) -> Result<CaseReport, ScenarioError> {
    let exps = expectations(sc)?;
    let outcomes = exps
        .iter()
        .map(|e| {
            let (status, detail) = if fast && e.extended {
                (Status::Skip, "extended check skipped".to_string())
            } else {
                match run_check(sc, e) {
                    Ok((true, d)) => (Status::Pass, d),
                    Ok((false, d)) => (Status::Fail, d),
                    Err(d) => (Status::Fail, format!("error: {d}")),
                }
            };
            Outcome {
                check: e.check.kind().to_string(),
                target: e.check.target(),
                status,
                detail,
                origin: e.origin,
                note: e.note.clone(),
            }
        })
        .collect();
    Ok(CaseReport {
        name: sc.name.clone(),
        outcomes,
    })
}

/// Runs the shipped cases whose name contains `filter`.
pub fn run_corpus(filter: Option<&str>, fast: bool) -> Result<CorpusReport, ScenarioError> {
    let selected: Vec<&CorpusCase> = CASES
        .iter()
        .filter(|c| filter.is_none_or(|f| c.name.contains(f)))
        .collect();
    let cases: Vec<Result<CaseReport, ScenarioError>> = selected
        .par_iter()
        .map(|c| run_scenario(&c.load()?, fast))
        .collect();
    let cases = cases.into_iter().collect::<Result<Vec<_>, _>>()?;
    let count = |s: Status| {
        cases
            .iter()
            .flat_map(|c| &c.outcomes)
            .filter(|o| o.status == s)
            .count()
    };
    Ok(CorpusReport {
        schema_version: 1,
        command: "corpus".into(),
        fast,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skip),
        cases,
    })
}

/// Whether two families of rational functions span the same space over Q.
pub fn same_span(a: &[RatFun], b: &[RatFun]) -> bool {
    let all: Vec<&RatFun> = a.iter().chain(b).collect();
    let mut dens: Vec<&Poly> = Vec::new();
    for f in &all {
        if !dens.iter().any(|d| *d == f.denom()) {
            dens.push(f.denom());
        }
    }
    let polys: Vec<Poly> = all
        .iter()
        .map(|f| {
            dens.iter()
                .filter(|d| **d != f.denom())
                .fold(f.numer().clone(), |acc, d| acc.mul(d))
        })
        .collect();
    let mut monos: Vec<Monomial> = polys.iter().flat_map(|p| p.terms().iter().map(|(m, _)| m.clone())).collect();
    monos.sort();
    monos.dedup();
    let row = |p: &Poly| -> Vec<Rational> {
        monos
            .iter()
            .map(|m| p.terms().iter().find(|(t, _)| t == m).map_or_else(Rational::zero, |(_, c)| c.clone()))
            .collect()
    };
    let ra = rank(&polys[..a.len()].iter().map(row).collect::<Vec<_>>());
    let rb = rank(&polys[a.len()..].iter().map(row).collect::<Vec<_>>());
    let rab = rank(&polys.iter().map(row).collect::<Vec<_>>());
    ra == rb && rb == rab
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_loads_and_validates() {
        for c in CASES {
            let sc = c.load().unwrap_or_else(|e| panic!("{}: {e}", c.name));
            assert_eq!(sc.name, c.name);
            assert!(!expectations(&sc).unwrap().is_empty());
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let t: toml::Table = toml::from_str("check = \"invariant\"\ntarget = \"y\"\norder = 1\nbogus = 1").unwrap();
        assert!(Expectation::from_table(&t, 0, "f").is_err());
        let t: toml::Table = toml::from_str("check = \"nope\"").unwrap();
        assert!(Expectation::from_table(&t, 0, "f").is_err());
        let t: toml::Table = toml::from_str("check = \"invariant\"\ntarget = \"y\"\norder = 1\nexpect = \"fail\"").unwrap();
        let e = Expectation::from_table(&t, 0, "f").unwrap();
        assert_eq!(
            e.check,
            Check::Invariant {
                target: "y".into(),
                order: 1,
                pass: false
            }
        );
        assert_eq!(e.origin, Origin::Derived);
    }

    #[test]
    fn zero_factor_is_rational() {
        let t: toml::Table = toml::from_str("check = \"pullback\"\nmap = \"m\"\ntarget = \"y\"\nfactor = \"-1/2\"").unwrap();
        match Expectation::from_table(&t, 0, "f").unwrap().check {
            Check::Pullback { factor, .. } => assert_eq!(factor, rational("-1/2").unwrap()),
            _ => panic!(),
        }
        assert!(!Rational::one().is_zero());
    }
}
