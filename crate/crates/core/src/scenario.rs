//! Scenario files: a jet context, a Lie algebra, an optional equation and
//! named objects, loaded from TOML and validated.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::equation::{EquationError, Rule, SolvedEquation};
use crate::expr::{parse_with, rational, ExprError, MultiIndex, RatFun, Rational, VarId};
use crate::invariants::{Derivation, FamilySpec, LieAlgebraSpec, TotalDiffOperator};
use crate::jet::JetContext;
use crate::orbitdim::Sampling;
use crate::prolong::{PointMap, PointVectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("{file}: {msg}")]
    Io { file: String, msg: String },
    #[error("{file}: {msg}")]
    Schema { file: String, msg: String },
    #[error("{file}:{line}:{col}: {msg}")]
    Syntax {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{file}: {source}")]
    Orthonomicity { file: String, source: EquationError },
}

type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    description: Option<String>,
    context: RawContext,
    #[serde(default)]
    fields: Vec<RawField>,
    #[serde(default)]
    families: Vec<RawFamily>,
    #[serde(default)]
    equation: Vec<RawRule>,
    #[serde(default)]
    equation_kind: Option<String>,
    #[serde(default)]
    expressions: BTreeMap<String, Spanned<String>>,
    #[serde(default)]
    derivations: BTreeMap<String, Vec<Spanned<String>>>,
    #[serde(default)]
    maps: Vec<RawMap>,
    #[serde(default)]
    radicals: Vec<RawRadical>,
    #[serde(default)]
    operators: Vec<RawOperator>,
    #[serde(default)]
    sampling: Option<RawSampling>,
    #[serde(default)]
    expect: Vec<toml::Table>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContext {
    independents: Vec<String>,
    dependents: Vec<String>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    name: String,
    alpha: Vec<Spanned<String>>,
    beta: Vec<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamilyParams {
    #[serde(default)]
    min_degree: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    pattern: String,
    #[serde(default)]
    params: RawFamilyParams,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    lead: Spanned<String>,
    rhs: Spanned<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    name: String,
    x: Vec<Spanned<String>>,
    u: Vec<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRadical {
    name: String,
    rational: Spanned<String>,
    base: Spanned<String>,
    exponent: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    name: String,
    terms: Vec<RawOperatorTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperatorTerm {
    index: Vec<u32>,
    coeff: Spanned<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_range")]
    range: [i64; 2],
    #[serde(default)]
    exclude: Vec<Spanned<String>>,
    #[serde(default = "default_retries")]
    retries: u32,
}

fn default_seed() -> u64 {
    1
}

fn default_range() -> [i64; 2] {
    [-10, 10]
}

fn default_retries() -> u32 {
    100
}

/// `rational · base^exponent` with a non-integer exponent.
#[derive(Debug, Clone)]
pub struct Radical {
    pub name: String,
    pub rational: RatFun,
    pub base: RatFun,
    pub exponent: Rational,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub file: String,
    pub ctx: JetContext,
    pub algebra: LieAlgebraSpec,
    pub equation: Option<SolvedEquation>,
    pub expressions: BTreeMap<String, RatFun>,
    pub derivations: BTreeMap<String, Derivation>,
    pub maps: BTreeMap<String, PointMap>,
    pub radicals: BTreeMap<String, Radical>,
    pub operators: BTreeMap<String, TotalDiffOperator>,
    pub sampling: Sampling,
    /// Raw expectation tables, interpreted by the corpus runner.
    pub expect: Vec<toml::Table>,
    source: String,
}

struct Loader<'a> {
    file: &'a str,
    src: &'a str,
}

impl Loader<'_> {
    fn schema(&self, msg: impl Into<String>) -> ScenarioError {
        ScenarioError::Schema {
            file: self.file.to_string(),
            msg: msg.into(),
        }
    }

    fn position(&self, span: Range<usize>, offset: usize) -> (usize, usize) {
        let start = (span.start + 1 + offset).min(self.src.len());
        let before = &self.src[..start];
        let line = before.matches('\n').count() + 1;
        let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (line, col)
    }

    fn expr_error(&self, span: Range<usize>, e: ExprError) -> ScenarioError {
        let offset = match &e {
            ExprError::Syntax { pos, .. }
            | ExprError::UnknownVariable { pos, .. }
            | ExprError::NonIntegerExponent { pos } => *pos,
            _ => 0,
        };
        let (line, col) = self.position(span, offset);
        ScenarioError::Syntax {
            file: self.file.to_string(),
            line,
            col,
            msg: e.to_string(),
        }
    }

    fn expr(&self, s: &Spanned<String>, ctx: &JetContext, env: &HashMap<String, RatFun>) -> Result<RatFun> {
        parse_with(s.get_ref(), ctx, env).map_err(|e| self.expr_error(s.span(), e))
    }

    fn exprs(
        &self,
        v: &[Spanned<String>],
        ctx: &JetContext,
        env: &HashMap<String, RatFun>,
    ) -> Result<Vec<RatFun>> {
        v.iter().map(|s| self.expr(s, ctx, env)).collect()
    }
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
        let path = path.as_ref();
        let file = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            file: file.clone(),
            msg: e.to_string(),
        })?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_str_named(&src, &file, &stem)
    }

    /// Parses scenario text; `file` labels error messages and `default_name`
    /// is used when the text has no `name` key.
    pub fn from_str_named(src: &str, file: &str, default_name: &str) -> Result<Scenario> {
        let ld = Loader { file, src };
        let raw: RawScenario = toml::from_str(src).map_err(|e| ld.schema(e.to_string().trim_end().to_string()))?;

        let mut ctx = JetContext::new(&raw.context.independents, &raw.context.dependents)
            .map_err(|e| ld.schema(e.to_string()))?;
        for (alias, target) in &raw.context.aliases {
            ctx = ctx
                .with_alias_named(alias, target)
                .map_err(|e| ld.schema(format!("alias `{alias}`: {e}")))?;
        }

        let env = resolve_expressions(&ld, &raw.expressions, &ctx)?;

        let mut algebra = LieAlgebraSpec::default();
        for f in &raw.fields {
            let alpha = ld.exprs(&f.alpha, &ctx, &env)?;
            let beta = ld.exprs(&f.beta, &ctx, &env)?;
            let field = PointVectorField::new(f.name.clone(), alpha, beta, &ctx)
                .map_err(|e| ld.schema(format!("field `{}`: {e}", f.name)))?;
            algebra.fields.push(field);
        }
        for fam in &raw.families {
            let spec = FamilySpec::parse(&fam.pattern, fam.params.min_degree, &ctx)
                .map_err(|e| ld.schema(e.to_string()))?;
            algebra.families.push(spec);
        }

        let equation = if raw.equation.is_empty() && raw.equation_kind.is_none() {
            None
        } else {
            let mut rules = Vec::new();
            for r in &raw.equation {
                let lead = ctx.resolve(r.lead.get_ref().trim()).ok_or_else(|| {
                    let (line, col) = ld.position(r.lead.span(), 0);
                    ScenarioError::Syntax {
                        file: file.to_string(),
                        line,
                        col,
                        msg: format!("unknown coordinate `{}`", r.lead.get_ref()),
                    }
                })?;
                let rhs = ld.expr(&r.rhs, &ctx, &env)?;
                rules.push(Rule { lead, rhs });
            }
            let orth = |source| ScenarioError::Orthonomicity {
                file: file.to_string(),
                source,
            };
            Some(match raw.equation_kind.as_deref() {
                None | Some("differential") => SolvedEquation::new(&ctx, rules).map_err(orth)?,
                Some("pointwise") => SolvedEquation::pointwise(&ctx, rules).map_err(orth)?,
                Some(other) => return Err(ld.schema(format!("unknown equation_kind `{other}`"))),
            })
        };

        let mut derivations = BTreeMap::new();
        for (name, coeffs) in &raw.derivations {
            let c = ld.exprs(coeffs, &ctx, &env)?;
            if c.len() != ctx.n() {
                return Err(ld.schema(format!(
                    "derivation `{name}` has {} coefficients, expected {}",
                    c.len(),
                    ctx.n()
                )));
            }
            derivations.insert(name.clone(), Derivation::new(c));
        }

        let mut maps = BTreeMap::new();
        for m in &raw.maps {
            let x = ld.exprs(&m.x, &ctx, &env)?;
            let u = ld.exprs(&m.u, &ctx, &env)?;
            let map = PointMap::new(m.name.clone(), x, u, &ctx)
                .map_err(|e| ld.schema(format!("map `{}`: {e}", m.name)))?;
            maps.insert(m.name.clone(), map);
        }

        let mut radicals = BTreeMap::new();
        for r in &raw.radicals {
            let exponent = rational(&r.exponent)
                .ok_or_else(|| ld.schema(format!("radical `{}`: bad exponent `{}`", r.name, r.exponent)))?;
            radicals.insert(
                r.name.clone(),
                Radical {
                    name: r.name.clone(),
                    rational: ld.expr(&r.rational, &ctx, &env)?,
                    base: ld.expr(&r.base, &ctx, &env)?,
                    exponent,
                },
            );
        }

        let mut operators = BTreeMap::new();
        for op in &raw.operators {
            let mut d = TotalDiffOperator::default();
            for t in &op.terms {
                if t.index.len() != ctx.n() {
                    return Err(ld.schema(format!("operator `{}`: index length must be {}", op.name, ctx.n())));
                }
                d.add_term(MultiIndex::from_slice(&t.index), ld.expr(&t.coeff, &ctx, &env)?);
            }
            operators.insert(op.name.clone(), d);
        }

        let sampling = match &raw.sampling {
            None => Sampling::default(),
            Some(s) => {
                if s.range[0] > s.range[1] {
                    return Err(ld.schema("sampling.range must be [low, high] with low <= high"));
                }
                Sampling {
                    seed: s.seed,
                    range: (s.range[0], s.range[1]),
                    exclude: ld.exprs(&s.exclude, &ctx, &env)?,
                    retries: s.retries,
                }
            }
        };

        Ok(Scenario {
            name: raw.name.unwrap_or_else(|| default_name.to_string()),
            description: raw.description.unwrap_or_default(),
            file: file.to_string(),
            ctx,
            algebra,
            equation,
            expressions: env.into_iter().collect(),
            derivations,
            maps,
            radicals,
            operators,
            sampling,
            expect: raw.expect,
            source: src.to_string(),
        })
    }

    /// Named expressions as a parser environment.
    pub fn env(&self) -> HashMap<String, RatFun> {
        self.expressions.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    /// Parses an expression or a name defined in the scenario.
    pub fn expr(&self, src: &str) -> std::result::Result<RatFun, ExprError> {
        parse_with(src, &self.ctx, &self.env())
    }

    /// The scenario text as loaded.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn coordinate(&self, name: &str) -> Option<VarId> {
        self.ctx.resolve(name)
    }
}

/// Parses named expressions, which may refer to each other.
fn resolve_expressions(
    ld: &Loader,
    raw: &BTreeMap<String, Spanned<String>>,
    ctx: &JetContext,
) -> Result<HashMap<String, RatFun>> {
    for name in raw.keys() {
        if ctx.resolve(name).is_some() {
            return Err(ld.schema(format!("expression name `{name}` shadows a coordinate")));
        }
    }
    let mut env = HashMap::new();
    let mut pending: Vec<&String> = raw.keys().collect();
    loop {
        let mut progressed = false;
        let mut still = Vec::new();
        let mut first_err = None;
        for name in pending {
            let s = &raw[name];
            match parse_with(s.get_ref(), ctx, &env) {
                Ok(v) => {
                    env.insert(name.clone(), v);
                    progressed = true;
                }
                Err(e) => {
                    let waits = matches!(&e, ExprError::UnknownVariable { name: n, .. } if raw.contains_key(n));
                    if first_err.is_none() || !waits {
                        first_err = Some((s.span(), e));
                    }
                    still.push(name);
                }
            }
        }
        if still.is_empty() {
            return Ok(env);
        }
        if !progressed {
            let (span, e) = first_err.expect("pending expression has an error");
            return Err(ld.expr_error(span, e));
        }
        pending = still;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario() {
        let s = Scenario::from_str_named(
            "[context]\nindependents = [\"x\"]\ndependents = [\"y\"]\n",
            "min.toml",
            "min",
        )
        .unwrap();
        assert_eq!(s.name, "min");
        assert!(s.algebra.fields.is_empty() && s.algebra.families.is_empty());
        assert!(s.equation.is_none());
        assert_eq!(s.sampling.seed, 1);
    }

    #[test]
    fn gas_dynamics_scenario() {
        let src = r#"
[context]
independents = ["x", "y"]
dependents = ["w"]
aliases = { w_x = "w_10", w_1 = "w_01" }

[[equation]]
lead = "w_x"
rhs = "w*w_1"

[expressions]
B = "A^2"
A = "w_1 + 1"
"#;
        let s = Scenario::from_str_named(src, "gas.toml", "gas").unwrap();
        let eq = s.equation.as_ref().unwrap();
        assert_eq!(eq.rules().len(), 1);
        assert!(s.expressions["B"].equals(&s.expr("(w_01+1)^2").unwrap()));
    }

    #[test]
    fn errors_carry_positions() {
        let src = "[context]\nindependents = [\"x\"]\ndependents = [\"y\"]\n\n[expressions]\nK = \"y_2 + q\"\n";
        match Scenario::from_str_named(src, "bad.toml", "bad") {
            Err(ScenarioError::Syntax { line, col, msg, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(col, 12);
                assert!(msg.contains('q'));
            }
            other => panic!("{other:?}"),
        }
        let cyc = "[context]\nindependents = [\"x\"]\ndependents = [\"y\"]\n[expressions]\nA = \"B\"\nB = \"A\"\n";
        assert!(matches!(
            Scenario::from_str_named(cyc, "c.toml", "c"),
            Err(ScenarioError::Syntax { .. })
        ));
        let schema = "[context]\nindependents = [\"x\"]\n";
        assert!(matches!(
            Scenario::from_str_named(schema, "s.toml", "s"),
            Err(ScenarioError::Schema { .. })
        ));
        let orth = "[context]\nindependents = [\"x\"]\ndependents = [\"y\"]\n[[equation]]\nlead = \"y_1\"\nrhs = \"y_2\"\n";
        assert!(matches!(
            Scenario::from_str_named(orth, "o.toml", "o"),
            Err(ScenarioError::Orthonomicity { .. })
        ));
        assert!(matches!(Scenario::load("/nonexistent/x.toml"), Err(ScenarioError::Io { .. })));
    }
}
