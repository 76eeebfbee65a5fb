//! Declarative problem files.
//!
//! A problem file is a TOML document with three blocks: `[ring]` declares
//! the coefficient field, variables, optional weights and parameters, and
//! defining relations; `[task]` names the operation and its inputs; and an
//! optional `[budgets]` block caps the searches. Budgets in the file are
//! overridden by command-line flags, so a problem file pins a reproducible
//! default while a flag can widen or narrow one run.

use std::sync::Arc;

use num_rational::Ratio;
use serde::Deserialize;

use charp_core::budget::{GbBudget, SolveBudget};
use charp_core::field::FieldSpec;
use charp_core::monomial::OrderSpec;
use charp_core::parse::parse_poly;
use charp_core::poly::Polynomial;
use charp_core::ring::RingContext;
use charp_core::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub ring: RingBlock,
    #[serde(default)]
    pub budgets: BudgetBlock,
    pub task: TaskBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingBlock {
    pub characteristic: u64,
    #[serde(default = "default_field_degree")]
    pub field_degree: usize,
    pub variables: Vec<String>,
    /// Positive rationals, written as "1" or "3/2"; denominators must be
    /// powers of the characteristic.
    pub weights: Option<Vec<String>>,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default = "default_order")]
    pub order: String,
}

fn default_field_degree() -> usize {
    1
}

fn default_order() -> String {
    "grevlex".to_string()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetBlock {
    pub max_e: Option<u32>,
    pub truncation: Option<u64>,
    pub degree_cap: Option<u64>,
    pub pairs_cap: Option<usize>,
    pub solve_degree_cap: Option<u64>,
}

/// The task block: a kind plus its inputs. Every input key is optional at
/// the schema level; each task validates the keys it needs and rejects a
/// file whose kind does not match the invoked subcommand.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskBlock {
    pub kind: String,
    /// Element under test (frobclosure, witness).
    pub element: Option<String>,
    /// Ideal generators (frobclosure, witness).
    pub ideal: Option<Vec<String>>,
    /// Ideal generators (groebner, rees).
    pub generators: Option<Vec<String>>,
    /// Candidate membership target (groebner).
    pub membership: Option<String>,
    /// Sequence to test for regularity (regseq).
    pub sequence: Option<Vec<String>>,
    /// Localizing elements of a complex (cech, trivialize, prop54).
    pub elements: Option<Vec<String>>,
    /// Cochain degree (cech, trivialize).
    pub degree: Option<usize>,
    /// Cochain components, one per index subset (cech, trivialize, prop54).
    pub components: Option<Vec<String>>,
    /// Promise that the declared ring has no zerodivisors; enables
    /// conclusive degree-one coboundary refutations (cech, trivialize).
    pub integral: Option<bool>,
    /// Fresh symbol names (rees).
    pub new_names: Option<Vec<String>>,
    /// Identity sides and level (power-identity).
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub level: Option<u32>,
    pub domain_hypothesis: Option<bool>,
}

/// Flag values that override the problem file's budget block.
#[derive(Debug, Clone, Copy, Default)]
pub struct BudgetOverrides {
    pub max_e: Option<u32>,
    pub truncation: Option<u64>,
    pub degree_cap: Option<u64>,
    pub pairs_cap: Option<usize>,
}

/// Budgets after merging defaults, the problem file, and flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EffectiveBudgets {
    /// Largest Frobenius level searched by closure and trivialization
    /// tasks.
    pub max_e: u32,
    /// Denominator truncation for cochain construction.
    pub truncation: u64,
    pub degree_cap: u64,
    pub pairs_cap: usize,
    pub solve_degree_cap: u64,
}

impl Default for EffectiveBudgets {
    fn default() -> Self {
        let gb = GbBudget::default();
        let solve = SolveBudget::default();
        EffectiveBudgets {
            max_e: 4,
            truncation: 1,
            degree_cap: gb.max_degree,
            pairs_cap: gb.max_pairs,
            solve_degree_cap: solve.max_degree,
        }
    }
}

impl EffectiveBudgets {
    pub fn merge(file: &BudgetBlock, flags: &BudgetOverrides) -> Self {
        let d = EffectiveBudgets::default();
        EffectiveBudgets {
            max_e: flags.max_e.or(file.max_e).unwrap_or(d.max_e),
            truncation: flags.truncation.or(file.truncation).unwrap_or(d.truncation),
            degree_cap: flags.degree_cap.or(file.degree_cap).unwrap_or(d.degree_cap),
            pairs_cap: flags.pairs_cap.or(file.pairs_cap).unwrap_or(d.pairs_cap),
            solve_degree_cap: file.solve_degree_cap.unwrap_or(d.solve_degree_cap),
        }
    }

    pub fn gb(&self) -> GbBudget {
        GbBudget { max_pairs: self.pairs_cap, max_degree: self.degree_cap }
    }

    pub fn solve(&self) -> SolveBudget {
        SolveBudget { max_degree: self.solve_degree_cap }
    }
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::InvalidInput(format!("bad rational component {t:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den == 0 {
                return Err(Error::InvalidInput(format!("zero denominator in weight {s:?}")));
            }
            Ok(Ratio::new(parse_int(n)?, den))
        }
        None => Ok(Ratio::from_integer(parse_int(s)?)),
    }
}

impl RingBlock {
    /// Builds the declared ring and checks every relation string parses
    /// in it.
    pub fn build(&self) -> Result<Arc<RingContext>> {
        let field = FieldSpec::new(self.characteristic, self.field_degree)?;
        let order = match self.order.as_str() {
            "grevlex" => OrderSpec::GrevLex,
            "lex" => OrderSpec::Lex,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown monomial order {other:?} (expected \"grevlex\" or \"lex\")"
                )))
            }
        };
        let weights = self
            .weights
            .as_ref()
            .map(|ws| ws.iter().map(|w| parse_ratio(w)).collect::<Result<Vec<_>>>())
            .transpose()?;
        let free = RingContext::new(
            field,
            self.variables.clone(),
            weights,
            self.parameters.clone(),
            order,
        )?;
        if self.relations.is_empty() {
            return Ok(free);
        }
        let rels = self
            .relations
            .iter()
            .map(|s| parse_poly(s, &free))
            .collect::<Result<Vec<_>>>()?;
        free.with_relations(rels)
    }
}

/// Parses one task polynomial, naming the offending key on failure.
pub fn task_poly(key: &str, s: &str, ctx: &Arc<RingContext>) -> Result<Polynomial> {
    parse_poly(s, ctx)
        .map_err(|e| Error::InvalidInput(format!("task key {key}: {s:?} does not parse: {e}")))
}

/// Parses a list-valued task key.
pub fn task_polys(key: &str, ss: &[String], ctx: &Arc<RingContext>) -> Result<Vec<Polynomial>> {
    ss.iter().map(|s| task_poly(key, s, ctx)).collect()
}

/// Extracts a required task key.
pub fn require<'a, T>(key: &str, v: &'a Option<T>) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("task block is missing required key {key:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_minimal_problem_file_parses_and_builds_its_ring() {
        let text = r#"
            [ring]
            characteristic = 2
            variables = ["x", "y", "z"]
            relations = ["x^3 + y^3 + z^3"]

            [task]
            kind = "frobclosure"
            element = "z^2"
            ideal = ["x", "y"]
        "#;
        let spec: ProblemSpec = toml::from_str(text).unwrap();
        let ctx = spec.ring.build().unwrap();
        assert_eq!(ctx.nvars(), 3);
        assert_eq!(ctx.p(), 2);
        assert_eq!(spec.task.kind, "frobclosure");
    }

    #[test]
    fn flag_overrides_beat_file_budgets_which_beat_defaults() {
        let file = BudgetBlock { max_e: Some(2), pairs_cap: Some(10), ..Default::default() };
        let flags = BudgetOverrides { max_e: Some(7), ..Default::default() };
        let eff = EffectiveBudgets::merge(&file, &flags);
        assert_eq!(eff.max_e, 7);
        assert_eq!(eff.pairs_cap, 10);
        assert_eq!(eff.truncation, EffectiveBudgets::default().truncation);
    }

    #[test]
    fn fractional_weights_parse_and_bad_ones_are_rejected() {
        assert_eq!(parse_ratio("3/2").unwrap(), Ratio::new(3, 2));
        assert_eq!(parse_ratio("4").unwrap(), Ratio::from_integer(4));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a/b").is_err());
    }

    #[test]
    fn unknown_keys_in_a_problem_file_are_rejected() {
        let text = r#"
            [ring]
            characteristic = 2
            variables = ["x"]
            surprise = true

            [task]
            kind = "groebner"
        "#;
        assert!(toml::from_str::<ProblemSpec>(text).is_err());
    }
}
