//! Command-line driver.
//!
//! One task per invocation: either a declarative problem file handed to a
//! task subcommand, or a catalog fixture run by id. Every run emits a
//! machine-readable TOML report (or a plain-text summary with `--summary`)
//! and exits 0 for verified, 1 for refuted, 2 for inconclusive, 3 for
//! error.

mod fixtures;
mod problem;
mod report;
mod tasks;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use problem::{BudgetBlock, BudgetOverrides, EffectiveBudgets, ProblemSpec};
use report::{ReportBuilder, Verdict};

#[derive(Parser)]
#[command(
    name = "charp",
    version,
    about = "Exact commutative algebra in prime characteristic: closure certificates, solvable towers, and local cohomology"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a reduced Groebner basis, optionally certifying a membership.
    Groebner(RunArgs),
    /// Decide whether a sequence is regular in the declared ring.
    Regseq(RunArgs),
    /// Test an element for Frobenius closure membership.
    Frobclosure(RunArgs),
    /// Build the solvable witness tower for a closure certificate.
    Witness(RunArgs),
    /// Construct the additive invariant system of the declared variables.
    Dickson(RunArgs),
    /// Decide whether a cochain on a localization complex is a coboundary.
    Cech(RunArgs),
    /// Trivialize a Frobenius-nilpotent class over an extension tower.
    Trivialize(RunArgs),
    /// Present the subalgebra generated by degree-one multiples.
    Rees(RunArgs),
    /// Certify an identity between fractional-exponent expressions.
    #[command(name = "power-identity")]
    PowerIdentity(RunArgs),
    /// Trivialize a top-degree class with graded degree bookkeeping.
    Prop54(RunArgs),
    /// Run one catalog fixture end to end.
    #[command(name = "verify-example")]
    VerifyExample {
        /// Catalog id; `charp fixtures` lists them.
        fixture_id: String,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// List the shipped fixture catalog.
    Fixtures {
        /// Keep only fixtures from this module.
        #[arg(long)]
        module: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML problem file.
    problem: PathBuf,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Override the file's Frobenius level cap.
    #[arg(long = "max-e", value_name = "E")]
    max_e: Option<u32>,
    /// Override the file's denominator truncation.
    #[arg(long, value_name = "N")]
    truncation: Option<u64>,
    /// Override the file's polynomial degree cap.
    #[arg(long = "degree-cap", value_name = "D")]
    degree_cap: Option<u64>,
    /// Override the file's S-pair cap.
    #[arg(long = "pairs-cap", value_name = "P")]
    pairs_cap: Option<usize>,
    /// Seed for randomized property suites. Every shipped task and fixture
    /// is deterministic and independent of it.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Print the plain-text summary instead of the TOML report.
    #[arg(long)]
    summary: bool,
}

impl CommonFlags {
    fn overrides(&self) -> BudgetOverrides {
        BudgetOverrides {
            max_e: self.max_e,
            truncation: self.truncation,
            degree_cap: self.degree_cap,
            pairs_cap: self.pairs_cap,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = run(cli);
    std::process::exit(code);
}

fn run(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Fixtures { module } => list_fixtures(module.as_deref()),
        Cmd::VerifyExample { fixture_id, flags } => run_fixture(&fixture_id, &flags),
        Cmd::Groebner(a) => run_problem("groebner", &a),
        Cmd::Regseq(a) => run_problem("regseq", &a),
        Cmd::Frobclosure(a) => run_problem("frobclosure", &a),
        Cmd::Witness(a) => run_problem("witness", &a),
        Cmd::Dickson(a) => run_problem("dickson", &a),
        Cmd::Cech(a) => run_problem("cech", &a),
        Cmd::Trivialize(a) => run_problem("trivialize", &a),
        Cmd::Rees(a) => run_problem("rees", &a),
        Cmd::PowerIdentity(a) => run_problem("power-identity", &a),
        Cmd::Prop54(a) => run_problem("prop54", &a),
    }
}

fn list_fixtures(module: Option<&str>) -> i32 {
    let mut shown = 0usize;
    for fx in fixtures::FIXTURES {
        if module.is_some_and(|m| m != fx.module) {
            continue;
        }
        println!("{:<22} {:<10} {}", fx.id, fx.module, fx.description);
        shown += 1;
    }
    println!("{shown} fixtures listed");
    0
}

fn run_fixture(id: &str, flags: &CommonFlags) -> i32 {
    let budgets = EffectiveBudgets::merge(&BudgetBlock::default(), &flags.overrides());
    let mut rb = ReportBuilder::new("verify-example", Some(id));
    let outcome = match fixtures::find(id) {
        Some(fx) => (fx.run)(&mut rb, &budgets),
        None => Err(charp_core::Error::InvalidInput(format!(
            "unknown fixture id {id:?}; run `charp fixtures` for the catalog"
        ))),
    };
    emit(rb, outcome, &budgets, flags.summary)
}

fn run_problem(kind: &'static str, args: &RunArgs) -> i32 {
    let flags = &args.flags;
    let mut rb = ReportBuilder::new(kind, None);
    let fallback = EffectiveBudgets::merge(&BudgetBlock::default(), &flags.overrides());
    let text = match std::fs::read_to_string(&args.problem) {
        Ok(t) => t,
        Err(e) => {
            rb.verdict(
                Verdict::Error,
                format!("cannot read {}: {e}", args.problem.display()),
            );
            return emit(rb, Ok(()), &fallback, flags.summary);
        }
    };
    let spec: ProblemSpec = match toml::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            rb.verdict(Verdict::Error, format!("problem file does not parse: {e}"));
            return emit(rb, Ok(()), &fallback, flags.summary);
        }
    };
    let budgets = EffectiveBudgets::merge(&spec.budgets, &flags.overrides());
    if spec.task.kind != kind {
        rb.verdict(
            Verdict::Error,
            format!(
                "problem file declares task kind {:?} but the {kind} subcommand was invoked",
                spec.task.kind
            ),
        );
        return emit(rb, Ok(()), &budgets, flags.summary);
    }
    let outcome = tasks::dispatch(kind, &spec, &budgets, &mut rb);
    emit(rb, outcome, &budgets, flags.summary)
}

/// Folds a task failure into the report, prints it, and returns the exit
/// code. Budget exhaustion becomes an inconclusive verdict, never an
/// error.
fn emit(
    mut rb: ReportBuilder,
    outcome: charp_core::Result<()>,
    budgets: &EffectiveBudgets,
    summary: bool,
) -> i32 {
    if let Err(e) = outcome {
        rb.fail(&e);
    }
    let report = rb.seal(budgets);
    if summary {
        print!("{}", report.render_summary());
    } else {
        print!("{}", report.to_toml());
    }
    report.exit_code
}
