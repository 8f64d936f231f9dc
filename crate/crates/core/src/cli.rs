//! The `opcheck` command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 numerical failure,
//! 3 a requested suite failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::classify::{kernel, minimal_order, MinimalOrder};
use crate::drazin::{block_view, core_nilpotent_decompose, DrazinReport, PairSelector};
use crate::elemops::TransformKind;
use crate::error::{Error, Result};
use crate::genx::{generate, Family, InstanceSpec};
use crate::harness::{run_suite, Suite, SuiteConfig};
use crate::matcore::{CMatrix, NumericPolicy};

/// Environment variable naming a JSON file with a policy override.
pub const POLICY_ENV: &str = "OPCHECK_POLICY";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_SUITE_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "opcheck", version, about = "Weighted m-isometry and m-selfadjointness checks for Drazin invertible matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Drazin index, Drazin inverse and axiom residuals of a square matrix.
    Drazin {
        file: PathBuf,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Smallest order at which the weighted defect of a pair vanishes.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        /// Weight matrix file (default: identity).
        #[arg(long)]
        weight: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
    },
    /// Basis of all weights killed by the transform at a fixed order (JSON).
    Kernel {
        file: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        order: usize,
    },
    /// Generate a certified instance of a family into a directory.
    Example {
        #[arg(long)]
        family: Family,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scalar `re,im` for scalar-plus-nilpotent.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        scalar: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run property suites.
    Verify {
        /// Suite name or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        dim_max: usize,
        #[arg(long, default_value_t = 4)]
        order_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// `triangle` (BXA − X) or `delta` (BX − XA).
    #[arg(long)]
    transform: TransformKind,
    /// Left operator: self, adjoint, drazin or drazin-adjoint.
    #[arg(long)]
    pair: PairSelector,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn policy() -> Result<NumericPolicy> {
    match std::env::var_os(POLICY_ENV) {
        None => Ok(NumericPolicy::default()),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", Path::new(&path).display())))?;
            NumericPolicy::from_json(&text)
        }
    }
}

fn read_square(path: &Path) -> Result<CMatrix> {
    let a = CMatrix::read_json(path)?;
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(a)
}

fn dispatch(cmd: Command) -> Result<i32> {
    let policy = policy()?;
    match cmd {
        Command::Drazin { file, json } => cmd_drazin(&file, json, &policy),
        Command::Classify { file, pair, weight, max_order } => {
            cmd_classify(&file, pair.transform, pair.pair, weight.as_deref(), max_order, &policy)
        }
        Command::Kernel { file, pair, order } => cmd_kernel(&file, pair.transform, pair.pair, order, &policy),
        Command::Example { family, dims, orders, seed, scalar, out } => {
            let scalar = scalar.map(|v| [v[0], v[1]]);
            cmd_example(InstanceSpec { family, dims, orders, seed, scalar }, &out)
        }
        Command::Verify { suite, trials, dim_max, order_max, seed, report } => {
            cmd_verify(&suite, trials, dim_max, order_max, seed, report.as_deref(), policy)
        }
    }
}

fn cmd_drazin(file: &Path, as_json: bool, policy: &NumericPolicy) -> Result<i32> {
    let a = read_square(file)?;
    let dd = core_nilpotent_decompose(&a, policy)?;
    let report = DrazinReport::new(&a, &dd, policy);
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("index: {}", report.index);
        println!("dim H1: {}  dim H2: {}", report.dim_h1, report.dim_h2);
        println!("similarity condition: {:.6e}", report.condition);
        println!("residual [A_d, A]:            {:.6e}", report.residuals.commutator);
        println!("residual A_d^2 A - A_d:       {:.6e}", report.residuals.idempotence);
        println!("residual A^(p+1) A_d - A^p:   {:.6e}", report.residuals.power);
        println!("tolerance:                    {:.6e}", report.tolerance);
        println!("A_d = {:?}", report.drazin_inverse);
    }
    Ok(if report.axioms_hold() { EXIT_OK } else { EXIT_NUMERICAL })
}

fn cmd_classify(
    file: &Path,
    kind: TransformKind,
    pair: PairSelector,
    weight: Option<&Path>,
    max_order: usize,
    policy: &NumericPolicy,
) -> Result<i32> {
    let a = read_square(file)?;
    let x = match weight {
        Some(p) => CMatrix::read_json(p)?,
        None => CMatrix::identity(a.rows()),
    };
    if x.rows() != a.rows() || x.cols() != a.cols() {
        return Err(Error::DimensionMismatch(format!("weight is {}x{}, operator is {}x{}", x.rows(), x.cols(), a.rows(), a.cols())));
    }
    let b = crate::drazin::resolve_pair(&a, pair, policy)?;
    let res = minimal_order(kind, &b, &a, &x, max_order, policy)?;
    match res.minimal_order {
        MinimalOrder::Found(m) => println!("minimal order: {m}"),
        MinimalOrder::NotFound { bound } => println!("minimal order: none <= {bound}"),
    }
    println!("{:>5}  {:>14}  {:>14}", "order", "residual", "tolerance");
    for (i, (r, t)) in res.residuals.iter().zip(&res.tolerances).enumerate() {
        println!("{:>5}  {:>14.6e}  {:>14.6e}", i + 1, r, t);
    }
    Ok(EXIT_OK)
}

fn cmd_kernel(file: &Path, kind: TransformKind, pair: PairSelector, order: usize, policy: &NumericPolicy) -> Result<i32> {
    let a = read_square(file)?;
    if order == 0 {
        return Err(Error::InvalidOrder("order must be at least 1".into()));
    }
    let dd = if pair.needs_drazin() { Some(core_nilpotent_decompose(&a, policy)?) } else { None };
    let b = pair.resolve_with(&a, dd.as_ref().map_or(&a, |d| &d.a_d));
    let k = kernel(kind, &b, &a, order, policy)?;
    let mut out = json!({});
    if let Some(dd) = &dd {
        let norms = k.basis.iter().map(|x| block_view(x, dd).map(|v| v.norms())).collect::<Result<Vec<_>>>()?;
        out["block_norms"] = serde_json::to_value(norms)?;
    }
    out["transform"] = json!(kind.name());
    out["pair"] = json!(pair.name());
    out["order"] = json!(order);
    out["dim"] = json!(k.dim);
    out["basis"] = serde_json::to_value(&k.basis)?;
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(EXIT_OK)
}

fn cmd_example(spec: InstanceSpec, out: &Path) -> Result<i32> {
    let inst = generate(&spec)?;
    std::fs::create_dir_all(out)?;
    for (name, m) in &inst.matrices {
        m.write_json(out.join(format!("{name}.json")))?;
    }
    let cert = json!({
        "spec": spec,
        "family": inst.family,
        "constructed_index": inst.constructed_index,
        "certified": inst.certified,
        "flags": inst.flags,
    });
    std::fs::write(out.join("certification.json"), serde_json::to_string_pretty(&cert)?)?;
    println!("family {} seed {}: wrote {} matrices to {}", spec.family.name(), spec.seed, inst.matrices.len(), out.display());
    for c in &inst.certified {
        println!("  {:<44} residual {:.3e}  threshold {:.3e}  {}", c.property, c.residual, c.tolerance, if c.passed { "ok" } else { "FAILED" });
    }
    Ok(EXIT_OK)
}

fn cmd_verify(
    suite: &str,
    trials: usize,
    dim_max: usize,
    order_max: usize,
    seed: u64,
    report: Option<&Path>,
    policy: NumericPolicy,
) -> Result<i32> {
    let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
    let mut reports = Vec::new();
    for s in suites {
        let cfg = SuiteConfig { suite: s, trials, dim_max, order_max, seed, policy };
        let rep = run_suite(&cfg)?;
        println!("{}", rep.summary_line());
        for f in rep.failures.iter().take(5) {
            println!("    trial {:?}: {} [{}] {:?}", f.trial, f.clause, f.instance, f.residuals);
        }
        reports.push(rep);
    }
    let all_pass = reports.iter().all(|r| r.passed());
    if let Some(path) = report {
        let text = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])?
        } else {
            serde_json::to_string_pretty(&reports)?
        };
        std::fs::write(path, text)?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_SUITE_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["opcheck", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["opcheck", "verify", "--suite", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["opcheck", "kernel", "a.json", "--transform", "sideways", "--pair", "self", "--order", "1"]), EXIT_USAGE);
    }

    #[test]
    fn help_and_version_exit_zero() {
        assert_eq!(run(["opcheck", "--help"]), EXIT_OK);
        assert_eq!(run(["opcheck", "--version"]), EXIT_OK);
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }
}
