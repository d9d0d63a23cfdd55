//! Command-line front end: parse problem files, compute order invariants,
//! verify the analytic class number formula, and emit reports.
//!
//! Exit codes: 0 = success/PASS, 1 = input error, 2 = verification FAIL,
//! 3 = internal inconsistency.

mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use acnf_core::algebra::EtaleAlgebra;
use acnf_core::invariants::{
    analyze, verify_acnf, zeta_correction, zeta_correction_at, zeta_partial, OrderAnalysis,
    VerificationReport,
};
use acnf_core::oracle::{fiber_product_order, form_class_number};
use acnf_core::order::{order_from_generators, OrderLattice};
use acnf_core::quotient::local_unit_index;
use acnf_core::{build_algebra, Error};

use problem::{parse_generators, show_rational, OrderSpec, ProblemFile};

#[derive(Parser)]
#[command(
    name = "acnf",
    about = "Invariants of orders in products of number fields and verification of the analytic class number formula"
)]
struct Cli {
    /// Emit machine-readable JSON instead of tables
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the algebra, order, conductor, singular primes, and invariants
    Describe { file: PathBuf },
    /// Verify the analytic class number formula for the order
    Verify { file: PathBuf },
    /// Build the fiber product {(a,b) : a = b mod p} in Z x Z and verify it
    FiberProduct {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        copies: usize,
    },
    /// Compare the class number against the quadratic form oracle
    OracleH { file: PathBuf },
    /// Partial Euler products for the order and the maximal order
    Zeta {
        file: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        /// Defaults to ACNF_PRIME_BOUND or 1000
        #[arg(long)]
        prime_bound: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(RunError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Internal(msg)) => {
            eprintln!("internal inconsistency: {msg}");
            ExitCode::from(3)
        }
    }
}

enum RunError {
    Input(String),
    Internal(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => RunError::Input(format!("invalid input: {m}")),
            Error::Unsupported(m) => RunError::Input(format!("unsupported: {m}")),
            Error::Internal(m) => RunError::Internal(m),
        }
    }
}

impl From<String> for RunError {
    fn from(m: String) -> Self {
        RunError::Input(m)
    }
}

fn run(cli: &Cli) -> Result<ExitCode, RunError> {
    match &cli.command {
        Command::Describe { file } => {
            let a = load_analysis(file)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&describe_json(&a)?).unwrap()
                );
            } else {
                print_describe(&a)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file } => {
            let a = load_analysis(file)?;
            verify_and_report(&a, cli.json)
        }
        Command::FiberProduct { p, copies } => {
            let (alg, ord) = fiber_product_order(*p, *copies)?;
            let a = analyze(&alg, &ord)?;
            verify_and_report(&a, cli.json)
        }
        Command::OracleH { file } => {
            let a = load_analysis(file)?;
            oracle_h(&a, cli.json)
        }
        Command::Zeta {
            file,
            s,
            prime_bound,
        } => {
            let bound = match prime_bound {
                Some(b) => *b,
                None => match std::env::var("ACNF_PRIME_BOUND") {
                    Ok(v) => v
                        .parse()
                        .map_err(|_| format!("ACNF_PRIME_BOUND is not an integer: {v:?}"))?,
                    Err(_) => 1000,
                },
            };
            zeta_command(&load_analysis(file)?, *s, bound, cli.json)
        }
    }
}

fn load_analysis(file: &PathBuf) -> Result<OrderAnalysis, RunError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let problem: ProblemFile =
        serde_json::from_str(&text).map_err(|e| format!("invalid problem file: {e}"))?;
    let specs = problem::to_field_specs(&problem)?;
    let (alg, order) = match &problem.order {
        OrderSpec::Keyword(k) if k == "maximal" => {
            let alg = build_algebra(&specs)?;
            let ord = OrderLattice::maximal(&alg);
            (alg, ord)
        }
        OrderSpec::Keyword(k) => {
            return Err(format!("unknown order keyword {k:?} (expected \"maximal\")").into())
        }
        OrderSpec::Generators { generators } => {
            let alg = build_algebra(&specs)?;
            let gens = parse_generators(generators)?;
            let ord = order_from_generators(&alg, &gens)?;
            (alg, ord)
        }
        OrderSpec::Preset { preset, p, copies } => {
            if preset != "fiber-product" {
                return Err(format!("unknown preset {preset:?}").into());
            }
            if !specs.is_empty() {
                return Err("the fiber-product preset fixes its own fields"
                    .to_string()
                    .into());
            }
            fiber_product_order(*p, copies.unwrap_or(2))?
        }
    };
    Ok(analyze(&alg, &order)?)
}

fn verify_and_report(a: &OrderAnalysis, as_json: bool) -> Result<ExitCode, RunError> {
    let r = verify_acnf(a)?;
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report_json(a, &r)?).unwrap()
        );
    } else {
        print_report(a, &r);
    }
    Ok(if r.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn oracle_h(a: &OrderAnalysis, as_json: bool) -> Result<ExitCode, RunError> {
    let alg = &a.algebra;
    if alg.m != 1 || alg.components[0].degree != 2 || alg.r2 != 1 {
        return Err("oracle-h needs a single imaginary quadratic component"
            .to_string()
            .into());
    }
    let h_formula = a.invariants.h.clone();
    let disc = &a.invariants.disc;
    let h_forms = BigInt::from(form_class_number(disc)?);
    let matched = h_formula == h_forms;
    if as_json {
        let doc = json!({
            "disc": disc.to_string(),
            "h_formula": h_formula.to_string(),
            "h_forms": h_forms.to_string(),
            "verdict": if matched { "MATCH" } else { "MISMATCH" },
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!(
            "h(formula)={h_formula}, h(forms)={h_forms}, {}",
            if matched { "MATCH" } else { "MISMATCH" }
        );
    }
    Ok(if matched {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn zeta_command(
    a: &OrderAnalysis,
    s: f64,
    bound: u64,
    as_json: bool,
) -> Result<ExitCode, RunError> {
    let maximal = analyze(&a.algebra, &OrderLattice::maximal(&a.algebra))?;
    let z_order = zeta_partial(a, s, bound)?;
    let z_max = zeta_partial(&maximal, s, bound)?;
    let correction_limit = zeta_correction(a);
    let correction_s = zeta_correction_at(a, s);
    if as_json {
        let doc = json!({
            "s": s,
            "prime_bound": bound,
            "zeta_order_partial": z_order,
            "zeta_maximal_partial": z_max,
            "correction_at_s": correction_s,
            "correction_limit": show_rational(&correction_limit),
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!("partial Euler products over primes <= {bound} at s = {s}");
        println!("  zeta_O(s)      = {z_order}");
        println!("  zeta_Omax(s)   = {z_max}");
        println!("  ratio at s     = {correction_s}");
        println!("  ratio at s->1  = {}", show_rational(&correction_limit));
    }
    Ok(ExitCode::SUCCESS)
}

fn basis_strings(m: &acnf_core::matrix::IntMat) -> Vec<Vec<String>> {
    (0..m.cols())
        .map(|j| m.column(j).iter().map(|x| x.to_string()).collect())
        .collect()
}

fn singular_json(a: &OrderAnalysis) -> Result<Vec<serde_json::Value>, RunError> {
    let mut rows = Vec::new();
    for sp in &a.singular {
        rows.push(json!({
            "p": sp.p,
            "norm": sp.norm.to_string(),
            "norms_above": sp.norms_above.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            "local_quotient": sp.local_quotient.to_string(),
            "local_unit_index": local_unit_index(sp)?.to_string(),
        }));
    }
    Ok(rows)
}

fn invariants_json(a: &OrderAnalysis) -> serde_json::Value {
    let inv = &a.invariants;
    json!({
        "index": inv.index.to_string(),
        "conductor_norm": inv.conductor_norm.to_string(),
        "disc": inv.disc.to_string(),
        "w": inv.w,
        "unit_index": inv.unit_index.to_string(),
        "h": inv.h.to_string(),
        "regulator": inv.regulator,
    })
}

fn signature_json(alg: &EtaleAlgebra) -> serde_json::Value {
    json!({
        "n": alg.n, "r1": alg.r1, "r2": alg.r2, "m": alg.m, "r": alg.r,
        "disc_maximal": alg.disc.to_string(),
        "components": alg.components.iter().map(|c| json!({
            "degree": c.degree,
            "disc": c.disc.to_string(),
            "basis": c.basis_names,
        })).collect::<Vec<_>>(),
    })
}

fn describe_json(a: &OrderAnalysis) -> Result<serde_json::Value, RunError> {
    Ok(json!({
        "algebra": signature_json(&a.algebra),
        "order_basis": basis_strings(&a.order.basis),
        "conductor_basis": basis_strings(&a.conductor.basis),
        "singular_primes": singular_json(a)?,
        "invariants": invariants_json(a),
    }))
}

fn leading_json(t: &acnf_core::invariants::LeadingTerm) -> serde_json::Value {
    json!({
        "rational": show_rational(&t.rational),
        "pi_exponent": t.pi_exponent,
        "regulator_factor": t.regulator_factor,
        "abs_disc": t.abs_disc.to_string(),
        "float_value": t.float_value(),
    })
}

fn report_json(a: &OrderAnalysis, r: &VerificationReport) -> Result<serde_json::Value, RunError> {
    Ok(json!({
        "verdict": if r.pass { "PASS" } else { "FAIL" },
        "lhs": leading_json(&r.lhs),
        "rhs": leading_json(&r.rhs),
        "rational_equal": r.rational_equal,
        "pi_equal": r.pi_equal,
        "disc_equal": r.disc_equal,
        "regulator_rel_diff": r.regulator_rel_diff,
        "float_rel_diff": r.float_rel_diff,
        "algebra": signature_json(&a.algebra),
        "invariants": invariants_json(a),
        "singular_primes": singular_json(a)?,
    }))
}

fn print_describe(a: &OrderAnalysis) -> Result<(), RunError> {
    let alg = &a.algebra;
    let inv = &a.invariants;
    println!(
        "algebra: n={} r1={} r2={} m={} r={}  Disc(max) = {}",
        alg.n, alg.r1, alg.r2, alg.m, alg.r, alg.disc
    );
    for (i, c) in alg.components.iter().enumerate() {
        println!(
            "  component {}: degree {} disc {} basis [{}]",
            i + 1,
            c.degree,
            c.disc,
            c.basis_names.join(", ")
        );
    }
    println!("order basis (columns over the maximal order basis):");
    print!("{}", a.order.basis);
    println!("index = {}", inv.index);
    println!("conductor basis:");
    print!("{}", a.conductor.basis);
    println!("conductor norm = {}", inv.conductor_norm);
    if a.singular.is_empty() {
        println!("singular primes: none");
    } else {
        println!("singular primes:");
        println!("  p | N(frak p) | norms above | local quotient | local unit index");
        for sp in &a.singular {
            let above: Vec<String> = sp.norms_above.iter().map(|n| n.to_string()).collect();
            println!(
                "  {} | {} | [{}] | {} | {}",
                sp.p,
                sp.norm,
                above.join(", "),
                sp.local_quotient,
                local_unit_index(sp)?
            );
        }
    }
    println!(
        "Disc = {}  w = {}  unit index = {}  h = {}  R = {}",
        inv.disc, inv.w, inv.unit_index, inv.h, inv.regulator
    );
    Ok(())
}

fn print_report(a: &OrderAnalysis, r: &VerificationReport) {
    let show = |t: &acnf_core::invariants::LeadingTerm| {
        format!(
            "{} * pi^{} * {} / sqrt({})  =  {}",
            show_rational(&t.rational),
            t.pi_exponent,
            t.regulator_factor,
            t.abs_disc,
            t.float_value()
        )
    };
    println!("analytic class number formula verification");
    println!("  lhs (zeta route): {}", show(&r.lhs));
    println!("  rhs (invariants): {}", show(&r.rhs));
    println!(
        "  rational equal: {}  pi equal: {}  disc equal: {}  regulator rel diff: {:.3e}",
        r.rational_equal, r.pi_equal, r.disc_equal, r.regulator_rel_diff
    );
    let inv = &a.invariants;
    println!(
        "  index = {}  h = {}  w = {}  unit index = {}  R = {}",
        inv.index, inv.h, inv.w, inv.unit_index, inv.regulator
    );
    println!("verdict: {}", if r.pass { "PASS" } else { "FAIL" });
}
