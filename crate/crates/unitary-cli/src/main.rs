//! Command-line driver: parse a group spec or family descriptor, run the
//! requested order computations, and emit JSON lines or plain tables.

use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use unitary_core::formulas::{self, enumerate_cases};
use unitary_core::gf2k::Field;
use unitary_core::group::builders::{
    build, build_family, dihedral_like, flatten, parse_case, parse_spec, FamilyDescriptor,
    FamilyTheorem,
};
use unitary_core::group::iso::{fingerprint, is_isomorphic};
use unitary_core::group::rewrite::{verify_rewrite_lemma, RewriteLemma};
use unitary_core::report::{group_report, render_table, vstar_report, MethodChoice, Report};
use unitary_core::unitary::{count_vstar_bruteforce, ThetaMethod};

#[derive(Parser)]
#[command(name = "unitary", version, about = "Orders of unitary subgroups of 2-group algebras")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Structure report for one group spec: order, center, derived, omega.
    Group { spec: String },
    /// Compute |V_*(FG)| by the chosen methods and compare the results.
    Vstar {
        spec: String,
        /// Field size q, a power of two up to 256.
        #[arg(long, default_value_t = 2)]
        field: u16,
        /// brute, recursion, formula, or all.
        #[arg(long, default_value = "all")]
        method: String,
        /// Candidate budget for the brute-force enumeration.
        #[arg(long)]
        budget: Option<u64>,
        /// Theta source for the recursion: exhaustive, sampled, or lemma.
        #[arg(long, default_value = "lemma")]
        theta: String,
    },
    /// Emit and build one classification family instance.
    Classify {
        /// Theorem label: ST1, ST2, ST3, ST4, ST5, ST6, or ST7.
        #[arg(long)]
        theorem: String,
        /// Case label: a roman numeral (i)-(x) or a digit 1-10.
        #[arg(long)]
        case: String,
        /// Comma-separated parameters, e.g. n=2,m=1,k=1,r=2.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Run a named verification suite.
    Verify {
        /// small, grid, or lemmas.
        #[arg(long, default_value = "small")]
        suite: String,
    },
}

fn field_k_of(q: u16) -> Result<u8> {
    if q.is_power_of_two() && (2..=256).contains(&q) {
        Ok(q.trailing_zeros() as u8)
    } else {
        Err(anyhow!("--field must be a power of two between 2 and 256, got {q}"))
    }
}

fn theta_of(name: &str) -> Result<ThetaMethod> {
    match name {
        "exhaustive" => Ok(ThetaMethod::Exhaustive),
        "sampled" => Ok(ThetaMethod::Sampled),
        "lemma" => Ok(ThetaMethod::Lemma),
        other => Err(anyhow!("unknown theta method {other:?}")),
    }
}

fn parse_params(text: &str) -> Result<(u32, u32, u32, u32)> {
    let (mut n, mut m, mut k, mut r) = (1u32, 1u32, 1u32, 2u32);
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("parameter {part:?} is not of the form key=value"))?;
        let value: u32 = value.trim().parse().context("parameter value")?;
        match key.trim() {
            "n" => n = value,
            "m" => m = value,
            "k" => k = value,
            "r" => r = value,
            other => return Err(anyhow!("unknown parameter {other:?}")),
        }
    }
    Ok((n, m, k, r))
}

fn emit_report(report: &Report, format: Format) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string(report)?),
        Format::Table => print!("{}", render_table(report)),
    }
    Ok(())
}

fn run_vstar(
    spec: &str,
    field: u16,
    method: &str,
    budget: Option<u64>,
    theta: &str,
    format: Format,
) -> Result<u8> {
    let field_k = field_k_of(field)?;
    let choice: MethodChoice = method.parse()?;
    let theta_method = theta_of(theta)?;
    let report = vstar_report(spec, field_k, choice, budget, theta_method)?;
    emit_report(&report, format)?;
    Ok(if report.agreement == Some(false) { 1 } else { 0 })
}

fn run_classify(theorem: &str, case: &str, params: &str, format: Format) -> Result<()> {
    let theorem: FamilyTheorem = theorem.parse()?;
    let case = parse_case(case)?;
    let (n, m, k, r) = parse_params(params)?;
    let desc = FamilyDescriptor { theorem, case, n, m, k, r };
    let spec = build_family(&desc)?;
    let group = build(&spec)?;
    let print = fingerprint(&group);
    match format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "theorem": theorem.to_string(),
                "case": case,
                "n": n, "m": m, "k": k, "r": r,
                "spec": spec.to_string(),
                "order": group.order(),
                "fingerprint": print,
            })
        ),
        Format::Table => {
            println!("{theorem}({case}) n={n} m={m} k={k} r={r}");
            println!("  spec:  {spec}");
            println!("  order: {}", group.order());
            println!(
                "  fingerprint: exponent {}, center {}, derived {}, generators {}",
                print.exponent, print.center_order, print.derived_order, print.min_generators
            );
        }
    }
    Ok(())
}

struct Suite {
    format: Format,
    failures: u32,
}

impl Suite {
    fn record(&mut self, name: &str, outcome: Result<bool>) {
        let (ok, note) = match outcome {
            Ok(true) => (true, String::new()),
            Ok(false) => (false, "mismatch".into()),
            Err(e) => (false, e.to_string()),
        };
        if !ok {
            self.failures += 1;
        }
        match self.format {
            Format::Json => println!(
                "{}",
                serde_json::json!({ "check": name, "ok": ok, "note": note })
            ),
            Format::Table => {
                if ok {
                    println!("  {name}: ok");
                } else {
                    println!("  {name}: FAIL {note}");
                }
            }
        }
    }
}

fn suite_small(suite: &mut Suite) {
    let f = Field::new(1).unwrap();
    for (name, quaternion, n, want) in [
        ("D8", false, 2u32, 64u128),
        ("Q8", true, 2, 64),
        ("D16", false, 3, 4096),
        ("Q16", true, 3, 1024),
    ] {
        suite.record(
            &format!("brute {name} = {want}"),
            dihedral_like(quaternion, n)
                .and_then(|g| count_vstar_bruteforce(&g, &f, None))
                .map(|c| c == want)
                .map_err(Into::into),
        );
    }
    for (spec, want) in
        [("Z4", 8u128), ("Z2 x Z4", 64), ("M2(2,2)", 2048), ("D8 x Z2", 8192)]
    {
        suite.record(
            &format!("brute {spec} = {want}"),
            parse_spec(spec)
                .and_then(|s| build(&s))
                .and_then(|g| count_vstar_bruteforce(&g, &f, None))
                .map(|c| c == want)
                .map_err(Into::into),
        );
    }
    for spec in ["D8", "Q8", "M2(2,2)", "M2(2,1,1)", "Z4 x Z4"] {
        suite.record(
            &format!("methods agree on {spec}"),
            vstar_report(spec, 1, MethodChoice::All, None, ThetaMethod::Lemma)
                .map(|r| r.agreement != Some(false))
                .map_err(Into::into),
        );
    }
}

fn suite_grid(suite: &mut Suite) {
    for field_k in [1u8, 2] {
        let mut closed_ok = true;
        let mut divisible = true;
        for case in enumerate_cases(3, 3) {
            let flat = match flatten(&case.to_spec()) {
                Ok(flat) => flat,
                Err(_) => {
                    closed_ok = false;
                    continue;
                }
            };
            match (
                formulas::vstar_closed(&case, field_k),
                formulas::vstar_recursion_symbolic(&flat, field_k),
            ) {
                (Ok(a), Ok(b)) => closed_ok &= a == b,
                _ => closed_ok = false,
            }
            divisible &= formulas::conjecture_divisibility(&case, field_k).unwrap_or(false);
        }
        suite.record(
            &format!("closed form = symbolic recursion over GF(2^{field_k})"),
            Ok(closed_ok),
        );
        suite.record(&format!("divisibility over GF(2^{field_k})"), Ok(divisible));
    }
    let mut omegas = true;
    for case in enumerate_cases(3, 3) {
        if case.group_log2() > 8 {
            continue;
        }
        match build(&case.to_spec()) {
            Ok(g) => {
                let counts = g.omega_sets();
                omegas &=
                    (counts.count1() as u128, counts.count_c() as u128) == case.omega_closed();
            }
            Err(_) => omegas = false,
        }
    }
    suite.record("omega tables = enumeration up to order 256", Ok(omegas));
}

fn suite_lemmas(suite: &mut Suite) {
    for lemma in [
        RewriteLemma::Cpc1,
        RewriteLemma::Cpc2,
        RewriteLemma::Cpc3,
        RewriteLemma::Cpc4,
        RewriteLemma::Cpc7,
        RewriteLemma::Ggc1,
        RewriteLemma::Ggc2,
    ] {
        let tuples: [(u32, u32); 2] =
            if lemma == RewriteLemma::Ggc2 { [(2, 1), (3, 1)] } else { [(1, 1), (2, 1)] };
        for (n, m) in tuples {
            suite.record(
                &format!("{lemma} at ({n},{m})"),
                verify_rewrite_lemma(lemma, n, m).map(|cases| !cases.is_empty()).map_err(Into::into),
            );
        }
    }
    suite.record(
        "Q8 . Q8 = D8 . D8",
        parse_spec("Q8 . Q8")
            .and_then(|s| build(&s))
            .and_then(|a| Ok((a, build(&parse_spec("D8 . D8")?)?)))
            .and_then(|(a, b)| is_isomorphic(&a, &b))
            .map_err(Into::into),
    );
}

fn run_verify(name: &str, format: Format) -> Result<u8> {
    let mut suite = Suite { format, failures: 0 };
    match name {
        "small" => suite_small(&mut suite),
        "grid" => suite_grid(&mut suite),
        "lemmas" => suite_lemmas(&mut suite),
        other => return Err(anyhow!("unknown suite {other:?}; expected small, grid, or lemmas")),
    }
    if format == Format::Table {
        if suite.failures == 0 {
            println!("suite {name}: all checks passed");
        } else {
            println!("suite {name}: {} check(s) failed", suite.failures);
        }
    }
    Ok(if suite.failures == 0 { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Group { spec } => {
            let report = group_report(&spec)?;
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string(&report)?),
                Format::Table => {
                    println!("spec:    {}", report.spec);
                    println!("order:   {}", report.order);
                    println!("abelian: {}", report.abelian);
                    println!("center:  {}", report.center_order);
                    println!("derived: {}", report.derived_order);
                    println!("omega:   ({}, {})", report.omega1, report.omega_c);
                    println!(
                        "fingerprint: exponent {}, generators {}, squaring image {}",
                        report.fingerprint.exponent,
                        report.fingerprint.min_generators,
                        report.fingerprint.squaring_image_size
                    );
                }
            }
            Ok(0)
        }
        Command::Vstar { spec, field, method, budget, theta } => {
            run_vstar(&spec, field, &method, budget, &theta, cli.format)
        }
        Command::Classify { theorem, case, params } => {
            run_classify(&theorem, &case, &params, cli.format)?;
            Ok(0)
        }
        Command::Verify { suite } => run_verify(&suite, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
