use clap::{Parser, Subcommand};
use schurq::identities::{check_family, Identity};
use schurq::poly::format_rational;
use schurq::schur_q::q_poly;
use schurq::special::{a_const, hook_eval};
use schurq::tau::{
    build_tau_kw, build_tau_mm, compare_tau, contributing_partitions, diagonal_form_check, eta,
    extract_correlator, hypergeometric_check, theta, CChoice,
};
use schurq::virasoro::{bracket_check, constraint_residual, VirasoroIndex};
use schurq::Error;
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "schurq",
    version,
    about = "Exact checks for Schur Q-polynomials and the KW tau-function"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write JSON here instead of standard output.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Q_v as a polynomial in the odd times.
    Qpoly {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_ints)]
        partition: Ints,
    },
    /// Q_v at t_k = delta_{k,1}.
    Eval {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_ints)]
        partition: Ints,
    },
    /// Q_v at t_k = delta_{k,3}/3.
    Avalue {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_ints)]
        partition: Ints,
    },
    /// The Q-expansion formula up to the given degree.
    TauMm {
        #[arg(long)]
        degree: u32,
    },
    /// The series solved from the Virasoro constraints.
    TauKw {
        #[arg(long)]
        degree: u32,
    },
    /// Differences between the two constructions.
    Compare {
        #[arg(long)]
        degree: u32,
    },
    /// An intersection number read off the solved series.
    Correlator {
        #[arg(long, value_parser = parse_naturals)]
        ks: Naturals,
        /// Truncation degree; the smallest sufficient one by default.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Constraint residuals of the Q-expansion formula; every m in -1..=3 and
    /// the bracket relations when --m is absent.
    VirasoroCheck {
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[arg(long, default_value_t = 12)]
        degree: u32,
    },
    /// Residuals of an identity family, or of all families.
    IdentityCheck {
        #[arg(long, default_value = "all")]
        identity: String,
        /// Largest part of enumerated inputs.
        #[arg(long, default_value_t = 12)]
        max_weight: i64,
        #[arg(long, default_value_t = 5)]
        max_length: usize,
        /// Randomized inputs per family.
        #[arg(long, default_value_t = 200)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// theta = eta for both choices of (c1, c2) and the diagonal form.
    HyperCheck {
        #[arg(long, default_value_t = 12)]
        max_weight: u32,
    },
}

#[derive(Clone)]
struct Ints(Vec<i64>);

#[derive(Clone)]
struct Naturals(Vec<u32>);

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_ints(s: &str) -> Result<Ints, String> {
    parse_list(s).map(Ints)
}

fn parse_naturals(s: &str) -> Result<Naturals, String> {
    parse_list(s).map(Naturals)
}

/// The JSON document and whether every check passed.
fn run(command: Command) -> Result<(Value, bool), Error> {
    Ok(match command {
        Command::Qpoly {
            partition: Ints(partition),
        } => (
            json!({ "partition": partition, "poly": json!(&q_poly(&partition)?) }),
            true,
        ),
        Command::Eval {
            partition: Ints(partition),
        } => (
            json!({ "value": format_rational(&hook_eval(&partition)?) }),
            true,
        ),
        Command::Avalue {
            partition: Ints(partition),
        } => (
            json!({ "value": format_rational(&a_const(&partition)?) }),
            true,
        ),
        Command::TauMm { degree } => (json!(&build_tau_mm(degree)), true),
        Command::TauKw { degree } => (json!(&build_tau_kw(degree)?), true),
        Command::Compare { degree } => {
            let diff = compare_tau(&build_tau_mm(degree), &build_tau_kw(degree)?, degree)?;
            let pass = diff.is_empty();
            (
                json!({ "degree": degree, "differences": json!(&diff) }),
                pass,
            )
        }
        Command::Correlator {
            ks: Naturals(ks),
            degree,
        } => {
            let n = ks.len() as i64;
            let total: i64 = ks.iter().map(|&k| k as i64).sum();
            let needed = (2 * (total - n + 3) / 3 - 2 + n).max(0) as u32 * 3;
            let tau = build_tau_kw(degree.unwrap_or(needed))?;
            (json!(&extract_correlator(&tau, &ks)?), true)
        }
        Command::VirasoroCheck { m, degree } => virasoro_check(m, degree)?,
        Command::IdentityCheck {
            identity,
            max_weight,
            max_length,
            random,
            seed,
        } => {
            let families: Vec<Identity> = if identity == "all" {
                Identity::ALL.to_vec()
            } else {
                vec![identity.parse()?]
            };
            let reports: Vec<_> = families
                .into_iter()
                .flat_map(|id| check_family(id, max_weight, max_length, random, seed))
                .collect();
            let pass = reports.iter().all(|r| r.pass);
            (json!(&reports), pass)
        }
        Command::HyperCheck { max_weight } => hyper_check(max_weight)?,
    })
}

fn virasoro_check(m: Option<i64>, degree: u32) -> Result<(Value, bool), Error> {
    let tau = build_tau_mm(degree);
    let ms: Vec<i64> = match m {
        Some(m) => vec![m],
        None => (-1..=3).collect(),
    };
    let mut pass = true;
    let mut constraints = Vec::new();
    for m in ms {
        let r = constraint_residual(VirasoroIndex::new(m)?, &tau.series);
        pass &= r.is_zero();
        let slices: Vec<Value> = r
            .reliable_hbar_orders
            .iter()
            .map(|a| json!({ "hbar_order": a, "residual_terms": r.residual_slices.get(a).map_or(0, |p| p.len()) }))
            .collect();
        constraints.push(json!({ "m": m, "pass": r.is_zero(), "slices": slices }));
    }
    let mut out = json!({ "degree": degree, "constraints": constraints });
    if m.is_none() {
        let mut brackets = Vec::new();
        for k in -1..=2 {
            for j in -1..=2 {
                let res =
                    bracket_check(VirasoroIndex::new(k)?, VirasoroIndex::new(j)?, &tau.series)?;
                let terms: usize = res.slices().map(|(_, p)| p.len()).sum();
                pass &= terms == 0;
                brackets.push(json!({ "k": k, "m": j, "residual_terms": terms }));
            }
        }
        out["brackets"] = Value::Array(brackets);
    }
    out["pass"] = Value::Bool(pass);
    Ok((out, pass))
}

fn hyper_check(max_weight: u32) -> Result<(Value, bool), Error> {
    let choices = [
        ("unit", CChoice::unit()),
        ("cube_root", CChoice::cube_root()),
    ];
    let mut pass = true;
    let mut entries = Vec::new();
    for sp in contributing_partitions(max_weight) {
        let mut residuals = serde_json::Map::new();
        let mut etas = serde_json::Map::new();
        for (name, choice) in &choices {
            let r = hypergeometric_check(&sp, choice)?;
            pass &= r.is_zero();
            residuals.insert(name.to_string(), json!(&r));
            etas.insert(name.to_string(), json!(&eta(&sp, choice)));
        }
        entries.push(json!({
            "partition": json!(&sp),
            "theta": json!(&theta(&sp)?),
            "eta": etas,
            "residual": residuals,
        }));
    }
    let diagonal = diagonal_form_check(&build_tau_mm(max_weight));
    pass &= diagonal.iter().all(|e| e.expected == e.actual);
    Ok((
        json!({ "entries": entries, "diagonal": json!(&diagonal), "pass": pass }),
        pass,
    ))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (doc, pass) = match run(cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if pass { 0 } else { 1 })
}
