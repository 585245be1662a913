//! Command-line front end.
//!
//! [`run`] parses arguments, computes, and returns the exit code with the
//! text to print, so the binary is a thin wrapper and tests call it
//! directly. Exit codes: 0 success, 1 other errors, 2 root set not
//! self-opposite, 3 input not transverse.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::components::{
    classify_matrix, classify_point, count_components, is_positive_label, ComponentLabel,
};
use crate::error::{Error, Result};
use crate::flag::{require_self_opposite, ThetaSet};
use crate::involution::{component_involution, theorem_table, InvolutionRow, TableRow, Theorem};
use crate::io::Input;
use crate::oracle::{estimate_components, label_conflicts, OracleConfig};
use crate::quadratic::Signature;
use crate::sign_matrix::SignMatrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_SELF_OPPOSITE: i32 = 2;
pub const EXIT_NOT_TRANSVERSE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sopq", version, about = "Components of transverse flag triples in SO(p,q)")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct RootSetArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
    /// Comma-separated roots, `qp` for the second maximal root.
    #[arg(long)]
    theta: String,
}

impl RootSetArgs {
    fn theta(&self) -> Result<ThetaSet> {
        ThetaSet::parse(Signature::new(self.p, self.q)?, &self.theta)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of components and of positive ones.
    Count {
        #[command(flatten)]
        set: RootSetArgs,
        /// Also report the regime, provenance and every label.
        #[arg(long)]
        labels: bool,
    },
    /// Component label of a chart point or matrix.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Positivity of a chart point, a matrix, or a sign matrix in text.
    Positivity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Action of the involution on components.
    Involution {
        #[command(flatten)]
        set: RootSetArgs,
    },
    /// Computed rows of a theorem table next to the stated counts.
    Tables {
        #[arg(long)]
        theorem: String,
    },
    /// Monte Carlo estimate of the component count.
    Oracle {
        #[command(flatten)]
        set: RootSetArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 60)]
        budget: usize,
        /// Include the certified polylines.
        #[arg(long)]
        witnesses: bool,
    },
}

/// Exit code and output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotSelfOpposite { .. } => EXIT_NOT_SELF_OPPOSITE,
        Error::NotTransverse(_) => EXIT_NOT_TRANSVERSE,
        _ => EXIT_ERROR,
    }
}

/// Runs the command line `argv` (program name first).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(stdout) => Outcome::ok(stdout),
        Err(e) => {
            let stdout = match (&e, cli.format) {
                (Error::NotTransverse(levels), Format::Json) => {
                    line(&json!({"error": "not_transverse", "levels": levels}))
                }
                _ => String::new(),
            };
            Outcome { code: exit_code(&e), stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn classify_input(input: &Input) -> Result<ComponentLabel> {
    match input {
        Input::Coords(c) => {
            let c = c.to_coords()?;
            require_self_opposite(&c.chart.theta)?;
            classify_point(&c)
        }
        Input::Matrix(m) => {
            let (theta, u) = m.to_matrix()?;
            require_self_opposite(&theta)?;
            classify_matrix(&theta, &u)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<String> {
    let f = cli.format;
    match &cli.command {
        Command::Count { set, labels } => {
            let theta = set.theta()?;
            require_self_opposite(&theta)?;
            let c = count_components(&theta)?;
            Ok(match f {
                Format::Json if *labels => line(&c),
                Format::Json => line(&json!({"count": c.count, "positive": c.positive})),
                Format::Csv => format!(
                    "p,q,theta,count,positive\n{},{},\"{}\",{},{}\n",
                    set.p,
                    set.q,
                    theta.tokens().join(","),
                    c.count,
                    opt(&c.positive)
                ),
                Format::Text => {
                    let mut s = format!("count {}\npositive {}\n", c.count, opt(&c.positive));
                    if *labels {
                        let _ = writeln!(s, "regime {}", c.regime);
                        for l in &c.labels {
                            let _ = writeln!(s, "{l}");
                        }
                    }
                    s
                }
            })
        }
        Command::Classify { input } => {
            let label = classify_input(&Input::parse(&read(input)?)?)?;
            Ok(match f {
                Format::Json => line(&json!({"label": label, "name": label.to_string()})),
                Format::Csv => format!("label\n\"{label}\"\n"),
                Format::Text => format!("{label}\n"),
            })
        }
        Command::Positivity { input } => {
            let text = read(input)?;
            let (name, positive) = if text.trim_start().starts_with('{') {
                let label = classify_input(&Input::parse(&text)?)?;
                (label.to_string(), is_positive_label(&label))
            } else {
                let m = SignMatrix::parse(&text)?;
                (m.to_string(), Some(m.is_theta_positive()))
            };
            Ok(match f {
                Format::Json => line(&json!({"name": name, "positive": positive})),
                Format::Csv => format!("name,positive\n\"{name}\",{}\n", opt(&positive)),
                Format::Text => format!(
                    "{name}: {}\n",
                    match positive {
                        Some(true) => "positive",
                        Some(false) => "not positive",
                        None => "no positivity notion for this root set",
                    }
                ),
            })
        }
        Command::Involution { set } => {
            let map = component_involution(&set.theta()?)?;
            Ok(involution_output(&map.rows, f))
        }
        Command::Tables { theorem } => {
            let rows = theorem_table(theorem.parse::<Theorem>()?)?;
            Ok(table_output(&rows, f))
        }
        Command::Oracle { set, samples, seed, budget, witnesses } => {
            let theta = set.theta()?;
            let cfg = OracleConfig { samples: *samples, seed: *seed, budget: *budget, ..OracleConfig::default() };
            let est = estimate_components(&theta, &cfg)?;
            let exact = count_components(&theta)?.count;
            let conflicts = label_conflicts(&est).map(|c| c.len()).ok();
            Ok(match f {
                Format::Json => {
                    let mut v = json!({
                        "count": est.count,
                        "exact": exact,
                        "samples": est.samples.len(),
                        "hit_rate": est.hit_rate,
                        "joins": est.witnesses.len(),
                        "conflicts": conflicts,
                    });
                    if *witnesses {
                        v["witnesses"] = serde_json::to_value(&est.witnesses).expect("serializable");
                    }
                    line(&v)
                }
                Format::Csv => format!(
                    "p,q,theta,count,exact,conflicts\n{},{},\"{}\",{},{},{}\n",
                    set.p,
                    set.q,
                    theta.tokens().join(","),
                    est.count,
                    exact,
                    opt(&conflicts)
                ),
                Format::Text => format!(
                    "estimate {} (exact {exact}) from {} samples, {} joins, conflicts {}\n",
                    est.count,
                    est.samples.len(),
                    est.witnesses.len(),
                    opt(&conflicts)
                ),
            })
        }
    }
}

fn involution_output(rows: &[InvolutionRow], f: Format) -> String {
    match f {
        Format::Json => line(&rows),
        Format::Csv => {
            let mut s = String::from("label,image,fixed\n");
            for r in rows {
                let _ = writeln!(s, "\"{}\",\"{}\",{}", r.label, r.image, r.fixed);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in rows {
                let _ = writeln!(s, "{} -> {}{}", r.label, r.image, if r.fixed { " (fixed)" } else { "" });
            }
            s
        }
    }
}

fn table_output(rows: &[TableRow], f: Format) -> String {
    match f {
        Format::Json => line(&rows),
        Format::Csv => {
            let mut s = String::from("p,q,theta,count,positive,stable,swapped,unknown\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},\"{}\",{},{},{},{},{}",
                    r.p,
                    r.q,
                    r.theta,
                    r.count,
                    opt(&r.positive),
                    opt(&r.stable),
                    opt(&r.swapped),
                    r.unknown
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:>2} {:>2} {:<10} {:>5} {:>8} {:>6} {:>7} {:>7}  stated\n",
                "p", "q", "theta", "count", "positive", "stable", "swapped", "unknown"
            );
            for r in rows {
                let stated = match r.expected.stable {
                    Some(st) => format!("{} / {st} stable", r.expected.count),
                    None => r.expected.count.to_string(),
                };
                let _ = writeln!(
                    s,
                    "{:>2} {:>2} {:<10} {:>5} {:>8} {:>6} {:>7} {:>7}  {stated}{}",
                    r.p,
                    r.q,
                    r.theta,
                    r.count,
                    opt(&r.positive),
                    opt(&r.stable),
                    opt(&r.swapped),
                    r.unknown,
                    if r.matches() { "" } else { "  (differs)" }
                );
            }
            s
        }
    }
}
