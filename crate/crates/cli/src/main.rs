mod corpus;
mod decide;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ordcheck::derivation;
use ordcheck::groups::GroupSelector;

use decide::{CliError, Method, Variety};

#[derive(Parser, Debug)]
#[command(name = "ordcheck", version, about = "Decide l-group equations and order extension in free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide an inequation `s <= t` or equation `s = t`.
    Decide {
        statement: String,
        #[command(flatten)]
        opts: DecideArgs,
    },
    /// Decide whether a word set `{w1, w2, ...}` extends to a right order.
    ExtendRight {
        set: String,
        #[arg(long)]
        group: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Find a word splitting an extendable set into two extendable sets.
    Bifurcate {
        set: String,
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Certificate utilities.
    Certificate {
        #[command(subcommand)]
        action: CertificateCommand,
    },
    /// Run a `variety;statement;expected[;group]` regression file.
    Corpus { path: PathBuf },
    /// Print the meet-of-joins normal form of a statement.
    Normalize {
        statement: String,
        /// Largest normal form (in words) before giving up.
        #[arg(long, default_value_t = decide::MAX_TERMS)]
        max_terms: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum CertificateCommand {
    /// Re-verify a certificate document, or every tree in a `decide` output
    /// (`-` reads standard input).
    Check { path: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// JSON output (the default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Human-readable output.
    #[arg(long)]
    text: bool,
}

#[derive(Args, Debug, Clone)]
struct DecideArgs {
    #[arg(long, value_enum, default_value = "lg")]
    variety: Variety,
    /// `free:K`, `zn:K` or `klein`.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    budget_ms: Option<u64>,
    /// Largest normal form (in words) before giving up.
    #[arg(long, default_value_t = decide::MAX_TERMS)]
    max_terms: usize,
    /// Exit with status 3 when the verdict is unknown.
    #[arg(long)]
    strict: bool,
    /// Include wall-clock time in the statistics.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            print_out(&json!({ "error": e.to_string() }).to_string());
            ExitCode::from(e.exit_code())
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn print_out(s: &str) {
    let _ = writeln!(std::io::stdout(), "{s}");
}

fn emit(text_mode: bool, value: &Value, text: &str) {
    if text_mode {
        print_out(text);
    } else {
        print_out(&serde_json::to_string_pretty(value).expect("serializable"));
    }
}

fn selector(group: Option<&str>) -> Result<Option<GroupSelector>, CliError> {
    group
        .map(|g| g.parse::<GroupSelector>().map_err(|e| CliError::Combination(e.to_string())))
        .transpose()
}

fn run(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Decide { statement, opts } => {
            let req = decide::Request {
                variety: opts.variety,
                group: selector(opts.group.as_deref())?,
                method: opts.method,
                max_depth: opts.max_depth,
                radius: opts.radius,
                budget_ms: opts.budget_ms,
                max_terms: opts.max_terms,
                timing: opts.timing,
            };
            let out = decide::decide(&req, &statement)?;
            emit(opts.out.text, &out.json, &out.text);
            Ok(if opts.strict && out.label == "unknown" { 3 } else { 0 })
        }
        Command::ExtendRight { set, group, method, out } => {
            let res = decide::extend_right(selector(group.as_deref())?, method, &set)?;
            emit(out.text, &res.json, &res.text);
            Ok(0)
        }
        Command::Bifurcate {
            set,
            group,
            max_len,
            out,
        } => {
            let res = decide::bifurcate(selector(group.as_deref())?, max_len, &set)?;
            emit(out.text, &res.json, &res.text);
            Ok(0)
        }
        Command::Certificate {
            action: CertificateCommand::Check { path },
        } => check_certificate(&path),
        Command::Corpus { path } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
            let report = corpus::run_corpus(&text);
            print_out(report.render().trim_end());
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Normalize {
            statement,
            max_terms,
            out,
        } => {
            let res = decide::normalize(&statement, max_terms)?;
            emit(out.text, &res.json, &res.text);
            Ok(0)
        }
    }
}

/// Every certificate document inside `v`: `v` itself if it has a `rule`,
/// otherwise all `tree` fields found recursively.
fn collect_trees<'a>(v: &'a Value, out: &mut Vec<&'a Value>) {
    if v.get("rule").is_some() && v.get("system").is_some() {
        out.push(v);
        return;
    }
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if k == "tree" {
                    out.push(x);
                } else {
                    collect_trees(x, out);
                }
            }
        }
        Value::Array(xs) => xs.iter().for_each(|x| collect_trees(x, out)),
        _ => {}
    }
}

fn check_certificate(path: &PathBuf) -> Result<u8, CliError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Other(e.to_string()))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    }
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
    let mut trees = Vec::new();
    collect_trees(&v, &mut trees);
    if trees.is_empty() {
        return Err(CliError::Parse("no certificate tree found".into()));
    }
    let mut results = Vec::new();
    let mut all_ok = true;
    for t in trees {
        match derivation::check_json(t) {
            Ok((sys, nodes)) => results.push(json!({ "accepted": true, "system": sys.tag(), "nodes": nodes })),
            Err(e) => {
                all_ok = false;
                results.push(json!({ "accepted": false, "reason": e.to_string() }));
            }
        }
    }
    let out = json!({ "accepted": all_ok, "certificates": results });
    print_out(&serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(if all_ok { 0 } else { 1 })
}
