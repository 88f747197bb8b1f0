//! `lefkit`: command-line front end to the factorization workbench.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lefkit::catalog::{self, Catalog};
use lefkit::expected;
use lefkit::hurwitz::verify_boundary_multitwist;
use lefkit::invariants::report;
use lefkit::relator::{named_relator, substitute, Side};
use lefkit::script::Script;
use lefkit::spin::spin_of;
use lefkit::template::Env;
use lefkit::word::Factorization;
use lefkit::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "lefkit", version, about = "Verify and transform positive Dehn twist factorizations")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Bound on curve rewriting when certifying letters.
    #[arg(long, global = true)]
    depth: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Clone, Default)]
struct Select {
    /// Catalog family (see `lefkit catalog`).
    #[arg(long)]
    family: Option<String>,
    /// Genus; a value or a range such as 3..5.
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    i: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    j: Option<String>,
    /// Factorization JSON (or a script JSON for `replay`).
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// List families and scripts; `catalog export` writes a family member as JSON.
    Catalog {
        action: Option<String>,
        #[command(flatten)]
        sel: Select,
    },
    /// Build a family member and print its factorization JSON.
    Build {
        #[command(flatten)]
        sel: Select,
    },
    /// Check the homology action of the word against its target.
    Verify {
        #[command(flatten)]
        sel: Select,
    },
    /// Euler characteristic, signature, H1, b±, spin, Kodaira dimension.
    Invariants {
        #[command(flatten)]
        sel: Select,
    },
    /// Decide whether the total space is spin.
    Spin {
        #[command(flatten)]
        sel: Select,
    },
    /// Substitute one side of a named relator for the other.
    Substitute {
        #[command(flatten)]
        sel: Select,
        #[arg(long)]
        relator: String,
        #[arg(long)]
        at: usize,
        #[arg(long, default_value = "forward")]
        side: String,
    },
    /// Replay a derivation script.
    Replay {
        #[command(flatten)]
        sel: Select,
        /// Name of a shipped script.
        #[arg(long)]
        script: Option<String>,
    },
    /// Compare computed invariants with the expected-values table.
    Check {
        #[command(flatten)]
        sel: Select,
    },
}

/// Exit status with the payload to print.
enum Outcome {
    Ok(Value),
    Failed(Value),
}

enum Fail {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Unknown { .. } | Error::Range(_) | Error::Parse(_) => Fail::Usage(e.to_string()),
            e => Fail::Runtime(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail::Usage(msg.into())
}

impl Select {
    fn given(&self) -> Vec<(String, String)> {
        [("g", &self.g), ("i", &self.i), ("j", &self.j), ("k", &self.k)]
            .into_iter()
            .filter_map(|(n, v)| v.as_ref().map(|v| (n.to_string(), v.clone())))
            .collect()
    }

    fn tuples(&self) -> Result<Vec<Env>, Fail> {
        Ok(expected::tuples(&self.given())?)
    }

    fn family(&self) -> Result<&str, Fail> {
        self.family.as_deref().ok_or_else(|| usage("--family or --input is required"))
    }

    /// Factorizations named by the flags, with the parameters that built them.
    fn factorizations(&self) -> Result<Vec<(Env, Factorization)>, Fail> {
        if let Some(path) = &self.input {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            return Ok(vec![(Env::new(), Factorization::from_json(&v)?)]);
        }
        let family = self.family()?;
        let mut out = Vec::new();
        for p in self.tuples()? {
            let f = catalog::build(family, &p)?;
            out.push((p, f));
        }
        Ok(out)
    }
}

/// One object for a single tuple, otherwise a list tagged with parameters.
fn collect(items: Vec<(Env, Value)>) -> Value {
    if items.len() == 1 {
        return items.into_iter().next().map(|(_, v)| v).unwrap_or_default();
    }
    Value::Array(
        items
            .into_iter()
            .map(|(p, mut v)| {
                if let Value::Object(m) = &mut v {
                    m.insert("params".into(), json!(p));
                }
                v
            })
            .collect(),
    )
}

fn run(cli: &Cli) -> Result<Outcome, Fail> {
    match &cli.verb {
        Verb::Catalog { action: None, .. } => Ok(Outcome::Ok(json!({
            "families": catalog::FAMILIES,
            "scripts": catalog::script_names(),
            "expected_values": expected::families(),
        }))),
        Verb::Catalog { action: Some(a), sel } if a == "export" => build(sel),
        Verb::Catalog { action: Some(a), .. } => Err(usage(format!("unknown catalog action {a}"))),
        Verb::Build { sel } => build(sel),
        Verb::Verify { sel } => {
            let mut all = true;
            let mut items = Vec::new();
            for (p, f) in sel.factorizations()? {
                let r = verify_boundary_multitwist(&f)?;
                all &= r.pass;
                items.push((p, json!(r)));
            }
            Ok(if all { Outcome::Ok(collect(items)) } else { Outcome::Failed(collect(items)) })
        }
        Verb::Invariants { sel } => {
            let mut items = Vec::new();
            for (p, f) in sel.factorizations()? {
                items.push((p, json!(report(&f)?)));
            }
            Ok(Outcome::Ok(collect(items)))
        }
        Verb::Spin { sel } => {
            let mut items = Vec::new();
            for (p, f) in sel.factorizations()? {
                items.push((p, json!({ "spin": spin_of(&f)?.spin })));
            }
            Ok(Outcome::Ok(collect(items)))
        }
        Verb::Substitute { sel, relator, at, side } => {
            let side = match side.as_str() {
                "forward" => Side::Forward,
                "backward" => Side::Backward,
                s => return Err(usage(format!("side must be forward or backward, not {s}"))),
            };
            let mut items = Vec::new();
            for (p, f) in sel.factorizations()? {
                let r = named_relator(&f.atlas, relator)?;
                match substitute(&f, &r, *at, side) {
                    Ok((out, log)) => items.push((p, json!({ "factorization": out.to_json(), "log": log }))),
                    Err(e @ (Error::SubwordMismatch { .. } | Error::IndexOutOfRange { .. })) => {
                        return Ok(Outcome::Failed(json!({ "error": e.to_string(), "params": p })));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(Outcome::Ok(collect(items)))
        }
        Verb::Replay { sel, script } => {
            let s = match (script, &sel.input) {
                (Some(name), None) => catalog::script(name)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    Script::from_json(&text)?
                }
                _ => return Err(usage("replay needs exactly one of --script or --input")),
            };
            let mut all = true;
            let mut items = Vec::new();
            for p in sel.tuples()? {
                let d = s.replay(&p, &Catalog)?;
                all &= d.pass;
                items.push((p, d.to_json()));
            }
            Ok(if all { Outcome::Ok(collect(items)) } else { Outcome::Failed(collect(items)) })
        }
        Verb::Check { sel } => {
            let family = sel.family()?;
            let overrides: BTreeMap<String, String> = sel.given().into_iter().collect();
            let ranges = expected::ranges_with(family, &overrides)?;
            let rows = expected::check_family(family, &ranges)?;
            let all = rows.iter().all(|r| r.pass);
            let v = json!(rows);
            Ok(if all { Outcome::Ok(v) } else { Outcome::Failed(v) })
        }
    }
}

fn build(sel: &Select) -> Result<Outcome, Fail> {
    let items = sel.factorizations()?.into_iter().map(|(p, f)| (p, f.to_json())).collect();
    Ok(Outcome::Ok(collect(items)))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        v => v.to_string(),
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Key/value lines for an object; one row per element for a list of objects,
/// with scalar fields as columns. Check rows and replay logs get dedicated layouts.
fn table(v: &Value) -> String {
    match v {
        Value::Array(items) if items.iter().all(|x| x.get("failures").is_some()) => {
            let mut rows = vec![vec!["params".to_string(), "result".into(), "detail".into()]];
            for r in items {
                let params = r["params"].as_object().map(|m| m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "));
                let detail: Vec<String> = r["failures"].as_array().into_iter().flatten().map(scalar).collect();
                let pass = r["pass"].as_bool() == Some(true);
                rows.push(vec![params.unwrap_or_default(), if pass { "pass" } else { "FAIL" }.into(), detail.join("; ")]);
            }
            aligned(&rows)
        }
        Value::Array(items) if items.iter().all(Value::is_object) => {
            let keys: Vec<&String> = items
                .iter()
                .flat_map(|x| x.as_object().into_iter().flat_map(|m| m.iter()))
                .filter(|(_, v)| !v.is_object() && !v.is_array())
                .map(|(k, _)| k)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let mut rows = vec![keys.iter().map(|k| k.to_string()).collect::<Vec<_>>()];
            rows.extend(items.iter().map(|x| keys.iter().map(|k| scalar(&x[k.as_str()])).collect()));
            aligned(&rows)
        }
        Value::Object(m) if m.contains_key("log") && m["log"].is_array() => {
            let head: Vec<Vec<String>> = m
                .iter()
                .filter(|(k, v)| *k != "log" && !v.is_array())
                .map(|(k, v)| vec![k.clone(), scalar(v)])
                .collect();
            let mut out = aligned(&head);
            let steps: Vec<Vec<String>> = m["log"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|s| ["index", "op", "letters", "min_tier", "relator_kind", "detail"].iter().map(|k| scalar(&s[*k])).collect())
                .collect();
            out.push('\n');
            out.push_str(&aligned(&steps));
            out
        }
        Value::Object(m) => aligned(&m.iter().map(|(k, v)| vec![k.clone(), scalar(v)]).collect::<Vec<_>>()),
        v => format!("{}\n", scalar(v)),
    }
}

fn emit(cli: &Cli, v: &Value) -> std::io::Result<()> {
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).unwrap_or_default()),
        Format::Table => table(v),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(d) = cli.depth {
        lefkit::normalize::set_depth(d);
    }
    let (code, v) = match run(&cli) {
        Ok(Outcome::Ok(v)) => (0, v),
        Ok(Outcome::Failed(v)) => (1, v),
        Err(Fail::Runtime(msg)) => (1, json!({ "error": msg })),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `lefkit --help` for usage.");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &v) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
