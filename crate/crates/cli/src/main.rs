//! `arithline` command-line front end.
//!
//! Each subcommand takes its arguments as `--key <value>` where the value is
//! JSON (falling back to a bare string), or as one object via `--input`.

mod commands;
mod json;

use std::io::{Read, Write};
use std::process::ExitCode;

use arithline::{Error, Precision};
use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::{json, Map, Value};

use commands::{CommandSpec, Settings, COMMANDS};

fn cli() -> Command {
    let mut cmd = Command::new("arithline")
        .about("Berkovich spaces over the integers: norms, division, splitting and covers")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg(
            Arg::new("bits")
                .long("bits")
                .global(true)
                .env("ARITHLINE_BITS")
                .value_parser(clap::value_parser!(u32))
                .help("Interval precision in bits [default: 128]"),
        )
        .arg(
            Arg::new("trunc")
                .long("trunc")
                .global(true)
                .value_parser(clap::value_parser!(i64))
                .help("Default series truncation T^m [default: 64]"),
        )
        .arg(
            Arg::new("padic-prec")
                .long("padic-prec")
                .global(true)
                .value_parser(clap::value_parser!(u32))
                .help("Default p-adic precision [default: 20]"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .global(true)
                .value_parser(clap::value_parser!(u64))
                .help("Seed for randomized routines [default: 0]"),
        )
        .arg(
            Arg::new("input")
                .long("input")
                .global(true)
                .help("JSON object of arguments (file path or - for stdin); an array runs a batch"),
        );
    for spec in COMMANDS {
        let mut sub = Command::new(spec.name).about(spec.about);
        for key in spec.keys {
            sub = sub.arg(Arg::new(*key).long(*key).allow_hyphen_values(true).action(ArgAction::Set));
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn read_input(path: &str) -> Result<Value, Error> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Malformed(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("input is not JSON: {e}")))
}

fn error_json(e: &Error) -> Value {
    json!({ "error": e.code(), "detail": e.to_string() })
}

enum Outcome {
    Ok,
    Domain,
    Input,
}

fn run_one(spec: &CommandSpec, map: &Map<String, Value>, s: Settings) -> (Value, Outcome) {
    match commands::run(spec, map, s) {
        Ok(v) => {
            let failed = spec.name == "selftest" && v["all_pass"] == json!(false);
            (json::versioned(v), if failed { Outcome::Domain } else { Outcome::Ok })
        }
        Err(e) => {
            let o = if e.is_input_error() { Outcome::Input } else { Outcome::Domain };
            (json::versioned(error_json(&e)), o)
        }
    }
}

fn execute(spec: &CommandSpec, m: &ArgMatches, s: Settings) -> Result<(Value, Outcome), Error> {
    let mut base = Map::new();
    for key in spec.keys {
        if let Some(raw) = m.get_one::<String>(key) {
            base.insert(key.to_string(), parse_value(raw));
        }
    }
    let merge = |obj: &Value| -> Result<Map<String, Value>, Error> {
        let o = obj.as_object().ok_or_else(|| Error::Malformed("input items must be objects".into()))?;
        let mut merged = o.clone();
        // Command-line keys override file keys.
        merged.extend(base.clone());
        Ok(merged)
    };
    match m.get_one::<String>("input").map(|p| read_input(p)).transpose()? {
        None => Ok(run_one(spec, &base, s)),
        Some(Value::Array(items)) => {
            let mut out = Vec::with_capacity(items.len());
            let mut worst = Outcome::Ok;
            for item in &items {
                let (v, o) = run_one(spec, &merge(item)?, s);
                worst = match (worst, o) {
                    (Outcome::Input, _) | (_, Outcome::Input) => Outcome::Input,
                    (Outcome::Domain, _) | (_, Outcome::Domain) => Outcome::Domain,
                    _ => Outcome::Ok,
                };
                out.push(v);
            }
            Ok((json!({ "v": 1, "batch": out }), worst))
        }
        Some(obj) => Ok(run_one(spec, &merge(&obj)?, s)),
    }
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let is_info = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            let _ = e.print();
            return if is_info { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let spec = commands::find(name).expect("subcommand comes from the table");
    let settings = Settings {
        prec: Precision::new(sub.get_one::<u32>("bits").copied().unwrap_or(Precision::DEFAULT_BITS)),
        trunc: sub.get_one::<i64>("trunc").copied().unwrap_or(64),
        padic_prec: sub.get_one::<u32>("padic-prec").copied().unwrap_or(20),
        seed: sub.get_one::<u64>("seed").copied().unwrap_or(0),
    };
    let (out, outcome) = match execute(spec, sub, settings) {
        Ok(r) => r,
        Err(e) => (json::versioned(error_json(&e)), Outcome::Input),
    };
    let _ = writeln!(std::io::stdout(), "{out}");
    match outcome {
        Outcome::Ok => ExitCode::SUCCESS,
        Outcome::Domain => ExitCode::from(2),
        Outcome::Input => ExitCode::from(1),
    }
}
