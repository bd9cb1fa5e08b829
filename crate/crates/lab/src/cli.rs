//! Argument parsing, `--config` merging, output writing and exit codes.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::commands::{run_command, Command, Format, Inputs, Output};
use crate::parse::read_file;
use crate::LabError;

/// Exit status for usage and input errors.
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "blaschke-lab", version, about = "Zero-distribution conditions for holomorphic functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Locate the zeros of --f in --region.
    Zeros(Flags),
    /// Sample the Green's function of --domain with pole --z0.
    Green(Flags),
    /// Riesz charge of --M (or log|--f|) on a grid of step --h.
    Riesz(Flags),
    /// The sum of v over the zeros of --f in D minus D0.
    Blaschke(Flags),
    /// Check log|f| <= M against the sum of v over the zeros.
    Implication(Flags),
    /// Minimal constants of the main inequality for u = log|f| (or --u).
    #[command(name = "inequality-c")]
    InequalityC(Flags),
    /// Residual of Green's identity for --M and a boundary-flat --v.
    Identity(Flags),
    /// Check the pointwise bound (L) at --z with radius --r.
    #[command(name = "l-bound")]
    LBound(Flags),
    /// Validate --v as a test function and report its collars.
    #[command(name = "validate-v")]
    ValidateV(Flags),
}

impl Cmd {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Cmd::Zeros(f) => (Command::Zeros, f),
            Cmd::Green(f) => (Command::Green, f),
            Cmd::Riesz(f) => (Command::Riesz, f),
            Cmd::Blaschke(f) => (Command::Blaschke, f),
            Cmd::Implication(f) => (Command::Implication, f),
            Cmd::InequalityC(f) => (Command::InequalityC, f),
            Cmd::Identity(f) => (Command::Identity, f),
            Cmd::LBound(f) => (Command::LBound, f),
            Cmd::ValidateV(f) => (Command::ValidateV, f),
        }
    }
}

/// Flags shared by every command; each command reads the ones it needs.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Holomorphic function f (expression).
    #[arg(long)]
    pub f: Option<String>,
    /// Majorant M (real expression).
    #[arg(long = "M")]
    pub m: Option<String>,
    /// The function u0 of (L) (real expression).
    #[arg(long)]
    pub u0: Option<String>,
    /// A subharmonic u (real expression) in place of log|f|.
    #[arg(long)]
    pub u: Option<String>,
    /// loginv | greenpole:z0 | power:q | custom:file | file.json
    #[arg(long)]
    pub v: Option<String>,
    /// unitdisk | disk:c,r | moebius:a,b,c,d
    #[arg(long)]
    pub domain: Option<String>,
    /// Inner domain: a chart radius in (0, 1) or a domain.
    #[arg(long)]
    pub d0: Option<String>,
    /// Comparison domain of the main inequality.
    #[arg(long)]
    pub dtilde: Option<String>,
    /// Class bound b, at least the supremum of v on the boundary of D0.
    #[arg(long)]
    pub b: Option<String>,
    /// Reference point (complex).
    #[arg(long)]
    pub z0: Option<String>,
    /// Evaluation point of (L) (complex).
    #[arg(long)]
    pub z: Option<String>,
    /// Circle radius of (L).
    #[arg(long)]
    pub r: Option<String>,
    /// Grid step.
    #[arg(long)]
    pub h: Option<String>,
    /// epsilon of (L), or a comma-separated list for the collars of validate-v.
    #[arg(long)]
    pub eps: Option<String>,
    /// Zero search region: disk:c,r | rect:ll,ur
    #[arg(long)]
    pub region: Option<String>,
    /// Zero list (JSON) used instead of locating the zeros of --f.
    #[arg(long)]
    pub zeros: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_parser = ["json", "csv"])]
    pub format: Option<String>,
    /// JSON object of flag values that override the command line.
    #[arg(long)]
    pub config: Option<String>,
}

const KEYS: [&str; 17] =
    ["f", "M", "u0", "u", "v", "domain", "d0", "dtilde", "b", "z0", "z", "r", "h", "eps", "region", "zeros", "format"];

impl Flags {
    fn values(&self) -> [&Option<String>; 17] {
        [
            &self.f,
            &self.m,
            &self.u0,
            &self.u,
            &self.v,
            &self.domain,
            &self.d0,
            &self.dtilde,
            &self.b,
            &self.z0,
            &self.z,
            &self.r,
            &self.h,
            &self.eps,
            &self.region,
            &self.zeros,
            &self.format,
        ]
    }
}

/// Flag values with `--config` applied on top.
pub fn resolve_inputs(flags: &Flags) -> Result<Inputs, LabError> {
    let mut map = BTreeMap::new();
    for (k, v) in KEYS.iter().zip(flags.values()) {
        if let Some(v) = v {
            map.insert(k.to_string(), v.clone());
        }
    }
    if let Some(path) = &flags.config {
        let doc: Value =
            serde_json::from_str(&read_file(path)?).map_err(|e| LabError::Input(format!("{path}: {e}")))?;
        let Value::Object(obj) = doc else {
            return Err(LabError::Input(format!("{path}: expected a JSON object")));
        };
        for (k, v) in obj {
            if !KEYS.contains(&k.as_str()) {
                return Err(LabError::Usage(format!("{path}: unknown key `{k}`")));
            }
            let text = match v {
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                other => return Err(LabError::Input(format!("{path}: `{k}` must be a string or a number, got {other}"))),
            };
            map.insert(k, text);
        }
    }
    Ok(Inputs(map))
}

fn execute(cli: &Cli) -> Result<Output, LabError> {
    let (cmd, flags) = cli.command.split();
    let mut inputs = resolve_inputs(flags)?;
    let fmt = match inputs.0.remove("format").as_deref() {
        None => cmd.default_format(),
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => return Err(LabError::Usage(format!("unknown format `{other}`"))),
    };
    let out = run_command(cmd, &inputs, fmt)?;
    if let Some(path) = &flags.out {
        fs::write(path, &out.body)?;
        if let Some(meta) = &out.sidecar {
            fs::write(format!("{path}.meta.json"), meta)?;
        }
    }
    Ok(out)
}

/// The JSON error object written to standard error.
pub fn error_object(kind: &str, message: &str) -> String {
    let mut s = json!({"error": {"kind": kind, "message": message}}).to_string();
    s.push('\n');
    s
}

/// Runs one invocation and returns its exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            let _ = stderr.write_all(error_object("usage", first).as_bytes());
            return EXIT_ERROR;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if cli.command.split().1.out.is_none() && stdout.write_all(out.body.as_bytes()).is_err() {
                return EXIT_ERROR;
            }
            out.exit_code()
        }
        Err(e) => {
            let _ = stderr.write_all(error_object(e.kind(), &e.to_string()).as_bytes());
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("blaschke-lab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_3() {
        let (code, _, err) = call(&["nonsense"]);
        assert_eq!(code, 3);
        let v: Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"]["kind"], "usage");
        assert_eq!(call(&["blaschke", "--v", "loginv"]).0, 3);
        assert_eq!(call(&["blaschke", "--format", "xml"]).0, 3);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("validate-v"));
    }

    #[test]
    fn config_overrides_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        fs::write(&cfg, r#"{"f": "blaschke(0.9;0.99)", "d0": 0.5}"#).unwrap();
        let flags = Flags { f: Some("z".into()), config: Some(cfg.to_str().unwrap().into()), ..Flags::default() };
        let inputs = resolve_inputs(&flags).unwrap();
        assert_eq!(inputs.get("f"), Some("blaschke(0.9;0.99)"));
        assert_eq!(inputs.get("d0"), Some("0.5"));
        fs::write(&cfg, r#"{"colour": "red"}"#).unwrap();
        assert!(matches!(resolve_inputs(&flags), Err(LabError::Usage(_))));
    }

    #[test]
    fn out_file_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("trace.csv");
        let (code, stdout, _) =
            call(&["blaschke", "--f", "blaschke(0.9;0.99)", "--format", "csv", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(stdout.is_empty());
        let csv = fs::read_to_string(&out).unwrap();
        assert!(csv.starts_with("k,abs_zk,partial_sum\n1,"));
        assert_eq!(csv.lines().count(), 3);
        let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("trace.csv.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["verdict"], "HOLDS");
    }
}
