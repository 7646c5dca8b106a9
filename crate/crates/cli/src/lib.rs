//! Batch driver: every verification and table as a subcommand with
//! machine-readable output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches};
use serde_json::{json, Value};
use thiserror::Error;

use ksseq::gring::{ParamError, Params};
use ksseq::homology::{homology_table_with, EngineRegistry, DEFAULT_ENGINE};
use ksseq::koszul::{d_squared_check, Subset};
use ksseq::massey::bracket_verify;
use ksseq::page::{
    collapse_report, e2_table, extension_search, parity_collapse_check, splitting_consistency,
    PageOptions, PageTable,
};
use ksseq::presentation::verify_presentation;

pub const DEFAULT_ADIC_PRECISION: u32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(#[from] ParamError),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Tsv,
}

/// Options that only some commands read.
#[derive(Debug, Clone, Default)]
pub struct CommandArgs {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub degree: Option<u32>,
    pub below: Option<usize>,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub params: Params,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub include_pbar: bool,
    pub seed: u64,
    pub engine: String,
    pub args: CommandArgs,
}

impl RunConfig {
    fn header(&self) -> BTreeMap<&'static str, Value> {
        let pr = &self.params;
        BTreeMap::from([
            ("p", json!(pr.p())),
            ("n", json!(pr.n())),
            ("N", json!(pr.adic_precision)),
            ("tMax", json!(pr.t_max)),
        ])
    }

    fn page_options(&self) -> PageOptions {
        PageOptions {
            include_pbar: self.include_pbar,
            ..PageOptions::for_height(self.params.n())
        }
    }
}

/// What a command produced.
pub struct Artifact {
    pub json: Value,
    pub tsv: Option<String>,
    pub pass: bool,
}

impl Artifact {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(compute)?;
                s.push('\n');
                Ok(s)
            }
            Format::Tsv => self
                .tsv
                .clone()
                .ok_or_else(|| CliError::Usage("this command has no TSV form".into())),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn with_header(cfg: &RunConfig, body: Value, pass: bool) -> Value {
    let mut obj: serde_json::Map<String, Value> = cfg
        .header()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    if let Value::Object(m) = body {
        obj.extend(m);
    }
    obj.insert("verdict".into(), json!(if pass { "PASS" } else { "FAIL" }));
    Value::Object(obj)
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn args(&self) -> Vec<Arg> {
        Vec::new()
    }
    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError>;
}

struct Homology;
struct VerifyPresentation;
struct Massey;
struct E2;
struct Collapse;
struct Extensions;
struct Splitting;
struct DSquared;

impl Command for Homology {
    fn name(&self) -> &'static str {
        "homology"
    }

    fn about(&self) -> &'static str {
        "Koszul homology dimensions and representatives per (s, t)"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let registry = EngineRegistry::default();
        let engine = registry.get(&cfg.engine).map_err(|e| CliError::Usage(e.to_string()))?;
        let (table, exhausted) = homology_table_with(engine, &cfg.params).map_err(compute)?;
        let body = json!({
            "engine": engine.name(),
            "windowExhausted": exhausted,
            "slices": table.slices_json(),
        });
        Ok(Artifact {
            json: with_header(cfg, body, true),
            tsv: Some(table.to_tsv()),
            pass: true,
        })
    }
}

impl Command for VerifyPresentation {
    fn name(&self) -> &'static str {
        "verify-presentation"
    }

    fn about(&self) -> &'static str {
        "Check the generators-and-relations presentation against homology"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let report = verify_presentation(&cfg.params);
        let mut tsv = String::from("s\tt\tdim\n");
        for d in &report.dims {
            tsv.push_str(&format!("{}\t{}\t{}\n", d.s, d.t, d.homology));
        }
        let body = serde_json::to_value(&report).map_err(compute)?;
        Ok(Artifact {
            json: with_header(cfg, body, report.verdict),
            tsv: Some(tsv),
            pass: report.verdict,
        })
    }
}

fn parse_indices(v: &[usize], flag: &str) -> Result<Subset, CliError> {
    if v.iter().any(|&i| i == 0 || i > 32) {
        return Err(CliError::Usage(format!("{flag}: indices must lie in 1..=n")));
    }
    Ok(Subset::from_indices(v))
}

impl Command for Massey {
    fn name(&self) -> &'static str {
        "massey"
    }

    fn about(&self) -> &'static str {
        "Verify f_{I∪J} ∈ <f_I, u^{w(min J)}, f_J> with sign"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            Arg::new("I")
                .long("I")
                .required(true)
                .value_delimiter(',')
                .value_parser(clap::value_parser!(usize)),
            Arg::new("J")
                .long("J")
                .required(true)
                .value_delimiter(',')
                .value_parser(clap::value_parser!(usize)),
        ]
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let n = cfg.params.n();
        if cfg.args.i.iter().chain(&cfg.args.j).any(|&x| x > n) {
            return Err(CliError::Usage(format!("indices must lie in 1..={n}")));
        }
        let i = parse_indices(&cfg.args.i, "--I")?;
        let j = parse_indices(&cfg.args.j, "--J")?;
        let report = bracket_verify(&cfg.params.ring, i, j).map_err(|e| CliError::Usage(e.to_string()))?;
        let body = json!({ "bracket": report });
        Ok(Artifact {
            json: with_header(cfg, body, report.pass),
            tsv: None,
            pass: report.pass,
        })
    }
}

fn chart_dots(page: &PageTable) -> Value {
    Value::Array(
        page.table
            .cells
            .iter()
            .map(|((s, t), e)| json!({"s": s, "t": t, "dim": e.dim, "labels": e.basis}))
            .collect(),
    )
}

impl Command for E2 {
    fn name(&self) -> &'static str {
        "e2"
    }

    fn about(&self) -> &'static str {
        "E2-page chart of the Kunneth spectral sequence"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let opts = cfg.page_options();
        let page = e2_table(&cfg.params, &opts).map_err(compute)?;
        let parity = parity_collapse_check(&cfg.params, &opts).map_err(compute)?;
        let body = json!({
            "dots": chart_dots(&page),
            "generators": page.generators,
            "report": parity,
        });
        Ok(Artifact {
            json: with_header(cfg, body, parity.pass),
            tsv: Some(page.table.to_tsv()),
            pass: parity.pass,
        })
    }
}

impl Command for Collapse {
    fn name(&self) -> &'static str {
        "collapse"
    }

    fn about(&self) -> &'static str {
        "Permanent-cycle status of every E2 generator and extension facts"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let opts = cfg.page_options();
        let page = e2_table(&cfg.params, &opts).map_err(compute)?;
        let report = collapse_report(&cfg.params, &opts).map_err(compute)?;
        let body = json!({
            "dots": chart_dots(&page),
            "generators": page.generators,
            "report": report,
        });
        Ok(Artifact {
            json: with_header(cfg, body, report.verdict),
            tsv: Some(page.table.to_tsv()),
            pass: report.verdict,
        })
    }
}

impl Command for Extensions {
    fn name(&self) -> &'static str {
        "extensions"
    }

    fn about(&self) -> &'static str {
        "Lower-filtration candidates in a total degree"
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            Arg::new("degree")
                .long("degree")
                .required(true)
                .value_parser(clap::value_parser!(u32)),
            Arg::new("below")
                .long("below")
                .required(true)
                .value_parser(clap::value_parser!(usize)),
        ]
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let (d, below) = match (cfg.args.degree, cfg.args.below) {
            (Some(d), Some(b)) => (d, b),
            _ => return Err(CliError::Usage("--degree and --below are required".into())),
        };
        let candidates = extension_search(&cfg.params.ring, d, below);
        let body = json!({ "degree": d, "below": below, "candidates": candidates });
        Ok(Artifact {
            json: with_header(cfg, body, true),
            tsv: None,
            pass: true,
        })
    }
}

impl Command for Splitting {
    fn name(&self) -> &'static str {
        "splitting"
    }

    fn about(&self) -> &'static str {
        "Poincare series of both sides of the H_*(BP<n>) splitting through tMax"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let report = splitting_consistency(&cfg.params.ring, cfg.params.t_max);
        let body = json!({ "report": report });
        Ok(Artifact {
            json: with_header(cfg, body, report.pass),
            tsv: None,
            pass: report.pass,
        })
    }
}

impl Command for DSquared {
    fn name(&self) -> &'static str {
        "d-squared"
    }

    fn about(&self) -> &'static str {
        "Check that the Koszul differential squares to zero on seeded random elements"
    }

    fn args(&self) -> Vec<Arg> {
        vec![Arg::new("samples")
            .long("samples")
            .default_value("1000")
            .value_parser(clap::value_parser!(usize))]
    }

    fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let report = d_squared_check(cfg.params.ring, cfg.seed, cfg.args.samples);
        let pass = report.pass();
        let body = json!({ "report": report });
        Ok(Artifact {
            json: with_header(cfg, body, pass),
            tsv: None,
            pass,
        })
    }
}

/// Subcommands by name.
pub struct Registry {
    commands: Vec<Box<dyn Command>>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry {
            commands: vec![
                Box::new(Homology),
                Box::new(VerifyPresentation),
                Box::new(Massey),
                Box::new(E2),
                Box::new(Collapse),
                Box::new(Extensions),
                Box::new(Splitting),
                Box::new(DSquared),
            ],
        }
    }
}

impl Registry {
    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.iter().map(|c| c.name()).collect()
    }

    pub fn cli(&self) -> clap::Command {
        let mut root = clap::Command::new("ksseq")
            .about("Exact Koszul, Tor and Kunneth spectral sequence checks")
            .subcommand_required(true)
            .arg_required_else_help(true);
        for c in &self.commands {
            let sub = clap::Command::new(c.name())
                .about(c.about())
                .args(common_args())
                .args(c.args());
            root = root.subcommand(sub);
        }
        root
    }

    pub fn run(&self, cfg: &RunConfig) -> Result<Artifact, CliError> {
        let cmd = self
            .get(&cfg.command)
            .ok_or_else(|| CliError::Usage(format!("unknown command {}", cfg.command)))?;
        cmd.run(cfg)
    }
}

fn common_args() -> Vec<Arg> {
    vec![
        Arg::new("p")
            .long("p")
            .required(true)
            .value_parser(clap::value_parser!(u32)),
        Arg::new("n")
            .long("n")
            .required(true)
            .value_parser(clap::value_parser!(usize)),
        Arg::new("adic-prec")
            .long("adic-prec")
            .value_parser(clap::value_parser!(u32))
            .help("truncation order N in (u_1, ..., u_{n-1}) [default: 4]"),
        Arg::new("tmax")
            .long("tmax")
            .value_parser(clap::value_parser!(u32))
            .help("largest internal degree [default: 2 sum w(i) + 2 w(n)]"),
        Arg::new("format")
            .long("format")
            .default_value("json")
            .value_parser(["json", "tsv"]),
        Arg::new("output")
            .long("output")
            .value_parser(clap::value_parser!(PathBuf)),
        Arg::new("include-pbar")
            .long("include-pbar")
            .action(ArgAction::SetTrue)
            .overrides_with("no-pbar"),
        Arg::new("no-pbar")
            .long("no-pbar")
            .action(ArgAction::SetTrue)
            .overrides_with("include-pbar"),
        Arg::new("seed")
            .long("seed")
            .default_value("0")
            .value_parser(clap::value_parser!(u64)),
        Arg::new("engine")
            .long("engine")
            .default_value(DEFAULT_ENGINE),
    ]
}

/// Build a validated [`RunConfig`] from parsed arguments.
pub fn config_from_matches(m: &ArgMatches) -> Result<RunConfig, CliError> {
    let (command, sub) = m
        .subcommand()
        .ok_or_else(|| CliError::Usage("missing command".into()))?;
    let p = *sub.get_one::<u32>("p").expect("required");
    let n = *sub.get_one::<usize>("n").expect("required");
    let adic = sub
        .get_one::<u32>("adic-prec")
        .copied()
        .unwrap_or(DEFAULT_ADIC_PRECISION);
    let t_max = match sub.get_one::<u32>("tmax") {
        Some(&t) => t,
        None => Params::default_t_max(p, n)?,
    };
    let params = Params::new(p, n, adic, t_max)?;
    let format = match sub.get_one::<String>("format").map(String::as_str) {
        Some("tsv") => Format::Tsv,
        _ => Format::Json,
    };
    let ids = |k: &str| -> Vec<usize> {
        sub.try_get_many::<usize>(k)
            .ok()
            .flatten()
            .map(|v| v.copied().collect())
            .unwrap_or_default()
    };
    let args = CommandArgs {
        i: ids("I"),
        j: ids("J"),
        degree: sub.try_get_one::<u32>("degree").ok().flatten().copied(),
        below: sub.try_get_one::<usize>("below").ok().flatten().copied(),
        samples: sub
            .try_get_one::<usize>("samples")
            .ok()
            .flatten()
            .copied()
            .unwrap_or(1000),
    };
    Ok(RunConfig {
        command: command.to_string(),
        params,
        format,
        output: sub.get_one::<PathBuf>("output").cloned(),
        include_pbar: !sub.get_flag("no-pbar"),
        seed: *sub.get_one::<u64>("seed").expect("defaulted"),
        engine: sub.get_one::<String>("engine").expect("defaulted").clone(),
        args,
    })
}

/// Parse, run and render; returns the exit status and what was printed.
pub fn run_args<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let registry = Registry::default();
    let matches = match registry.cli().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                (2, String::new(), text)
            } else {
                (0, text, String::new())
            };
        }
    };
    let result = config_from_matches(&matches).and_then(|cfg| {
        let art = registry.run(&cfg)?;
        let text = art.render(cfg.format)?;
        Ok((cfg, art, text))
    });
    match result {
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
        Ok((cfg, art, text)) => {
            let verdict = if art.pass { "PASS" } else { "FAIL" };
            let status = format!("{}: {verdict}\n", cfg.command);
            match &cfg.output {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => (art.exit_code(), String::new(), status),
                    Err(e) => (2, String::new(), format!("error: {}: {e}\n", path.display())),
                },
                None => (art.exit_code(), text, status),
            }
        }
    }
}
