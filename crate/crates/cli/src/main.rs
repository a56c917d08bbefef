use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gl2designs::cayley::{self, CayleyCtx};
use gl2designs::codes::{self, Strategy, DEFAULT_CODE_CAP};
use gl2designs::designs::{self, BlockFamily, EnumOptions, Method, DEFAULT_CAP};
use gl2designs::polyspace::DEFAULT_SEED;
use gl2designs::{Field, Subspace};

#[derive(Parser)]
#[command(name = "gl2designs", version, about = "3-designs from GL2-invariant spaces of binary forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Output format; csv and text are projections of the JSON report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Enumeration cap (number of subsets or codewords).
    #[arg(long, global = true, env = "GL2DESIGNS_CAP")]
    cap: Option<u128>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a finite field given as "p^e" or "p^e:c0,...,1".
    Field {
        #[arg(long)]
        field: String,
    },
    #[command(subcommand)]
    Design(DesignCmd),
    #[command(subcommand)]
    Cayley(CayleyCmd),
    #[command(subcommand)]
    Code(CodeCmd),
}

#[derive(Args, Clone)]
struct SpaceArgs {
    #[arg(long)]
    field: String,
    /// Degree of the forms (inferred from a subspace file when omitted).
    #[arg(long)]
    k: Option<usize>,
    /// lucas, full, or file:<path> holding a JSON list of coefficient rows.
    #[arg(long, default_value = "lucas")]
    subspace: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Orbit,
}

#[derive(Subcommand)]
enum DesignCmd {
    /// Enumerate the block family of a subspace.
    Build {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Orbit)]
        method: MethodArg,
    },
    /// Check a block family file for the t-design property.
    Verify {
        #[arg(long)]
        blocks: PathBuf,
        #[arg(long, default_value_t = 3)]
        t: usize,
    },
    /// Number of blocks through {inf, 0, 1}.
    Lambda {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// The subfield Steiner system S(3, p^m+1, q+1).
    Steiner {
        #[arg(long)]
        field: String,
        #[arg(long)]
        m: u32,
    },
    /// Decide emptiness of the Lucas family of degree k.
    Empty {
        #[arg(long)]
        field: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum CayleyCmd {
    /// Compare the projective-line and unit-circle families.
    Check {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Tabulate when the unit-circle conditions reduce to one equation.
    Classify {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        kmin: usize,
        #[arg(long)]
        kmax: usize,
    },
    /// Six-subset family and its relation to the degree-7 Lucas family.
    Sixsets {
        #[arg(long)]
        field: String,
    },
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Parameters [n, dim, d] and weight distribution of C_W.
    Info {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Support design of one weight in the dual of C_W.
    Dualdesign {
        #[command(flatten)]
        space: SpaceArgs,
        /// A weight, or "min" for the minimum distance of the dual.
        #[arg(long, default_value = "min")]
        w: String,
        #[arg(long, default_value_t = 3)]
        t: usize,
    },
    /// Melas weights A3, A5 and the derived design parameters.
    Melas {
        #[arg(long)]
        m: u32,
    },
}

/// A command's result: the JSON report and whether its internal checks held.
struct Report {
    value: Value,
    ok: bool,
}

impl Report {
    fn new<T: Serialize>(v: &T) -> Result<Report> {
        Ok(Report { value: serde_json::to_value(v)?, ok: true })
    }

    fn checked(value: Value, ok: bool) -> Report {
        Report { value, ok }
    }
}

fn load_subspace(field: &Field, space: &SpaceArgs) -> Result<Subspace> {
    let sel = space.subspace.as_str();
    if let Some(path) = sel.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let rows: Vec<Vec<u64>> = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
        let k = match (space.k, rows.first()) {
            (Some(k), _) => k,
            (None, Some(r)) if !r.is_empty() => r.len() - 1,
            _ => bail!("cannot infer k from an empty subspace file; pass --k"),
        };
        return Ok(Subspace::from_rows(field, k, &rows)?);
    }
    let Some(k) = space.k else { bail!("--k is required for --subspace {sel}") };
    match sel {
        "lucas" => Ok(Subspace::lucas(field, k)),
        "full" => Ok(Subspace::full(field, k)),
        other => bail!("unknown subspace selector {other:?}; expected lucas, full or file:<path>"),
    }
}

fn enum_opts(g: &Global) -> EnumOptions {
    EnumOptions { cap: g.cap.unwrap_or(DEFAULT_CAP), seed: g.seed }
}

fn cmd_field(spec: &str) -> Result<Report> {
    let f = Field::from_spec(spec)?;
    Report::new(&json!({
        "spec": f.spec(),
        "p": f.p(),
        "e": f.e(),
        "q": f.q(),
        "modulus": f.modulus(),
        "generator": f.generator().code(),
    }))
}

fn cmd_design(cmd: &DesignCmd, g: &Global) -> Result<Report> {
    let opts = enum_opts(g);
    match cmd {
        DesignCmd::Build { space, method } => {
            let f = Field::from_spec(&space.field)?;
            let w = load_subspace(&f, space)?;
            let method = match method {
                MethodArg::Brute => Method::Brute,
                MethodArg::Orbit => Method::Orbit,
            };
            Report::new(&designs::enumerate_blocks(&f, &w, method, &opts)?)
        }
        DesignCmd::Verify { blocks, t } => {
            let text = std::fs::read_to_string(blocks).with_context(|| format!("reading {}", blocks.display()))?;
            let family = BlockFamily::from_json(&text)?;
            Report::new(&designs::verify_design(&family, *t)?)
        }
        DesignCmd::Lambda { space } => {
            let f = Field::from_spec(&space.field)?;
            let w = load_subspace(&f, space)?;
            let lambda = designs::lambda_count_capped(&f, &w, opts.cap)?;
            Report::new(&json!({ "field": f.spec(), "k": w.degree(), "lambda": lambda }))
        }
        DesignCmd::Steiner { field, m } => {
            let f = Field::from_spec(field)?;
            Report::new(&designs::steiner_q0_report(&f, *m, &opts)?)
        }
        DesignCmd::Empty { field, k } => {
            let f = Field::from_spec(field)?;
            Report::new(&designs::emptiness_oracle(&f, *k, opts.cap)?)
        }
    }
}

fn cmd_cayley(cmd: &CayleyCmd, g: &Global) -> Result<Report> {
    let opts = enum_opts(g);
    match cmd {
        CayleyCmd::Check { space } => {
            let f = Field::from_spec(&space.field)?;
            let w = load_subspace(&f, space)?;
            let r = cayley::model_equivalence(&CayleyCtx::new(&f), &w, &opts)?;
            Ok(Report::checked(serde_json::to_value(&r)?, r.equal))
        }
        CayleyCmd::Classify { p, kmin, kmax } => {
            let mut rows = Vec::new();
            let mut ok = true;
            for k in *kmin..=*kmax {
                let single = cayley::single_equation_classify(*p, k)?;
                let orbits = cayley::forbidden_orbit_count(k, *p);
                ok &= single == (orbits == 1);
                rows.push(json!({ "k": k, "orbits": orbits, "single_equation": single }));
            }
            Ok(Report::checked(json!({ "p": p, "rows": rows }), ok))
        }
        CayleyCmd::Sixsets { field } => {
            let f = Field::from_spec(field)?;
            let r = cayley::six_subset_report(&CayleyCtx::new(&f), &opts)?;
            let ok = r.factor_seven && r.bijection && r.design.is_design;
            Ok(Report::checked(serde_json::to_value(&r)?, ok))
        }
    }
}

fn cmd_code(cmd: &CodeCmd, g: &Global) -> Result<Report> {
    let cap = g.cap.unwrap_or(DEFAULT_CODE_CAP);
    match cmd {
        CodeCmd::Info { space } => {
            let f = Field::from_spec(&space.field)?;
            let w = load_subspace(&f, space)?;
            let c = codes::code_from_subspace(&f, &w)?;
            let d = codes::min_distance(&c, cap).ok();
            let dist = codes::weight_distribution(&c, Strategy::Auto, cap).ok();
            let d = d.or_else(|| dist.as_ref().and_then(|x| x.min_weight()));
            let params = match d {
                Some(d) => format!("[{}, {}, {}]", c.n(), c.dim(), d),
                None => format!("[{}, {}, ?]", c.n(), c.dim()),
            };
            Report::new(&json!({
                "field": f.spec(),
                "k": w.degree(),
                "n": c.n(),
                "dim": c.dim(),
                "d": d,
                "params": params,
                "weight_distribution": dist,
            }))
        }
        CodeCmd::Dualdesign { space, w: weight, t } => {
            let f = Field::from_spec(&space.field)?;
            let sub = load_subspace(&f, space)?;
            let dual = codes::code_from_subspace(&f, &sub)?.dual();
            let wt = match weight.as_str() {
                "min" => codes::min_distance(&dual, cap)?,
                s => s.parse().with_context(|| format!("--w must be a weight or \"min\", got {s:?}"))?,
            };
            let s = codes::support_design(&dual, wt, *t, cap)?;
            Report::new(&json!({
                "field": f.spec(),
                "k": sub.degree(),
                "dual_dim": dual.dim(),
                "w": s.w,
                "supports": s.supports.len(),
                "report": s.report,
            }))
        }
        CodeCmd::Melas { m } => {
            let r = codes::melas_report(*m, cap)?;
            Ok(Report::checked(serde_json::to_value(&r)?, r.oracle_agreement))
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push((prefix.to_string(), items.iter().map(scalar).collect::<Vec<_>>().join(" ")))
        }
        Value::Array(items) => items.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(value: &Value, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Text => {
            let mut rows = Vec::new();
            flatten("", value, &mut rows);
            rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
        }
        Format::Csv => {
            // tabular payloads become rows, anything else key,value pairs
            let table = value.get("blocks").or_else(|| value.get("rows")).and_then(Value::as_array);
            match table {
                Some(items) if items.iter().all(Value::is_array) => items
                    .iter()
                    .map(|r| r.as_array().unwrap().iter().map(scalar).collect::<Vec<_>>().join(",") + "\n")
                    .collect(),
                Some(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                    let cols: Vec<&String> = items[0].as_object().unwrap().keys().collect();
                    let mut s = cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",") + "\n";
                    for it in items {
                        s += &(cols.iter().map(|c| scalar(&it[c.as_str()])).collect::<Vec<_>>().join(",") + "\n");
                    }
                    s
                }
                _ => {
                    let mut rows = Vec::new();
                    flatten("", value, &mut rows);
                    let mut s = String::from("key,value\n");
                    for (k, v) in rows {
                        s += &format!("{k},\"{}\"\n", v.replace('"', "\"\""));
                    }
                    s
                }
            }
        }
    })
}

fn error_kind(err: &anyhow::Error) -> String {
    match err.downcast_ref::<gl2designs::Error>() {
        Some(e) => {
            let dbg = format!("{e:?}");
            dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
        }
        None => "Usage".to_string(),
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.global.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().context("configuring worker threads")?;
    }
    if cli.global.cap == Some(0) {
        bail!("--cap must be positive");
    }
    let report = match &cli.command {
        Command::Field { field } => cmd_field(field)?,
        Command::Design(c) => cmd_design(c, &cli.global)?,
        Command::Cayley(c) => cmd_cayley(c, &cli.global)?,
        Command::Code(c) => cmd_code(c, &cli.global)?,
    };
    let text = render(&report.value, cli.global.format)?;
    match &cli.global.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            let err = json!({ "error": { "kind": "CheckFailed", "message": "an internal consistency check failed; see the report" } });
            eprintln!("{err}");
            ExitCode::from(2)
        }
        Err(e) => {
            let err = json!({ "error": { "kind": error_kind(&e), "message": format!("{e:#}") } });
            eprintln!("{err}");
            ExitCode::FAILURE
        }
    }
}
