//! Command-line front end with a content-addressed result cache.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::complex::Window;
use crate::diagram::{parse_diagram, LinkDiagram};
use crate::khovanov::{dense_dims, dense_dims_by_h, khr2_dims, kh_to_khr2, lee_dims_by_h};
use crate::lasagna::{s02_dims, HandlebodySpec, LasagnaError};
use crate::rational::half;
use crate::rw::{rw_minus, rw_plus, RwError};

/// Bumped whenever a change can alter reported numbers.
pub const ALGORITHM_VERSION: &str = "lasagna-1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lasagna", version, about = "KhR2, Rozansky-Willis and lasagna module dimensions over Q")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON instead of TSV
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Cache directory (falls back to LASAGNA_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Ring {
    Rational,
    Lee,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// KhR2 dimensions of a closed diagram
    Kh {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, value_enum, default_value = "rational")]
        ring: Ring,
    },
    /// Rozansky-Willis homology through twist insertion
    Rw {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_twists: usize,
        /// the minus variant
        #[arg(long)]
        minus: bool,
    },
    /// Lasagna module dimensions of the 2-handlebody attached along the regions
    Lasagna {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        alpha: Vec<i64>,
        #[arg(long, default_value_t = 3)]
        r_max: usize,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// lift the desk-scale size guards
        #[arg(long)]
        allow_large: bool,
    },
    /// Total Lee homology dimension
    Lee { file: PathBuf },
    /// Dense-cube oracles
    Oracle {
        #[arg(value_enum)]
        what: OracleKind,
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Kh,
    Lee,
}

/// Result of one job: standard output and exit code.
struct Outcome {
    out: String,
    code: i32,
}

struct Failure {
    msg: String,
    code: i32,
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure { msg: e.to_string(), code: EXIT_INPUT }
}

fn window(s: &Option<String>) -> Result<Window, Failure> {
    match s {
        Some(s) => Window::parse(s).map_err(input),
        None => Ok(Window::all()),
    }
}

fn load(path: &Path) -> Result<LinkDiagram, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_diagram(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn by_h_output(t: &std::collections::BTreeMap<i64, usize>, json: bool) -> String {
    if json {
        let v: Vec<_> = t.iter().map(|(h, d)| json!({"h": half(*h), "dim": d.to_string()})).collect();
        format!("{}\n", json!({"dims": v, "total": t.values().sum::<usize>()}))
    } else {
        t.iter().map(|(h, d)| format!("{}\t{}\n", half(*h), d)).collect()
    }
}

fn table_output(t: &crate::complex::DimTable, json: bool) -> String {
    if json {
        format!("{}\n", json!({"dims": t.to_json_value()}))
    } else {
        t.to_tsv()
    }
}

fn rw_failure(e: RwError) -> Failure {
    let code = if matches!(e, RwError::NotStabilized { .. }) { EXIT_UNSTABLE } else { EXIT_INPUT };
    Failure { msg: e.to_string(), code }
}

fn lasagna_failure(e: LasagnaError) -> Failure {
    let code = match e {
        LasagnaError::Input(_) | LasagnaError::Kh(_) => EXIT_INPUT,
        // a movie that cannot be realised is a bug, not bad input
        LasagnaError::Move(_) => 1,
    };
    Failure { msg: e.to_string(), code }
}

fn compute(cmd: &Cmd, d: &LinkDiagram, json: bool, err: &mut dyn Write) -> Result<Outcome, Failure> {
    let ok = |out| Ok(Outcome { out, code: EXIT_OK });
    match cmd {
        Cmd::Kh { window: w, ring, .. } => {
            let w = window(w)?;
            match ring {
                Ring::Rational => ok(table_output(&khr2_dims(d, &w).map_err(input)?, json)),
                Ring::Lee => ok(by_h_output(&lee_dims_by_h(d).map_err(input)?, json)),
            }
        }
        Cmd::Rw { window: w, max_twists, minus, .. } => {
            let w = window(w)?;
            let r = if *minus { rw_minus(d, &w, *max_twists) } else { rw_plus(d, &w, *max_twists) }.map_err(rw_failure)?;
            let _ = writeln!(err, "window {}; stabilized: {}", r.window, r.is_stabilized());
            let dims = r.dims.restrict(&r.window);
            if json {
                let mut v = r.to_json();
                v["dims"] = dims.to_json_value();
                ok(format!("{v}\n"))
            } else {
                ok(dims.to_tsv())
            }
        }
        Cmd::Lasagna { alpha, r_max, window: w, allow_large, .. } => {
            let w = window(w)?;
            let spec = HandlebodySpec { link: d.clone(), alpha: alpha.clone(), allow_large: *allow_large };
            let r = s02_dims(&spec, &w, *r_max).map_err(lasagna_failure)?;
            let _ = writeln!(err, "stabilized: {}", r.stabilized);
            for g in &r.unstable {
                let _ = writeln!(err, "not stable at ({}, {})", half(g.h2), half(g.q2));
            }
            let out = if json { format!("{}\n", r.to_json()) } else { r.dims.to_tsv() };
            Ok(Outcome { out, code: if r.stabilized { EXIT_OK } else { EXIT_UNSTABLE } })
        }
        Cmd::Lee { .. } => {
            let t = lee_dims_by_h(d).map_err(input)?;
            let total: usize = t.values().sum();
            ok(if json { format!("{}\n", json!({"total": total})) } else { format!("{total}\n") })
        }
        Cmd::Oracle { what, window: w, .. } => {
            let w = window(w)?;
            match what {
                OracleKind::Kh => {
                    let t = kh_to_khr2(&dense_dims(d).map_err(input)?, d.writhe()).restrict(&w);
                    ok(table_output(&t, json))
                }
                OracleKind::Lee => {
                    let t = dense_dims_by_h(d, &crate::cobcat::FrobeniusSpec::lee()).map_err(input)?;
                    let t = t.into_iter().map(|(h, n)| (-2 * h, n)).collect();
                    ok(by_h_output(&t, json))
                }
            }
        }
    }
}

fn file_of(cmd: &Cmd) -> &Path {
    match cmd {
        Cmd::Kh { file, .. } | Cmd::Rw { file, .. } | Cmd::Lasagna { file, .. } | Cmd::Lee { file } => file,
        Cmd::Oracle { file, .. } => file,
    }
}

/// The command with its file replaced by the diagram's canonical form.
fn cache_key(cmd: &Cmd, d: &LinkDiagram, json: bool) -> String {
    let cmd_text = format!("{cmd:?}");
    let file = format!("{:?}", file_of(cmd));
    let semantic = cmd_text.replacen(&file, "_", 1);
    let mut h = Sha256::new();
    for part in [ALGORITHM_VERSION, &semantic, if json { "json" } else { "tsv" }, &d.to_json()] {
        h.update(part.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

fn cache_dir(c: &Common) -> Option<PathBuf> {
    if c.no_cache {
        return None;
    }
    c.cache_dir.clone().or_else(|| std::env::var_os("LASAGNA_CACHE_DIR").map(PathBuf::from)).or_else(|| {
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
        Some(base.join("lasagna"))
    })
}

fn cache_read(dir: &Path, key: &str) -> Option<Outcome> {
    let text = std::fs::read_to_string(dir.join(format!("{key}.json"))).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    Some(Outcome { out: v.get("stdout")?.as_str()?.to_string(), code: v.get("exit")?.as_i64()? as i32 })
}

/// Write-then-rename, so concurrent readers never see a partial entry.
fn cache_write(dir: &Path, key: &str, o: &Outcome) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let body = json!({"version": ALGORITHM_VERSION, "stdout": o.out, "exit": o.code}).to_string();
    let tmp = dir.join(format!("{key}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, dir.join(format!("{key}.json")))
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let d = match load(file_of(&cli.cmd)) {
        Ok(d) => d,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            return f.code;
        }
    };
    let dir = cache_dir(&cli.common);
    let key = cache_key(&cli.cmd, &d, cli.common.json);
    if let Some(o) = dir.as_deref().and_then(|p| cache_read(p, &key)) {
        log::debug!("cache hit {key}");
        let _ = write!(out, "{}", o.out);
        return o.code;
    }
    match compute(&cli.cmd, &d, cli.common.json, err) {
        Ok(o) => {
            if let Some(p) = &dir {
                if let Err(e) = cache_write(p, &key, &o) {
                    log::warn!("cache write to {} failed: {e}", p.display());
                }
            }
            let _ = write!(out, "{}", o.out);
            o.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
