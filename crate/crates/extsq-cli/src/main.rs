//! The `extsq` command line: resolutions, extensions, Steenrod squares on
//! Ext and Adams charts.
//!
//! Exit status is 0 when everything checked passes, 1 when a verification
//! fails and 2 for usage and parse errors.

mod chart;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use extsq::chainmap::{lift_to_extension, TieBreak};
use extsq::checkpoint;
use extsq::extension::{library, library_module, ExactExtension, LIBRARY_NAMES};
use extsq::module::CompiledModule;
use extsq::presentation::Presentation;
use extsq::resolution::{resolve, Resolution};
use extsq::sq::{steenrod_squares, verify_table, DeltaTable};
use extsq::steenrod::degree_cap;
use extsq::walkthrough::{walkthrough_d0, walkthrough_e0, WalkthroughReport};

#[derive(Parser)]
#[command(name = "extsq", version, about = "Ext over the mod 2 Steenrod algebra and Steenrod squares on it")]
struct Cli {
    /// Worker threads for the linear algebra; the output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve a module; writes a checkpoint and a text dump and prints the
    /// generator counts.
    Resolve {
        /// `F2`, a shipped module such as `e0_m0`, or a `.mod` file.
        module: String,
        #[arg(long, default_value_t = 8)]
        smax: u32,
        #[arg(long, default_value_t = 44)]
        tmax: i32,
        /// Output directory; defaults to $EXTSQ_CACHE_DIR or the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print (Sq^s x, ..., Sq^0 x) for the class an extension represents.
    Sq {
        /// A shipped extension (h0..h6, c0, c1, f0, e0, d0) or an `.ext` file.
        extension: String,
        #[arg(long, value_enum, default_value_t = Tie::Natural)]
        tie_break: Tie,
    },
    /// Lift the identity of F2 to a chain map into an extension.
    Lift {
        extension: String,
        #[arg(long, value_enum, default_value_t = Tie::Natural)]
        tie_break: Tie,
    },
    /// Splice two extensions and report the class of the result.
    Splice { first: String, second: String },
    /// Check an extension for exactness, or a checkpoint for consistency.
    Verify { path: String },
    /// Check Δ tables against the homotopy equations.
    VerifyTables {
        /// Directory of `{c0,c1,f0}_{delta,higher}.tsv`; defaults to the shipped tables.
        dir: Option<PathBuf>,
    },
    /// Draw an Adams chart of a module, one dot per generator.
    Chart {
        module: String,
        #[arg(long, default_value_t = 0)]
        smin: u32,
        #[arg(long, default_value_t = 8)]
        smax: u32,
        #[arg(long, default_value_t = 0)]
        tmin: i32,
        #[arg(long, default_value_t = 44)]
        tmax: i32,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the extension for e0 = 4_5 step by step.
    WalkthroughE0,
    /// Build the extension for d0 = 4_3 step by step.
    WalkthroughD0,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Natural,
    Reversed,
}

impl From<Tie> for TieBreak {
    fn from(t: Tie) -> Self {
        match t {
            Tie::Natural => TieBreak::Natural,
            Tie::Reversed => TieBreak::Reversed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Tsv,
}

enum Failure {
    Verification(String),
    Usage(String),
}

impl From<extsq::Error> for Failure {
    fn from(e: extsq::Error) -> Self {
        use extsq::Error::*;
        match e {
            Parse { .. } | DegreeCap { .. } | Unknown(_) | Io { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Resolve { module, smax, tmax, out } => cmd_resolve(&module, smax, tmax, out),
        Command::Sq { extension, tie_break } => cmd_sq(&extension, tie_break.into()),
        Command::Lift { extension, tie_break } => cmd_lift(&extension, tie_break.into()),
        Command::Splice { first, second } => cmd_splice(&first, &second),
        Command::Verify { path } => cmd_verify(&path),
        Command::VerifyTables { dir } => cmd_verify_tables(dir.as_deref()),
        Command::Chart {
            module,
            smin,
            smax,
            tmin,
            tmax,
            format,
            out,
        } => cmd_chart(&module, (smin, smax), (tmin, tmax), format, out.as_deref()),
        Command::WalkthroughE0 => cmd_walkthrough(walkthrough_e0, 21),
        Command::WalkthroughD0 => cmd_walkthrough(walkthrough_d0, 18),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_frontier(s: u32, t: i32) -> Outcome {
    if t < 0 || t as u32 > degree_cap() {
        return Err(Failure::Usage(format!(
            "internal degree {t} is outside 0..={}",
            degree_cap()
        )));
    }
    if s > 64 {
        return Err(Failure::Usage(format!("homological degree {s} is too large")));
    }
    Ok(())
}

/// `F2`, a shipped module or a module file, with a name for output files.
fn load_module(arg: &str) -> Result<(String, Arc<CompiledModule>), Failure> {
    if arg == "F2" {
        return Ok(("F2".into(), Arc::new(CompiledModule::f2(0))));
    }
    let path = Path::new(arg);
    let presentation = if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
        Presentation::parse(&text).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?
    } else {
        library_module(arg).map_err(|_| Failure::Usage(format!("{arg}: no such file or shipped module")))?
    };
    let stem = path.file_stem().map_or(arg.to_string(), |s| s.to_string_lossy().into_owned());
    let module = presentation.compile().map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
    Ok((stem, Arc::new(module)))
}

/// A shipped extension or an extension file, refused unless exact.
fn load_extension(arg: &str) -> Result<ExactExtension, Failure> {
    let e = if LIBRARY_NAMES.contains(&arg) {
        library(arg)?
    } else if Path::new(arg).exists() {
        ExactExtension::from_file(arg).map_err(|e| Failure::from(e).prefixed(arg))?
    } else {
        return Err(Failure::Usage(format!(
            "{arg}: not a file or one of {}",
            LIBRARY_NAMES.join(", ")
        )));
    };
    let report = e.verify_exact();
    if !report.is_exact() {
        let mut msg = format!("{arg} is not exact:");
        for f in &report.failures {
            write!(msg, "\n  {f}").unwrap();
        }
        return Err(Failure::Verification(msg));
    }
    Ok(e)
}

impl Failure {
    fn prefixed(self, p: &str) -> Failure {
        match self {
            Failure::Usage(m) => Failure::Usage(format!("{p}: {m}")),
            Failure::Verification(m) => Failure::Verification(format!("{p}: {m}")),
        }
    }
}

/// The resolution of F2 through `(s, t)`, through the checkpoint in
/// `$EXTSQ_CACHE_DIR` when that is set.
fn f2_resolution(s: u32, t: i32) -> Result<Resolution, Failure> {
    check_frontier(s, t)?;
    let module = Arc::new(CompiledModule::f2(0));
    let Some(dir) = std::env::var_os("EXTSQ_CACHE_DIR").map(PathBuf::from) else {
        return Ok(resolve(module, s, t));
    };
    let path = dir.join("F2.res");
    if let Ok(mut res) = checkpoint::load(&path) {
        if res.module().name() == "F2" && res.module().total_dim() == 1 && res.module().min_degree() == 0 {
            if res.s_max() >= s && res.t_max() >= t {
                return Ok(res);
            }
            res.extend(s.max(res.s_max()), t.max(res.t_max()));
            save_quietly(&res, &dir, &path);
            return Ok(res);
        }
    }
    let res = resolve(module, s, t);
    save_quietly(&res, &dir, &path);
    Ok(res)
}

fn save_quietly(res: &Resolution, dir: &Path, path: &Path) {
    let saved = fs::create_dir_all(dir).map_err(|e| e.to_string()).and_then(|()| {
        let tmp = path.with_extension("res.tmp");
        checkpoint::save(res, &tmp).map_err(|e| e.to_string())?;
        fs::rename(&tmp, path).map_err(|e| e.to_string())
    });
    if let Err(e) = saved {
        eprintln!("warning: could not write {}: {e}", path.display());
    }
}

fn count_table(res: &Resolution) -> String {
    let x_max = (res.t_max() - res.module().min_degree()).max(0);
    let mut out = String::from("s\\t-s");
    for x in 0..=x_max {
        write!(out, " {x:>2}").unwrap();
    }
    out.push('\n');
    for s in (0..=res.s_max()).rev() {
        write!(out, "{s:>5}").unwrap();
        for x in 0..=x_max {
            let t = x + s as i32 + res.module().min_degree();
            let n = res.generators(s).iter().filter(|g| g.degree == t).count();
            if n == 0 || t > res.t_max() {
                out.push_str("  .");
            } else {
                write!(out, " {n:>2}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn cmd_resolve(module: &str, s: u32, t: i32, out: Option<PathBuf>) -> Outcome {
    check_frontier(s, t)?;
    let (name, m) = load_module(module)?;
    let res = resolve(m, s, t);
    let dir = out
        .or_else(|| std::env::var_os("EXTSQ_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let stem = format!("{name}_s{s}_t{t}");
    let ckpt = dir.join(format!("{stem}.res"));
    let text = dir.join(format!("{stem}.txt"));
    checkpoint::save(&res, &ckpt)?;
    fs::write(&text, res.to_text()).map_err(|e| Failure::Usage(format!("{}: {e}", text.display())))?;
    print!("{}", count_table(&res));
    println!("checkpoint {}", ckpt.display());
    println!("text {}", text.display());
    println!("sha256 {}", checkpoint::canonical_hash(&res));
    Ok(())
}

fn cmd_sq(arg: &str, tie: TieBreak) -> Outcome {
    let e = load_extension(arg)?;
    let res = f2_resolution(2 * e.length() as u32, 2 * e.t())?;
    println!("{}", steenrod_squares(&res, &e, tie)?);
    Ok(())
}

fn extension_frontier(e: &ExactExtension) -> (u32, i32) {
    let t = e.modules().iter().map(|m| m.max_degree()).max().unwrap_or(0).max(e.t());
    (e.length() as u32, t)
}

fn cmd_lift(arg: &str, tie: TieBreak) -> Outcome {
    let e = load_extension(arg)?;
    let (s, t) = extension_frontier(&e);
    let res = f2_resolution(s, t)?;
    let c = lift_to_extension(&res, &e, tie)?;
    for (g, v) in c.describe(&res, &e) {
        println!("{g} -> {v}");
    }
    println!("top cocycle {{{}}}", c.top_cocycle());
    Ok(())
}

fn cmd_splice(first: &str, second: &str) -> Outcome {
    let a = load_extension(first)?;
    let b = load_extension(second)?;
    let e = a.splice(&b);
    let report = e.verify_exact();
    if !report.is_exact() {
        return Err(Failure::Verification(format!(
            "splice is not exact: {}",
            report.failures.join("; ")
        )));
    }
    for (g, img) in e.boundary_list() {
        println!("{g} -> {img}");
    }
    let (s, t) = extension_frontier(&e);
    let res = f2_resolution(s, t)?;
    let top = lift_to_extension(&res, &e, TieBreak::Natural)?.top_cocycle();
    println!("length {} degree {}", e.length(), e.t());
    println!("top cocycle {{{}}}", if top.is_zero() { String::new() } else { top.to_string() });
    Ok(())
}

fn cmd_verify(arg: &str) -> Outcome {
    if arg.ends_with(".res") {
        let res = checkpoint::load(arg).map_err(|e| Failure::Verification(format!("{arg}: {e}")))?;
        let n: usize = (0..=res.s_max()).map(|s| res.generators(s).len()).sum();
        println!(
            "{arg}: {} through s = {}, t = {}, {n} generators, sha256 {}",
            res.module().name(),
            res.s_max(),
            res.t_max(),
            checkpoint::canonical_hash(&res)
        );
        return Ok(());
    }
    let e = load_extension(arg)?;
    let (s, t) = extension_frontier(&e);
    println!("{}: exact, length {}, degree {}", e.name(), s, e.t());
    let res = f2_resolution(s, t)?;
    let top = lift_to_extension(&res, &e, TieBreak::Natural)?.top_cocycle();
    println!("represents {{{}}}", if top.is_zero() { String::new() } else { top.to_string() });
    Ok(())
}

fn cmd_verify_tables(dir: Option<&Path>) -> Outcome {
    let mut failed = false;
    let mut found = false;
    for name in ["c0", "c1", "f0"] {
        let (delta, higher) = match dir {
            None => (
                DeltaTable::library(name)?,
                DeltaTable { entries: Vec::new() },
            ),
            Some(d) => {
                let read = |suffix: &str| -> Result<Option<DeltaTable>, Failure> {
                    let p = d.join(format!("{name}_{suffix}.tsv"));
                    if !p.exists() {
                        return Ok(None);
                    }
                    DeltaTable::from_file(&p).map(Some).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
                };
                match (read("delta")?, read("higher")?) {
                    (None, None) => continue,
                    (a, b) => (
                        a.unwrap_or(DeltaTable { entries: Vec::new() }),
                        b.unwrap_or(DeltaTable { entries: Vec::new() }),
                    ),
                }
            }
        };
        found = true;
        let e = library(name)?;
        let res = f2_resolution(2 * e.length() as u32, 2 * e.t())?;
        let report = verify_table(&res, &e, &delta.merge(higher))?;
        for (label, zero) in [("delta", true), ("higher", false)] {
            let rows: Vec<&String> = report.failures.iter().filter(|f| f.starts_with("Δ0") == zero).collect();
            if rows.is_empty() {
                println!("{name}_{label}: ok");
            } else {
                failed = true;
                println!("{name}_{label}: FAIL");
                for r in rows {
                    println!("  {r}");
                }
            }
        }
        println!("{name}: {} equations checked", report.checked);
    }
    if !found {
        return Err(Failure::Usage("no tables found".into()));
    }
    if failed {
        Err(Failure::Verification("some tables fail".into()))
    } else {
        Ok(())
    }
}

fn cmd_chart(module: &str, s_range: (u32, u32), t_range: (i32, i32), format: Format, out: Option<&Path>) -> Outcome {
    check_frontier(s_range.1, t_range.1)?;
    let (name, m) = load_module(module)?;
    let counts = if s_range.0 > s_range.1 || t_range.0 > t_range.1 {
        Vec::new()
    } else {
        let res = if name == "F2" {
            f2_resolution(s_range.1, t_range.1)?
        } else {
            resolve(m, s_range.1, t_range.1)
        };
        chart::counts(&res, s_range, t_range)
    };
    let text = match format {
        Format::Tsv => chart::tsv(&counts),
        Format::Svg => chart::svg(&format!("Ext of {name}"), &counts, s_range, t_range),
    };
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_walkthrough(run: fn(&Resolution) -> extsq::Result<WalkthroughReport>, t: i32) -> Outcome {
    let res = f2_resolution(8, 2 * t)?;
    let report = run(&res)?;
    print!("{report}");
    match report.first_divergence() {
        None => Ok(()),
        Some(step) => Err(Failure::Verification(format!("first divergence: {step}"))),
    }
}
