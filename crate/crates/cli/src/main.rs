//! `gex` — evaluate `.geo` scripts, explore constructions, run the
//! built-in property corpus, and render figures.
//!
//! Exit codes: 0 success, 1 a checked property failed (assertion or
//! corpus row), 2 usage / parse / evaluation error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gex_core::corpus;
use gex_core::detect::DetectorConfig;
use gex_core::explorer::{self, Menu, StartConfig};
use gex_core::geom::GeoObject;
use gex_core::lang;
use gex_core::render;
use gex_core::sampler::{self, ConstraintSet};
use gex_core::triangle::Triangle;

#[derive(Parser)]
#[command(name = "gex", version, about = "Gergonne-point discovery engine")]
struct Cli {
    /// Worker threads (default: GEX_THREADS env var, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a script on one triangle and check its assertions.
    Eval {
        script: PathBuf,
        /// Side lengths "a,b,c".
        #[arg(long, value_name = "a,b,c", conflicts_with = "seed")]
        triangle: Option<String>,
        /// Sample a triangle satisfying the script constraints.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Enumerate construction sequences and catalog detected relations.
    Explore {
        /// Starting figure id, e.g. gergonne-point, gergonne-cevian,
        /// two-cevians:gergonne,nagel, cevian-center:incenter,
        /// pararadius, parachord, perpendicular-feet.
        #[arg(long)]
        start: String,
        /// Construction depth (0, 1 or 2).
        #[arg(long, default_value_t = 1)]
        depth: u8,
        /// Extra shape constraints, ';'-separated, e.g.
        /// "ratio(a, b, c) = 7:9:10".
        #[arg(long)]
        constraints: Option<String>,
        /// Construction menu TOML (default: built-in menu).
        #[arg(long)]
        menu: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the catalog JSON here (default: stdout summary only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the built-in property corpus at both precisions.
    Corpus {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the structured report JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Render a script as an SVG figure.
    Render {
        script: PathBuf,
        /// Side lengths "a,b,c".
        #[arg(long, value_name = "a,b,c")]
        triangle: String,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("GEX_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match cli.cmd {
        Cmd::Eval {
            script,
            triangle,
            seed,
        } => cmd_eval(&script, triangle.as_deref(), seed),
        Cmd::Explore {
            start,
            depth,
            constraints,
            menu,
            seed,
            out,
        } => cmd_explore(&start, depth, constraints.as_deref(), menu.as_deref(), seed, out.as_deref()),
        Cmd::Corpus {
            samples,
            seed,
            json,
        } => cmd_corpus(samples, seed, json.as_deref()),
        Cmd::Render {
            script,
            triangle,
            out,
        } => cmd_render(&script, &triangle, &out),
    }
}

fn usage_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_sides(spec: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("--triangle {spec:?}: {e}"))?;
    match parts.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(format!("--triangle {spec:?}: expected three side lengths")),
    }
}

fn load_script(path: &std::path::Path) -> Result<lang::Script, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    lang::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// 15 significant digits, the screening precision of the engine.
fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

fn cmd_eval(path: &std::path::Path, triangle: Option<&str>, seed: Option<u64>) -> ExitCode {
    let script = match load_script(path) {
        Ok(s) => s,
        Err(e) => return usage_err(e),
    };
    let tri = match triangle {
        Some(spec) => match parse_sides(spec).and_then(|(a, b, c)| {
            Triangle::from_sides(a, b, c).map_err(|e| e.to_string())
        }) {
            Ok(t) => t,
            Err(e) => return usage_err(e),
        },
        None => {
            let cs = ConstraintSet::new(script.constraints.clone());
            match sampler::sample(&cs, 1, seed.unwrap_or(0)) {
                Ok(s) => s[0].triangle,
                Err(e) => return usage_err(e),
            }
        }
    };
    let env = match lang::evaluate(&script, &tri) {
        Ok(env) => env,
        Err(e) => return usage_err(e),
    };
    println!(
        "triangle a={} b={} c={}",
        sig15(tri.a),
        sig15(tri.b),
        sig15(tri.c)
    );
    for (name, obj) in &env.bindings {
        match obj {
            GeoObject::Point(p) => println!("{name} = point({}, {})", sig15(p.x), sig15(p.y)),
            GeoObject::Line(l) => println!(
                "{name} = line({}, {}, {})",
                sig15(l.a),
                sig15(l.b),
                sig15(l.c)
            ),
            GeoObject::Circle(c) => println!(
                "{name} = circle({}, {}; r={})",
                sig15(c.center.x),
                sig15(c.center.y),
                sig15(c.radius)
            ),
            GeoObject::Scalar(s) => println!("{name} = {}", sig15(*s)),
        }
    }
    let mut all_pass = true;
    for a in &env.asserts {
        all_pass &= a.pass;
        println!(
            "assert #{} {}: {} (residual {})",
            a.index,
            a.pred,
            if a.pass { "pass" } else { "FAIL" },
            sig15(a.residual)
        );
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_explore(
    start: &str,
    depth: u8,
    constraints: Option<&str>,
    menu_path: Option<&std::path::Path>,
    seed: u64,
    out: Option<&std::path::Path>,
) -> ExitCode {
    if depth > 2 {
        return usage_err(format!("--depth {depth}: only depths 0, 1 and 2 are supported"));
    }
    let id = match StartConfig::parse_id(start) {
        Some(id) => id,
        None => return usage_err(format!("--start {start:?}: unknown starting figure")),
    };
    let mut config = StartConfig::new(id);
    if let Some(cs) = constraints {
        config.constraints = cs
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
    }
    let menu = match menu_path {
        Some(p) => {
            let text = match fs::read_to_string(p) {
                Ok(t) => t,
                Err(e) => return usage_err(format!("{}: {e}", p.display())),
            };
            match Menu::from_toml(&text) {
                Ok(m) => m,
                Err(e) => return usage_err(format!("{}: {e}", p.display())),
            }
        }
        None => Menu::default_menu(),
    };
    let det = DetectorConfig {
        seed,
        ..DetectorConfig::default()
    };
    let catalog = match explorer::run(&config, depth, &menu, &det) {
        Ok(c) => c,
        Err(e) => return usage_err(e),
    };
    let found = catalog.entries.len();
    let trivial = found - catalog.nontrivial().count();
    println!(
        "sequences tried: {} (skipped {})",
        catalog.sequences_tried, catalog.sequences_skipped
    );
    println!("relations found: {found} ({trivial} filtered as trivial)");
    if let Some(path) = out {
        let json = match serde_json::to_string_pretty(&catalog) {
            Ok(j) => j,
            Err(e) => return usage_err(e),
        };
        if let Err(e) = fs::write(path, json + "\n") {
            return usage_err(format!("{}: {e}", path.display()));
        }
        println!("catalog written to {}", path.display());
    }
    ExitCode::SUCCESS
}

fn cmd_corpus(samples: usize, seed: u64, json: Option<&std::path::Path>) -> ExitCode {
    let entries = match corpus::builtin_entries() {
        Ok(e) => e,
        Err(e) => return usage_err(e),
    };
    let report = corpus::run_corpus(&entries, samples, seed);
    print!("{}", report.table());
    if let Some(path) = json {
        let text = match serde_json::to_string_pretty(&report) {
            Ok(j) => j,
            Err(e) => return usage_err(e),
        };
        if let Err(e) = fs::write(path, text + "\n") {
            return usage_err(format!("{}: {e}", path.display()));
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_render(path: &std::path::Path, triangle: &str, out: &std::path::Path) -> ExitCode {
    let script = match load_script(path) {
        Ok(s) => s,
        Err(e) => return usage_err(e),
    };
    let tri = match parse_sides(triangle)
        .and_then(|(a, b, c)| Triangle::from_sides(a, b, c).map_err(|e| e.to_string()))
    {
        Ok(t) => t,
        Err(e) => return usage_err(e),
    };
    let svg = match render::render_svg(&script, &tri) {
        Ok(s) => s,
        Err(e) => return usage_err(e),
    };
    if let Err(e) = fs::write(out, svg) {
        return usage_err(format!("{}: {e}", out.display()));
    }
    ExitCode::SUCCESS
}
