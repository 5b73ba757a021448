use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use spantree_hfk::diagram::{parse_pd, EdgeOrientation};
use spantree_hfk::homology::RankStrategy;
use spantree_hfk::marking::MarkingSpec;
use spantree_hfk::pipeline::{run, CheckLevel, MarkingChoice, PipelineError, Report, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Check {
    None,
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Orientation {
    SmallerTail,
    LargerTail,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rank {
    Auto,
    FractionFree,
}

/// Delta-graded knot Floer homology of a link diagram, computed from the
/// spanning trees of its black graph.
#[derive(Debug, Parser)]
#[command(name = "spantree-hfk", version)]
struct Args {
    /// PD code, e.g. "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]" or JSON [[1,4,2,5],...]
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pd: Option<String>,
    /// File with one `name: PD` entry per line (# starts a comment)
    #[arg(long)]
    file: Option<PathBuf>,
    /// Crossing weights, comma separated (default 2,4,8,...)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    omega: Option<Vec<i64>>,
    /// JSON marking: {"points_per_arc": {"<arc label>": k}, "outer_arc": label}
    #[arg(long, conflicts_with = "points_per_arc")]
    marking: Option<PathBuf>,
    /// Put the same number of marked points on every arc
    #[arg(long)]
    points_per_arc: Option<usize>,
    /// Face id to treat as unbounded
    #[arg(long)]
    outer_face: Option<usize>,
    /// Black-graph edge orientation convention
    #[arg(long, value_enum, default_value = "smaller-tail")]
    orientation: Orientation,
    #[arg(long, value_enum, default_value = "fast")]
    check: Check,
    /// Rank algorithm: certified residue-field ranks or fraction-free elimination only
    #[arg(long, value_enum, default_value = "auto")]
    rank: Rank,
    /// Emit JSON instead of a table
    #[arg(long)]
    json: bool,
    /// Leave stage timings out of the report
    #[arg(long)]
    no_timings: bool,
    #[arg(long)]
    dump_trees: bool,
    #[arg(long)]
    dump_complex: bool,
    /// Use the mirror image of the diagram
    #[arg(long)]
    mirror: bool,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 1, message }
}

fn config(args: &Args) -> Result<RunConfig, Failure> {
    let marking = match (&args.marking, args.points_per_arc) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            MarkingChoice::Spec(MarkingSpec::from_json(&text).map_err(|e| input_error(format!("marking: {e}")))?)
        }
        (None, Some(k)) => MarkingChoice::Uniform(k),
        (None, None) => MarkingChoice::Auto,
    };
    Ok(RunConfig {
        omega: args.omega.clone(),
        marking,
        outer_face: args.outer_face,
        orientation: match args.orientation {
            Orientation::SmallerTail => EdgeOrientation::SmallerTail,
            Orientation::LargerTail => EdgeOrientation::LargerTail,
        },
        check: match args.check {
            Check::None => CheckLevel::None,
            Check::Fast => CheckLevel::Fast,
            Check::Full => CheckLevel::Full,
        },
        rank: match args.rank {
            Rank::Auto => RankStrategy::Auto,
            Rank::FractionFree => RankStrategy::FractionFree,
        },
        mirror: args.mirror,
        dump_trees: args.dump_trees,
        dump_complex: args.dump_complex,
    })
}

fn inputs(args: &Args) -> Result<Vec<(String, String)>, Failure> {
    if let Some(pd) = &args.pd {
        return Ok(vec![("input".to_string(), pd.clone())]);
    }
    let path = args.file.as_ref().expect("clap requires --pd or --file");
    let text =
        std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, pd) = line
            .split_once(':')
            .ok_or_else(|| input_error(format!("{}:{}: expected `name: PD`", path.display(), k + 1)))?;
        out.push((name.trim().to_string(), pd.trim().to_string()));
    }
    Ok(out)
}

fn run_one(pd: &str, cfg: &RunConfig, timings: bool) -> Result<Report, Failure> {
    let d = parse_pd(pd).map_err(PipelineError::from)?;
    let report = run(&d, cfg)?;
    Ok(if timings { report } else { report.without_timings() })
}

fn table(name: &str, r: &Report) -> String {
    let mut s = String::new();
    let d = &r.diagram;
    let _ = writeln!(
        s,
        "{name}: n={} m={} components={} n+={} n-={} trees={}",
        d.n, d.m, d.components, d.n_plus, d.n_minus, d.trees
    );
    let ranks: Vec<String> = r.ranks.0.keys().map(|g| format!("{}: {}", label(*g), r.ranks.0[g])).collect();
    let _ = writeln!(s, "  delta ranks  {{{}}}", ranks.join(", "));
    let _ = writeln!(
        s,
        "  total {}  width {}  thin {}{}",
        r.total_rank,
        r.width.map_or("-".to_string(), |w| w.to_string()),
        r.thin,
        r.supported_grading.as_ref().map_or(String::new(), |g| format!("  supported in {g}"))
    );
    let checks = serde_json::to_value(&r.checks).unwrap_or_default();
    if let Some(obj) = checks.as_object().filter(|o| !o.is_empty()) {
        let parts: Vec<String> = obj
            .iter()
            .map(|(k, v)| format!("{k} {}", if v.as_bool() == Some(true) { "ok" } else { "FAILED" }))
            .collect();
        let _ = writeln!(s, "  checks  {}", parts.join(", "));
    }
    if let Some(t) = &r.timings {
        let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k} {v:.1}ms")).collect();
        let _ = writeln!(s, "  time  {}", parts.join(", "));
    }
    s
}

fn label(g2: i64) -> String {
    if g2 % 2 == 0 {
        (g2 / 2).to_string()
    } else {
        format!("{g2}/2")
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let (cfg, inputs) = match config(&args).and_then(|c| Ok((c, inputs(&args)?))) {
        Ok(x) => x,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let single = args.pd.is_some();
    let mut code = 0u8;
    let mut json_out = Vec::new();
    for (name, pd) in &inputs {
        match run_one(pd, &cfg, !args.no_timings) {
            Ok(report) => {
                if !report.passed() {
                    code = code.max(3);
                    eprintln!("error: {name}: self-check failed");
                }
                if args.json {
                    json_out.push(if single {
                        serde_json::to_value(&report).expect("report serializes")
                    } else {
                        serde_json::json!({ "name": name, "report": report })
                    });
                } else {
                    print!("{}", table(name, &report));
                }
            }
            Err(f) => {
                code = code.max(f.code);
                eprintln!("error: {name}: {}", f.message);
                if args.json && !single {
                    json_out.push(serde_json::json!({ "name": name, "error": f.message, "exit_code": f.code }));
                }
            }
        }
    }
    if args.json && !json_out.is_empty() {
        let value = if single { json_out.pop().expect("one report") } else { serde_json::Value::Array(json_out) };
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    }
    ExitCode::from(code)
}
