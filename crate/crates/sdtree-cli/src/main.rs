//! Command-line surface over the sdtree library: build the named tree
//! families, print counting tables, evaluate the balance formulas, run the
//! brute-force verifiers, and measure binary64 summation schedules.
//!
//! Exit codes: 0 success, 1 domain or input error, 2 usage error (from the
//! argument parser), 3 verification failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sdtree::counting::{
    alpha, dac_products, products_for_form, s_bounds, theta_table, total_products,
    DacProductsMethod, ThetaView,
};
use sdtree::formulas::{
    c_asc, c_desc, c_max, delta, delta_cfb, normalized_colless, sigma, takagi_dyadic, CAscMethod,
    DeltaMethod, SigmaMethod, TakagiMethod,
};
use sdtree::fp::{format_hex, parse_values, ratio_string};
use sdtree::mind::{
    binary_decomposition, build_mind, enumerate_mind, mind_ascending, mind_descending, MinDSpec,
};
use sdtree::oracle::{verify_colless_extremes, verify_mind, verify_theta, Report};
use sdtree::sumplan::{
    error_report, evaluate, heuristic_mind_plan, plan_in_input_order, SummationPlan,
};
use sdtree::tree::{
    make_complete_full_binary, make_divide_and_conquer, make_ladder, make_perfect, Tree,
};

type CliResult = Result<u8, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(
    name = "sdtree",
    version,
    about = "Reduction trees: construction, counting, balance formulas, summation schedules"
)]
struct Cli {
    /// Cap the worker thread pool (default: one thread per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one tree and print it.
    Construct {
        #[command(subcommand)]
        shape: Shape,
    },
    /// Shape and labeled-product counts.
    Count {
        #[command(subcommand)]
        what: Count,
    },
    /// Node-count and Colless-index formulas.
    Formulas {
        #[command(subcommand)]
        what: Formula,
    },
    /// Takagi function on the dyadic grid: tau(r / 2^k) for r = 0..=2^k.
    Takagi(TakagiArgs),
    /// List whole shape catalogs or minimum-D classes.
    Enumerate {
        #[command(subcommand)]
        what: Enumerate,
    },
    /// Brute-force checks against the shape catalog; exits 3 on failure.
    Verify {
        #[command(subcommand)]
        check: Verify,
    },
    /// Binary64 summation schedules over a file of values.
    Sum {
        #[command(subcommand)]
        what: Sum,
    },
    /// One table row per n: node counts and Colless landmarks.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeFormat {
    Newick,
    Dot,
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalarFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Shape {
    /// Left-deep chain; the serial evaluation order.
    Ladder(ShapeArgs),
    /// Halving splits, ceiling half on the left.
    Dac(ShapeArgs),
    /// Complete tree, last level filled left to right.
    Cfb(ShapeArgs),
    /// All-S tree; n must be a power of two.
    Perfect(ShapeArgs),
    /// Minimum-D tree: perfect blocks on a base tree.
    Mind(MindArgs),
}

#[derive(Args)]
struct ShapeArgs {
    /// Leaf count.
    #[arg(long)]
    n: u64,
    #[arg(long, value_enum, default_value_t = TreeFormat::Newick)]
    format: TreeFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum MindBase {
    Ladder,
    Dac,
}

#[derive(Clone, Copy, ValueEnum)]
enum MindOrder {
    /// Block sizes descending along the evaluation order (largest last).
    Desc,
    /// Block sizes ascending along the evaluation order.
    Asc,
}

#[derive(Args)]
struct MindArgs {
    /// Leaf count.
    #[arg(long)]
    n: u64,
    /// Base tree carrying one perfect block per leaf.
    #[arg(long, value_enum, default_value_t = MindBase::Ladder)]
    base: MindBase,
    /// How block sizes run along the base leaves.
    #[arg(long, value_enum, default_value_t = MindOrder::Desc)]
    order: MindOrder,
    #[arg(long, value_enum, default_value_t = TreeFormat::Newick)]
    format: TreeFormat,
}

#[derive(Subcommand)]
enum Count {
    /// Number of shapes on n leaves.
    Alpha {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// Shapes by S count (or D count), one row per n up to n-max.
    Theta {
        #[arg(long)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = ThetaViewArg::S)]
        view: ThetaViewArg,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Labeled products: all of them, or those of one form via --s.
    Products {
        #[arg(long)]
        n: u64,
        /// S count of the form; omit for the total over all forms.
        #[arg(long)]
        s: Option<u64>,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// Products evaluating on the divide-and-conquer tree.
    DacProducts {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = DacMethodArg::Closed)]
        method: DacMethodArg,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// Attainable S-count range for n leaves.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaViewArg {
    S,
    D,
}

#[derive(Clone, Copy, ValueEnum)]
enum DacMethodArg {
    Closed,
    Recurrence,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaMethodArg {
    Recursive,
    Levelwise,
    Bitwise,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaMethodArg {
    Recursive,
    Levelwise,
    Explicit,
    Recurrence,
    Midpoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum CAscMethodArg {
    Recurrence,
    Closed,
}

#[derive(Subcommand)]
enum Formula {
    /// S count of the divide-and-conquer tree.
    Sigma {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = SigmaMethodArg::Recursive)]
        method: SigmaMethodArg,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// D count of the divide-and-conquer tree.
    Delta {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = DeltaMethodArg::Recursive)]
        method: DeltaMethodArg,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// Smallest Colless index over minimum-D trees.
    Cdesc {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// Largest Colless index over minimum-D trees.
    Casc {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = CAscMethodArg::Recurrence)]
        method: CAscMethodArg,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// Colless index c rescaled to [0, 1] between delta(n) and (n-1)(n-2)/2.
    Normalized {
        #[arg(long)]
        c: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TakagiMethodArg {
    ViaDelta,
    Series,
    Weighted,
}

#[derive(Args)]
struct TakagiArgs {
    /// Grid depth; emits 2^k + 1 rows.
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value_t = TakagiMethodArg::ViaDelta)]
    method: TakagiMethodArg,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

/// Emission cap for `takagi`; the library evaluates deeper grids pointwise.
const TAKAGI_EMIT_MAX_K: u32 = 20;

#[derive(Clone, Copy, ValueEnum)]
enum ListFormat {
    Csv,
    Newick,
    Json,
}

#[derive(Subcommand)]
enum Enumerate {
    /// Every shape on n leaves (n <= 18).
    Shapes {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ListFormat::Csv)]
        format: ListFormat,
    },
    /// One representative per minimum-D class.
    Mind {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ListFormat::Csv)]
        format: ListFormat,
    },
}

#[derive(Args)]
struct VerifyRange {
    /// Check every n from 1 to this bound.
    #[arg(long)]
    n_max: u64,
}

#[derive(Subcommand)]
enum Verify {
    /// S-count histograms against the counting formula.
    Theta(VerifyRange),
    /// Minimum D counts and minimizer classes.
    Mind(VerifyRange),
    /// Colless extremes and the shapes attaining them.
    Colless(VerifyRange),
    /// All of the above.
    All(VerifyRange),
}

#[derive(Clone, Copy, ValueEnum)]
enum Schedule {
    /// Minimum-D tree with the large values in the small blocks.
    Heuristic,
    /// Serial left-to-right sum in input order.
    Ladder,
    /// Balanced halving in input order.
    Dac,
    /// Complete tree in input order.
    Cfb,
    /// Minimum-D descending arrangement in input order.
    MindDesc,
    /// Minimum-D ascending arrangement in input order.
    MindAsc,
}

#[derive(Args)]
struct SumArgs {
    /// File of binary64 values, one per line, decimal or hex-float (0x1.8p3).
    #[arg(long)]
    values: PathBuf,
    #[arg(long, value_enum, default_value_t = Schedule::Heuristic)]
    schedule: Schedule,
}

#[derive(Subcommand)]
enum Sum {
    /// Run the schedule and print the result.
    Eval {
        #[command(flatten)]
        args: SumArgs,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Text)]
        format: ScalarFormat,
    },
    /// Print the schedule itself: tree plus leaf assignment.
    Plan {
        #[command(flatten)]
        args: SumArgs,
        #[arg(long, value_enum, default_value_t = PlanFormat::Json)]
        format: PlanFormat,
    },
    /// Evaluate and compare against the exact sum and a compensated loop.
    Report {
        #[command(flatten)]
        args: SumArgs,
        #[arg(long, value_enum, default_value_t = ScalarFormat::Json)]
        format: ScalarFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlanFormat {
    Json,
    Newick,
    Text,
}

#[derive(Args)]
struct SweepArgs {
    /// Last row; the table runs n = 1..=n-max.
    #[arg(long)]
    n_max: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

const SWEEP_MAX: u64 = 1 << 20;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    }
    let stdout = io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> CliResult {
    match command {
        Command::Construct { shape } => run_construct(shape, out),
        Command::Count { what } => run_count(what, out),
        Command::Formulas { what } => run_formulas(what, out),
        Command::Takagi(args) => run_takagi(args, out),
        Command::Enumerate { what } => run_enumerate(what, out),
        Command::Verify { check } => run_verify(check, out),
        Command::Sum { what } => run_sum(what, out),
        Command::Sweep(args) => run_sweep(args, out),
    }
}

fn require_positive(n: u64) -> Result<(), Box<dyn std::error::Error>> {
    if n == 0 {
        return Err("n must be at least 1".into());
    }
    Ok(())
}

fn run_construct(shape: Shape, out: &mut impl Write) -> CliResult {
    let (tree, format) = match shape {
        Shape::Ladder(args) => {
            require_positive(args.n)?;
            (make_ladder(args.n), args.format)
        }
        Shape::Dac(args) => {
            require_positive(args.n)?;
            (make_divide_and_conquer(args.n), args.format)
        }
        Shape::Cfb(args) => {
            require_positive(args.n)?;
            (make_complete_full_binary(args.n), args.format)
        }
        Shape::Perfect(args) => {
            require_positive(args.n)?;
            if !args.n.is_power_of_two() {
                return Err(format!("perfect trees need a power of two, got {}", args.n).into());
            }
            (make_perfect(args.n.trailing_zeros()), args.format)
        }
        Shape::Mind(args) => {
            let tree = match (args.base, args.order) {
                (MindBase::Ladder, MindOrder::Desc) => mind_descending(args.n)?,
                (MindBase::Ladder, MindOrder::Asc) => mind_ascending(args.n)?,
                (MindBase::Dac, order) => {
                    let decomposition = binary_decomposition(args.n)?;
                    let base = make_divide_and_conquer(decomposition.omega() as u64);
                    let mut assignment = decomposition.exponents.clone();
                    if matches!(order, MindOrder::Asc) {
                        assignment.reverse();
                    }
                    build_mind(&MinDSpec { decomposition, base, assignment })?
                }
            };
            (tree, args.format)
        }
    };
    emit_tree(&tree, format, out)
}

fn emit_tree(tree: &Tree, format: TreeFormat, out: &mut impl Write) -> CliResult {
    match format {
        TreeFormat::Newick => writeln!(out, "{}", tree.to_newick()?)?,
        TreeFormat::Dot => write!(out, "{}", tree.to_dot())?,
        TreeFormat::Json => writeln!(out, "{}", tree.to_json())?,
        TreeFormat::Text => {
            let sd = tree.sd_label();
            writeln!(out, "leaves {}", tree.leaves())?;
            writeln!(out, "s {}", sd.s_count)?;
            writeln!(out, "d {}", sd.d_count)?;
            writeln!(out, "colless {}", tree.colless_index())?;
        }
    }
    Ok(0)
}

fn emit_scalar(
    format: ScalarFormat,
    text: &str,
    jsonified: serde_json::Value,
    out: &mut impl Write,
) -> CliResult {
    match format {
        ScalarFormat::Text => writeln!(out, "{text}")?,
        ScalarFormat::Json => writeln!(out, "{jsonified}")?,
    }
    Ok(0)
}

fn run_count(what: Count, out: &mut impl Write) -> CliResult {
    match what {
        Count::Alpha { n, format } => {
            let value = alpha(n)?;
            emit_scalar(
                format,
                &value.to_string(),
                json!({"n": n, "alpha": value.to_string()}),
                out,
            )
        }
        Count::Theta { n_max, view, format } => {
            let table = theta_table(n_max)?;
            let view = match view {
                ThetaViewArg::S => ThetaView::ByS,
                ThetaViewArg::D => ThetaView::ByD,
            };
            match format {
                TableFormat::Csv => write!(out, "{}", table.to_csv(view))?,
                TableFormat::Json => {
                    let rows: Vec<serde_json::Value> = (2..=n_max)
                        .map(|n| {
                            let mut counts: Vec<String> =
                                table.row(n).iter().map(|c| c.to_string()).collect();
                            if matches!(view, ThetaView::ByD) {
                                counts.reverse();
                            }
                            json!({
                                "n": n,
                                "counts": counts,
                                "alpha": table.alpha(n).to_string(),
                            })
                        })
                        .collect();
                    writeln!(out, "{}", serde_json::Value::Array(rows))?;
                }
            }
            Ok(0)
        }
        Count::Products { n, s, format } => {
            let value = match s {
                Some(s) => products_for_form(n, s)?,
                None => total_products(n)?,
            };
            emit_scalar(
                format,
                &value.to_string(),
                json!({"n": n, "s": s, "products": value.to_string()}),
                out,
            )
        }
        Count::DacProducts { n, method, format } => {
            let method = match method {
                DacMethodArg::Closed => DacProductsMethod::Closed,
                DacMethodArg::Recurrence => DacProductsMethod::Recurrence,
            };
            let value = dac_products(n, method)?;
            emit_scalar(
                format,
                &value.to_string(),
                json!({"n": n, "dac_products": value.to_string()}),
                out,
            )
        }
        Count::Bounds { n, format } => {
            let bounds = s_bounds(n)?;
            emit_scalar(
                format,
                &format!(
                    "s_min {}\ns_max {}\npow2_in_factorial {}",
                    bounds.s_min, bounds.s_max, bounds.pow2_in_factorial
                ),
                json!({
                    "n": n,
                    "s_min": bounds.s_min,
                    "s_max": bounds.s_max,
                    "pow2_in_factorial": bounds.pow2_in_factorial,
                }),
                out,
            )
        }
    }
}

fn run_formulas(what: Formula, out: &mut impl Write) -> CliResult {
    match what {
        Formula::Sigma { n, method, format } => {
            let method = match method {
                SigmaMethodArg::Recursive => SigmaMethod::Recursive,
                SigmaMethodArg::Levelwise => SigmaMethod::Levelwise,
                SigmaMethodArg::Bitwise => SigmaMethod::Bitwise,
            };
            let value = sigma(n, method)?;
            emit_scalar(format, &value.to_string(), json!({"n": n, "sigma": value}), out)
        }
        Formula::Delta { n, method, format } => {
            let method = match method {
                DeltaMethodArg::Recursive => DeltaMethod::Recursive,
                DeltaMethodArg::Levelwise => DeltaMethod::Levelwise,
                DeltaMethodArg::Explicit => DeltaMethod::Explicit,
                DeltaMethodArg::Recurrence => DeltaMethod::Recurrence,
                DeltaMethodArg::Midpoint => DeltaMethod::Midpoint,
            };
            let value = delta(n, method)?;
            emit_scalar(format, &value.to_string(), json!({"n": n, "delta": value}), out)
        }
        Formula::Cdesc { n, format } => {
            let value = c_desc(n)?;
            emit_scalar(format, &value.to_string(), json!({"n": n, "c_desc": value}), out)
        }
        Formula::Casc { n, method, format } => {
            let method = match method {
                CAscMethodArg::Recurrence => CAscMethod::Recurrence,
                CAscMethodArg::Closed => CAscMethod::Closed,
            };
            let value = c_asc(n, method)?;
            emit_scalar(format, &value.to_string(), json!({"n": n, "c_asc": value}), out)
        }
        Formula::Normalized { c, n, format } => {
            let value = normalized_colless(c, n)?;
            emit_scalar(
                format,
                &ratio_string(&value),
                json!({"n": n, "c": c, "normalized": ratio_string(&value)}),
                out,
            )
        }
    }
}

fn run_takagi(args: TakagiArgs, out: &mut impl Write) -> CliResult {
    if args.k > TAKAGI_EMIT_MAX_K {
        return Err(format!(
            "grid emission is capped at k = {TAKAGI_EMIT_MAX_K}, got {}",
            args.k
        )
        .into());
    }
    let method = match args.method {
        TakagiMethodArg::ViaDelta => TakagiMethod::ViaDelta,
        TakagiMethodArg::Series => TakagiMethod::Series,
        TakagiMethodArg::Weighted => TakagiMethod::Weighted,
    };
    match args.format {
        TableFormat::Csv => {
            writeln!(out, "r,tau")?;
            for r in 0..=1u64 << args.k {
                writeln!(out, "{r},{}", takagi_dyadic(r, args.k, method)?)?;
            }
        }
        TableFormat::Json => {
            let rows: Result<Vec<serde_json::Value>, _> = (0..=1u64 << args.k)
                .map(|r| {
                    takagi_dyadic(r, args.k, method)
                        .map(|tau| json!({"r": r, "tau": tau.to_string()}))
                })
                .collect();
            writeln!(out, "{}", serde_json::Value::Array(rows?))?;
        }
    }
    Ok(0)
}

fn emit_tree_list(trees: &[Tree], format: ListFormat, out: &mut impl Write) -> CliResult {
    match format {
        ListFormat::Csv => {
            writeln!(out, "s,d,colless,newick")?;
            for tree in trees {
                let sd = tree.sd_label();
                writeln!(
                    out,
                    "{},{},{},{}",
                    sd.s_count,
                    sd.d_count,
                    tree.colless_index(),
                    tree.to_newick()?
                )?;
            }
        }
        ListFormat::Newick => {
            for tree in trees {
                writeln!(out, "{}", tree.to_newick()?)?;
            }
        }
        ListFormat::Json => {
            let rows: Result<Vec<serde_json::Value>, Box<dyn std::error::Error>> = trees
                .iter()
                .map(|tree| {
                    let sd = tree.sd_label();
                    Ok(json!({
                        "s": sd.s_count,
                        "d": sd.d_count,
                        "colless": tree.colless_index(),
                        "newick": tree.to_newick()?,
                    }))
                })
                .collect();
            writeln!(out, "{}", serde_json::Value::Array(rows?))?;
        }
    }
    Ok(0)
}

fn run_enumerate(what: Enumerate, out: &mut impl Write) -> CliResult {
    match what {
        Enumerate::Shapes { n, format } => {
            let catalog = sdtree::oracle::enumerate_shapes(n)?;
            emit_tree_list(&catalog.shapes, format, out)
        }
        Enumerate::Mind { n, format } => {
            let trees = enumerate_mind(n)?;
            emit_tree_list(&trees, format, out)
        }
    }
}

fn run_verify(check: Verify, out: &mut impl Write) -> CliResult {
    let mut reports: Vec<Report> = Vec::new();
    match check {
        Verify::Theta(range) => {
            for n in 1..=range.n_max {
                reports.push(verify_theta(n)?);
            }
        }
        Verify::Mind(range) => {
            for n in 1..=range.n_max {
                reports.push(verify_mind(n)?);
            }
        }
        Verify::Colless(range) => {
            for n in 1..=range.n_max {
                reports.push(verify_colless_extremes(n)?);
            }
        }
        Verify::All(range) => {
            for n in 1..=range.n_max {
                reports.push(verify_theta(n)?);
                reports.push(verify_mind(n)?);
                reports.push(verify_colless_extremes(n)?);
            }
        }
    }
    writeln!(out, "{}", serde_json::to_string(&reports)?)?;
    Ok(verdict_code(&reports))
}

/// Exit code for a verification run: 3 as soon as any report fails.
fn verdict_code(reports: &[Report]) -> u8 {
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        3
    }
}

fn load_values(path: &PathBuf) -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    let text = fs::read_to_string(path)
        .map_err(|err| format!("reading {}: {err}", path.display()))?;
    Ok(parse_values(&text)?)
}

fn build_plan(args: &SumArgs) -> Result<SummationPlan, Box<dyn std::error::Error>> {
    let values = load_values(&args.values)?;
    if values.is_empty() {
        return Err("the values file is empty".into());
    }
    let n = values.len() as u64;
    let plan = match args.schedule {
        Schedule::Heuristic => heuristic_mind_plan(&values)?,
        Schedule::Ladder => plan_in_input_order(&make_ladder(n), &values)?,
        Schedule::Dac => plan_in_input_order(&make_divide_and_conquer(n), &values)?,
        Schedule::Cfb => plan_in_input_order(&make_complete_full_binary(n), &values)?,
        Schedule::MindDesc => plan_in_input_order(&mind_descending(n)?, &values)?,
        Schedule::MindAsc => plan_in_input_order(&mind_ascending(n)?, &values)?,
    };
    Ok(plan)
}

fn double_json(value: f64) -> serde_json::Value {
    json!({"hex": format_hex(value), "decimal": value.to_string()})
}

fn run_sum(what: Sum, out: &mut impl Write) -> CliResult {
    match what {
        Sum::Eval { args, format } => {
            let plan = build_plan(&args)?;
            let value = evaluate(&plan)?;
            emit_scalar(
                format,
                &format!("{} {}", format_hex(value), value),
                json!({"evaluated": double_json(value)}),
                out,
            )
        }
        Sum::Plan { args, format } => {
            let plan = build_plan(&args)?;
            let leaves: Vec<&str> = plan
                .tree()
                .leaf_labels()
                .into_iter()
                .map(|l| l.expect("plan leaves are labeled"))
                .collect();
            match format {
                PlanFormat::Newick => writeln!(out, "{}", plan.tree().to_newick()?)?,
                PlanFormat::Text => {
                    writeln!(out, "{}", plan.tree().to_newick()?)?;
                    for (label, value) in plan.values() {
                        writeln!(out, "{label} {} {}", format_hex(*value), value)?;
                    }
                }
                PlanFormat::Json => {
                    let values: Vec<serde_json::Value> = plan
                        .values()
                        .iter()
                        .map(|(label, value)| {
                            json!({
                                "label": label,
                                "hex": format_hex(*value),
                                "decimal": value.to_string(),
                            })
                        })
                        .collect();
                    writeln!(
                        out,
                        "{}",
                        json!({
                            "n": plan.values().len(),
                            "newick": plan.tree().to_newick()?,
                            "leaves": leaves,
                            "values": values,
                        })
                    )?;
                }
            }
            Ok(0)
        }
        Sum::Report { args, format } => {
            let plan = build_plan(&args)?;
            let report = error_report(&plan)?;
            let ulp = report
                .ulp_distance
                .map(|d| u64::try_from(d).expect("ulp distance between finite doubles fits u64"));
            emit_scalar(
                format,
                &format!(
                    "evaluated {} {}\nexact {}\ncorrectly_rounded {} {}\nabs_error {}\nulp_distance {}\nkahan {} {}\noverflowed {}",
                    format_hex(report.evaluated),
                    report.evaluated,
                    ratio_string(&report.exact),
                    format_hex(report.correctly_rounded),
                    report.correctly_rounded,
                    report
                        .abs_error
                        .as_ref()
                        .map_or("undefined".to_string(), ratio_string),
                    ulp.map_or("undefined".to_string(), |d| d.to_string()),
                    format_hex(report.kahan_result),
                    report.kahan_result,
                    report.overflowed,
                ),
                json!({
                    "evaluated": double_json(report.evaluated),
                    "exact": ratio_string(&report.exact),
                    "correctly_rounded": double_json(report.correctly_rounded),
                    "abs_error": report.abs_error.as_ref().map(ratio_string),
                    "ulp_distance": ulp,
                    "kahan": double_json(report.kahan_result),
                    "overflowed": report.overflowed,
                }),
                out,
            )
        }
    }
}

fn run_sweep(args: SweepArgs, out: &mut impl Write) -> CliResult {
    require_positive(args.n_max)?;
    if args.n_max > SWEEP_MAX {
        return Err(format!("sweep is capped at n-max = {SWEEP_MAX}").into());
    }
    let mut rows: Vec<serde_json::Value> = Vec::new();
    if matches!(args.format, TableFormat::Csv) {
        writeln!(out, "n,sigma,delta,delta_cfb,c_desc,c_asc,c_max,normalized_c_asc")?;
    }
    for n in 1..=args.n_max {
        let s = sigma(n, SigmaMethod::Bitwise)?;
        let d = delta(n, DeltaMethod::Explicit)?;
        let dcfb = delta_cfb(n)?;
        let cd = c_desc(n)?;
        let ca = c_asc(n, CAscMethod::Closed)?;
        let cm = c_max(n)?;
        let normalized = if n >= 4 {
            Some(ratio_string(&normalized_colless(ca, n)?))
        } else {
            None
        };
        match args.format {
            TableFormat::Csv => writeln!(
                out,
                "{n},{s},{d},{dcfb},{cd},{ca},{cm},{}",
                normalized.as_deref().unwrap_or("")
            )?,
            TableFormat::Json => rows.push(json!({
                "n": n,
                "sigma": s,
                "delta": d,
                "delta_cfb": dcfb,
                "c_desc": cd,
                "c_asc": ca,
                "c_max": cm,
                "normalized_c_asc": normalized,
            })),
        }
    }
    if matches!(args.format, TableFormat::Json) {
        writeln!(out, "{}", serde_json::Value::Array(rows))?;
    }
    Ok(0)
}
