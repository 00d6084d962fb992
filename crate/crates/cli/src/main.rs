//! `mopvrp`: batch front end for solving, exact checks, instance generation
//! and cost estimation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mopvrp_core::alns::{run, AlnsConfig};
use mopvrp_core::costs::{csv_row, estimate, CostTable, FleetUsage, CSV_HEADER};
use mopvrp_core::instances::{derive_benchmark, gen_realistic, parse_solomon, Scenario, ScenarioSpec};
use mopvrp_core::io::{read_instance, read_solution, write_instance, write_solution, Solution};
use mopvrp_core::model::{CpSolution, Instance, MopSolution, Variant};
use mopvrp_core::oracle::{brute_force_cp, brute_force_mop, export_mip, gap_percent};
use mopvrp_core::search::{fleet_size, Plan};

#[derive(Parser)]
#[command(name = "mopvrp", version, about = "Mobile- and central-production vehicle routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run ALNS several times and write one CSV row per run plus their mean.
    Solve(SolveArgs),
    /// Solve a small instance exactly, optionally grading another solution.
    Oracle(OracleArgs),
    /// Derive a benchmark instance from a Solomon-format file.
    GenBenchmark(GenBenchmarkArgs),
    /// Generate a realistic scenario instance.
    GenRealistic(GenRealisticArgs),
    /// Print the greedy fleet size of an instance.
    FleetSize(FleetSizeArgs),
    /// Write the mixed-integer model of an instance in LP format.
    ExportMip(ExportMipArgs),
    /// Estimate long-term fleet costs.
    Cost(CostArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    variant: Variant,
    /// JSON object overriding the default ALNS parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; run k uses seed + k. Defaults to the config's rng_seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Overrides n_max.
    #[arg(long)]
    iterations: Option<usize>,
    /// Defaults to stdout.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Best solution over all runs.
    #[arg(long)]
    out_solution: Option<PathBuf>,
    /// Adds a wall_seconds column (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    variant: Variant,
    /// Solution file whose objective is compared with the optimum.
    #[arg(long)]
    compare_solution: Option<PathBuf>,
    #[arg(long)]
    out_solution: Option<PathBuf>,
}

#[derive(Args)]
struct GenBenchmarkArgs {
    /// Solomon-format text file.
    #[arg(long)]
    solomon: PathBuf,
    /// Production time per unit of demand.
    #[arg(long)]
    mu: f64,
    /// Machines per vehicle.
    #[arg(long)]
    machines: usize,
    #[arg(long)]
    variant: Variant,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenRealisticArgs {
    /// One of S_W, S_T, M_W, M_T, H_W, H_T.
    #[arg(long)]
    scenario: Scenario,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    machines: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FleetSizeArgs {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct ExportMipArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    variant: Variant,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CostArgs {
    /// JSON object overriding the default cost table.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Solve CSVs of daily plans; averages travel and vehicles over their runs.
    #[arg(long, num_args = 1.., conflicts_with_all = ["travel", "vehicles"])]
    from_csv: Vec<PathBuf>,
    /// Miles driven per day.
    #[arg(long)]
    travel: Option<f64>,
    /// Vehicles on the road per day.
    #[arg(long)]
    vehicles: Option<f64>,
    /// Vehicles to buy; defaults to the ceiling of the largest daily count.
    #[arg(long)]
    fleet: Option<u32>,
    /// Machines to buy; defaults to fleet times machines per vehicle.
    #[arg(long)]
    printers: Option<u32>,
    #[arg(long, default_value_t = 1)]
    machines: u32,
    /// Orders per day.
    #[arg(long)]
    customers: u32,
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_solution(path: &Path, inst: &Instance) -> Result<Solution> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (_, mut sol) = read_solution(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Solution::Mop(s) = &mut sol {
        let n = inst.num_customers();
        if s.machine_of.len() > n + 1 {
            bail!("{}: customer {} does not exist", path.display(), s.machine_of.len() - 1);
        }
        s.machine_of.resize(n + 1, None);
    }
    Ok(sol)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

struct RunRow {
    seed: u64,
    travel: f64,
    delay: f64,
    objective: f64,
    vehicles: usize,
    seconds: f64,
    feasible: bool,
    solution: Solution,
}

fn solve_once<P: Plan>(inst: &Instance, config: &AlnsConfig, wrap: fn(P) -> Solution) -> RunRow {
    let started = Instant::now();
    let (best, _) = run::<P>(inst, config);
    let seconds = started.elapsed().as_secs_f64();
    let tl = best.evaluate(inst);
    RunRow {
        seed: config.rng_seed,
        travel: tl.travel_cost,
        delay: tl.delay_cost,
        objective: tl.objective,
        vehicles: best.vehicles_used(),
        seconds,
        feasible: best.feasibility(inst).feasible,
        solution: wrap(best),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MOPVRP_THREADS") {
        let n: usize = v.parse().with_context(|| format!("MOPVRP_THREADS={v:?} is not a count"))?;
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            AlnsConfig::from_json(&text, args.variant).with_context(|| format!("parsing {}", path.display()))?
        }
        None => AlnsConfig::for_variant(args.variant),
    };
    if let Some(n) = args.iterations {
        config.n_max = n;
    }
    config.validate()?;
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let base = args.seed.unwrap_or(config.rng_seed);
    let configs: Vec<AlnsConfig> = (0..args.runs)
        .map(|k| AlnsConfig {
            rng_seed: base.wrapping_add(k),
            ..config.clone()
        })
        .collect();
    let rows: Vec<RunRow> = thread_pool()?.install(|| {
        configs
            .par_iter()
            .map(|c| match args.variant {
                Variant::Mop => solve_once::<MopSolution>(&inst, c, Solution::Mop),
                Variant::Cp => solve_once::<CpSolution>(&inst, c, Solution::Cp),
            })
            .collect()
    });

    let mut csv = String::from("instance,variant,seed,travel,delay,objective,vehicles");
    if args.timing {
        csv.push_str(",wall_seconds");
    }
    csv.push('\n');
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}",
            inst.id, args.variant, r.seed, r.travel, r.delay, r.objective, r.vehicles
        ));
        if args.timing {
            csv.push_str(&format!(",{:.3}", r.seconds));
        }
        csv.push('\n');
        if !r.feasible {
            eprintln!("warning: run with seed {} ended infeasible", r.seed);
        }
    }
    let k = rows.len() as f64;
    let mean = |f: fn(&RunRow) -> f64| rows.iter().map(f).sum::<f64>() / k;
    csv.push_str(&format!(
        "{},{},mean,{},{},{},{}",
        inst.id,
        args.variant,
        mean(|r| r.travel),
        mean(|r| r.delay),
        mean(|r| r.objective),
        mean(|r| r.vehicles as f64)
    ));
    if args.timing {
        csv.push_str(&format!(",{:.3}", mean(|r| r.seconds)));
    }
    csv.push('\n');

    match &args.out_csv {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.out_solution {
        let best = rows
            .iter()
            .reduce(|a, b| if b.objective < a.objective { b } else { a })
            .expect("at least one run");
        write(path, &write_solution(&inst.id, &best.solution, Some(best.objective)))?;
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let (optimum, solution) = match args.variant {
        Variant::Mop => brute_force_mop(&inst).map(|o| (o.objective, Solution::Mop(o.solution)))?,
        Variant::Cp => brute_force_cp(&inst).map(|o| (o.objective, Solution::Cp(o.solution)))?,
    };
    match &args.compare_solution {
        None => {
            println!("instance,variant,optimum");
            println!("{},{},{}", inst.id, args.variant, optimum);
        }
        Some(path) => {
            let (objective, feasible) = match load_solution(path, &inst)? {
                Solution::Mop(s) if args.variant == Variant::Mop => (s.evaluate(&inst).objective, s.feasibility(&inst).feasible),
                Solution::Cp(s) if args.variant == Variant::Cp => (s.evaluate(&inst).objective, s.feasibility(&inst).feasible),
                other => bail!("{} holds a {} solution, expected {}", path.display(), other.variant(), args.variant),
            };
            println!("instance,variant,optimum,candidate,feasible,gap_percent");
            println!(
                "{},{},{},{},{},{}",
                inst.id,
                args.variant,
                optimum,
                objective,
                feasible,
                gap_percent(objective, optimum)
            );
        }
    }
    if let Some(path) = &args.out_solution {
        write(path, &write_solution(&inst.id, &solution, Some(optimum)))?;
    }
    Ok(())
}

fn gen_benchmark(args: GenBenchmarkArgs) -> Result<()> {
    let text = fs::read_to_string(&args.solomon).with_context(|| format!("reading {}", args.solomon.display()))?;
    let base = parse_solomon(&text).with_context(|| format!("parsing {}", args.solomon.display()))?;
    if !(args.mu >= 0.0) || args.machines == 0 {
        bail!("--mu must be nonnegative and --machines at least 1");
    }
    let inst = derive_benchmark(&base, args.mu, args.machines, args.variant)?;
    write(&args.out, &write_instance(&inst))
}

fn gen_realistic_cmd(args: GenRealisticArgs) -> Result<()> {
    let spec = ScenarioSpec {
        scenario: args.scenario,
        n: args.n,
        seed: args.seed,
    };
    let inst = gen_realistic(&spec, args.machines)?;
    write(&args.out, &write_instance(&inst))
}

fn fleet_size_cmd(args: FleetSizeArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    println!("{}", fleet_size(&inst)?);
    Ok(())
}

fn export_mip_cmd(args: ExportMipArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    write(&args.out, &export_mip(&inst, args.variant))
}

/// Mean travel, mean vehicles and largest vehicle count over the run rows
/// of solve CSVs.
fn usage_from_csv(paths: &[PathBuf]) -> Result<(f64, f64, f64)> {
    let (mut travel, mut vehicles, mut most, mut rows) = (0.0, 0.0, 0.0_f64, 0usize);
    for path in paths {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut lines = text.lines().enumerate();
        let header: Vec<&str> = lines.next().map(|(_, h)| h.split(',').collect()).unwrap_or_default();
        let col = |name: &str| {
            header
                .iter()
                .position(|h| *h == name)
                .with_context(|| format!("{}: missing column {name}", path.display()))
        };
        let (seed_col, travel_col, vehicles_col) = (col("seed")?, col("travel")?, col("vehicles")?);
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.get(seed_col) == Some(&"mean") {
                continue;
            }
            let num = |c: usize| -> Result<f64> {
                fields
                    .get(c)
                    .and_then(|f| f.parse().ok())
                    .with_context(|| format!("{}:{}: malformed row", path.display(), lineno + 1))
            };
            travel += num(travel_col)?;
            let v = num(vehicles_col)?;
            vehicles += v;
            most = most.max(v);
            rows += 1;
        }
    }
    if rows == 0 {
        bail!("no run rows found");
    }
    Ok((travel / rows as f64, vehicles / rows as f64, most))
}

fn cost(args: CostArgs) -> Result<()> {
    let table = match &args.table {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<CostTable>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => CostTable::default(),
    };
    table.validate().map_err(anyhow::Error::msg)?;
    let (travel, vehicles, most) = if args.from_csv.is_empty() {
        match (args.travel, args.vehicles) {
            (Some(t), Some(v)) => (t, v, v),
            _ => bail!("give --travel and --vehicles, or --from-csv"),
        }
    } else {
        usage_from_csv(&args.from_csv)?
    };
    if !(travel >= 0.0 && vehicles >= 0.0) {
        bail!("travel and vehicles must be nonnegative");
    }
    let fleet = args.fleet.unwrap_or(most.ceil() as u32);
    let usage = FleetUsage {
        avg_travel_per_day: travel,
        avg_vehicles: vehicles,
        fleet_to_buy: fleet,
        printers_to_buy: args.printers.unwrap_or(fleet * args.machines),
        n_customers: args.customers,
    };
    println!("{CSV_HEADER}");
    println!("{}", csv_row(&usage, &estimate(&usage, &table)));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::GenBenchmark(a) => gen_benchmark(a),
        Command::GenRealistic(a) => gen_realistic_cmd(a),
        Command::FleetSize(a) => fleet_size_cmd(a),
        Command::ExportMip(a) => export_mip_cmd(a),
        Command::Cost(a) => cost(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
