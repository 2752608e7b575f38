//! Command-line front end. Every flag can also be set through an
//! environment variable named `SLLRESYN_<FLAG>` (upper case, `-` as `_`).
//!
//! Exit codes: 0 success, 1 verification failure or counterexample, 2 error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sllresyn::blif::{write_blif, WriteOptions};
use sllresyn::equiv::{check_equivalence, EquivMode, EquivOptions};
use sllresyn::flow::{
    die_blif_name, load_care, load_netlist, load_partition_file, read_file, run_flow,
    split_per_die, FlowConfig, FlowError, PlacementConfig, Stage,
};
use sllresyn::metrics::{DieGeometry, MetricsReport, SllCountMode};
use sllresyn::partition::{
    load_assignment_subset, partition, save_assignment, PartitionConfig, PartitionMode,
};
use sllresyn::resynth::{resynthesize, Passes, ResynConfig};

#[derive(Parser)]
#[command(
    name = "sllresyn",
    version,
    about = "Reduce inter-die connections in partitioned LUT netlists"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for partitioning and random verification.
    #[arg(long, global = true, default_value_t = 0, env = "SLLRESYN_SEED")]
    seed: u64,
    /// Largest LUT input count accepted from BLIF.
    #[arg(long, global = true, default_value_t = 6, env = "SLLRESYN_K_MAX")]
    k_max: usize,
    /// Print progress details to stderr.
    #[arg(long, short, global = true, env = "SLLRESYN_VERBOSE")]
    verbose: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Fm,
    Hash,
    File,
}

impl From<ModeArg> for PartitionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fm => PartitionMode::FmMincut,
            ModeArg::Hash => PartitionMode::HashLabel,
            ModeArg::File => PartitionMode::ExternalFile,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum SllCountArg {
    PerDie,
    RawNet,
}

impl From<SllCountArg> for SllCountMode {
    fn from(m: SllCountArg) -> Self {
        match m {
            SllCountArg::PerDie => SllCountMode::PerDestinationDie,
            SllCountArg::RawNet => SllCountMode::RawNet,
        }
    }
}

#[derive(Args)]
struct PartitionArgs {
    /// Number of dies.
    #[arg(long, default_value_t = 2, env = "SLLRESYN_DIES")]
    dies: usize,
    /// Imbalance upper bound.
    #[arg(long, default_value_t = 1.25, env = "SLLRESYN_UB")]
    ub: f64,
    #[arg(
        long = "partition-mode",
        value_enum,
        default_value = "fm",
        env = "SLLRESYN_PARTITION_MODE"
    )]
    mode: ModeArg,
}

#[derive(Args)]
struct ResynArgs {
    #[arg(long, default_value_t = 2, env = "SLLRESYN_D1")]
    d1: usize,
    #[arg(long, default_value_t = 8, env = "SLLRESYN_D2")]
    d2: usize,
    #[arg(long, default_value_t = 14, env = "SLLRESYN_WINDOW_PI_CAP")]
    window_pi_cap: usize,
    #[arg(long, default_value_t = 150, env = "SLLRESYN_DIVISOR_CAP")]
    divisor_cap: usize,
    #[arg(long, env = "SLLRESYN_DIVISOR_LEVEL_BOUND")]
    divisor_level_bound: Option<usize>,
    /// Pass count, or `inf` to repeat until nothing changes.
    #[arg(long, default_value = "1", env = "SLLRESYN_PASSES")]
    passes: Passes,
    #[arg(long, default_value_t = 1, env = "SLLRESYN_MAX_AUGMENT")]
    max_augment: usize,
    /// Only rewrite LUTs on this die.
    #[arg(long, env = "SLLRESYN_FREEZE_DIE")]
    freeze_die: Option<u32>,
    /// Skip the per-commit window re-simulation.
    #[arg(long, env = "SLLRESYN_NO_VERIFY_COMMITS")]
    no_verify_commits: bool,
    /// Care predicate (single-output BLIF over input names) for testing.
    #[arg(long, env = "SLLRESYN_INJECT_CARE")]
    inject_care: Option<PathBuf>,
}

impl ResynArgs {
    fn config(&self) -> ResynConfig {
        ResynConfig {
            d1: self.d1,
            d2: self.d2,
            window_pi_cap: self.window_pi_cap,
            divisor_cap: self.divisor_cap,
            divisor_level_bound: self.divisor_level_bound,
            passes: self.passes,
            verify_each_commit: !self.no_verify_commits,
            max_augment: self.max_augment,
            freeze_die: self.freeze_die,
        }
    }
}

#[derive(Args)]
struct PlacementArgs {
    /// Placement file with `<block> <x> <y> <die>` lines.
    #[arg(long, env = "SLLRESYN_PLACEMENT")]
    placement: Option<PathBuf>,
    #[arg(long, default_value_t = 100, env = "SLLRESYN_DIE_WIDTH")]
    die_width: i64,
    #[arg(long, default_value_t = 100, env = "SLLRESYN_DIE_HEIGHT")]
    die_height: i64,
    /// Interposer link length in tiles.
    #[arg(long, default_value_t = 10.0, env = "SLLRESYN_LSLL")]
    lsll: f64,
    /// Terminal-count weight table with `<terminals> <factor>` lines.
    #[arg(long, env = "SLLRESYN_Q_TABLE")]
    q_table: Option<PathBuf>,
    #[arg(
        long,
        value_enum,
        default_value = "per-die",
        env = "SLLRESYN_SLL_COUNT"
    )]
    sll_count: SllCountArg,
}

impl PlacementArgs {
    fn config(&self) -> Option<PlacementConfig> {
        self.placement.as_ref().map(|path| PlacementConfig {
            path: path.clone(),
            geometry: DieGeometry {
                width: self.die_width,
                height: self.die_height,
            },
            l_sll: self.lsll,
            q_table: self.q_table.clone(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Assign every node to a die.
    Partition {
        #[arg(long = "in", env = "SLLRESYN_IN")]
        input: PathBuf,
        #[arg(long, env = "SLLRESYN_OUT")]
        out: PathBuf,
        #[command(flatten)]
        part: PartitionArgs,
    },
    /// Remove cross-die fanins by resubstitution.
    Resynth {
        #[arg(long = "in", env = "SLLRESYN_IN")]
        input: PathBuf,
        #[arg(long, env = "SLLRESYN_PARTITION")]
        partition: PathBuf,
        #[arg(long, env = "SLLRESYN_OUT")]
        out: PathBuf,
        #[arg(long, env = "SLLRESYN_REPORT")]
        report: Option<PathBuf>,
        #[command(flatten)]
        resyn: ResynArgs,
    },
    /// Check two netlists for combinational equivalence.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, conflicts_with = "random", env = "SLLRESYN_EXHAUSTIVE")]
        exhaustive: bool,
        /// Number of random vectors.
        #[arg(long, env = "SLLRESYN_RANDOM")]
        random: Option<u64>,
        /// Only compare vectors satisfying this predicate.
        #[arg(long, env = "SLLRESYN_CARE")]
        care: Option<PathBuf>,
    },
    /// Report inter-die counts, imbalance and wirelength cost.
    Metrics {
        #[arg(long = "in", env = "SLLRESYN_IN")]
        input: PathBuf,
        #[arg(long, env = "SLLRESYN_PARTITION")]
        partition: PathBuf,
        /// Netlist to compare against the input.
        #[arg(long, env = "SLLRESYN_AFTER")]
        after: Option<PathBuf>,
        #[arg(long, env = "SLLRESYN_JSON")]
        json: bool,
        #[command(flatten)]
        placement: PlacementArgs,
    },
    /// Write one BLIF per die.
    Split {
        #[arg(long = "in", env = "SLLRESYN_IN")]
        input: PathBuf,
        #[arg(long, env = "SLLRESYN_PARTITION")]
        partition: PathBuf,
        #[arg(long, env = "SLLRESYN_OUT_DIR")]
        out_dir: PathBuf,
    },
    /// Partition, resynthesize, verify, split and report in one go.
    Flow {
        #[arg(long = "in", env = "SLLRESYN_IN")]
        input: PathBuf,
        #[arg(long, env = "SLLRESYN_OUT_DIR")]
        out_dir: PathBuf,
        /// Assignment file for `--partition-mode file`.
        #[arg(long, env = "SLLRESYN_PARTITION")]
        partition: Option<PathBuf>,
        #[arg(long, env = "SLLRESYN_RANDOM")]
        random: Option<u64>,
        #[command(flatten)]
        part: PartitionArgs,
        #[command(flatten)]
        resyn: ResynArgs,
        #[command(flatten)]
        placement: PlacementArgs,
    },
}

fn write_file(path: &Path, text: &str) -> Result<(), FlowError> {
    fs::write(path, text).map_err(|e| {
        FlowError::new(
            Stage::Write,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn run(cli: Cli) -> Result<ExitCode, FlowError> {
    let Common {
        seed,
        k_max,
        verbose,
    } = cli.common;
    match cli.command {
        Command::Partition { input, out, part } => {
            let n = load_netlist(&input, k_max)?;
            let cfg = PartitionConfig {
                num_dies: part.dies,
                imbalance_upper_bound: part.ub,
                seed,
                mode: part.mode.into(),
            };
            let a = partition(&n, &cfg).map_err(|e| FlowError::new(Stage::Partition, e))?;
            if verbose {
                let rho = a.imbalance(&n).unwrap_or(0.0);
                eprintln!(
                    "cut nets: {}, imbalance: {rho:.4}",
                    sllresyn::partition::cut_size(&n, &a)
                );
            }
            write_file(&out, &save_assignment(&n, &a))?;
        }
        Command::Resynth {
            input,
            partition,
            out,
            report,
            resyn,
        } => {
            let mut n = load_netlist(&input, k_max)?;
            let a = load_partition_file(&n, &partition)?;
            let care = resyn.inject_care.as_deref().map(load_care).transpose()?;
            let r = resynthesize(&mut n, &a, &resyn.config(), care.as_ref())
                .map_err(|e| FlowError::new(Stage::Resynth, e))?;
            if verbose {
                eprintln!(
                    "commits: {}, n_sll_fo: {} -> {}, luts: {} -> {}",
                    r.commits,
                    r.before.n_sll_fo,
                    r.after.n_sll_fo,
                    r.before.lut_count,
                    r.after.lut_count
                );
            }
            write_file(&out, &write_blif(&n, &WriteOptions::default()))?;
            if let Some(path) = report {
                write_file(&path, &r.to_json())?;
            }
        }
        Command::Equiv {
            a,
            b,
            exhaustive,
            random,
            care,
        } => {
            let na = load_netlist(&a, k_max)?;
            let nb = load_netlist(&b, k_max)?;
            let care = care.as_deref().map(load_care).transpose()?;
            let mut opts = EquivOptions {
                seed,
                care: care.as_ref(),
                ..Default::default()
            };
            if exhaustive {
                opts.mode = EquivMode::Exhaustive;
                opts.exhaustive_limit = usize::MAX;
            }
            if let Some(v) = random {
                opts.mode = EquivMode::Random;
                opts.random_vectors = v;
            }
            let v =
                check_equivalence(&na, &nb, &opts).map_err(|e| FlowError::new(Stage::Verify, e))?;
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("verdict serializes")
            );
            if !v.is_equivalent() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Metrics {
            input,
            partition,
            after,
            json,
            placement,
        } => {
            let n = load_netlist(&input, k_max)?;
            let a = load_partition_file(&n, &partition)?;
            let post = after
                .as_deref()
                .map(|p| load_netlist(p, k_max))
                .transpose()?;
            // Node ids differ between the two files; match nodes by name.
            let post_a = match &post {
                Some(p) => a
                    .transfer(&n, p)
                    .map_err(|e| FlowError::new(Stage::Metrics, e))?,
                None => a.clone(),
            };
            let pl = placement
                .config()
                .map(|p| p.load(Stage::Metrics))
                .transpose()?;
            let r = MetricsReport::compare(
                (&n, &a),
                (post.as_ref().unwrap_or(&n), &post_a),
                pl.as_ref(),
                placement.sll_count.into(),
            )
            .map_err(|e| FlowError::new(Stage::Metrics, e))?;
            if json {
                println!("{}", r.to_json());
            } else {
                print!("{}", r.to_text());
            }
        }
        Command::Split {
            input,
            partition,
            out_dir,
        } => {
            let n = load_netlist(&input, k_max)?;
            // The file may describe the design before resynthesis swept nodes.
            let text = read_file(Stage::Partition, &partition)?;
            let a = load_assignment_subset(&n, &text, None)
                .map_err(|e| FlowError::new(Stage::Partition, e))?;
            let parts = split_per_die(&n, &a)?;
            fs::create_dir_all(&out_dir).map_err(|e| {
                FlowError::new(
                    Stage::Write,
                    format!("cannot create {}: {e}", out_dir.display()),
                )
            })?;
            for (d, p) in parts.iter().enumerate() {
                write_file(
                    &out_dir.join(die_blif_name(d)),
                    &write_blif(p, &WriteOptions::default()),
                )?;
            }
        }
        Command::Flow {
            input,
            out_dir,
            partition,
            random,
            part,
            resyn,
            placement,
        } => {
            let mut cfg = FlowConfig::new(input, out_dir);
            cfg.k_max = k_max;
            cfg.partition = PartitionConfig {
                num_dies: part.dies,
                imbalance_upper_bound: part.ub,
                seed,
                mode: part.mode.into(),
            };
            cfg.partition_file = partition;
            cfg.resynth = resyn.config();
            cfg.care = resyn.inject_care.clone();
            if let Some(v) = random {
                cfg.verify_mode = EquivMode::Random;
                cfg.verify_vectors = v;
            }
            cfg.sll_mode = placement.sll_count.into();
            cfg.placement = placement.config();
            let r = run_flow(&cfg)?;
            if verbose {
                eprint!("{}", r.metrics.to_text());
            }
            println!(
                "commits {} n_sll {} -> {} n_sll_fo {} -> {} luts {} -> {} equivalence {}",
                r.resynth.commits,
                r.resynth.before.n_sll,
                r.resynth.after.n_sll,
                r.resynth.before.n_sll_fo,
                r.resynth.after.n_sll_fo,
                r.resynth.before.lut_count,
                r.resynth.after.lut_count,
                if r.passed() { "pass" } else { "FAIL" }
            );
            if !r.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
