//! End-to-end flow: parse, partition, resynthesize, verify, split, report.

mod split;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::blif::{parse_blif, write_blif, ParseOptions, WriteOptions};
use crate::equiv::{check_equivalence, EquivMode, EquivOptions, EquivVerdict};
use crate::metrics::{
    load_placement, load_q_table, DieGeometry, MetricsReport, PlacementData, SllCountMode,
};
use crate::netlist::Netlist;
use crate::partition::{
    load_assignment, partition, save_assignment, DieAssignment, PartitionConfig, PartitionMode,
};
use crate::resynth::{resynthesize, CarePredicate, ResynConfig, ResynReport};

pub use split::{export_name, import_name, split_per_die, stitch};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Parse,
    Partition,
    Resynth,
    Verify,
    Split,
    Metrics,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Parse => "parse",
            Stage::Partition => "partition",
            Stage::Resynth => "resynth",
            Stage::Verify => "verify",
            Stage::Split => "split",
            Stage::Metrics => "metrics",
            Stage::Write => "write",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
#[error("{stage} stage: {source}")]
pub struct FlowError {
    pub stage: Stage,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl FlowError {
    pub fn new(stage: Stage, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        FlowError {
            stage,
            source: source.into(),
        }
    }

    pub(crate) fn split(source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        Self::new(Stage::Split, source)
    }
}

/// Reads a file, labeling failures with the stage and path.
pub fn read_file(stage: Stage, path: &Path) -> Result<String, FlowError> {
    fs::read_to_string(path)
        .map_err(|e| FlowError::new(stage, format!("cannot read {}: {e}", path.display())))
}

#[derive(Clone, Debug)]
pub struct PlacementConfig {
    pub path: PathBuf,
    pub geometry: DieGeometry,
    pub l_sll: f64,
    pub q_table: Option<PathBuf>,
}

impl PlacementConfig {
    pub fn load(&self, stage: Stage) -> Result<PlacementData, FlowError> {
        let text = read_file(stage, &self.path)?;
        let mut p = load_placement(&text, self.geometry, self.l_sll)
            .map_err(|e| FlowError::new(stage, e))?;
        if let Some(q) = &self.q_table {
            p.q_table =
                load_q_table(&read_file(stage, q)?).map_err(|e| FlowError::new(stage, e))?;
        }
        Ok(p)
    }
}

#[derive(Clone, Debug)]
pub struct FlowConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub k_max: usize,
    pub partition: PartitionConfig,
    /// Assignment file, used when `partition.mode` is `ExternalFile`.
    pub partition_file: Option<PathBuf>,
    pub resynth: ResynConfig,
    /// Care predicate restricting both resynthesis and verification.
    pub care: Option<PathBuf>,
    pub verify_mode: EquivMode,
    pub verify_vectors: u64,
    pub sll_mode: SllCountMode,
    pub placement: Option<PlacementConfig>,
}

impl FlowConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        FlowConfig {
            input: input.into(),
            out_dir: out_dir.into(),
            k_max: crate::netlist::DEFAULT_K_MAX,
            partition: PartitionConfig::default(),
            partition_file: None,
            resynth: ResynConfig::default(),
            care: None,
            verify_mode: EquivMode::Auto,
            verify_vectors: 100_000,
            sll_mode: SllCountMode::default(),
            placement: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub model: String,
    pub num_dies: usize,
    pub partition_mode: PartitionMode,
    pub seed: u64,
    pub resynth: ResynReport,
    pub metrics: MetricsReport,
    /// Original against resynthesized netlist.
    pub equivalence: EquivVerdict,
    /// Resynthesized netlist against its reassembled per-die netlists.
    pub split_equivalence: EquivVerdict,
    pub artifacts: Vec<String>,
}

impl FlowReport {
    pub fn passed(&self) -> bool {
        self.equivalence.is_equivalent() && self.split_equivalence.is_equivalent()
    }
}

pub const PARTITION_FILE: &str = "partition.txt";
pub const POST_BLIF: &str = "post.blif";
pub const REPORT_FILE: &str = "report.json";
pub const METRICS_FILE: &str = "metrics.txt";

pub fn die_blif_name(die: usize) -> String {
    format!("die{die}.blif")
}

/// Parses a BLIF file with the flow's fanin limit.
pub fn load_netlist(path: &Path, k_max: usize) -> Result<Netlist, FlowError> {
    let text = read_file(Stage::Parse, path)?;
    let opts = ParseOptions {
        k_max,
        allow_reserved: false,
    };
    parse_blif(&text, &opts)
        .map_err(|e| FlowError::new(Stage::Parse, format!("{}: {e}", path.display())))
}

pub fn load_care(path: &Path) -> Result<CarePredicate, FlowError> {
    let text = read_file(Stage::Parse, path)?;
    let n = parse_blif(&text, &ParseOptions::default())
        .map_err(|e| FlowError::new(Stage::Parse, format!("{}: {e}", path.display())))?;
    CarePredicate::new(n).map_err(|e| FlowError::new(Stage::Parse, e))
}

/// Runs the whole pipeline and writes its artifacts into `config.out_dir`.
pub fn run_flow(config: &FlowConfig) -> Result<FlowReport, FlowError> {
    let original = load_netlist(&config.input, config.k_max)?;
    let care = config.care.as_deref().map(load_care).transpose()?;

    let assignment = match config.partition.mode {
        PartitionMode::ExternalFile => {
            let path = config.partition_file.as_deref().ok_or_else(|| {
                FlowError::new(
                    Stage::Partition,
                    crate::partition::PartitionError::MissingFile,
                )
            })?;
            let text = read_file(Stage::Partition, path)?;
            load_assignment(&original, &text, None)
                .map_err(|e| FlowError::new(Stage::Partition, e))?
        }
        _ => partition(&original, &config.partition)
            .map_err(|e| FlowError::new(Stage::Partition, e))?,
    };

    let mut post = original.clone();
    let resynth = resynthesize(&mut post, &assignment, &config.resynth, care.as_ref())
        .map_err(|e| FlowError::new(Stage::Resynth, e))?;

    let verify = |a: &Netlist, b: &Netlist, care: Option<&CarePredicate>| {
        let opts = EquivOptions {
            mode: config.verify_mode,
            seed: config.partition.seed,
            random_vectors: config.verify_vectors,
            care,
            ..Default::default()
        };
        check_equivalence(a, b, &opts).map_err(|e| FlowError::new(Stage::Verify, e))
    };
    let equivalence = verify(&original, &post, care.as_ref())?;

    let parts = split_per_die(&post, &assignment)?;
    let stitched = stitch(&parts, post.model_name())?;
    let split_equivalence = verify(&post, &stitched, None)?;

    let placement = config
        .placement
        .as_ref()
        .map(|p| p.load(Stage::Metrics))
        .transpose()?;
    let metrics = MetricsReport::compare(
        (&original, &assignment),
        (&post, &assignment),
        placement.as_ref(),
        config.sll_mode,
    )
    .map_err(|e| FlowError::new(Stage::Metrics, e))?;

    let write = |name: &str, text: &str| -> Result<(), FlowError> {
        let path = config.out_dir.join(name);
        fs::write(&path, text).map_err(|e| {
            FlowError::new(
                Stage::Write,
                format!("cannot write {}: {e}", path.display()),
            )
        })
    };
    fs::create_dir_all(&config.out_dir).map_err(|e| {
        FlowError::new(
            Stage::Write,
            format!("cannot create {}: {e}", config.out_dir.display()),
        )
    })?;
    let wopts = WriteOptions::default();
    let mut artifacts = vec![PARTITION_FILE.to_string(), POST_BLIF.to_string()];
    write(PARTITION_FILE, &save_assignment(&original, &assignment))?;
    write(POST_BLIF, &write_blif(&post, &wopts))?;
    for (d, part) in parts.iter().enumerate() {
        let name = die_blif_name(d);
        write(&name, &write_blif(part, &wopts))?;
        artifacts.push(name);
    }
    write(METRICS_FILE, &metrics.to_text())?;
    artifacts.push(METRICS_FILE.to_string());
    artifacts.push(REPORT_FILE.to_string());

    let report = FlowReport {
        model: original.model_name().to_string(),
        num_dies: assignment.num_dies(),
        partition_mode: config.partition.mode,
        seed: config.partition.seed,
        resynth,
        metrics,
        equivalence,
        split_equivalence,
        artifacts,
    };
    write(
        REPORT_FILE,
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(report)
}

/// Loads an assignment produced by [`run_flow`] or the partition command.
pub fn load_partition_file(netlist: &Netlist, path: &Path) -> Result<DieAssignment, FlowError> {
    let text = read_file(Stage::Partition, path)?;
    load_assignment(netlist, &text, None).map_err(|e| FlowError::new(Stage::Partition, e))
}
