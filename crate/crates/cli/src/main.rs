use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use texharm_cli::config::{CutoffProtocol, FilterOrder, NormalizerFit, PhaseMergeMode};
use texharm_cli::error::usage;
use texharm_cli::{commands, exit_code, synth, PipelineConfig};
use texharm_mlpipe::SelectionPolicy;

#[derive(Parser)]
#[command(
    name = "texharm",
    version,
    about = "Filter-bank harmonization of radiomics texture features"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML config; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default 1)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    images: Option<PathBuf>,
    #[arg(long, global = true)]
    masks: Option<PathBuf>,
    /// CSV with case_id,cohort,class_label,phase
    #[arg(long, global = true)]
    metadata: Option<PathBuf>,
    /// Bank manifest, or synthetic:<kind>[:<filters>[:<size>[:<seed>]]]
    #[arg(long, global = true)]
    filter_bank: Option<String>,
    #[arg(long, global = true, env = "TEXHARM_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    bin_width: Option<f64>,
    #[arg(long, global = true)]
    n_bins: Option<usize>,
    #[arg(long, global = true)]
    train_ratio: Option<f64>,
    /// Also report divergence after ComBat
    #[arg(long, global = true)]
    combat: bool,
    /// Use the bounded Jensen-Shannon divergence instead of the averaged two-way KL
    #[arg(long, global = true)]
    strict_jsd: bool,
    /// rank1 or rank-lt-10
    #[arg(long, global = true)]
    selection_policy: Option<SelectionPolicy>,
    /// test or validation
    #[arg(long, global = true)]
    cutoff_protocol: Option<CutoffProtocol>,
    /// original or resize-first
    #[arg(long, global = true)]
    filter_order: Option<FilterOrder>,
    /// train or all
    #[arg(long, global = true)]
    normalizer_fit: Option<NormalizerFit>,
    /// concat or mean
    #[arg(long, global = true)]
    phase_merge: Option<PhaseMergeMode>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic two-scanner, two-class phantom cohort
    Synth {
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 128)]
        size: usize,
        /// Give each scanner its own cases instead of re-rendering the same ones
        #[arg(long)]
        unpaired: bool,
    },
    /// Apply the filter bank to every image
    Filter,
    /// Extract the 93 features for every image/mask pair
    Extract,
    /// Per-feature divergence between two cohorts
    Harmonize {
        table: PathBuf,
        /// Second cohort; without it TABLE must hold exactly two cohorts
        table_b: Option<PathBuf>,
    },
    /// Select features, train and evaluate a classifier
    Classify { table: PathBuf },
    /// Extract, score and classify with and without the filter bank
    Pipeline,
}

fn resolve(g: &Global) -> anyhow::Result<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $flag:expr),* $(,)?) => {
            $(if let Some(v) = $flag.clone() { cfg.$field = v.into(); })*
        };
    }
    set!(
        seed <- g.seed,
        jobs <- g.jobs,
        bin_width <- g.bin_width,
        n_bins <- g.n_bins,
        train_ratio <- g.train_ratio,
        selection_policy <- g.selection_policy,
        cutoff_protocol <- g.cutoff_protocol,
        filter_order <- g.filter_order,
        normalizer_fit <- g.normalizer_fit,
        phase_merge <- g.phase_merge,
    );
    set!(
        image_dir <- g.images.clone().map(Some),
        mask_dir <- g.masks.clone().map(Some),
        metadata <- g.metadata.clone().map(Some),
        output_dir <- g.out.clone().map(Some),
        filter_bank <- g.filter_bank.clone().map(Some),
    );
    cfg.combat |= g.combat;
    cfg.strict_jsd |= g.strict_jsd;
    if cfg.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = resolve(&cli.global)?;
    rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global()?;
    match cli.command {
        Command::Synth { cases, size, unpaired } => {
            let sc = synth::SynthConfig {
                seed: cfg.seed,
                cases_per_class: cases,
                size,
                paired: !unpaired,
                ..Default::default()
            };
            if cases == 0 || size < 16 {
                return Err(usage("--cases must be positive and --size at least 16"));
            }
            let layout = synth::write_cohort(&synth::generate(&sc), cfg.output_dir()?)?;
            log::info!("wrote {} files", layout.files.len());
        }
        Command::Filter => {
            commands::cmd_filter(&cfg)?;
        }
        Command::Extract => {
            commands::cmd_extract(&cfg)?;
        }
        Command::Harmonize { table, table_b } => {
            let out = commands::cmd_harmonize(&cfg, &table, table_b.as_deref())?;
            println!("mean divergence {:.6}", out.before.report.mean);
            if let Some(c) = out.combat {
                println!("after combat    {:.6}", c.report.mean);
            }
        }
        Command::Classify { table } => {
            let out = commands::cmd_classify(&cfg, &table)?;
            println!("test auc {:.4}", out.metrics.metrics.auc);
        }
        Command::Pipeline => {
            let s = commands::cmd_pipeline(&cfg)?;
            println!("raw:      auc {:.4}", s.raw.test_auc);
            println!("filtered: auc {:.4}", s.filtered.test_auc);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
