use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eff_core::adapters::{
    CommandSpec, EditorBackend, EditorBackendMode, OcrBackend, OcrBackendMode,
};
use eff_core::blend::{blend, ResizePolicy};
use eff_core::eval::SpillWeighting;
use eff_core::field::read_pfm;
use eff_core::harness::{
    cmd_eval, cmd_field, cmd_run, cmd_sweep, generate_corpus, write_corpus, CorpusSpec,
    FieldOutputs, PipelineOptions, SpillPattern, SweepSpec,
};
use eff_core::scene::{FieldConfig, Manifest, RasterImage};

/// Edit fidelity field blending and spillover evaluation.
///
/// Every flag can also be set through the environment variable named in its
/// help text (prefix `EFF_`). Exit status: 0 success, 1 some scenes failed,
/// 2 configuration or manifest error.
#[derive(Parser, Debug)]
#[command(name = "eff", version)]
struct Cli {
    /// Scene manifest (JSON).
    #[arg(long, global = true, env = "EFF_MANIFEST")]
    manifest: Option<PathBuf>,

    /// Directory for all written files.
    #[arg(long, global = true, env = "EFF_OUT_DIR", default_value = "eff-out")]
    out_dir: PathBuf,

    /// Scenes processed concurrently; 0 uses every core.
    #[arg(long, global = true, env = "EFF_JOBS", default_value_t = 0)]
    jobs: usize,

    /// Seed for the synthetic generator.
    #[arg(long, global = true, env = "EFF_SEED", default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    field: FieldArgs,

    #[command(flatten)]
    backends: BackendArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Decay rate as a fraction of the image diagonal.
    #[arg(long, global = true, env = "EFF_SIGMA", default_value_t = 0.12)]
    sigma: f64,

    /// Target padding in pixels.
    #[arg(long, global = true, env = "EFF_PAD_CORE", default_value_t = 15.0)]
    pad_core: f64,

    /// Padding of protected (non-target) regions in pixels.
    #[arg(long, global = true, env = "EFF_PAD_PROTECT", default_value_t = 8.0)]
    pad_protect: f64,

    /// Gaussian smoothing sigma in pixels; 0 disables smoothing.
    #[arg(long, global = true, env = "EFF_SMOOTH_SIGMA", default_value_t = 3.0)]
    smooth_sigma: f64,

    /// Text similarity below this flags a region.
    #[arg(long, global = true, env = "EFF_SIM_THRESHOLD", default_value_t = 0.85)]
    sim_threshold: f64,

    /// Region PSNR (dB) below this flags a region.
    #[arg(
        long,
        global = true,
        env = "EFF_PSNR_THRESHOLD",
        default_value_t = 35.0
    )]
    psnr_threshold: f64,

    /// PSNR reported for identical regions.
    #[arg(long, global = true, env = "EFF_PSNR_CAP", default_value_t = 150.0)]
    psnr_cap: f64,

    /// Resample editor outputs whose size differs from the source.
    #[arg(long, global = true, env = "EFF_RESIZE", value_enum, default_value_t = Resize::Strict)]
    resize: Resize,

    /// Weight the corpus spill rate per scene instead of per region.
    #[arg(long, global = true, env = "EFF_SCENE_WEIGHTED")]
    scene_weighted: bool,
}

#[derive(Args, Debug)]
struct BackendArgs {
    #[arg(long, global = true, env = "EFF_OCR_MODE", value_enum, default_value_t = OcrMode::GroundTruth)]
    ocr_mode: OcrMode,

    /// OCR command line; `{image}` is replaced by the image path, otherwise
    /// the path is appended.
    #[arg(long, global = true, env = "EFF_OCR_CMD")]
    ocr_cmd: Option<String>,

    /// Detections below this confidence are ignored.
    #[arg(long, global = true, env = "EFF_OCR_FLOOR", default_value_t = 0.0)]
    ocr_floor: f64,

    #[arg(long, global = true, env = "EFF_EDITOR_MODE", value_enum, default_value_t = EditorMode::Precomputed)]
    editor_mode: EditorMode,

    /// Editor command line; receives --source, --target-id, --target-text, --quad.
    #[arg(long, global = true, env = "EFF_EDITOR_CMD")]
    editor_cmd: Option<String>,

    /// Per-invocation timeout for backend commands, in seconds.
    #[arg(
        long,
        global = true,
        env = "EFF_BACKEND_TIMEOUT",
        default_value_t = 120
    )]
    backend_timeout: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Resize {
    Strict,
    Bilinear,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OcrMode {
    GroundTruth,
    External,
    Disabled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EditorMode {
    Precomputed,
    External,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Spill {
    None,
    One,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one scene's field and export it as PFM, heatmap and profile.
    Field {
        #[arg(long, env = "EFF_SCENE")]
        scene: String,
        /// Also write the cross-section of this row as CSV.
        #[arg(long, env = "EFF_ROW")]
        row: Option<u32>,
    },
    /// Blend an edited image into its source through a PFM field.
    Blend {
        #[arg(long, env = "EFF_SOURCE")]
        source: PathBuf,
        #[arg(long, env = "EFF_EDITED")]
        edited: PathBuf,
        #[arg(long, env = "EFF_FIELD")]
        field: PathBuf,
        /// Output PNG; defaults to `<out-dir>/blended.png`.
        #[arg(long, env = "EFF_OUT")]
        out: Option<PathBuf>,
    },
    /// Edit, blend and evaluate every scene of the manifest.
    Run,
    /// Score existing output images against the manifest.
    Eval {
        /// Holds `<scene_id>.png` or a previous run's `scenes/<scene_id>/output.png`.
        #[arg(long, env = "EFF_OUTPUTS")]
        outputs: PathBuf,
    },
    /// Run the pipeline over a grid of sigma and pad-core values.
    Sweep {
        /// Comma-separated; defaults to --sigma.
        #[arg(long, env = "EFF_SIGMA_VALUES", value_delimiter = ',')]
        sigma_values: Vec<f64>,
        /// Comma-separated; defaults to --pad-core.
        #[arg(long, env = "EFF_PAD_CORE_VALUES", value_delimiter = ',')]
        pad_core_values: Vec<f64>,
    },
    /// Write a seeded synthetic corpus and its manifest.
    Synth {
        #[arg(long, env = "EFF_SYNTH_SCENES", default_value_t = 50)]
        scenes: usize,
        #[arg(long, env = "EFF_SYNTH_REGIONS", default_value_t = 4)]
        regions: usize,
        #[arg(long, env = "EFF_SYNTH_WIDTH", default_value_t = 320)]
        width: u32,
        #[arg(long, env = "EFF_SYNTH_HEIGHT", default_value_t = 240)]
        height: u32,
        /// Which non-target regions the synthetic editor corrupts.
        #[arg(long, env = "EFF_SYNTH_SPILL", value_enum, default_value_t = Spill::All)]
        spill: Spill,
        /// Leave the target untouched instead of repainting it.
        #[arg(long, env = "EFF_SYNTH_NO_EDIT")]
        no_edit: bool,
    },
}

/// Marks failures that map to exit status 2.
#[derive(Debug)]
struct ConfigFailure(String);

impl std::fmt::Display for ConfigFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigFailure {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigFailure(msg.into()).into()
}

/// Routes configuration errors from the library to exit status 2.
fn lift(e: eff_core::Error) -> anyhow::Error {
    if e.is_configuration() {
        config_err(e.to_string())
    } else {
        e.into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            // library errors already embed their sources; skip repeats
            let mut msg = String::new();
            for cause in e.chain().map(|c| c.to_string()) {
                if !msg.contains(&cause) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&cause);
                }
            }
            eprintln!("error: {msg}");
            if e.downcast_ref::<ConfigFailure>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn options(cli: &Cli) -> Result<PipelineOptions> {
    let f = &cli.field;
    let config = FieldConfig {
        sigma: f.sigma,
        pad_core: f.pad_core,
        pad_protect: f.pad_protect,
        smooth_sigma: f.smooth_sigma,
        sim_threshold: f.sim_threshold,
        psnr_threshold: f.psnr_threshold,
        psnr_cap: f.psnr_cap,
    };
    let b = &cli.backends;
    let timeout = Duration::from_secs(b.backend_timeout);
    let command = |flag: &str, cmd: &Option<String>| -> Result<Option<CommandSpec>> {
        match cmd {
            Some(line) => Ok(Some(CommandSpec::parse(line).map_err(lift)?)),
            None => Err(config_err(format!("{flag} is required in external mode"))),
        }
    };
    let ocr = OcrBackend {
        mode: match b.ocr_mode {
            OcrMode::GroundTruth => OcrBackendMode::GroundTruth,
            OcrMode::External => OcrBackendMode::ExternalCommand,
            OcrMode::Disabled => OcrBackendMode::Disabled,
        },
        command: match b.ocr_mode {
            OcrMode::External => command("--ocr-cmd", &b.ocr_cmd)?,
            _ => None,
        },
        timeout,
        confidence_floor: b.ocr_floor,
    };
    let editor = EditorBackend {
        mode: match b.editor_mode {
            EditorMode::Precomputed => EditorBackendMode::Precomputed,
            EditorMode::External => EditorBackendMode::ExternalCommand,
        },
        command: match b.editor_mode {
            EditorMode::External => command("--editor-cmd", &b.editor_cmd)?,
            EditorMode::Precomputed => None,
        },
        timeout,
    };
    let opts = PipelineOptions {
        config,
        ocr,
        editor,
        resize: match f.resize {
            Resize::Strict => ResizePolicy::Strict,
            Resize::Bilinear => ResizePolicy::Bilinear,
        },
        jobs: cli.jobs,
        weighting: if f.scene_weighted {
            SpillWeighting::Scene
        } else {
            SpillWeighting::Region
        },
    };
    opts.validate().map_err(lift)?;
    Ok(opts)
}

fn manifest(cli: &Cli) -> Result<Manifest> {
    let path = cli
        .manifest
        .as_deref()
        .ok_or_else(|| config_err("--manifest is required for this command"))?;
    Manifest::load(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    std::fs::write(path, json)?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let opts = options(&cli)?;
    let out = cli.out_dir.clone();
    match &cli.command {
        Command::Field { scene, row } => {
            let manifest = manifest(&cli)?;
            let dir = out.join(scene);
            let outputs = FieldOutputs {
                pfm: Some(dir.join("field.pfm")),
                heatmap: Some(dir.join("field.png")),
                profile: row.map(|r| (r, dir.join(format!("profile_row{r}.csv")))),
            };
            let plan = cmd_field(&manifest, scene, &opts, &outputs).map_err(lift)?;
            for s in &plan.protect.skipped {
                eprintln!(
                    "warning: region '{}' not protected: {}",
                    s.region_id, s.reason
                );
            }
            println!("{}", dir.display());
            Ok(0)
        }
        Command::Blend {
            source,
            edited,
            field,
            out: dest,
        } => {
            let src = RasterImage::load_png(source)?;
            let ed = RasterImage::load_png(edited)?;
            let field = read_pfm(field)?;
            let blended = blend(&src, &ed, &field, opts.resize)?;
            let dest = dest.clone().unwrap_or_else(|| out.join("blended.png"));
            if let Some(parent) = dest.parent() {
                std::fs::create_dir_all(parent)?;
            }
            blended.save_png(&dest)?;
            println!("{}", dest.display());
            Ok(0)
        }
        Command::Run => {
            let manifest = manifest(&cli)?;
            let report = cmd_run(&manifest, &opts, &out).map_err(lift)?;
            summarize(&report.errors);
            if let (Some(b), Some(e)) = (&report.baseline, &report.eff) {
                println!(
                    "baseline spill {}  eff spill {}",
                    fmt_opt(b.overall.spill_rate),
                    fmt_opt(e.overall.spill_rate)
                );
            }
            Ok(report.exit_code() as u8)
        }
        Command::Eval { outputs } => {
            let manifest = manifest(&cli)?;
            let report = cmd_eval(&manifest, outputs, &opts, &out).map_err(lift)?;
            summarize(&report.errors);
            if let Some(c) = &report.corpus {
                println!(
                    "spill {}  found {}",
                    fmt_opt(c.overall.spill_rate),
                    fmt_opt(c.overall.found_rate)
                );
            }
            Ok(report.exit_code() as u8)
        }
        Command::Sweep {
            sigma_values,
            pad_core_values,
        } => {
            let manifest = manifest(&cli)?;
            let or_base =
                |v: &Vec<f64>, base: f64| if v.is_empty() { vec![base] } else { v.clone() };
            let spec = SweepSpec {
                sigma_values: or_base(sigma_values, opts.config.sigma),
                pad_core_values: or_base(pad_core_values, opts.config.pad_core),
                base: opts.config,
            };
            let table = cmd_sweep(&manifest, &spec, &opts).map_err(lift)?;
            std::fs::create_dir_all(&out)?;
            let csv_path = out.join("sweep.csv");
            table.write_csv(std::fs::File::create(&csv_path)?)?;
            write_json(&out.join("sweep.json"), &table)?;
            summarize(&table.errors);
            println!("{}", csv_path.display());
            Ok(table.exit_code() as u8)
        }
        Command::Synth {
            scenes,
            regions,
            width,
            height,
            spill,
            no_edit,
        } => {
            if *scenes == 0 {
                return Err(config_err("--scenes must be at least 1"));
            }
            let spec = CorpusSpec {
                scenes: *scenes,
                regions_per_scene: *regions,
                width: *width,
                height: *height,
                edit_target: !no_edit,
                spill: match spill {
                    Spill::None => SpillPattern::None,
                    Spill::One => SpillPattern::One,
                    Spill::All => SpillPattern::All,
                },
                ..CorpusSpec::default()
            };
            let corpus = generate_corpus(&spec, cli.seed).map_err(lift)?;
            let path = write_corpus(&out, &corpus)
                .with_context(|| format!("writing corpus to {}", out.display()))?;
            println!("{}", path.display());
            Ok(0)
        }
    }
}

fn summarize(errors: &[eff_core::harness::SceneError]) {
    for e in errors {
        eprintln!("scene '{}' failed: {}", e.scene_id, e.reason);
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into())
}
