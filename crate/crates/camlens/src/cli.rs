//! `camlens` command-line interface.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use camlens_core::cam::class_activation_map;
use camlens_core::{
    render_overlay, threshold_mask, Model, DEFAULT_ALPHA, DEFAULT_THRESHOLD, DEFAULT_TOP_K,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::codec::{decode_image, encode_image, encode_ppm, ImageFormat};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::loader::load_model_files;
use crate::pipeline::{classify, ClassifyPayload, GridDims};
use crate::service::{self, AppState, ServiceConfig};
use crate::store::CaptureStore;
use crate::weights::encode_weights;

#[derive(Debug, Parser)]
#[command(
    name = "camlens",
    version,
    about = "CNN classification with class activation maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one image and print predictions and CAM grids as JSON.
    Classify(ClassifyArgs),
    /// Print the layer table and CAM geometry of a model.
    Inspect(ModelArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Write a generated model (and for `tiny`, its test image) to a directory.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON model manifest.
    #[arg(long)]
    pub model_manifest: PathBuf,
    /// CAMW weight blob.
    #[arg(long)]
    pub model_weights: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// PNG or binary PPM input.
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOP_K, value_parser = positive)]
    pub top_k: usize,
    /// Write the red-block CAM overlay here.
    #[arg(long)]
    pub overlay_out: Option<PathBuf>,
    /// Overlay encoding; defaults to the output file extension, else PNG.
    #[arg(long, value_enum)]
    pub overlay_format: Option<OverlayFormat>,
    /// Class whose CAM is rendered; defaults to the top prediction.
    #[arg(long)]
    pub cam_class: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = unit_interval)]
    pub threshold: f32,
    #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = unit_interval)]
    pub alpha: f32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OverlayFormat {
    Png,
    Ppm,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Capture log and images live here.
    #[arg(long, env = "CAMLENS_DATA_DIR")]
    pub data_dir: PathBuf,
    /// Browser app bundle served at `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    #[arg(long, default_value_t = service::DEFAULT_BODY_LIMIT)]
    pub max_body_bytes: usize,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(value_enum)]
    pub kind: FixtureKind,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FixtureKind {
    /// 8x8x3 input, 2x2 grid, 4 classes.
    Tiny,
    /// 224x224x3 input, 7x7 grid, 1000 classes, random weights.
    Reference,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn unit_interval(s: &str) -> std::result::Result<f32, String> {
    let v: f32 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [0, 1]"))
    }
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Classify(args) => cmd_classify(&args, out),
        Command::Inspect(args) => cmd_inspect(&args, out),
        Command::Serve(args) => cmd_serve(args),
        Command::Fixture(args) => cmd_fixture(&args, out),
    }
}

#[derive(Serialize)]
struct OverlayInfo {
    path: PathBuf,
    class_index: usize,
    threshold: f32,
    alpha: f32,
}

#[derive(Serialize)]
struct ClassifyOutput {
    #[serde(flatten)]
    payload: ClassifyPayload,
    #[serde(skip_serializing_if = "Option::is_none")]
    overlay: Option<OverlayInfo>,
}

fn load(args: &ModelArgs) -> Result<Model> {
    load_model_files(&args.model_manifest, &args.model_weights)
}

pub fn cmd_classify(args: &ClassifyArgs, out: &mut impl Write) -> Result<()> {
    let model = load(&args.model)?;
    let classes = model.num_classes();
    if args.top_k > classes {
        return Err(Error::InvalidRequest(format!(
            "--top-k {} exceeds the model's {classes} classes",
            args.top_k
        )));
    }
    let image = decode_image(&fs::read(&args.image)?)?;
    let result = classify(&model, &image, args.top_k)?;
    let payload = result.payload(model.cam_grid());

    let overlay = match &args.overlay_out {
        None => None,
        Some(path) => {
            let class_index = args.cam_class.unwrap_or(result.predictions[0].index);
            if class_index >= classes {
                return Err(Error::InvalidRequest(format!(
                    "--cam-class {class_index} out of range for {classes} classes"
                )));
            }
            let cam = class_activation_map(&model, &result.forward, class_index)?;
            let mask = threshold_mask(&cam, args.threshold)?;
            let rendered = render_overlay(&image, &mask, args.alpha)?;
            let format = match args.overlay_format {
                Some(OverlayFormat::Png) => ImageFormat::Png,
                Some(OverlayFormat::Ppm) => ImageFormat::Ppm,
                None => ImageFormat::from_extension(path).unwrap_or(ImageFormat::Png),
            };
            let bytes = match format {
                ImageFormat::Png => encode_image(&rendered, format)?,
                ImageFormat::Ppm => encode_ppm(&rendered),
            };
            fs::write(path, bytes)?;
            Some(OverlayInfo {
                path: path.clone(),
                class_index,
                threshold: args.threshold,
                alpha: args.alpha,
            })
        }
    };
    write_json(out, &ClassifyOutput { payload, overlay })
}

#[derive(Serialize)]
struct LayerRow {
    index: usize,
    kind: &'static str,
    output_shape: Vec<usize>,
    parameters: usize,
}

#[derive(Serialize)]
struct InspectOutput {
    name: String,
    input: [usize; 3],
    layers: Vec<LayerRow>,
    parameters: usize,
    feature_channels: usize,
    classes: usize,
    grid: GridDims,
}

pub fn cmd_inspect(args: &ModelArgs, out: &mut impl Write) -> Result<()> {
    let model = load(args)?;
    let (h, w) = model.cam_grid();
    let report = InspectOutput {
        name: model.manifest().name.clone(),
        input: model.input_shape(),
        layers: model
            .layer_summaries()
            .iter()
            .enumerate()
            .map(|(index, s)| LayerRow {
                index,
                kind: s.kind,
                output_shape: s.output_shape.clone(),
                parameters: s.parameters,
            })
            .collect(),
        parameters: model.parameter_count(),
        feature_channels: model.feature_channels(),
        classes: model.num_classes(),
        grid: GridDims { h, w },
    };
    write_json(out, &report)
}

pub fn cmd_serve(args: ServeArgs) -> Result<()> {
    let model = Arc::new(load(&args.model)?);
    let store = Arc::new(CaptureStore::open(&args.data_dir)?);
    let app = service::router(
        AppState { model, store },
        ServiceConfig {
            body_limit: args.max_body_bytes,
            static_dir: args.static_dir,
        },
    );
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .map_err(|e| {
                Error::Io(std::io::Error::new(
                    e.kind(),
                    format!("cannot bind {}:{}: {e}", args.host, args.port),
                ))
            })?;
        let addr: SocketAddr = listener.local_addr()?;
        eprintln!("camlens listening on http://{addr}");
        tracing::info!(%addr, data_dir = %args.data_dir.display(), "service started");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

pub fn cmd_fixture(args: &FixtureArgs, out: &mut impl Write) -> Result<()> {
    fs::create_dir_all(&args.out_dir)?;
    let (manifest, weights) = match args.kind {
        FixtureKind::Tiny => fixtures::tiny_model_parts(),
        FixtureKind::Reference => fixtures::reference_scale_parts(fixtures::REFERENCE_SEED, 1000),
    };
    let mut written = vec![
        write_file(
            &args.out_dir,
            "manifest.json",
            crate::manifest::manifest_to_json(&manifest).as_bytes(),
        )?,
        write_file(&args.out_dir, "weights.camw", &encode_weights(&weights))?,
    ];
    if let FixtureKind::Tiny = args.kind {
        let image = fixtures::tiny_image();
        written.push(write_file(&args.out_dir, "image.ppm", &encode_ppm(&image))?);
        written.push(write_file(
            &args.out_dir,
            "image.png",
            &encode_image(&image, ImageFormat::Png)?,
        )?);
    }
    write_json(out, &serde_json::json!({ "written": written }))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}

fn write_json(out: &mut impl Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| Error::Encode(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}
