//! Command-line front end for `texstego`.
//!
//! Results and warnings are written as JSON lines to the output stream;
//! diagnostics go to the error stream. Exit codes: 0 success, 1 usage,
//! 2 data or format, 3 numeric.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use texstego::io::{
    export_png, load_image, load_key, load_matrix, save_basis, save_key, save_matrix,
    save_pca_model, save_stego, PngDepth,
};
use texstego::texture_codec::plane_side;
use texstego::{
    build_basis, combine_faces, embed, extract_with_mode, pack_texture, pca_fit, prepare_cover,
    quality_report, synth_dataset, EmbedParams, Error, ExtractionMode, FloatImage, Image, Mat,
    MissingPolicy,
};

pub use config::{Config, CONFIG_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "texstego", version, about = "Hide face textures in cover images and combine face models")]
struct Cli {
    /// Seed for every random choice (synthetic data, covers).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML config file; overrides TEXSTEGO_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More diagnostics on stderr; repeatable.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Also write the JSON lines to this file.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hide a texture matrix in a cover image.
    Embed(EmbedArgs),
    /// Recover a texture matrix from a stego image and its key.
    Extract(ExtractArgs),
    /// Fit two faces, re-express the first in the second's basis and average.
    Combine(CombineArgs),
    /// Fit a PCA model to one N×3 matrix.
    PcaFit(PcaFitArgs),
    /// Build a mean-plus-eigenvector basis from several N×3 samples.
    BasisBuild(BasisArgs),
    /// Compare two images.
    Psnr(PsnrArgs),
    /// Pack a texture into three square planes.
    Pack(PackArgs),
    /// Write a synthetic face dataset and, optionally, a random cover.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Key,
    Literal,
}

impl From<ModeArg> for ExtractionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Key => ExtractionMode::KeyBased,
            ModeArg::Literal => ExtractionMode::Literal,
        }
    }
}

#[derive(Debug, Args)]
struct EmbedArgs {
    /// Cover image, PNG or STG1.
    #[arg(long)]
    cover: PathBuf,
    /// N×3 texture matrix (TXM1).
    #[arg(long)]
    texture: PathBuf,
    #[arg(long, default_value_t = texstego::stego::DEFAULT_ALPHA, allow_negative_numbers = true)]
    alpha: f64,
    /// Extraction mode recorded in the key.
    #[arg(long, value_enum, default_value = "key")]
    mode: ModeArg,
    /// Stego output. A `.png` extension writes a quantised PNG.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    key: PathBuf,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Stego image, STG1 or PNG.
    #[arg(long)]
    stego: PathBuf,
    #[arg(long)]
    key: PathBuf,
    /// Override the mode recorded in the key.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Recovered texture (TXM1).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CombineArgs {
    /// Exactly two texture matrices: A then B.
    #[arg(long, num_args = 1, required = true)]
    texture: Vec<PathBuf>,
    /// Optional two shape matrices: A then B.
    #[arg(long, num_args = 1)]
    shape: Vec<PathBuf>,
    /// Treat non-finite entries as missing and impute them.
    #[arg(long)]
    als: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PcaFitArgs {
    #[arg(long, conflicts_with = "shape", required_unless_present = "shape")]
    texture: Option<PathBuf>,
    #[arg(long)]
    shape: Option<PathBuf>,
    #[arg(long)]
    als: bool,
    /// Model output (PCA1).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BasisArgs {
    /// Sample textures; repeat the flag.
    #[arg(long, num_args = 1, conflicts_with = "shape", required_unless_present = "shape")]
    texture: Vec<PathBuf>,
    /// Sample shapes; repeat the flag.
    #[arg(long, num_args = 1)]
    shape: Vec<PathBuf>,
    /// Basis output (PCA1).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PsnrArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Debug, Args)]
struct PackArgs {
    #[arg(long)]
    texture: PathBuf,
    /// Output directory for plane_r.txm, plane_g.txm, plane_b.txm.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    vertices: usize,
    #[arg(long, default_value_t = 2)]
    samples: usize,
    /// Also write cover.png, a random 16-bit cover sized for the textures.
    #[arg(long)]
    cover: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

/// Failure of one command, already classified by exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parameter(_) => EXIT_USAGE,
            e if e.is_numeric() => EXIT_NUMERIC,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Collects JSON lines for the output stream and the optional `--json` file.
struct Emitter<'a> {
    out: &'a mut dyn Write,
    lines: Vec<String>,
}

impl Emitter<'_> {
    fn emit(&mut self, value: Value) {
        let line = value.to_string();
        // A closed stdout is not worth failing the command over.
        let _ = writeln!(self.out, "{line}");
        self.lines.push(line);
    }
}

struct Ctx<'a, 'b> {
    config: Config,
    seed: u64,
    verbose: u8,
    emitter: Emitter<'a>,
    err: &'b mut dyn Write,
}

impl Ctx<'_, '_> {
    fn note(&mut self, msg: impl std::fmt::Display) {
        if self.verbose > 0 {
            let _ = writeln!(self.err, "texstego: {msg}");
        }
    }
}

/// Runs one invocation, reading the config path from `TEXSTEGO_CONFIG`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    run_with_config_env(argv, env, out, err)
}

/// [`run`] with the environment's config path passed in explicitly.
pub fn run_with_config_env<I, S>(
    argv: I,
    env_config: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };

    let config = match Config::resolve(cli.config.as_deref(), env_config) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "texstego: {e}");
            return EXIT_DATA;
        }
    };

    let mut ctx = Ctx {
        config,
        seed: cli.seed,
        verbose: cli.verbose,
        emitter: Emitter {
            out,
            lines: Vec::new(),
        },
        err,
    };
    let result = dispatch(&mut ctx, cli.command);

    if let Some(path) = &cli.json {
        let mut text = ctx.emitter.lines.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        if let Err(e) = std::fs::write(path, text) {
            let _ = writeln!(ctx.err, "texstego: cannot write {}: {e}", path.display());
            return EXIT_DATA;
        }
    }

    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(ctx.err, "texstego: {}", f.message);
            f.code
        }
    }
}

fn dispatch(ctx: &mut Ctx, command: Command) -> Outcome {
    match command {
        Command::Embed(a) => cmd_embed(ctx, a),
        Command::Extract(a) => cmd_extract(ctx, a),
        Command::Combine(a) => cmd_combine(ctx, a),
        Command::PcaFit(a) => cmd_pca_fit(ctx, a),
        Command::BasisBuild(a) => cmd_basis_build(ctx, a),
        Command::Psnr(a) => cmd_psnr(ctx, a),
        Command::Pack(a) => cmd_pack(ctx, a),
        Command::Synth(a) => cmd_synth(ctx, a),
    }
}

/// JSON for a decibel value; infinity becomes the string `"inf"`.
fn db(v: f64) -> Value {
    if v.is_infinite() && v > 0.0 {
        json!("inf")
    } else {
        json!(v)
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn is_png(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

fn png_depth_for(peak: f64) -> PngDepth {
    if peak > 255.0 {
        PngDepth::Sixteen
    } else {
        PngDepth::Eight
    }
}

fn create_dir(dir: &Path) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Failure::from(Error::io(dir, e)))
}

fn cmd_embed(ctx: &mut Ctx, a: EmbedArgs) -> Outcome {
    let cover = load_image(&a.cover)?;
    let texture = load_matrix(&a.texture)?;
    if texture.cols() != 3 {
        return Err(Error::Dimension(format!(
            "texture must be N×3, got {}x{}",
            texture.rows(),
            texture.cols()
        ))
        .into());
    }
    let side = plane_side(texture.rows());
    let cover = if cover.dims() != (2 * side, 2 * side) {
        let (h, w) = cover.dims();
        ctx.emitter.emit(json!({
            "warning": "cover_resized",
            "from": [h, w],
            "to": [2 * side, 2 * side],
        }));
        prepare_cover(&cover, side)?
    } else {
        cover
    };
    let params = EmbedParams {
        alpha: a.alpha,
        mode: a.mode.into(),
        family: ctx.config.wavelet,
    };
    ctx.note(format_args!("embedding {} rows into {}x{}", texture.rows(), 2 * side, 2 * side));
    let res = embed(&cover, &texture, params)?;
    for w in &res.warnings {
        ctx.emitter.emit(serde_json::to_value(w).expect("warning serialises"));
    }

    let psnr_db = if is_png(&a.out) {
        let depth = png_depth_for(res.stego.peak());
        export_png(&res.stego, depth, &a.out)?;
        // Report what was actually written.
        let written = load_image(&a.out)?.with_peak(res.stego.peak())?;
        let report = quality_report(&cover, &written)?;
        ctx.emitter.emit(json!({
            "warning": "lossy_output",
            "path": path_str(&a.out),
            "detail": "PNG output is quantised; key-based extraction will not be exact",
        }));
        report.psnr_db
    } else {
        save_stego(&res.stego, &a.out)?;
        res.psnr_db
    };
    save_key(&res.key, &a.key)?;
    ctx.emitter.emit(json!({
        "verb": "embed",
        "psnr_db": db(psnr_db),
        "alpha": a.alpha,
        "side": res.key.side,
        "pad_count": res.key.pad_count,
        "stego": path_str(&a.out),
        "key": path_str(&a.key),
    }));
    Ok(())
}

fn cmd_extract(ctx: &mut Ctx, a: ExtractArgs) -> Outcome {
    let stego = load_image(&a.stego)?;
    let key = load_key(&a.key)?;
    // A PNG stego carries its own depth; realign to the key's peak.
    let stego = if stego.peak() != key.peak {
        let scale = key.peak / stego.peak();
        stego.map(|v| v * scale).with_peak(key.peak)?
    } else {
        stego
    };
    let mode = a.mode.map(ExtractionMode::from).unwrap_or(key.mode);
    let texture = extract_with_mode(&stego, &key, mode)?;
    save_matrix(&texture, &a.out)?;
    ctx.emitter.emit(json!({
        "verb": "extract",
        "rows": texture.rows(),
        "mode": mode,
        "out": path_str(&a.out),
    }));
    Ok(())
}

fn policy(ctx: &Ctx, als: bool) -> MissingPolicy {
    if als {
        MissingPolicy::Als(ctx.config.als)
    } else {
        MissingPolicy::None
    }
}

fn cmd_combine(ctx: &mut Ctx, a: CombineArgs) -> Outcome {
    if a.texture.len() != 2 {
        return Err(usage(format!("combine needs exactly two --texture files, got {}", a.texture.len())));
    }
    if !a.shape.is_empty() && a.shape.len() != 2 {
        return Err(usage(format!("combine takes zero or two --shape files, got {}", a.shape.len())));
    }
    let policy = policy(ctx, a.als);
    create_dir(&a.out)?;

    let mut pairs = vec![("texture", &a.texture)];
    if !a.shape.is_empty() {
        pairs.push(("shape", &a.shape));
    }
    for (kind, files) in pairs {
        let x = load_matrix(&files[0])?;
        let y = load_matrix(&files[1])?;
        let c = combine_faces(&x, &y, policy)?;
        let out = a.out.join(format!("{kind}_combined.txm"));
        save_matrix(&c.combined, &out)?;
        let dist = |p: &Mat, q: &Mat| p.sub(q).map(|d| d.frobenius_norm());
        ctx.emitter.emit(json!({
            "verb": "combine",
            "kind": kind,
            "rows": c.combined.rows(),
            "distance_a": dist(&c.combined, &x)?,
            "distance_b": dist(&c.combined, &y)?,
            "distance_ab": dist(&x, &y)?,
            "out": path_str(&out),
        }));
    }
    Ok(())
}

fn cmd_pca_fit(ctx: &mut Ctx, a: PcaFitArgs) -> Outcome {
    let input = a.texture.or(a.shape).expect("clap requires one input");
    let data = load_matrix(&input)?;
    let model = pca_fit(&data, policy(ctx, a.als))?;
    save_pca_model(&model, &a.out)?;
    ctx.emitter.emit(json!({
        "verb": "pca-fit",
        "observations": model.observations(),
        "variables": model.variables(),
        "explained_variance": model.explained_variance,
        "out": path_str(&a.out),
    }));
    Ok(())
}

fn cmd_basis_build(ctx: &mut Ctx, a: BasisArgs) -> Outcome {
    let files = if a.texture.is_empty() { &a.shape } else { &a.texture };
    let samples = files.iter().map(load_matrix).collect::<texstego::Result<Vec<Mat>>>()?;
    let model = build_basis(&samples)?;
    save_basis(&model, &a.out)?;
    ctx.emitter.emit(json!({
        "verb": "basis-build",
        "samples": model.sample_count,
        "rank": model.rank(),
        "eigenvalues": model.eigenvalues(),
        "out": path_str(&a.out),
    }));
    Ok(())
}

fn cmd_psnr(ctx: &mut Ctx, a: PsnrArgs) -> Outcome {
    let x = load_image(&a.a)?;
    let y = load_image(&a.b)?;
    let report = quality_report(&x, &y)?;
    ctx.emitter.emit(serde_json::to_value(report).expect("report serialises"));
    Ok(())
}

fn cmd_pack(ctx: &mut Ctx, a: PackArgs) -> Outcome {
    let texture = load_matrix(&a.texture)?;
    let packed = pack_texture(&texture)?;
    create_dir(&a.out)?;
    let mut files = Vec::with_capacity(3);
    for (plane, name) in packed.planes.iter().zip(["r", "g", "b"]) {
        let path = a.out.join(format!("plane_{name}.txm"));
        save_matrix(plane, &path)?;
        files.push(path_str(&path));
    }
    ctx.emitter.emit(json!({
        "verb": "pack",
        "rows": packed.original_rows,
        "side": packed.side,
        "pad_count": packed.pad_count,
        "planes": files,
    }));
    Ok(())
}

/// Uniform random 16-bit cover, `size` square.
fn random_cover(seed: u64, size: usize) -> texstego::Result<FloatImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..size * size * 3)
        .map(|_| f64::from(rng.gen::<u16>()))
        .collect();
    Image::from_interleaved(size, size, &samples, 65535.0)
}

fn cmd_synth(ctx: &mut Ctx, a: SynthArgs) -> Outcome {
    let faces = synth_dataset::<f64>(ctx.seed, a.vertices, a.samples)?;
    create_dir(&a.out)?;
    for (i, face) in faces.iter().enumerate() {
        save_matrix(&face.shape, a.out.join(format!("shape_{i:03}.txm")))?;
        save_matrix(&face.texture, a.out.join(format!("texture_{i:03}.txm")))?;
    }
    let mut report = json!({
        "verb": "synth",
        "seed": ctx.seed,
        "vertices": a.vertices,
        "samples": a.samples,
        "out": path_str(&a.out),
    });
    if a.cover {
        let size = 2 * plane_side(a.vertices);
        // Offset so the cover is not correlated with the dataset stream.
        let cover = random_cover(ctx.seed ^ 0x636f_7665_72, size)?;
        let path = a.out.join("cover.png");
        export_png(&cover, PngDepth::Sixteen, &path)?;
        report["cover"] = json!(path_str(&path));
    }
    ctx.note(format_args!("wrote {} faces", faces.len()));
    ctx.emitter.emit(report);
    Ok(())
}
