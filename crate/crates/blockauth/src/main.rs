use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockauth::bench::{self, Distortion, SweepSpec};
use blockauth::codec::{self, jpeg_roundtrip, load_image, save_image};
use blockauth::keys::{code_bits_from_bitmap, parse_key};
use blockauth::{report, Error, Result};
use blockauth_core::{
    add_gaussian_noise, estimate_security, render_tamper_map, sign_image, verify_image_with,
    Aggregation, AuthKey, BlockGrid, ChannelMode, CodeSource, Descriptor, Margin, SignConfig,
    VerifyOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "blockauth",
    version,
    about = "Keyed block authentication for images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sign an image and write its descriptor.
    Sign(SignArgs),
    /// Verify an image against a descriptor. Exit 0 authentic, 1 tampered, 2 error.
    Verify(VerifyArgs),
    /// Print the blind-guess strength of a descriptor.
    Security { descriptor: PathBuf },
    /// Run a robustness sweep and emit CSV.
    Bench(BenchArgs),
    /// Write a distorted copy of an image (Gaussian noise or JPEG round-trip).
    Distort(DistortArgs),
}

#[derive(Args)]
struct KeyArg {
    /// 16 hex digits. Prefer the AUTH_KEY environment variable.
    #[arg(short = 'k', long = "key", env = "AUTH_KEY", hide_env_values = true)]
    key: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    PerChannel,
    Luma,
}

impl From<Mode> for ChannelMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::PerChannel => ChannelMode::PerChannel,
            Mode::Luma => ChannelMode::Luma,
        }
    }
}

#[derive(Args)]
struct SignArgs {
    image: PathBuf,
    #[command(flatten)]
    key: KeyArg,
    #[arg(short = 'B', long = "block-size", default_value_t = 8)]
    block_size: usize,
    #[arg(short = 'T', long = "margin", default_value_t = 0.2)]
    margin: f64,
    #[arg(short = 'R', long = "reps", default_value_t = 1)]
    reps: usize,
    #[arg(long, value_enum, default_value_t = Mode::PerChannel)]
    mode: Mode,
    /// Bitmap with one pixel per block; dark pixels are 1 bits.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Descriptor output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    image: PathBuf,
    #[arg(short = 'd', long)]
    descriptor: PathBuf,
    #[command(flatten)]
    key: KeyArg,
    /// Largest mismatch fraction still reported as authentic.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Pass a block when most repetitions agree instead of all.
    #[arg(long)]
    majority: bool,
    /// Report output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tamper map output (.pgm or .png).
    #[arg(long = "map-out")]
    map_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Noise,
    Jpeg,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    kind: Kind,
    image: PathBuf,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long = "block-sizes", value_delimiter = ',')]
    block_sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    margins: Option<Vec<f64>>,
    /// Variances (noise) or qualities (jpeg).
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'R', long = "reps", default_value_t = 1)]
    reps: usize,
    #[arg(short = 'k', long = "key", env = "AUTH_KEY", hide_env_values = true)]
    key: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::PerChannel)]
    mode: Mode,
    /// Write one tamper map per trial into this directory.
    #[arg(long = "map-dir")]
    map_dir: Option<PathBuf>,
}

#[derive(Args)]
struct DistortArgs {
    #[arg(value_enum)]
    kind: Kind,
    image: PathBuf,
    /// Variance (noise) or quality (jpeg).
    #[arg(long)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Writes through a temporary sibling so a failure leaves no partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_descriptor(path: &Path) -> Result<Descriptor> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Descriptor::decode(&bytes)?)
}

fn key_of(arg: &KeyArg) -> Result<AuthKey> {
    parse_key(&arg.key)
}

fn cmd_sign(a: &SignArgs) -> Result<()> {
    let key = key_of(&a.key)?;
    let image = load_image(&a.image)?;
    let mode = ChannelMode::from(a.mode);
    let code = match &a.code {
        None => CodeSource::KeyDerived,
        Some(path) => {
            let grid = BlockGrid::new(image.width(), image.height(), a.block_size)?;
            let bitmap = load_image(path)?;
            CodeSource::Bits(code_bits_from_bitmap(
                &bitmap,
                &grid,
                mode.effective_channels(image.channels()),
            )?)
        }
    };
    let config = SignConfig {
        block_size: a.block_size,
        margin: Margin::new(a.margin)?,
        reps: a.reps,
        mode,
        code,
    };
    let descriptor = sign_image(&image, key, &config)?;
    write_atomic(&a.out, &descriptor.encode())?;

    let grid = descriptor.grid();
    let security = estimate_security(&descriptor);
    println!("descriptor: {}", a.out.display());
    println!("code_bits: {}", security.bits);
    println!("log2_space: {}", security.log2_space);
    if security.weak {
        println!("warning: fewer than 64 code bits; a blind guess is feasible");
    }
    println!(
        "uncovered: {} px right, {} px bottom",
        grid.uncovered_right(),
        grid.uncovered_bottom()
    );
    Ok(())
}

/// Returns whether the image was judged tampered.
fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    if !(0.0..=1.0).contains(&a.tau) {
        return Err(Error::InvalidArgument("--tau must lie in [0, 1]".into()));
    }
    let key = key_of(&a.key)?;
    let descriptor = read_descriptor(&a.descriptor)?;
    let image = load_image(&a.image)?;
    let options = VerifyOptions {
        aggregation: if a.majority {
            Aggregation::Majority
        } else {
            Aggregation::Any
        },
        check_fingerprint: true,
    };
    let result = verify_image_with(&image, &descriptor, key, &options)?;
    write_output(a.out.as_deref(), &report::render(&result, a.tau))?;
    if let Some(map) = &a.map_out {
        save_image(&render_tamper_map(&result), map)?;
    }
    let tampered = report::is_tampered(&result, a.tau);
    eprintln!(
        "cdr {:.6}, {} of {} blocks flagged: {}",
        result.cdr,
        result.flagged_blocks(),
        result.matched.len(),
        if tampered { "TAMPERED" } else { "authentic" }
    );
    Ok(tampered)
}

fn cmd_security(path: &Path) -> Result<()> {
    let d = read_descriptor(path)?;
    let s = estimate_security(&d);
    println!("code_bits: {}", s.bits);
    println!("log2_space: {}", s.log2_space);
    println!("weak: {}", s.weak);
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let image = load_image(&a.image)?;
    let mut spec = match a.kind {
        Kind::Noise => SweepSpec::noise(),
        Kind::Jpeg => SweepSpec::jpeg(),
    };
    if let Some(b) = &a.block_sizes {
        spec.block_sizes = b.clone();
    }
    if let Some(m) = &a.margins {
        spec.margins = m.clone();
    }
    if let Some(l) = &a.levels {
        spec.levels = l.clone();
    }
    spec.trials = a.trials;
    spec.base_seed = a.seed;
    spec.reps = a.reps;
    spec.mode = a.mode.into();
    if let Some(k) = &a.key {
        spec.key = parse_key(k)?.value();
    }
    if let Some(dir) = &a.map_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let result = bench::run_sweep_with(&image, &spec, |row, rep| {
        let Some(dir) = &a.map_dir else {
            return Ok(());
        };
        let name = format!(
            "map_{}_B{}_T{}_L{}_t{}.pgm",
            spec.distortion.name(),
            row.block_size,
            row.margin,
            row.level,
            row.trial
        );
        save_image(&render_tamper_map(rep), dir.join(name))
    })?;
    if spec.distortion == Distortion::Jpeg {
        eprintln!("codec: {}", codec::JPEG_CODEC);
    }
    write_output(a.csv.as_deref(), &result.to_csv())
}

fn cmd_distort(a: &DistortArgs) -> Result<()> {
    let image = load_image(&a.image)?;
    let out = match a.kind {
        Kind::Noise => add_gaussian_noise(&image, a.level, a.seed)?,
        Kind::Jpeg => {
            if a.level.fract() != 0.0 || !(1.0..=100.0).contains(&a.level) {
                return Err(Error::InvalidArgument(
                    "JPEG quality must be 1..=100".into(),
                ));
            }
            jpeg_roundtrip(&image, a.level as u8)?
        }
    };
    let bytes = codec::encode_image(&out, &a.out)?;
    write_atomic(&a.out, &bytes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sign(a) => cmd_sign(a).map(|_| false),
        Command::Verify(a) => cmd_verify(a),
        Command::Security { descriptor } => cmd_security(descriptor).map(|_| false),
        Command::Bench(a) => cmd_bench(a).map(|_| false),
        Command::Distort(a) => cmd_distort(a).map(|_| false),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
