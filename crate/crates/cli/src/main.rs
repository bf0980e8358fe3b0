//! `bibog`: generate instances, run the construction, verify certificates.
//!
//! Exit codes: 0 pass, 1 failed certificate, 2 usage, 3 guard refusal,
//! 4 I/O or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bilinear_bogolyubov::bohr::containment_check;
use bilinear_bogolyubov::fourier::{dft, naive, DenseFn, GridFn};
use bilinear_bogolyubov::generators::{
    bisubspace, planted_noise, product, random_matrix, random_matrix_of_rank, random_set, random_subspace,
};
use bilinear_bogolyubov::linalg::Ambient;
use bilinear_bogolyubov::pipeline::{independent_recheck, run_pipeline, PipelineConfig};
use bilinear_bogolyubov::product_set::{difference_counts, pipeline_a3, Axis, ProductSet, SET_MAGIC};
use bilinear_bogolyubov::{Certificate, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const RNG_NAME: &str = "ChaCha8";

#[derive(Parser)]
#[command(name = "bibog", version, about = "Bilinear Bogolyubov construction over F_p^n")]
struct Cli {
    /// Worker threads; never changes any output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic set.
    Gen(GenArgs),
    /// Run the construction and write a certificate.
    Run(RunArgs),
    /// Re-check a certificate against its input set.
    Verify(VerifyArgs),
    /// Dump large column spectra of the first convolution as TSV.
    Fourier(FourierArgs),
    /// Time the fast transform against direct evaluation.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Random,
    Bisubspace,
    Product,
    PlantedNoise,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Binary,
    Text,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    generator: Generator,
    /// Pair density (random) or noise density (planted-noise).
    #[arg(long)]
    density: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rank of the bisubspace matrix; uniform when omitted.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 1)]
    codim_u: usize,
    #[arg(long, default_value_t = 1)]
    codim_v: usize,
    /// Affine maps in the planted variety.
    #[arg(long, default_value_t = 1)]
    forms: usize,
    #[arg(long, value_enum, default_value_t = Format::Binary)]
    format: Format,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    /// Set file, binary or text.
    #[arg(long = "in")]
    input: PathBuf,
    /// Ambient for text files without a header.
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Certificate record (JSON); the text report and variety are written
    /// next to it with extensions `.txt` and `.variety`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// RANSAC hypotheses per linearization step.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, default_value_t = 6)]
    k_cap: usize,
    /// Spectrum threshold from measured row densities.
    #[arg(long)]
    adaptive: bool,
    /// Column-spectrum threshold ξ.
    #[arg(long)]
    xi: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args)]
struct FourierArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Smallest modulus listed; defaults to c³/4.
    #[arg(long)]
    threshold: Option<f64>,
    /// TSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
}

enum Failure {
    Usage(String),
    Guard(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Guard { .. } | Error::EmptyInput(_) => Failure::Guard(e.to_string()),
            Error::Io(_) | Error::Parse { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn ambient(p: u32, n: usize) -> Result<Ambient, Failure> {
    Ok(Ambient::new(p, n)?)
}

fn read_set(args: &InputArgs) -> Result<(ProductSet, Vec<u8>), Failure> {
    let bytes = fs::read(&args.input).map_err(|e| io_err(&args.input, e))?;
    let set = if bytes.starts_with(SET_MAGIC) {
        ProductSet::from_bytes(&bytes)?
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| Failure::Io(format!("{}: not UTF-8 text: {e}", args.input.display())))?;
        let given = match (args.p, args.n) {
            (Some(p), Some(n)) => Some(ambient(p, n)?),
            _ => None,
        };
        ProductSet::from_text(text, given)?
    };
    Ok((set, bytes))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn gen(args: &GenArgs) -> Result<bool, Failure> {
    let g = ambient(args.p, args.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let set = match args.generator {
        Generator::Random => random_set(g, args.density.unwrap_or(0.5), &mut rng)?,
        Generator::Bisubspace => {
            let m = match args.rank {
                Some(r) => random_matrix_of_rank(g, r, &mut rng)?,
                None => random_matrix(g, &mut rng),
            };
            bisubspace(g, &m)?
        }
        Generator::Product => {
            let u = random_subspace(g, args.codim_u, &mut rng)?;
            let v = random_subspace(g, args.codim_v, &mut rng)?;
            product(&u, &v)?
        }
        Generator::PlantedNoise => {
            let noise = args.density.unwrap_or(0.05);
            planted_noise(g, args.codim_u, args.codim_v, args.forms, noise, &mut rng)?.0
        }
    };
    let bytes = match args.format {
        Format::Binary => set.to_bytes(),
        Format::Text => set.to_text().into_bytes(),
    };
    write(&args.out, &bytes)?;
    println!(
        "wrote {}: {g}, {} pairs, density {:.6}, generator {}, rng {RNG_NAME} seed {}",
        args.out.display(),
        set.len(),
        set.density(),
        args.generator.to_possible_value().expect("named").get_name(),
        args.seed
    );
    Ok(true)
}

fn run(args: &RunArgs) -> Result<bool, Failure> {
    let (set, bytes) = read_set(&args.input)?;
    let cfg = PipelineConfig {
        xi: args.xi,
        adaptive: args.adaptive,
        budget: args.budget,
        k_cap: args.k_cap,
        seed: args.seed,
        ..PipelineConfig::default()
    };
    let start = Instant::now();
    let outcome = run_pipeline(&set, &cfg)?;
    let cert = &outcome.certificate;
    let record = serde_json::json!({
        "input_sha256": sha256_hex(&bytes),
        "rng": RNG_NAME,
        "certificate": cert,
    });
    let mut json = serde_json::to_string_pretty(&record).expect("certificate serializes");
    json.push('\n');
    write(&args.out, json)?;
    write(&args.out.with_extension("txt"), cert.report())?;
    write(&args.out.with_extension("variety"), cert.structured.variety.to_text())?;

    println!("input {} ({}, {} pairs, c = {:.6})", args.input.input.display(), cert.ambient, cert.input_size, cert.density);
    println!(
        "k = {}, |Y| = {}, |Y'| = {}, codim U = {}, codim V = {}, |structured| = {}",
        cert.k,
        cert.y_size,
        cert.y_prime_size,
        cert.structured.u.codim(),
        cert.structured.v.codim(),
        cert.structured_size
    );
    for check in cert.checks.iter().filter(|c| !c.holds) {
        println!("FAILED [{}] {}: {} vs {}", check.stage, check.name, check.achieved, check.bound);
    }
    for (stage, t) in &outcome.timings {
        println!("time {stage}: {t:.2?}");
    }
    println!("total time {:.2?}", start.elapsed());
    println!("certificate {} : {}", args.out.display(), if cert.pass { "PASS" } else { "FAIL" });
    Ok(cert.pass)
}

fn verify(args: &VerifyArgs) -> Result<bool, Failure> {
    let (set, bytes) = read_set(&args.input)?;
    let text = fs::read_to_string(&args.cert).map_err(|e| io_err(&args.cert, e))?;
    let record: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", args.cert.display())))?;
    let cert: Certificate = serde_json::from_value(record["certificate"].clone())
        .map_err(|e| Failure::Io(format!("{}: {e}", args.cert.display())))?;
    let hash_ok = record["input_sha256"].as_str() == Some(sha256_hex(&bytes).as_str());
    if !hash_ok {
        println!("input hash does not match the certificate");
    }
    if cert.structured.ambient() != set.ambient() {
        return Err(Failure::Usage(format!(
            "certificate is over {}, input over {}",
            cert.structured.ambient(),
            set.ambient()
        )));
    }
    let a3 = pipeline_a3(&set).a3;
    let report = containment_check(&cert.structured, &a3)?;
    let outside = independent_recheck(&cert.structured, &a3);
    let contained = report.contained && outside == 0;
    println!(
        "structured set: {} pairs, {} outside A3 by enumeration, {} by member()",
        report.structured_count,
        report.witnesses.len(),
        outside
    );
    println!("certificate claims pass = {}", cert.pass);
    let agrees = hash_ok && contained && cert.pass;
    println!("verify: {}", if agrees { "PASS" } else { "FAIL" });
    Ok(agrees)
}

fn fourier(args: &FourierArgs) -> Result<bool, Failure> {
    let (set, _) = read_set(&args.input)?;
    let g = set.ambient();
    let side = g.size() as f64;
    let c = set.density();
    let threshold = args.threshold.unwrap_or(c * c * c / 4.0);
    let f = GridFn::new(
        g,
        (0..g.size())
            .flat_map(|x| difference_counts(g, &set.line_indices(Axis::Row, x)))
            .map(|v| Complex64::new(v as f64 / side, 0.0))
            .collect(),
    )?;
    let mut out = String::from("y\tr\tre\tim\tabs\n");
    for y in 0..g.size() {
        let hat = dft(&f.column(y));
        for (r, v) in hat.values().iter().enumerate() {
            if v.norm() >= threshold {
                out.push_str(&format!(
                    "{}\t{}\t{:.12}\t{:.12}\t{:.12}\n",
                    g.decode(y),
                    g.decode(r),
                    v.re,
                    v.im,
                    v.norm()
                ));
            }
        }
    }
    match &args.out {
        Some(path) => write(path, out)?,
        None => print!("{out}"),
    }
    Ok(true)
}

fn bench(args: &BenchArgs) -> Result<bool, Failure> {
    let g = ambient(args.p, args.n)?;
    if g.size() > 1 << 13 {
        return Err(Failure::Guard(format!("direct evaluation over {g} is too slow; keep N ≤ 8192")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    println!("p\tn\tN\tfast_ms\tnaive_ms\tmax_error");
    for _ in 0..args.reps.max(1) {
        let f = DenseFn::new(
            g,
            (0..g.size())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )?;
        let t = Instant::now();
        let fast = dft(&f);
        let fast_ms = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let slow = naive::dft(&f);
        let naive_ms = t.elapsed().as_secs_f64() * 1e3;
        println!(
            "{}\t{}\t{}\t{fast_ms:.3}\t{naive_ms:.3}\t{:.3e}",
            g.p(),
            g.n(),
            g.size(),
            fast.max_abs_diff(&slow)
        );
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
        Command::Fourier(a) => fourier(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(m)) => {
            eprintln!("refused: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(4)
        }
    }
}
