use clap::{Parser, Subcommand};
use ptrap_cli::{
    cmd_analyze, cmd_demo, cmd_sbox, cmd_verify, parse_families, DemoParams, Format, Outcome,
};
use ptrap_core::trapdoor::Variant;
use ptrap_core::verify::Scope;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ptrap",
    version,
    about = "Partition trapdoor analysis for Feistel ciphers"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differential and invariance metrics of one S-box file.
    Sbox { path: PathBuf },
    /// Hypothesis checks and trapdoor chain search on a cipher spec.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated: exhaustive, product, graph, wall-lifted, or all.
        #[arg(long, default_value = "all")]
        families: String,
        #[arg(long, default_value = "standard")]
        variant: String,
    },
    /// Build the weak cipher, attack it and write the results.
    Demo {
        #[arg(long, default_value_t = 3)]
        s: u32,
        #[arg(long, default_value_t = 2)]
        b: u32,
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Use cube-equivalent APN boxes (odd s).
        #[arg(long)]
        apn: bool,
        /// Only write the strong s=3, b=2, r=4 spec.
        #[arg(long)]
        strong: bool,
        #[arg(long, default_value = "demo-out")]
        out: PathBuf,
    },
    /// Run the built-in property suites.
    Verify {
        #[arg(long, default_value = "all")]
        scope: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Outcome {
    #[cfg(feature = "parallel")]
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            return Outcome::input_error(e);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.jobs;
    let format = cli.format;
    match cli.command {
        Command::Sbox { path } => cmd_sbox(&path, format),
        Command::Analyze {
            spec,
            families,
            variant,
        } => {
            let families = match parse_families(&families) {
                Ok(f) => f,
                Err(e) => return Outcome::input_error(e),
            };
            let variant: Variant = match variant.parse() {
                Ok(v) => v,
                Err(e) => return Outcome::input_error(e),
            };
            cmd_analyze(&spec, &families, variant, format)
        }
        Command::Demo {
            s,
            b,
            r,
            seed,
            samples,
            apn,
            strong,
            out,
        } => cmd_demo(
            &DemoParams {
                s,
                b,
                r,
                seed,
                samples,
                apn,
                strong,
            },
            &out,
            format,
        ),
        Command::Verify { scope, seed } => match scope.parse::<Scope>() {
            Ok(scope) => cmd_verify(scope, seed, format),
            Err(e) => Outcome::input_error(e),
        },
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = run(cli);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
