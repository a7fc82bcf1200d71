use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};
use gcx_core::cli::{execute, Format, Overrides, Subcommand};
use std::io::{Read, Write};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gcx", version, about = "Exact checks for Leibniz algebras, Courant algebroids and their cubic Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Jacobi identity and point-Courant axioms of a Leibniz algebra
    CheckLeibniz(Common),
    /// Nijenhuis / weak Nijenhuis classification of a tensor on a Leibniz algebra
    ClassifyTensor(Common),
    /// Axioms, Δ-conditions, torsion and classification on TR^n ⊕ T*R^n
    CheckCourant(Common),
    /// Dimension of the space of tensors commuting with the Dorfman product
    Commutant(Common),
    /// Compatibility and Jacobi of the derived bracket of a cubic Hamiltonian
    DerivedBracket(Common),
    /// {Ψ,Ψ} = 0 and its agreement with the Jacobi identity
    Homological(Common),
    /// {{Ψ,Q},Q} classification of a quadratic generator
    ClassifyGenerator(Common),
    /// Round trips between structure data, cubic Hamiltonians and quadratic elements
    RoundtripPsi(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    /// Input document, or "-" for stdin
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Seed for randomized checks (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random trials (default 20)
    #[arg(long)]
    trials: Option<usize>,
    /// Degree bound of generating sections (default 2)
    #[arg(long = "degree-bound")]
    degree_bound: Option<u32>,
    /// Include wall-clock timings (makes output non-reproducible)
    #[arg(long)]
    timing: bool,
}

fn read_input(path: &str) -> std::io::Result<Vec<u8>> {
    if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (sub, args) = match cli.command {
        Command::CheckLeibniz(a) => (Subcommand::CheckLeibniz, a),
        Command::ClassifyTensor(a) => (Subcommand::ClassifyTensor, a),
        Command::CheckCourant(a) => (Subcommand::CheckCourant, a),
        Command::Commutant(a) => (Subcommand::Commutant, a),
        Command::DerivedBracket(a) => (Subcommand::DerivedBracket, a),
        Command::Homological(a) => (Subcommand::Homological, a),
        Command::ClassifyGenerator(a) => (Subcommand::ClassifyGenerator, a),
        Command::RoundtripPsi(a) => (Subcommand::RoundtripPsi, a),
    };
    let input = match read_input(&args.input) {
        Ok(bytes) => bytes,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.input);
            return ExitCode::from(2);
        }
    };
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    let overrides =
        Overrides { degree_bound: args.degree_bound, seed: args.seed, trials: args.trials, timing: args.timing };
    let (output, code) = execute(sub, &input, format, &overrides);
    if code == 2 {
        eprint!("{output}");
    } else {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(output.as_bytes());
    }
    ExitCode::from(code as u8)
}
