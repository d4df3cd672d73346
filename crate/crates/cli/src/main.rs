//! `dirac-enclosure`: certification queries, region rasters, Birman–Schwinger
//! estimates and self-checks.
//!
//! Exit status: 0 on success (for `certify`: the point is certified), 3 when
//! `certify` cannot certify the point, 2 on input or I/O errors, 1 when a
//! `check` suite fails.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_enclosure::{Complex64, GridSpec, PotentialModel};

#[derive(Parser, Debug)]
#[command(name = "dirac-enclosure", version, about = "Eigenvalue-free regions for 3D Dirac operators with complex potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether λ is excluded from the point spectrum.
    Certify {
        /// Spectral parameter as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the criteria on a rectangular grid and write a grid file.
    Raster {
        /// REMIN,REMAX,NRE,IMMIN,IMMAX,NIM
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: GridSpec,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the norm of the discretised Birman–Schwinger operator.
    Bsnorm {
        /// Point z as RE,IM; must lie off the essential spectrum.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        /// Number of nodes; a perfect cube for the tensor scheme.
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = Scheme::Gauss)]
        scheme: Scheme,
        /// Half-width of the tensor box; defaults to 2.5 length scales.
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the self-check suites.
    Check {
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Perturb a Dirac matrix to exercise the failure path.
        #[arg(long, hide = true)]
        corrupt_basis: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Mass m ≥ 0.
    #[arg(long)]
    m: f64,
    /// Potential as NAME:PARAMS, e.g. gaussian:0.1,1 or cutoff_coulomb:1,1.
    #[arg(long, value_parser = parse_potential)]
    potential: Option<PotentialModel>,
    /// Declared ‖V‖_{L³}; overrides quadrature.
    #[arg(long)]
    norm3: Option<f64>,
    /// Declared ‖V‖_{L^{3/2}}; overrides quadrature.
    #[arg(long)]
    norm32: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Scheme {
    /// Tensor Gauss–Legendre nodes.
    Gauss,
    /// Gaussian-distributed random nodes.
    Mc,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("bad real part `{re}`: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("bad imaginary part `{im}`: {e}"))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("λ must be finite, got {s}"));
    }
    Ok(Complex64::new(re, im))
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    GridSpec::parse(s).map_err(|e| e.to_string())
}

fn parse_potential(s: &str) -> Result<PotentialModel, String> {
    s.parse::<PotentialModel>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Certify { lambda, common } => commands::certify(lambda, &common, &mut stdout),
        Command::Raster { grid, out, common } => commands::raster(&grid, out.as_deref(), &common, &mut stdout),
        Command::Bsnorm { lambda, nodes, scheme, half_width, seed, common } => {
            commands::bsnorm(lambda, nodes, scheme, half_width, seed, &common, &mut stdout)
        }
        Command::Check { seed, corrupt_basis } => commands::check(seed, corrupt_basis, &mut stdout),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("-1.5,2").unwrap(), Complex64::new(-1.5, 2.0));
        assert_eq!(parse_complex(" 0 , -3e-2 ").unwrap(), Complex64::new(0.0, -0.03));
        assert!(parse_complex("1").is_err());
        assert!(parse_complex("1,inf").is_err());
        assert!(parse_complex("a,1").is_err());
    }

    #[test]
    fn command_line_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["dirac-enclosure", "certify", "--lambda", "-1,-2", "--m", "1", "--norm3", "0.1"]).unwrap();
        assert!(matches!(cli.command, Command::Certify { lambda, .. } if lambda == Complex64::new(-1.0, -2.0)));
        assert!(Cli::try_parse_from(["dirac-enclosure", "bsnorm", "--lambda", "0,1", "--m", "1", "--scheme", "svd"]).is_err());
    }
}
