use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gwg::experiments::{emit, lookup, presets, run_sweep, Format, SweepConfig};
use gwg::Error;

#[derive(Parser)]
#[command(name = "gwg", version, about = "Generalized weak Galerkin solver for the clamped biharmonic problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one convergence sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        case: String,
        /// Comma-separated 1/h values, ascending.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Regenerate a reference table (1..=7) into a directory.
    Reproduce {
        #[arg(long)]
        table: u32,
        #[arg(long)]
        out: PathBuf,
        /// Include rows beyond the default size cap (1/h = 128).
        #[arg(long)]
        full: bool,
    },
    /// List the manufactured cases.
    Cases,
}

fn run(cli: Cli) -> gwg::Result<()> {
    match cli.command {
        Command::Sweep { config, case, levels, out, format } => {
            let format: Format = format.parse()?;
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", config.display())))?;
            let cfg = SweepConfig::from_json(&text)?;
            let case = lookup(&case)?;
            let table = run_sweep(&cfg, &case, &levels)?;
            emit(&table, format, &out)?;
            for row in &table.rows {
                eprintln!("1/h = {:>4}: {} dofs, {:.2} s", row.inv_h, row.dofs, row.seconds);
            }
        }
        Command::Reproduce { table, out, full } => {
            let blocks = presets(table)?;
            std::fs::create_dir_all(&out)?;
            for p in blocks {
                let levels = if full { p.levels.clone() } else { p.desk_levels() };
                let case = lookup(p.case)?;
                eprintln!("table {} [{}]: case {}, 1/h = {:?}", p.table, p.label, p.case, levels);
                let t = run_sweep(&p.config, &case, &levels)?;
                let stem = format!("table{}_{}", p.table, p.label);
                emit(&t, Format::Csv, &out.join(format!("{stem}.csv")))?;
                emit(&t, Format::Markdown, &out.join(format!("{stem}.md")))?;
            }
        }
        Command::Cases => {
            for c in gwg::experiments::registry() {
                println!("{:<12} u = {:<22} {}", c.id, c.formula, c.regularity);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                ExitCode::from(2)
            } else if e.is_config_error() {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
