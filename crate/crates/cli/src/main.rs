use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use threecenter_cli::aux_rows::evaluate_aux;
use threecenter_cli::config::load_config;
use threecenter_cli::reference::{BUNDLED, NONREPRODUCIBLE};
use threecenter_cli::runner::render_convergence;
use threecenter_cli::timing::{bench_legendre, LegendreBench};
use threecenter_cli::{run_convergence, run_table, BenchError, OutputFormat, RunOptions};

#[derive(Parser)]
#[command(name = "threecenter", version, about = "Three-center nuclear attraction integral benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Target precision in decimal digits (overrides the case files).
    #[arg(long, env = "THREECENTER_DIGITS")]
    digits: Option<u32>,
    /// Truncation of the L expansion (overrides the case files).
    #[arg(long = "lmax")]
    l_max: Option<u32>,
    /// Relative quadrature tolerance, e.g. 1e-22; defaults to 10^-digits.
    #[arg(long)]
    tol: Option<String>,
    /// Number of cases evaluated concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    /// Also rerun every case at raised precision and truncation and report
    /// the agreement.
    #[arg(long)]
    seed_oracle: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            digits: self.digits,
            l_max: self.l_max,
            tol: self.tol.clone(),
            jobs: self.jobs,
            seed_oracle: self.seed_oracle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every case of a config and compare with its reference values.
    Table {
        /// Config file, or the name of a bundled table.
        #[arg(long, default_value = "threecenter1")]
        config: String,
        /// Evaluate this case only.
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value = "both")]
        format: OutputFormat,
        /// Directory for the report files; without it only text is printed.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Values of one case at several truncation levels of the L expansion.
    Convergence {
        #[arg(long, default_value = "threecenter4")]
        config: String,
        #[arg(long)]
        case: String,
        /// Comma-separated, strictly ascending l_max values; defaults to the
        /// levels published for the case.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Time the reduced auxiliary function under each Legendre strategy.
    BenchLegendre {
        #[arg(long, default_value_t = 3)]
        l: u32,
        #[arg(long, default_value_t = 1)]
        lambda: u32,
        #[arg(long, default_value_t = 0)]
        q: u32,
        #[arg(long, default_value = "3")]
        n1: String,
        #[arg(long, default_value = "2")]
        n2: String,
        #[arg(long, default_value = "2.5")]
        p1: String,
        #[arg(long, default_value = "1.5")]
        p2: String,
        #[arg(long, default_value = "2")]
        xi_c: String,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long, env = "THREECENTER_DIGITS", default_value_t = 20)]
        digits: u32,
    },
    /// Evaluate the auxiliary-function reference rows at a chosen xi_C.
    Aux {
        #[arg(long, default_value = "2")]
        xi_c: String,
        #[arg(long)]
        id: Option<String>,
        /// Strongly cancelling rows (general-integer-06) become very slow
        /// beyond about 16 digits.
        #[arg(long, env = "THREECENTER_DIGITS", default_value_t = 12)]
        digits: u32,
    },
    /// List the bundled configs and their cases.
    List,
}

fn fail(e: BenchError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Table {
            config,
            case,
            format,
            out,
            common,
        } => {
            let code = run_table(&config, case.as_deref(), &common.options(), out.as_deref(), format);
            ExitCode::from(code as u8)
        }
        Command::Convergence {
            config,
            case,
            levels,
            common,
        } => {
            let config = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let Some(case) = config.case(&case) else {
                return fail(BenchError::Invalid(format!("no case `{case}` in {}", config.name)));
            };
            let levels = if levels.is_empty() {
                let published: Vec<u32> = case.partials.iter().map(|p| p.l_max).collect();
                if published.is_empty() {
                    vec![10, 20, 30]
                } else {
                    published
                }
            } else {
                levels
            };
            match run_convergence(case, &levels, &common.options()) {
                Ok(r) => {
                    print!("{}", render_convergence(&r));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::BenchLegendre {
            l,
            lambda,
            q,
            n1,
            n2,
            p1,
            p2,
            xi_c,
            repetitions,
            digits,
        } => {
            let params = LegendreBench {
                l,
                lambda,
                q,
                n1,
                n2,
                p1,
                p2,
                xi_c,
                repetitions,
                digits,
            };
            match bench_legendre(&params) {
                Ok(r) => {
                    print!("{}", r.render());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Aux { xi_c, id, digits } => {
            let config = match load_config(NONREPRODUCIBLE) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let rows: Vec<_> = config.aux.iter().filter(|r| id.as_ref().is_none_or(|i| &r.id == i)).collect();
            if rows.is_empty() {
                return fail(BenchError::Invalid("no matching aux rows".into()));
            }
            println!("# auxiliary functions at xi_C = {xi_c}; the published boundary is unknown");
            for row in rows {
                match evaluate_aux(row, &xi_c, digits) {
                    Ok(c) => println!(
                        "{:22}  J {}  ({:>2} digits)\n{:22}  K {}  ({:>2} digits)",
                        c.id, c.j, c.j_digits, "", c.k, c.k_digits
                    ),
                    Err(e) => println!("{:22}  {e}", row.id),
                }
            }
            ExitCode::SUCCESS
        }
        Command::List => {
            for name in BUNDLED {
                match load_config(name) {
                    Ok(c) => {
                        println!("{name}");
                        for case in &c.cases {
                            println!("  {:18} {}", case.id, case.label());
                        }
                    }
                    Err(e) => return fail(e),
                }
            }
            println!("{NONREPRODUCIBLE} (use `threecenter aux`)");
            ExitCode::SUCCESS
        }
    }
}
