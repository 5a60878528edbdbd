use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffgcd_core::derivation::d_u;
use ffgcd_core::ffcore::{gcd_counting, height, parse_rational_function, GcdMode};
use ffgcd_core::pisot::ExpPoly;
use ffgcd_core::refinement::RefinementCaps;
use ffgcd_core::{PlaceSet, QMvPoly, QRatFunc, QUnitTuple};
use ffgcd_harness::verify::{verify_pisot, verify_refinement};
use ffgcd_harness::{run_suite, HResult, HarnessError, InstanceSpec, Verdict};

/// Exact checks of gcd and unit-equation bounds over Q(t).
#[derive(Parser, Debug)]
#[command(name = "ffgcd", version)]
struct Cli {
    /// Run the suite described by a TOML file (suite fields as in `suite`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
    /// Report path when running from --config alone.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV path when running from --config alone.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print an element of Q(t) in reduced form.
    Eval { expr: String },
    /// Print the height of an element of Q(t).
    Height { expr: String },
    /// Print N_{S,gcd}(f, g) and the full gcd count h_gcd(f, g).
    Gcdcount {
        f: String,
        g: String,
        #[arg(long = "S", default_value = "")]
        places: String,
    },
    /// Print D_u(F).
    Du {
        #[arg(long)]
        poly: String,
        #[arg(long, num_args = 1.., required = true)]
        units: Vec<String>,
    },
    /// Check the linear-forms construction for a pair of polynomials.
    Refine {
        #[arg(long = "F1")]
        f1: String,
        #[arg(long = "F2")]
        f2: String,
        #[arg(long, num_args = 1.., required = true)]
        units: Vec<String>,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Defaults to the zeros and poles of the units plus infinity.
        #[arg(long = "S")]
        places: Option<String>,
    },
    /// Factor an exponential polynomial read from a file as R(m) a(m)^d.
    Pisot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = ffgcd_core::pisot::DEFAULT_WITNESS_CAP)]
        witness_cap: u64,
    },
    /// Generate and check a suite of instances.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
struct SuiteArgs {
    name: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    degree_cap: Option<u32>,
    #[arg(long)]
    height_cap: Option<i64>,
    #[arg(long)]
    ell_min: Option<u64>,
    #[arg(long)]
    ell_max: Option<u64>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    product_cap: Option<usize>,
}

fn rf(s: &str) -> HResult<QRatFunc> {
    Ok(parse_rational_function(s)?)
}

fn units(xs: &[String]) -> HResult<QUnitTuple> {
    Ok(QUnitTuple::new(xs.iter().map(|x| rf(x)).collect::<HResult<_>>()?)?)
}

fn print_verdict(v: &Verdict) -> HResult<u8> {
    println!("{}", serde_json::to_string_pretty(&serde_json::to_value(v)?)?);
    Ok(u8::from(v.is_finding()))
}

fn run_spec(spec: &InstanceSpec, out: Option<&PathBuf>, csv: Option<&PathBuf>) -> HResult<u8> {
    let report = run_suite(spec)?;
    match out {
        Some(path) => report.write_json(path)?,
        None => print!("{}", report.to_json()?),
    }
    if let Some(path) = csv {
        report.write_csv(std::fs::File::create(path)?)?;
    }
    let s = report.summary;
    eprintln!(
        "{}: {} instances, {} pass, {} relation, {} precondition-unmet, {} FINDING",
        spec.suite, s.total, s.pass, s.relation, s.precondition_unmet, s.finding
    );
    Ok(report.exit_code() as u8)
}

fn suite_spec(base: Option<InstanceSpec>, a: &SuiteArgs) -> HResult<InstanceSpec> {
    let mut spec = base.unwrap_or_default();
    if let Some(name) = &a.name {
        spec.suite = name.clone();
    }
    if spec.suite.is_empty() {
        return Err(HarnessError::Option("a suite name is required".into()));
    }
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = &a.$field { spec.$field = v.clone(); })* };
    }
    set!(seed, count, n, d, degree_cap, height_cap, ell_min, ell_max, eps, product_cap);
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> HResult<u8> {
    let config = cli.config.as_deref().map(InstanceSpec::load).transpose()?;
    let Some(command) = cli.command else {
        let spec = config.ok_or_else(|| HarnessError::Option("a subcommand or --config is required".into()))?;
        return run_spec(&spec, cli.out.as_ref(), cli.csv.as_ref());
    };
    match command {
        Command::Eval { expr } => println!("{}", rf(&expr)?),
        Command::Height { expr } => println!("{}", height(&rf(&expr)?)?),
        Command::Gcdcount { f, g, places } => {
            let (f, g, s) = (rf(&f)?, rf(&g)?, PlaceSet::parse(&places)?);
            let outside = gcd_counting(&f, &g, &s, GcdMode::OutsideS)?;
            let everywhere = gcd_counting(&f, &g, &s, GcdMode::Everywhere)?;
            println!("N_S,gcd = {outside}\nh_gcd = {everywhere}");
        }
        Command::Du { poly, units: us } => {
            let u = units(&us)?;
            println!("{}", d_u(&QMvPoly::parse(&poly, u.len())?, &u)?);
        }
        Command::Refine { f1, f2, units: us, m, r, places } => {
            let u = units(&us)?;
            let s = match places {
                Some(p) => PlaceSet::parse(&p)?,
                None => PlaceSet::support_of(u.entries(), true),
            };
            let n = u.len();
            let v = verify_refinement(
                &QMvPoly::parse(&f1, n)?,
                &QMvPoly::parse(&f2, n)?,
                &u,
                &s,
                m,
                r,
                RefinementCaps::default(),
            )?;
            return print_verdict(&v);
        }
        Command::Pisot { input, d, witness_cap } => {
            let b = ExpPoly::parse(std::fs::read_to_string(input)?.trim())?;
            return print_verdict(&verify_pisot(&b, d, witness_cap, None)?);
        }
        Command::Suite(args) => {
            let spec = suite_spec(config, &args)?;
            return run_spec(&spec, args.out.as_ref(), args.csv.as_ref());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
