use clap::{Args, Parser, Subcommand};
use dihedral_g2::cli::{fixtures, render_text, run, scenario::Scenario, Command};
use dihedral_g2::Error;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dg2", version, about = "Local invariants of dihedral long-root A-packets of G2")]
struct Cli {
    /// Emit the JSON report instead of flattened text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with_all = ["fixture", "p"])]
    scenario: Option<std::path::PathBuf>,
    /// Named fixture from the catalog (override the directory with DG2_FIXTURES).
    #[arg(long, conflicts_with = "p")]
    fixture: Option<String>,
    /// Residue characteristic for an inline scenario.
    #[arg(long)]
    p: Option<u64>,
    /// unramified | ramified-p | ramified-up; omit for a split place.
    #[arg(long, requires = "p")]
    extension: Option<String>,
    /// Index into the level-1 conjugate-symplectic characters (nonsplit).
    #[arg(long, requires = "extension")]
    chi_index: Option<usize>,
    /// Value of chi at the uniformizer as a turn, e.g. 1/3 (split).
    #[arg(long, requires = "p", conflicts_with = "extension")]
    chi_z: Option<String>,
    #[arg(long, default_value_t = 0, requires = "p")]
    psi_level: i64,
    /// p-adic working precision.
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field, extension and Hermitian-space data.
    Classify(ScenarioArgs),
    /// Root number of chi with snapped sign.
    Epsilon(ScenarioArgs),
    /// Theta dichotomy and first occurrences.
    Dichotomy(ScenarioArgs),
    /// Local PU3 and G2 packets.
    Packet(ScenarioArgs),
    /// Satake parameters at unramified places.
    Satake(ScenarioArgs),
    /// Audited rewrite of an induced representation.
    Rewrite {
        /// s-expression input; defaults to the Q1 example with mu^2 = omega.
        #[arg(long)]
        expr: Option<String>,
    },
    /// Discriminant, etale class and orbit labels of a binary cubic.
    #[command(allow_negative_numbers = true)]
    Cubic {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "unramified")]
        extension: String,
        /// Four rational coefficients a b c d of a x^3 + b x^2 y + c x y^2 + d y^3.
        #[arg(num_args = 4, required = true)]
        coeffs: Vec<String>,
        /// Scalars lambda to label by orbit.
        #[arg(long = "lambda")]
        lambdas: Vec<String>,
    },
    /// Run the property suites (all, or one of 1..=9).
    Selftest {
        #[arg(long)]
        suite: Option<u8>,
    },
}

fn load(a: &ScenarioArgs) -> Result<Option<Scenario>, Error> {
    let mut sc = if let Some(path) = &a.scenario {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
        Scenario::from_json(&text)?
    } else if let Some(name) = &a.fixture {
        fixtures::find(name)?
    } else if let Some(p) = a.p {
        Scenario::inline(p, a.extension.as_deref(), a.chi_index, a.chi_z.as_deref(), a.psi_level)
    } else {
        return Ok(None);
    };
    if a.precision.is_some() {
        sc.overrides.precision = a.precision;
    }
    Ok(Some(sc))
}

fn main() -> ExitCode {
    // usage errors are caller mistakes: exit 1, keeping 2 for internal failures
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (cmd, args) = match cli.cmd {
        Cmd::Classify(a) => (Command::Classify, a),
        Cmd::Epsilon(a) => (Command::Epsilon, a),
        Cmd::Dichotomy(a) => (Command::Dichotomy, a),
        Cmd::Packet(a) => (Command::Packet, a),
        Cmd::Satake(a) => (Command::Satake, a),
        Cmd::Rewrite { expr } => (Command::Rewrite { expr }, ScenarioArgs::default()),
        Cmd::Cubic { p, extension, coeffs, lambdas } => {
            let coeffs: [String; 4] = coeffs.try_into().expect("clap enforces four coefficients");
            (Command::Cubic { p, extension, coeffs, lambdas }, ScenarioArgs::default())
        }
        Cmd::Selftest { suite } => (Command::Selftest { suite }, ScenarioArgs::default()),
    };
    let resolved = match load(&args).and_then(|s| s.map(|s| s.resolve()).transpose()) {
        Ok(r) => r,
        Err(e) => return fail(&e, 1),
    };
    if cmd.needs_scenario() && resolved.is_none() {
        return fail(&Error::Precondition("give --scenario, --fixture or --p".into()), 1);
    }
    let out = run(&cmd, resolved.as_ref());
    if let Some(e) = &out.error {
        return fail(e, out.exit_code);
    }
    let report = out.report.expect("report on success");
    let text = if cli.json {
        report
    } else {
        let v: serde_json::Value = serde_json::from_str(&report).expect("report is JSON");
        render_text(&v)
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::SUCCESS
}

fn fail(e: &Error, code: i32) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code as u8)
}
