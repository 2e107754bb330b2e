use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use relayrate::diagram::{render, DiagramFormat};
use relayrate::imeasure::atom_table;
use relayrate::io::{component_to_json, load_source, parse_channel, tabular_to_json, LoadedSource};
use relayrate::region::{in_pstar, region_constraints, slepian_wolf_constraints, Violation};
use relayrate::relay::{capacity_terms, kappa_bounds, KappaVerdict, DEFAULT_MEET_TOL};
use relayrate::{balanced_check, gen, optimal_storage_rate, Error, SubsetIndex};

#[derive(Parser)]
#[command(name = "relayrate", version, about = "Entropic analysis of multi-terminal sources and relay-channel rate bounds")]
struct Cli {
    /// Numerical tolerance for entropy comparisons and region membership.
    #[arg(long, global = true, env = "RELAYRATE_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Emit one JSON object instead of the human-readable report.
    #[arg(long, global = true)]
    json: bool,
    /// Treat non-entropic profile warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropies of every subset and the vector h.
    Info { source: PathBuf },
    /// I-measure atoms, optionally written as a Venn diagram.
    Imeasure {
        source: PathBuf,
        /// Write an SVG diagram here (three users) or the atom table otherwise.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Balanced-source test; exit 1 when the source is not balanced.
    Balanced { source: PathBuf },
    /// P* membership of r*; exit 1 when r* is outside the region.
    Pstar {
        source: PathBuf,
        /// Also list the total sum-rate constraint (Slepian-Wolf region).
        #[arg(long)]
        slepian_wolf: bool,
    },
    /// Bounds on the optimal source-channel rate; exit 1 unless they meet.
    Kappa {
        source: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        /// Tolerance for deciding that the two bounds meet.
        #[arg(long, default_value_t = DEFAULT_MEET_TOL)]
        meet_tol: f64,
    },
    /// Optimal centralised storage rate.
    Storage { source: PathBuf },
    /// Write a synthetic source file.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Independent components shared by subsets of users.
    Component(ComponentArgs),
    /// Noisy binary sensors observing one event.
    Sensor(SensorArgs),
}

#[derive(Args)]
struct ComponentArgs {
    /// Number of users.
    #[arg(long)]
    users: usize,
    /// Component as `SUBSET=BITS`, e.g. `1,2=3`; repeatable.
    #[arg(long = "rate", value_name = "SUBSET=BITS")]
    rates: Vec<String>,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SensorArgs {
    /// `Pr{B = 0}`.
    #[arg(long)]
    rho: f64,
    /// `Pr{E_l = 0}` for each sensor, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sigma: Vec<f64>,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalBreakdown(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if !(cli.tol >= 0.0 && cli.tol.is_finite()) {
        return Err(Failure::Input(format!("tolerance must be a nonnegative number (got {})", cli.tol)));
    }
    match &cli.command {
        Command::Info { source } => info(cli, &load(cli, source)?),
        Command::Imeasure { source, svg } => imeasure(cli, &load(cli, source)?, svg.as_deref()),
        Command::Balanced { source } => balanced(cli, &load(cli, source)?),
        Command::Pstar { source, slepian_wolf } => pstar(cli, &load(cli, source)?, *slepian_wolf),
        Command::Kappa { source, channel, meet_tol } => kappa(cli, &load(cli, source)?, channel, *meet_tol),
        Command::Storage { source } => storage(cli, &load(cli, source)?),
        Command::Gen(g) => generate(g),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(cli: &Cli, path: &Path) -> Result<LoadedSource, Failure> {
    let text = read(path)?;
    let loaded = load_source(&text, cli.tol, cli.strict)
        .map_err(|e| Failure::from(e).prefixed(&path.display().to_string()))?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded)
}

impl Failure {
    fn prefixed(self, prefix: &str) -> Self {
        match self {
            Failure::Input(m) => Failure::Input(format!("{prefix}: {m}")),
            Failure::Numerical(m) => Failure::Numerical(format!("{prefix}: {m}")),
        }
    }
}

/// Six decimals, with negative zero folded to zero.
fn f6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Six decimals with trailing zeros dropped: `10`, `1.5`.
fn short(x: f64) -> String {
    let s = f6(x);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn tuple(values: &[f64]) -> String {
    format!("({})", values.iter().map(|v| f6(*v)).collect::<Vec<_>>().join(", "))
}

/// Rounds to 12 significant digits so that JSON output is stable across platforms.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json!(sig12(n.as_f64().unwrap_or_default())),
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

fn emit_json(v: Value) {
    println!("{}", serde_json::to_string_pretty(&round_numbers(v)).expect("json values serialise"));
}

fn info(cli: &Cli, src: &LoadedSource) -> Outcome {
    let m = &src.model;
    let entropies = m.entropies();
    let h = m.h_vector();
    if cli.json {
        emit_json(json!({
            "users": m.num_users(),
            "type": src.kind,
            "entropies": entropies.iter().map(|(s, v)| json!({"subset": s, "H": v})).collect::<Vec<_>>(),
            "h": h.0,
        }));
        return Ok(true);
    }
    println!("users: {}", m.num_users());
    println!("source: {}", src.kind);
    println!("subset\tH(W_S)");
    for (s, v) in &entropies {
        println!("{s}\t{}", f6(*v));
    }
    println!("h = {}", tuple(&h.0));
    Ok(true)
}

fn imeasure(cli: &Cli, src: &LoadedSource, svg: Option<&Path>) -> Outcome {
    let atoms = atom_table(&src.model);
    let mut notice = None;
    if let Some(path) = svg {
        let doc = render(&atoms, DiagramFormat::Svg);
        if doc.fell_back {
            notice = Some(format!(
                "Venn diagram needs exactly 3 users (got {}); wrote the atom table instead",
                atoms.num_users()
            ));
        }
        fs::write(path, &doc.content).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    if cli.json {
        let mut out = json!({
            "users": atoms.num_users(),
            "atoms": atoms.entries().iter().map(|(k, v)| json!({"subset": k, "I": v})).collect::<Vec<_>>(),
        });
        if let Some(n) = &notice {
            out["notice"] = json!(n);
        }
        emit_json(out);
    } else {
        print!("{}", render(&atoms, DiagramFormat::Table).content);
        if let Some(n) = &notice {
            eprintln!("notice: {n}");
        }
    }
    Ok(true)
}

fn balanced(cli: &Cli, src: &LoadedSource) -> Outcome {
    let report = balanced_check(&src.model, cli.tol);
    if cli.json {
        emit_json(serde_json::to_value(&report).expect("report serialises"));
        return Ok(report.overall);
    }
    if report.levels.is_empty() {
        println!("no levels to check for L = {}", report.users);
    } else {
        println!("k\tmax I_K\tmin I_K\tgap\tmargin\tpass");
        for l in &report.levels {
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}",
                l.k,
                f6(l.mu_bar),
                f6(l.mu_under),
                f6(l.gap),
                f6(l.margin),
                if l.pass { "yes" } else { "no" }
            );
        }
    }
    if report.negative_atoms {
        println!("note: some atoms are negative; the test is applied to the signed values");
    }
    println!("{}", if report.overall { "BALANCED" } else { "NOT BALANCED" });
    Ok(report.overall)
}

fn violation_text(v: &Violation) -> String {
    match v {
        Violation::Nonnegativity { user, value } => format!("negative rate r_{user} = {}", f6(*value)),
        Violation::Constraint { subset, bound, sum } => {
            format!("violated subset {subset}: sum {} < bound {}", f6(*sum), f6(*bound))
        }
    }
}

fn pstar(cli: &Cli, src: &LoadedSource, slepian_wolf: bool) -> Outcome {
    let m = &src.model;
    let region = if slepian_wolf { slepian_wolf_constraints(m)? } else { region_constraints(m)? };
    let report = in_pstar(m, cli.tol)?;
    if cli.json {
        emit_json(json!({
            "member": report.member,
            "r_star": report.r_star,
            "worst_slack": report.membership.worst_slack,
            "violated": report.membership.violated,
            "constraints": region.constraints,
        }));
        return Ok(report.member);
    }
    println!("region constraints:");
    for c in &region.constraints {
        println!("  sum over {} >= {}", c.subset, f6(c.bound));
    }
    println!("r* = {}", tuple(&report.r_star.0));
    println!("worst slack = {}", f6(report.membership.worst_slack));
    match &report.membership.violated {
        None => println!("r* is in R(p): p is in P*"),
        Some(v) => {
            println!("{}", violation_text(v));
            println!("r* is not in R(p): p is not in P*");
        }
    }
    Ok(report.member)
}

fn kappa(cli: &Cli, src: &LoadedSource, channel: &Path, meet_tol: f64) -> Outcome {
    let ch = parse_channel(&read(channel)?).map_err(|e| Failure::from(e).prefixed(&channel.display().to_string()))?;
    let m = &src.model;
    if ch.num_users() != m.num_users() {
        return Err(Failure::Input(format!(
            "channel has {} downlinks but the source has {} users",
            ch.num_users(),
            m.num_users()
        )));
    }
    let caps = capacity_terms(&ch);
    let h = m.h_vector();
    let skipped: Vec<usize> = (0..caps.len())
        .filter(|&l| caps.0[l] <= m.tolerance() && h.0[l] <= m.tolerance())
        .map(|l| l + 1)
        .collect();
    let result = kappa_bounds(m, &caps, meet_tol)?;
    let exact = matches!(result.verdict, KappaVerdict::Exact { .. });
    if cli.json {
        emit_json(json!({
            "capacities": caps.0,
            "result": result,
            "skipped_links": skipped,
        }));
        return Ok(exact);
    }
    println!("C = {}", tuple(&caps.0));
    for l in &skipped {
        println!("note: link {l} has zero capacity and user {l} needs nothing; skipped");
    }
    match result.psi.finite() {
        Some(p) => println!("Psi = {}", f6(p)),
        None => println!("Psi = inf"),
    }
    if let (Some(u), Some(w)) = (result.min_upsilon, &result.witness) {
        println!("min Upsilon = {} at r = {}", f6(u), tuple(&w.0));
    }
    match result.verdict {
        KappaVerdict::Exact { kappa } => println!("EXACT κ* = {}", short(kappa)),
        KappaVerdict::Bounds { lower, upper } => println!("BOUNDS [{}, {}]", short(lower), short(upper)),
        KappaVerdict::Unbounded => println!("UNBOUNDED"),
    }
    Ok(exact)
}

fn storage(cli: &Cli, src: &LoadedSource) -> Outcome {
    let report = optimal_storage_rate(&src.model)?;
    if cli.json {
        emit_json(serde_json::to_value(&report).expect("report serialises"));
        return Ok(true);
    }
    println!("optimal storage rate = {}", f6(report.optimal_rate));
    println!("argmin r = {}", tuple(&report.argmin.0));
    let label = if report.closed_form_applicable { "applicable" } else { "not applicable: p is not in P*" };
    println!("closed form ||h||/(L-1) = {} ({label})", f6(report.closed_form_value));
    Ok(true)
}

fn parse_rate(spec: &str, users: usize) -> Result<(SubsetIndex, f64), Failure> {
    let bad = || Failure::Input(format!("--rate {spec:?}: expected SUBSET=BITS, e.g. 1,2=3"));
    let (set, bits) = spec.split_once('=').ok_or_else(bad)?;
    let labels = set
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    let bits: f64 = bits.trim().parse().map_err(|_| bad())?;
    Ok((SubsetIndex::from_users(&labels, users)?, bits))
}

fn generate(cmd: &GenCommand) -> Outcome {
    let (text, output) = match cmd {
        GenCommand::Component(a) => {
            if a.users < 2 {
                return Err(Error::TooFewUsers(a.users).into());
            }
            let comps = a.rates.iter().map(|r| parse_rate(r, a.users)).collect::<Result<Vec<_>, _>>()?;
            (component_to_json(&gen::gen_component(a.users, comps)?, a.users), &a.output)
        }
        GenCommand::Sensor(a) => {
            if a.sigma.len() < 2 {
                return Err(Error::TooFewUsers(a.sigma.len()).into());
            }
            (tabular_to_json(&gen::gen_sensor(a.rho, &a.sigma)?), &a.output)
        }
    };
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(true)
}
