use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use charbiset::biset::stability::{is_left_stable, is_right_stable};
use charbiset::biset::FormalBisetJson;
use charbiset::fusion::{builtin, builtin_catalog};
use charbiset::idempotent::{idempotent_report, IdempotentReport};
use charbiset::oracle::{self, OracleLevel, OracleReport};
use charbiset::realization::{realization_report, RealizationReport};
use charbiset::solver::{check_row, expected_table, minimal_biset, ClassTable, SolverResult, TableCheck};
use charbiset::{Error, FusionSystem, FusionSystemSpec};

/// Characteristic bisets for the saturated fusion systems on p^{1+2}_+.
#[derive(Parser, Debug)]
#[command(name = "charbiset", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "CHARBISET_WORKERS", global = true)]
    workers: Option<usize>,
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Off,
    P3Exhaustive,
    Sampled,
}

impl From<Oracle> for OracleLevel {
    fn from(o: Oracle) -> Self {
        match o {
            Oracle::Off => OracleLevel::Off,
            Oracle::P3Exhaustive => OracleLevel::P3Exhaustive,
            Oracle::Sampled => OracleLevel::Sampled,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SystemArgs {
    /// Built-in system key, alias or name.
    #[arg(long, conflicts_with = "config")]
    system: Option<String>,
    /// Fusion system spec as JSON.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The built-in systems.
    Systems {
        #[command(subcommand)]
        what: SystemsCommand,
    },
    /// The unique minimal characteristic biset.
    Minimal(SystemArgs),
    /// Layers 0 to 2 of the characteristic idempotent.
    Idempotent(SystemArgs),
    /// Transitivity of the wreath-product realization.
    Realize {
        #[command(flatten)]
        system: SystemArgs,
        /// Allow p = 7.
        #[arg(long)]
        big: bool,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum SystemsCommand {
    List,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Every suite.
    #[arg(long)]
    all: bool,
    /// The six-row table.
    #[arg(long)]
    table: bool,
    /// Left and right stability of the minimal biset.
    #[arg(long)]
    stability: bool,
    #[arg(long)]
    idempotent: bool,
    #[arg(long)]
    realize: bool,
    #[arg(long, value_enum, default_value_t = Oracle::Off)]
    oracle: Oracle,
    /// Sampled pairs per system for `--oracle sampled`.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Include p = 7 realizations.
    #[arg(long)]
    big: bool,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownSystem(_) | Error::Parse(_) | Error::InvalidFusionData(_) | Error::NoOuterGroup { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Verification(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Systems { what: SystemsCommand::List } => systems_list(cli.format),
        Command::Minimal(s) => cmd_minimal(s, cli.format),
        Command::Idempotent(s) => cmd_idempotent(s, cli.format),
        Command::Realize { system, big } => cmd_realize(system, *big, cli.format, cli.verbose),
        Command::Verify(v) => cmd_verify(v, cli.format, cli.verbose),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

/// Resolved system with its built-in key when it has one.
struct Resolved {
    key: Option<String>,
    fs: Arc<FusionSystem>,
}

fn resolve(args: &SystemArgs) -> Result<Resolved, Failure> {
    match (&args.system, &args.config) {
        (Some(name), None) => {
            let b = builtin(name)?;
            Ok(Resolved { key: Some(b.key.to_string()), fs: Arc::new(FusionSystem::new(b.spec)?) })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let spec = FusionSystemSpec::from_json(&text)?;
            let key = builtin_catalog().into_iter().find(|b| b.spec == spec).map(|b| b.key.to_string());
            Ok(Resolved { key, fs: Arc::new(FusionSystem::new(spec)?) })
        }
        _ => Err(Failure::Usage("give --system or --config".into())),
    }
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("artifacts serialize"));
}

#[derive(Serialize, Deserialize)]
struct SystemRow {
    key: String,
    aliases: Vec<String>,
    prime: u32,
    name: String,
    classes: Vec<Vec<usize>>,
    r: Vec<u32>,
    f: u32,
    out_order: usize,
    group: String,
}

fn systems_list(format: Format) -> Outcome {
    let rows: Vec<SystemRow> = builtin_catalog()
        .into_iter()
        .map(|b| SystemRow {
            key: b.key.into(),
            aliases: b.aliases.iter().map(|a| a.to_string()).collect(),
            prime: b.spec.prime,
            name: b.spec.name.clone(),
            classes: b.spec.classes.iter().map(|c| c.lines.clone()).collect(),
            r: b.spec.classes.iter().map(|c| c.r).collect(),
            f: b.spec.f_number().unwrap_or(0),
            out_order: b.spec.out_order(),
            group: b.group.into(),
        })
        .collect();
    match format {
        Format::Json => emit(&rows),
        Format::Table => {
            println!("{:<6} {:>2}  {:<8} {:<30} {:<8} {:>3} {:>5}  group", "key", "p", "Out", "classes", "r", "f", "|Out|");
            for r in &rows {
                let classes: Vec<String> = r
                    .classes
                    .iter()
                    .map(|c| format!("{{{}}}", c.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                let rs: Vec<String> = r.r.iter().map(|x| x.to_string()).collect();
                println!(
                    "{:<6} {:>2}  {:<8} {:<30} {:<8} {:>3} {:>5}  {}",
                    r.key,
                    r.prime,
                    r.name,
                    classes.join(" "),
                    rs.join(","),
                    r.f,
                    r.out_order,
                    r.group
                );
            }
        }
    }
    Ok(true)
}

/// The `minimal` artifact.
#[derive(Serialize, Deserialize)]
struct MinimalArtifact {
    result: SolverResult,
    certified: bool,
    table_check: Option<TableCheck>,
    biset: FormalBisetJson,
}

fn minimal_artifact(r: &Resolved) -> Result<MinimalArtifact, Failure> {
    let table = ClassTable::new(r.fs.clone())?;
    let result = minimal_biset(&table)?;
    let table_check =
        r.key.as_ref().and_then(|k| expected_table().into_iter().find(|row| &row.key == k)).map(|row| check_row(&row, &result));
    let biset = result.biset().to_json(&result.system);
    Ok(MinimalArtifact { certified: result.certified(), result, table_check, biset })
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn cmd_minimal(args: &SystemArgs, format: Format) -> Outcome {
    let r = resolve(args)?;
    let a = minimal_artifact(&r)?;
    let passed = a.certified && a.table_check.as_ref().map_or(true, |c| c.passed());
    match format {
        Format::Json => emit(&a),
        Format::Table => print!("{}", render_minimal(&a)),
    }
    if let Some(c) = a.table_check.as_ref().filter(|c| !c.passed()) {
        for d in &c.diff {
            eprintln!("diff: {d}");
        }
    }
    Ok(passed)
}

fn render_minimal(a: &MinimalArtifact) -> String {
    let r = &a.result;
    let mut s = String::new();
    let _ = writeln!(s, "system {} (p = {}), |Out_F(S)| = {}, f = {}", r.system, r.prime, r.out_order, r.f);
    let _ = writeln!(s, "d0 = {}  d1 = {}  d2 = {}  d3 = {}  e = {}", r.d0, r.d1, r.d2, r.d3, r.e);
    match (r.exotic, r.bound) {
        (Some(true), Some(b)) => {
            let _ = writeln!(s, "exotic, exoticity index <= {b}");
        }
        (Some(false), _) => {
            let _ = writeln!(s, "realizable");
        }
        _ => {}
    }
    let _ = writeln!(s, "summands: {}", a.biset.summands.len());
    let c = &r.coefficients;
    let _ = writeln!(s, "c0 = {}", c.c0);
    let c1: Vec<String> = c.c1.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(s, "c1 by V_i = [{}]", c1.join(", "));
    let _ = writeln!(s, "c2:");
    for e in &c.c2 {
        let _ = writeln!(s, "  [{}, {}^{}] = {}", e.xi, e.zeta, e.m, e.value);
    }
    let _ = writeln!(
        s,
        "checks: minimal {} unique {} left/right agree {} stable left {} right {} self-opposite {} layer 1 {}",
        yes(r.minimal),
        yes(r.unique),
        yes(r.left_right_agree),
        yes(r.stable_left),
        yes(r.stable_right),
        yes(r.self_opposite),
        yes(r.layer1_matches)
    );
    for cert in &r.certificates {
        let _ = writeln!(
            s,
            "certificate {:?}: candidates {} feasible {} slopes {} condition (B) {}",
            cert.side,
            cert.candidates,
            cert.feasible,
            yes(cert.slopes_nonnegative),
            yes(cert.condition_b)
        );
    }
    if let Some(t) = &a.table_check {
        let _ = writeln!(s, "table row {}: {}", t.expected.key, if t.passed() { "PASS" } else { "FAIL" });
    }
    s
}

fn cmd_idempotent(args: &SystemArgs, format: Format) -> Outcome {
    let r = resolve(args)?;
    let table = ClassTable::new(r.fs.clone())?;
    let rep = idempotent_report(&table)?;
    match format {
        Format::Json => emit(&rep),
        Format::Table => print!("{}", render_idempotent(&rep)),
    }
    Ok(rep.passed())
}

fn render_idempotent(rep: &IdempotentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "system {} (p = {})", rep.system, rep.prime);
    let _ = writeln!(s, "c0 = {}", rep.c0);
    let _ = writeln!(s, "c1 extendable = {}  nonextendable = {}", rep.c1_extendable, rep.c1_nonextendable);
    let _ = writeln!(s, "c2 [z, z] = {}", rep.c2_z);
    let _ = writeln!(s, "c2 [u_i, u_i] = [{}]", rep.c2_u.join(", "));
    let _ = writeln!(s, "c2 [u_i, z], [z, u_j] = {}", rep.c2_mixed);
    let _ = writeln!(s, "c2 [u_i, u_j] across classes = {}", rep.c2_cross);
    let _ = writeln!(s, "layer sums: {}", rep.layer_sums.join(", "));
    for src in &rep.source_sums {
        let _ = writeln!(s, "  sum over {} (layer {}) = {}", src.source, src.layer, src.sum);
    }
    let _ = writeln!(
        s,
        "checks: solve = closed form {} p-local {} stable left {} right {}",
        yes(rep.solve_matches_closed_form),
        yes(rep.p_local),
        yes(rep.left_stable),
        yes(rep.right_stable)
    );
    let _ = writeln!(s, "coefficients:");
    for c in &rep.coefficients {
        let _ = writeln!(s, "  {:<28} layer {}  {}", c.class, c.layer, c.value);
    }
    s
}

fn realize_one(r: &Resolved, verbose: u8) -> Result<RealizationReport, Failure> {
    let name = &r.fs.spec().name;
    if verbose > 0 || r.fs.p() >= 7 {
        eprintln!("[{name}] solving for the minimal biset");
    }
    let table = ClassTable::new(r.fs.clone())?;
    let x = minimal_biset(&table)?.biset().clone();
    if verbose > 0 || r.fs.p() >= 7 {
        eprintln!("[{name}] |J| = {}, building generator images", x.e());
    }
    let rep = realization_report(&r.fs, &x)?;
    if verbose > 0 || r.fs.p() >= 7 {
        eprintln!("[{name}] done in {} ms", rep.wall_time_ms);
    }
    Ok(rep)
}

fn render_realization(rep: &RealizationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "system {} (p = {}): |J| = {}, {} blocks {:?}", rep.system, rep.prime, rep.j, rep.blocks, rep.blocks_by_layer);
    let _ = writeln!(
        s,
        "generators: {} ({} from Out_F(S), essential on V_i for i in {:?}{})",
        rep.generator_count,
        rep.out_generators,
        rep.essential_on,
        if rep.extended { ", extended" } else { "" }
    );
    let _ = writeln!(s, "orbits on J: {}", rep.orbit_count);
    let _ = writeln!(
        s,
        "J0: {} points, {} orbit(s), free {} transitive {}",
        rep.j0,
        rep.j0_orbit_count,
        yes(rep.j0_free),
        yes(rep.j0_transitive)
    );
    let _ = writeln!(
        s,
        "checks: bijective {} block classes {} composite {} matching-independent {}",
        yes(rep.bijective),
        yes(rep.block_classes_ok),
        yes(rep.composite_preserves_pieces),
        yes(rep.matching_independent)
    );
    let _ = writeln!(s, "pairs across block sizes: {}", rep.pairs_across_sizes);
    let _ = writeln!(s, "wall time: {} ms", rep.wall_time_ms);
    s
}

fn cmd_realize(args: &SystemArgs, big: bool, format: Format, verbose: u8) -> Outcome {
    let r = resolve(args)?;
    if r.fs.p() >= 7 && !big {
        return Err(Failure::Usage(format!("p = {} realizations need --big", r.fs.p())));
    }
    let rep = realize_one(&r, verbose)?;
    match format {
        Format::Json => emit(&rep),
        Format::Table => print!("{}", render_realization(&rep)),
    }
    Ok(rep.passed())
}

#[derive(Serialize, Deserialize)]
struct SuiteResult {
    suite: String,
    system: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize, Deserialize)]
struct VerifyReport {
    suites: Vec<SuiteResult>,
    passed: bool,
}

fn suite(suite: &str, system: &str, passed: bool, detail: String) -> SuiteResult {
    SuiteResult { suite: suite.into(), system: system.into(), passed, detail }
}

fn oracle_suite(fs: &FusionSystem, level: OracleLevel, samples: usize, seed: u64) -> Result<Option<OracleReport>, Error> {
    Ok(match (level, fs.p()) {
        (OracleLevel::Off, _) => None,
        (_, 3) => Some(oracle::exhaustive(fs)),
        (OracleLevel::Sampled, _) => Some(oracle::sampled(fs, samples, seed)?),
        _ => None,
    })
}

fn verify_system(v: &VerifyArgs, r: &Resolved, suites: &Suites, verbose: u8) -> Vec<SuiteResult> {
    let name = r.fs.spec().name.clone();
    let mut out = Vec::new();
    let fail = |s: &str, e: Error| suite(s, &name, false, e.to_string());
    let table = match ClassTable::new(r.fs.clone()) {
        Ok(t) => t,
        Err(e) => return vec![fail("setup", e)],
    };
    if suites.oracle != OracleLevel::Off {
        match oracle_suite(&r.fs, suites.oracle, v.samples, v.seed) {
            Ok(Some(o)) => out.push(suite(
                "oracle",
                &name,
                o.passed(),
                format!(
                    "{} {} pairs, {} mismatches",
                    o.pairs,
                    if o.exhaustive { "exhaustive" } else { "sampled" },
                    o.mismatches.len()
                ),
            )),
            Ok(None) => {}
            Err(e) => out.push(fail("oracle", e)),
        }
    }
    let solved = if suites.table || suites.stability || suites.realize { Some(minimal_biset(&table)) } else { None };
    if let Some(res) = &solved {
        match res {
            Err(e) => out.push(fail("minimal", e.clone())),
            Ok(res) => {
                if suites.table {
                    let row = r.key.as_ref().and_then(|k| expected_table().into_iter().find(|row| &row.key == k));
                    match row {
                        Some(row) => {
                            let c = check_row(&row, res);
                            let detail = if c.passed() {
                                format!(
                                    "f={} d=({}, {}, {}) e={}{}",
                                    res.f,
                                    res.d0,
                                    res.d1,
                                    res.d2,
                                    res.e,
                                    res.bound.map(|b| format!(" bound={b}")).unwrap_or_default()
                                )
                            } else {
                                c.diff.join("; ")
                            };
                            out.push(suite("table", &name, c.passed(), detail));
                        }
                        None => out.push(suite("table", &name, res.certified(), format!("e={} (no published row)", res.e))),
                    }
                }
                if suites.stability {
                    let x = res.biset();
                    let left = is_left_stable(&r.fs, x);
                    let right = is_right_stable(&r.fs, x);
                    match (left, right) {
                        (Ok(l), Ok(rr)) => out.push(suite(
                            "stability",
                            &name,
                            l.stable && rr.stable,
                            format!("left {} of {}, right {} of {}", yes(l.stable), l.checked, yes(rr.stable), rr.checked),
                        )),
                        (Err(e), _) | (_, Err(e)) => out.push(fail("stability", e)),
                    }
                }
                if suites.realize {
                    if r.fs.p() >= 7 && !v.big {
                        out.push(suite("realization", &name, true, "skipped: p = 7 needs --big".into()));
                    } else {
                        match realize_one(r, verbose) {
                            Ok(rep) => out.push(suite(
                                "realization",
                                &name,
                                rep.passed(),
                                format!("{} orbit(s) on |J| = {}, J0 regular {}", rep.orbit_count, rep.j, yes(rep.j0_free && rep.j0_transitive)),
                            )),
                            Err(Failure::Usage(m) | Failure::Verification(m)) => {
                                out.push(suite("realization", &name, false, m))
                            }
                        }
                    }
                }
            }
        }
    }
    if suites.idempotent {
        match idempotent_report(&table) {
            Ok(rep) => out.push(suite(
                "idempotent",
                &name,
                rep.passed(),
                format!("c0 = {}, c2[z,z] = {}, layer sums {}", rep.c0, rep.c2_z, rep.layer_sums.join("/")),
            )),
            Err(e) => out.push(fail("idempotent", e)),
        }
    }
    out
}

struct Suites {
    oracle: OracleLevel,
    table: bool,
    stability: bool,
    idempotent: bool,
    realize: bool,
}

fn cmd_verify(v: &VerifyArgs, format: Format, verbose: u8) -> Outcome {
    use rayon::prelude::*;
    let any = v.table || v.stability || v.idempotent || v.realize || v.oracle != Oracle::Off;
    if !v.all && !any {
        return Err(Failure::Usage("choose suites: --all, --table, --stability, --idempotent, --realize or --oracle".into()));
    }
    let suites = Suites {
        oracle: v.oracle.into(),
        table: v.all || v.table,
        stability: v.all || v.stability,
        idempotent: v.all || v.idempotent,
        realize: v.all || v.realize,
    };
    let systems: Vec<Resolved> = if v.system.system.is_some() || v.system.config.is_some() {
        vec![resolve(&v.system)?]
    } else {
        builtin_catalog()
            .into_iter()
            .map(|b| Ok(Resolved { key: Some(b.key.to_string()), fs: Arc::new(FusionSystem::new(b.spec)?) }))
            .collect::<Result<_, Error>>()?
    };
    let results: Vec<SuiteResult> =
        systems.par_iter().map(|r| verify_system(v, r, &suites, verbose)).collect::<Vec<_>>().into_iter().flatten().collect();
    let report = VerifyReport { passed: results.iter().all(|s| s.passed), suites: results };
    match format {
        Format::Json => emit(&report),
        Format::Table => {
            for s in &report.suites {
                println!("{:<4} {:<12} {:<8} {}", if s.passed { "PASS" } else { "FAIL" }, s.suite, s.system, s.detail);
            }
            println!("{}", if report.passed { "all suites passed" } else { "some suites failed" });
        }
    }
    Ok(report.passed)
}
