//! Subcommand implementations. Input problems map to exit code 2 and
//! failed verification to exit code 1.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use semicross::io::{DynSystemJson, GeneratorsJson, RefReport, SemicrossedJson, StructureJson, SubspaceJson, SystemJson};
use semicross::linop::commutant_of_set;
use semicross::orbit::{analyze_orbit, structure_check};
use semicross::reflexivity::{default_budget, default_starts, ref_auto, ref_rankone, ref_sampled, Method};
use semicross::semicrossed::{build, Form};

use crate::report::{Status, Tolerances, VerificationReport};
use crate::suites::{self, Suite};

pub const REPORT_DIR_VAR: &str = "SEMICROSS_REPORT_DIR";

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Failed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Failed(ids) => write!(f, "{} failing case(s): {}", ids.len(), ids.join(", ")),
        }
    }
}

impl From<semicross::Error> for CliError {
    fn from(e: semicross::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses a JSON file; errors name the path inside the document.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text).map_err(|msg| CliError::Input(format!("{}: {msg}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| format!("malformed JSON at `{}`: {}", e.path(), e.inner()))
}

/// Pretty JSON to `out`, or to stdout.
pub fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("outputs serialize");
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn commutant(generators: &Path) -> CliResult<SubspaceJson> {
    let g: GeneratorsJson = read_json(generators)?;
    let mats = g.to_matrices::<f64>()?;
    Ok(SubspaceJson::from_subspace(&commutant_of_set(g.ambient, &mats)?))
}

pub struct RefArgs {
    pub method: Method,
    pub budget: Option<usize>,
    pub starts: Option<usize>,
    pub seed: u64,
    pub tol: f64,
}

pub fn reflexive_cover(subspace: &Path, args: &RefArgs) -> CliResult<RefReport> {
    let sj: SubspaceJson = read_json(subspace)?;
    let s = sj.to_subspace::<f64>()?;
    if s.dim() == 0 {
        return Err(CliError::Input("the subspace is zero".into()));
    }
    let budget = args.budget.unwrap_or_else(|| default_budget(s.ambient()));
    let starts = args.starts.unwrap_or_else(|| default_starts(&s));
    let mut r = match args.method {
        Method::Sampled => ref_sampled(&s, budget, args.seed)?,
        Method::Rankone => ref_rankone(&s, starts, args.seed)?,
        Method::Auto => ref_auto(&s, budget, starts, args.seed)?,
        Method::Pattern => return Err(CliError::Input("the pattern oracle needs structural metadata".into())),
    };
    r.certified_reflexive = s.equals(&r.estimate, args.tol)?.0;
    Ok(RefReport::new(&s, &r)?)
}

pub fn semicrossed_build(system: &Path, levels: usize, form: Form) -> CliResult<SemicrossedJson> {
    let sj: SystemJson = read_json(system)?;
    let sys = sj.to_system::<f64>()?;
    Ok(SemicrossedJson::from_truncated(&build(&sys, levels, form)?))
}

pub fn orbit(system: &Path, levels: usize) -> CliResult<StructureJson> {
    let dj: DynSystemJson = read_json(system)?;
    let sys = dj.to_system()?;
    Ok(StructureJson { decomposition: analyze_orbit(&sys, levels)?, structure: structure_check::<f64>(&sys, levels)? })
}

pub fn report_dir() -> PathBuf {
    std::env::var_os(REPORT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("reports"))
}

/// Runs the named suite, or every suite for `all`, and writes one report
/// file per suite.
pub fn verify(name: &str, seed: u64, tol: Tolerances, dir: &Path) -> CliResult<Vec<VerificationReport>> {
    let selected: Vec<&Suite> = if name == "all" {
        suites::registry().iter().collect()
    } else {
        vec![suites::find(name).ok_or_else(|| {
            let names: Vec<&str> = suites::registry().iter().map(|s| s.name).collect();
            CliError::Input(format!("unknown suite `{name}`; known: all, {}", names.join(", ")))
        })?]
    };
    semicross::scalar::use_sequential_kernels();
    let grouped = suites::run_suites(&selected, seed, tol);
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let mut all = Vec::new();
    for (suite, reports) in grouped {
        let path = dir.join(format!("{suite}.json"));
        let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
        fs::write(&path, text + "\n").map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        all.extend(reports);
    }
    Ok(all)
}

pub fn summarize(reports: &[VerificationReport]) -> CliResult<()> {
    let mut failing = Vec::new();
    for r in reports {
        let label = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ReportOnly => "REPORT",
        };
        println!("{label:<6} {} ({:.0} ms)", r.case_id, r.runtime_ms);
        if r.status == Status::Fail {
            for c in r.failed_checks() {
                println!("         failed: {}{}", c.name, c.value.map(|v| format!(" = {v:.3e}")).unwrap_or_default());
            }
            if let Some(e) = &r.error {
                println!("         error: {e}");
            }
            failing.push(r.case_id.clone());
        }
    }
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failing))
    }
}
