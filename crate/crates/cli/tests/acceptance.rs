//! Acceptance criteria, evaluated on the reports of two `verify all --seed 42`
//! runs of the built binary. Prints one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use semicross_cli::catalog::{dyn_systems, systems};
use semicross_cli::report::{Status, VerificationReport};
use semicross_cli::suites::registry;

const GAP: f64 = 1e-8;
const RESIDUAL: f64 = 1e-10;
const QUADRATURE: f64 = 1e-12;
const INTERIOR_LEVELS: [usize; 3] = [8, 12, 16];

type Reports = BTreeMap<String, Vec<VerificationReport>>;

fn run_verify_all(dir: &Path) -> Result<Reports, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_semicross"))
        .args(["verify", "all", "--seed", "42", "--report-dir"])
        .arg(dir)
        .output()
        .map_err(|e| format!("cannot run the binary: {e}"))?;
    match out.status.code() {
        Some(0) | Some(1) => {}
        other => {
            return Err(format!("verify all exited with {other:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
    }
    let mut reports = Reports::new();
    for suite in registry() {
        let path = dir.join(format!("{}.json", suite.name));
        let text = std::fs::read_to_string(&path).map_err(|e| format!("missing {}: {e}", path.display()))?;
        let parsed: Vec<VerificationReport> =
            serde_json::from_str(&text).map_err(|e| format!("unreadable {}: {e}", path.display()))?;
        reports.insert(suite.name.to_string(), parsed);
    }
    Ok(reports)
}

/// Problems found while evaluating one criterion.
type Criterion = (&'static str, fn(&mut Eval<'_>));

struct Eval<'a> {
    reports: &'a Reports,
    problems: Vec<String>,
}

impl<'a> Eval<'a> {
    fn new(reports: &'a Reports) -> Self {
        Self { reports, problems: Vec::new() }
    }

    fn fail(&mut self, msg: String) {
        self.problems.push(msg);
    }

    /// Cases of a suite; every case must be free of errors and failed checks.
    fn suite(&mut self, name: &str) -> Vec<&'a VerificationReport> {
        let Some(list) = self.reports.get(name) else {
            self.fail(format!("suite `{name}` has no reports"));
            return Vec::new();
        };
        if list.is_empty() {
            self.fail(format!("suite `{name}` is empty"));
        }
        for r in list {
            if let Some(e) = &r.error {
                self.fail(format!("{}: error: {e}", r.case_id));
            }
            for c in r.failed_checks() {
                self.fail(format!("{}: check `{}` failed (value {:?})", r.case_id, c.name, c.value));
            }
        }
        list.iter().collect()
    }

    fn case(&mut self, id: &str) -> Option<&'a VerificationReport> {
        let suite = id.split('/').next().unwrap_or_default();
        let found = self.reports.get(suite).and_then(|l| l.iter().find(|r| r.case_id == id));
        if found.is_none() {
            self.fail(format!("case `{id}` missing"));
        }
        found
    }

    fn holds(&mut self, r: &VerificationReport, name: &str) {
        match r.check(name) {
            Some(c) if c.passed => {}
            Some(_) => self.fail(format!("{}: `{name}` does not hold", r.case_id)),
            None => self.fail(format!("{}: check `{name}` missing", r.case_id)),
        }
    }

    /// A measured check, compared against the pinned bound here.
    fn within(&mut self, r: &VerificationReport, name: &str, bound: f64) {
        match r.check(name).and_then(|c| c.value) {
            Some(v) if v <= bound => {}
            Some(v) => self.fail(format!("{}: `{name}` = {v:.3e} exceeds {bound:.1e}", r.case_id)),
            None => self.fail(format!("{}: measured check `{name}` missing", r.case_id)),
        }
    }

    fn dim(&mut self, r: &VerificationReport, key: &str) -> usize {
        match r.dims.get(key) {
            Some(&d) => d,
            None => {
                self.fail(format!("{}: dim `{key}` missing", r.case_id));
                usize::MAX
            }
        }
    }

    fn expect_dim(&mut self, r: &VerificationReport, key: &str, expected: usize) {
        let d = self.dim(r, key);
        if d != expected {
            self.fail(format!("{}: dim `{key}` = {d}, expected {expected}", r.case_id));
        }
    }

    fn status(&mut self, r: &VerificationReport, expected: Status) {
        if r.status != expected {
            self.fail(format!("{}: status {:?}, expected {expected:?}", r.case_id, r.status));
        }
    }
}

fn fourier(e: &mut Eval) {
    for r in e.suite("fourier") {
        e.within(r, "sum-of-coefficients", QUADRATURE);
        e.within(r, "quadrature-vs-extraction", QUADRATURE);
        e.within(r, "fejer-error-over-bound", 1.0 + QUADRATURE);
        e.holds(r, "no-aliasing-warning");
    }
    if let Some(r) = e.case("fourier/random-d2-n8") {
        e.expect_dim(r, "samples", 100);
        e.expect_dim(r, "nodes", 32);
        e.expect_dim(r, "fejer-index", 800);
    }
}

fn membership(e: &mut Eval) {
    for suite in ["prop22", "prop24"] {
        e.suite(suite);
        for ns in systems() {
            if let Some(r) = e.case(&format!("{suite}/{}", ns.id)) {
                e.expect_dim(r, "samples", 200);
                e.expect_dim(r, "disagreements", 0);
                e.expect_dim(r, "mislabeled-draws", 0);
            }
        }
    }
}

fn commutant(e: &mut Eval) {
    e.suite("thm211");
    for ns in systems() {
        if let Some(r) = e.case(&format!("thm211/{}", ns.id)) {
            e.within(r, "predicted-inside-brute", RESIDUAL);
            e.within(r, "commutation-residual", RESIDUAL);
        }
    }
    for id in ["scalar-trivial", "scalar-sign", "diag-identity"] {
        if let Some(r) = e.case(&format!("thm211/{id}")) {
            e.status(r, Status::Pass);
            e.within(r, "predicted-vs-brute", GAP);
            let (brute, oracle) = (e.dim(r, "brute"), e.dim(r, "brute-jordan-oracle"));
            if brute != oracle {
                e.fail(format!("{}: brute {brute} differs from the nullspace oracle {oracle}", r.case_id));
            }
        }
    }
}

fn bicommutant(e: &mut Eval) {
    let equal = ["diag-identity", "diag-cyclic", "diag-cyclic3", "pair-irrational", "full-identity", "full-generic"];
    for r in e.suite("thm212") {
        e.within(r, "predicted-inside-brute", GAP);
        let id = r.case_id.trim_start_matches("thm212/");
        if equal.contains(&id) {
            e.status(r, Status::Pass);
            e.within(r, "predicted-vs-brute", GAP);
        } else {
            e.status(r, Status::ReportOnly);
        }
    }
}

fn tensor_comparison(e: &mut Eval) {
    e.suite("bullets");
    for ns in systems() {
        if let Some(r) = e.case(&format!("bullets/{}", ns.id)) {
            e.holds(r, "equal-iff-w-and-w-star-in-A");
        }
    }
    if let Some(r) = e.case("bullets/scalar-irrational") {
        e.holds(r, "irrational-angle-gives-rho");
        e.holds(r, "irrational-shift-intersections-trivial");
    }
    for r in e.suite("example25") {
        let (meet, span, rho) = (e.dim(r, "intersection"), e.dim(r, "power-span"), e.dim(r, "rho"));
        if !(meet >= span && span > rho) {
            e.fail(format!("{}: need intersection {meet} >= power span {span} > rho {rho}", r.case_id));
        }
    }
}

fn engines(e: &mut Eval) {
    e.suite("ref-engines");
    for id in ["corner-unit", "lower-triangular-3", "diagonal-and-column-3", "checkerboard-4", "full-3", "toeplitz-2", "toeplitz-3", "diag-toeplitz-4"] {
        if let Some(r) = e.case(&format!("ref-engines/{id}")) {
            e.within(r, "sampled-vs-rankone", GAP);
        }
    }
    for id in ["lower-triangular-3", "diagonal-and-column-3", "checkerboard-4"] {
        if let Some(r) = e.case(&format!("ref-engines/{id}")) {
            e.holds(r, "pattern-oracle-certifies");
            e.holds(r, "sampled-certifies-pattern");
        }
    }
    if let Some(r) = e.case("ref-engines/toeplitz-2") {
        let (s, est) = (e.dim(r, "space"), e.dim(r, "sampled-estimate"));
        if est.checked_sub(s) != Some(1) {
            e.fail(format!("toeplitz-2: defect {est} - {s} is not 1"));
        }
    }
}

fn interior(e: &mut Eval) {
    for suite in ["lemma26-interior", "thm28-interior", "thm29-interior", "thm33-interior"] {
        for r in e.suite(suite) {
            for n in INTERIOR_LEVELS {
                e.within(r, &format!("N={n}/interior-excess"), GAP);
            }
            let dims: Vec<(usize, usize)> = INTERIOR_LEVELS
                .iter()
                .map(|n| (e.dim(r, &format!("N={n}/defect")), e.dim(r, &format!("N={n}/space"))))
                .collect();
            let all_zero = dims.iter().all(|&(d, _)| d == 0);
            let decreasing = dims.windows(2).all(|w| (w[1].0 as f64 / w[1].1 as f64) < (w[0].0 as f64 / w[0].1 as f64));
            if !(all_zero || decreasing) {
                e.fail(format!("{}: defect/dim ratios {dims:?} not strictly decreasing", r.case_id));
            }
        }
    }
    if e.reports.get("thm33-interior").map_or(0, Vec::len) != dyn_systems().len() {
        e.fail("thm33-interior does not cover every catalogued dynamical system".into());
    }
}

fn round_trip(e: &mut Eval) {
    let mut total = 0;
    for r in e.suite("prop27") {
        total += e.dim(r, "samples");
        e.within(r, "decompose-after-assemble", GAP);
        e.within(r, "assemble-after-decompose", GAP);
    }
    if total != 50 {
        e.fail(format!("{total} round trips instead of 50"));
    }
}

fn structure(e: &mut Eval) {
    let mut shapes = Vec::new();
    for r in e.suite("prop31") {
        e.within(r, "structure-gap", GAP);
        let (n0, p, tail) = (e.dim(r, "n0"), e.dim(r, "p"), e.dim(r, "tail"));
        let levels = e.dim(r, "class-0") + n0;
        let formula: usize = (0..n0).map(|l| levels - l).sum();
        if tail != formula {
            e.fail(format!("{}: tail dim {tail} differs from the sum formula {formula}", r.case_id));
        }
        shapes.push((n0, p));
    }
    let covered = [
        shapes.iter().any(|&(n0, p)| n0 == 0 && p == 1),
        shapes.iter().any(|&(n0, p)| n0 > 0 && p == 1),
        shapes.iter().any(|&(n0, p)| n0 == 0 && p >= 2),
        shapes.iter().any(|&(n0, p)| n0 >= 2 && p >= 3),
    ];
    if !covered.iter().all(|&c| c) {
        e.fail(format!("orbit shapes {shapes:?} miss a required kind"));
    }
    e.case("prop31/partial-orbit");
    if let Some(r) = e.case("prop31/fixed-point") {
        e.expect_dim(r, "ct", 12);
    }
}

fn entrywise(e: &mut Eval) {
    e.suite("rem32");
    for ns in dyn_systems() {
        if let Some(r) = e.case(&format!("rem32/{}", ns.id)) {
            e.expect_dim(r, "samples", 200);
            e.expect_dim(r, "disagreements", 0);
        }
    }
    let mut rejected = 0;
    for r in e.suite("rem34") {
        e.holds(r, "separating-pair-spans");
        rejected += usize::from(r.check("constants-rejected").is_some_and(|c| c.passed));
    }
    if rejected + 1 != dyn_systems().len() {
        e.fail(format!("constants rejected on {rejected} systems, expected all but the fixed point"));
    }
}

fn convolution(e: &mut Eval) {
    e.suite("l1");
    for id in ["diag-swap", "diag-collapse", "full-generic"] {
        if let Some(r) = e.case(&format!("l1/{id}")) {
            e.within(r, "associativity", RESIDUAL);
            e.within(r, "submultiplicativity-ratio", 1.0 + RESIDUAL);
            e.within(r, "lt-homomorphism", RESIDUAL);
            e.holds(r, "regular-pair-left-covariant");
            e.holds(r, "adjoint-pair-right-covariant");
        }
    }
    for id in ["diag-swap", "diag-collapse"] {
        if let Some(r) = e.case(&format!("l1/{id}")) {
            e.holds(r, "opposite-identity-passed");
        }
    }
}

fn without_runtimes(reports: &Reports) -> serde_json::Value {
    let mut v = serde_json::to_value(reports).expect("reports serialize");
    for list in v.as_object_mut().expect("map").values_mut() {
        for r in list.as_array_mut().expect("array") {
            r.as_object_mut().expect("object").remove("runtime_ms");
        }
    }
    v
}

fn determinism(first: &Reports, second: &Reports) -> Vec<String> {
    let (a, b) = (without_runtimes(first), without_runtimes(second));
    if a == b {
        return Vec::new();
    }
    let mut problems = Vec::new();
    for (suite, list) in first {
        for (x, y) in list.iter().zip(second.get(suite).into_iter().flatten()) {
            let (mut x, mut y) = (x.clone(), y.clone());
            x.runtime_ms = 0.0;
            y.runtime_ms = 0.0;
            if x != y {
                problems.push(format!("{} differs between runs", x.case_id));
            }
        }
    }
    if problems.is_empty() {
        problems.push("report sets differ between runs".into());
    }
    problems
}

fn main() -> ExitCode {
    let dirs = [tempfile::tempdir().expect("temp dir"), tempfile::tempdir().expect("temp dir")];
    let start = Instant::now();
    let runs: Vec<Result<Reports, String>> = dirs.iter().map(|d| run_verify_all(d.path())).collect();
    let (first, second) = match (&runs[0], &runs[1]) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            println!("FAIL acceptance: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("ran `verify all --seed 42` twice in {:.1} s", start.elapsed().as_secs_f64());

    let criteria: [Criterion; 11] = [
        ("Fourier coefficients, quadrature and Fejér bound", fourier),
        ("block membership agrees with span membership", membership),
        ("commutant prediction and Jordan oracle", commutant),
        ("bicommutant on masa and full-algebra instances", bicommutant),
        ("tensor against semicrossed, root-of-unity intersections", tensor_comparison),
        ("reflexive-cover engines agree", engines),
        ("interior defect annihilated with decreasing ratio", interior),
        ("G-invariant round trips", round_trip),
        ("one-point algebra structure", structure),
        ("entrywise membership and separating families", entrywise),
        ("convolution algebras and covariant pairs", convolution),
    ];
    let mut failed = 0;
    let mut report = |k: usize, title: &str, problems: Vec<String>| {
        let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {k:>2}: {title}");
        for p in problems.iter().take(20) {
            println!("        {p}");
        }
        if problems.len() > 20 {
            println!("        ... {} more", problems.len() - 20);
        }
        failed += usize::from(!problems.is_empty());
    };
    for (k, (title, eval)) in criteria.iter().enumerate() {
        let mut e = Eval::new(first);
        eval(&mut e);
        report(k + 1, title, e.problems);
    }
    report(12, "identical reports across runs with the same seed", determinism(first, second));

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
