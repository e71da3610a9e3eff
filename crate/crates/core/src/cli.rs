//! The `diagbbw` command line. Commands render into an [`Outcome`] so they
//! can be driven in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bbw::{analyze, level_cohomology, parabolic_cohomology, projectivity_obstruction, LevelOutcome, Verdict};
use crate::error::{Error, Result};
use crate::oracle::{audit_random, audit_weights, AuditLine, MAX_RANK};
use crate::report::Report;
use crate::rootdata::EpsWeight;
use crate::scenario::{Coord, Loaded};
use crate::weights::{labels_stabilize, successor_tree, to_fundamental, SuccessorTree};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "diagbbw", version, about = "Line-bundle cohomology on flag ind-varieties of diagonal ind-groups")]
pub struct Cli {
    /// Worker threads for level-parallel work.
    #[arg(long, env = "DIAGBBW_WORKERS", global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a scenario.
    Check { scenario: PathBuf },
    /// Print the restriction chain `λ_n → … → λ_1`.
    Restrict {
        scenario: PathBuf,
        #[arg(long)]
        from_level: Option<usize>,
    },
    /// Straighten one level.
    Bbw {
        scenario: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide the cohomology of the whole weight prefix.
    Analyze {
        scenario: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        /// Use the scenario's Levi masks and report on `G/P`.
        #[arg(long)]
        parabolic: bool,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate nonzero dominant prefixes.
    SearchDominant {
        scenario: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        bound: Option<i64>,
        /// Disable the monotone-mass pruning rule.
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        json: bool,
    },
    /// Successor tree of a root with its labels.
    Tree {
        scenario: PathBuf,
        /// ε-coordinates of the root, e.g. "1,-1".
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        #[arg(long, default_value_t = 1)]
        from_level: usize,
        #[arg(long)]
        to_level: Option<usize>,
        /// Copy choices to test for stabilization, e.g. "1,1,2".
        #[arg(long)]
        path: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Lengths `ℓ_n(w(n))` of the scenario's limit Weyl element.
    Length {
        scenario: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Apply the scenario's limit Weyl element to its weight by the dot action.
    Act { scenario: PathBuf },
    /// Whether strictly dominant weights can exist.
    Projectivity {
        scenario: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Compare fast straightening with exhaustive search.
    OracleVerify {
        scenario: Option<PathBuf>,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_rank: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: EXIT_OK }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code }
            } else {
                Outcome::ok(text)
            };
        }
    };
    if let Some(n) = cli.workers {
        // only the first configuration in a process takes effect
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit_code(&e) },
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Check { scenario } => check(&Loaded::from_file(scenario)?),
        Command::Restrict { scenario, from_level } => restrict(&Loaded::from_file(scenario)?, *from_level),
        Command::Bbw { scenario, level, json: as_json } => bbw(&Loaded::from_file(scenario)?, *level, *as_json),
        Command::Analyze { scenario, report, horizon, window, parabolic, json: as_json } => {
            let loaded = Loaded::from_file(scenario)?;
            let mut options = loaded.scenario.options.analyze_options();
            if horizon.is_some() {
                options.horizon = *horizon;
            }
            if let Some(w) = window {
                options.window = *w;
            }
            run_analyze(&loaded, options, *parabolic, report.as_ref(), *as_json)
        }
        Command::SearchDominant { scenario, level, bound, no_prune, json: as_json } => {
            let loaded = Loaded::from_file(scenario)?;
            let mut options = loaded.scenario.options.search_options();
            if let Some(b) = bound {
                options.bound = *b;
            }
            if *no_prune {
                options.prune = false;
            }
            search(&loaded, *level, options, *as_json)
        }
        Command::Tree { scenario, root, from_level, to_level, path, json: as_json } => {
            tree(&Loaded::from_file(scenario)?, root, *from_level, *to_level, path.as_deref(), *as_json)
        }
        Command::Length { scenario, horizon, window } => length(&Loaded::from_file(scenario)?, *horizon, *window),
        Command::Act { scenario } => act(&Loaded::from_file(scenario)?),
        Command::Projectivity { scenario, horizon } => {
            let loaded = Loaded::from_file(scenario)?;
            let h = horizon.unwrap_or(loaded.system.num_levels());
            Ok(Outcome::ok(json(&projectivity_obstruction(&loaded.system, h)?)))
        }
        Command::OracleVerify { scenario, random, seed, count, max_rank } => {
            oracle_verify(scenario.as_ref(), *random, *seed, *count, *max_rank)
        }
    }
}

fn check(l: &Loaded) -> Result<Outcome> {
    let sys = &l.system;
    let mut out = String::new();
    let name = l.scenario.name.as_deref().unwrap_or("(unnamed)");
    writeln!(out, "ok: {name}").unwrap();
    let ranks: Vec<String> = sys.levels().iter().map(|x| x.to_string()).collect();
    writeln!(out, "levels: {}", ranks.join(" ⊂ ")).unwrap();
    let copies: Vec<String> = sys.steps().iter().map(|s| s.num_copies().to_string()).collect();
    writeln!(out, "copies per step: [{}]", copies.join(", ")).unwrap();
    let pure = sys.is_pure();
    writeln!(out, "pure: {}", yes_no(pure.holds, pure.first_violation)).unwrap();
    let rr = sys.is_root_reductive();
    writeln!(out, "root reductive: {}", yes_no(rr.holds, rr.first_violation)).unwrap();
    writeln!(out, "borel: compatible at every step").unwrap();
    if let Some(w) = &l.weights {
        let dominant = (1..=w.num_levels())
            .filter(|&n| l.borel.chamber(n).is_ok_and(|c| c.is_dominant(&w.weights()[n - 1])))
            .count();
        writeln!(out, "weight: {} levels, {dominant} of them dominant", w.num_levels()).unwrap();
    }
    if let Some(e) = &l.element {
        writeln!(out, "weyl element: base level {}, {} branches", e.base_level(), e.support().len()).unwrap();
    }
    Ok(Outcome::ok(out))
}

fn yes_no(holds: bool, first: Option<usize>) -> String {
    match (holds, first) {
        (true, _) => "yes".into(),
        (false, Some(n)) => format!("no (first at step {n})"),
        (false, None) => "no".into(),
    }
}

fn describe(l: &Loaded, n: usize, w: &EpsWeight) -> String {
    match l.borel.chamber(n).and_then(|c| to_fundamental(w, c)) {
        Ok(c) => format!("{w}  fundamental {c:?}"),
        Err(_) => format!("{w}  (not integral)"),
    }
}

fn restrict(l: &Loaded, from: Option<usize>) -> Result<Outcome> {
    let weights = l.weights()?;
    let n = from.unwrap_or(weights.num_levels());
    let mut w = weights.at(n)?.clone();
    let mut out = String::new();
    writeln!(out, "λ_{n} = {}", describe(l, n, &w)).unwrap();
    for k in (1..n).rev() {
        w = l.system.restrict_weight(k, &w)?;
        writeln!(out, "λ_{k} = {}", describe(l, k, &w)).unwrap();
    }
    Ok(Outcome::ok(out))
}

fn bbw(l: &Loaded, n: usize, as_json: bool) -> Result<Outcome> {
    let r = level_cohomology(&l.system, &l.borel, l.weights()?, n)?;
    if as_json {
        return Ok(Outcome::ok(json(&r)));
    }
    let text = match &r.outcome {
        LevelOutcome::Acyclic => format!("level {n}: acyclic (λ + ρ is singular)\n"),
        LevelOutcome::Regular { degree, w, dominant } => format!(
            "level {n}: H^{degree} ≠ 0, all other degrees vanish\nw = {}\nw·λ = {}\n",
            w.one_line(),
            describe(l, n, dominant)
        ),
    };
    Ok(Outcome::ok(text))
}

fn run_analyze(
    l: &Loaded,
    options: crate::bbw::AnalyzeOptions,
    parabolic: bool,
    report: Option<&PathBuf>,
    as_json: bool,
) -> Result<Outcome> {
    let weights = l.weights()?;
    let (analysis, rendered) = if parabolic {
        let p = parabolic_cohomology(&l.system, &l.borel, weights, l.scenario.options.levi.as_ref(), options)?;
        let a = p.analysis.clone();
        (a, Report::new("analyze --parabolic", l, p).to_json())
    } else {
        let a = analyze(&l.system, &l.borel, weights, options)?;
        let r = Report::new("analyze", l, &a).to_json();
        (a, r)
    };
    if let Some(path) = report {
        std::fs::write(path, &rendered)
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    let code = match analysis.verdict {
        Verdict::Undetermined { .. } => EXIT_UNDETERMINED,
        _ => EXIT_OK,
    };
    let stdout = if as_json { rendered } else { render_analysis(&analysis) };
    Ok(Outcome { stdout, stderr: String::new(), code })
}

fn render_analysis(a: &crate::bbw::Analysis) -> String {
    let mut out = String::new();
    for r in &a.levels {
        match &r.outcome {
            LevelOutcome::Acyclic => writeln!(out, "level {}: acyclic", r.level).unwrap(),
            LevelOutcome::Regular { degree, w, .. } => {
                writeln!(out, "level {}: degree {degree}, w = {}", r.level, w.one_line()).unwrap()
            }
        }
    }
    match &a.verdict {
        Verdict::Acyclic { .. } => writeln!(out, "verdict: acyclic").unwrap(),
        Verdict::Nonvanishing { degree, limit_element, stabilized_at, .. } => {
            writeln!(out, "verdict: nonvanishing, j = {degree}, stable from level {stabilized_at}").unwrap();
            if limit_element.is_identity() {
                writeln!(out, "limit element: identity").unwrap();
            } else {
                writeln!(out, "limit element: base level {}", limit_element.base_level()).unwrap();
                for b in limit_element.support() {
                    writeln!(out, "  copies {:?}: {}", b.copies, b.base.one_line()).unwrap();
                }
            }
        }
        Verdict::Undetermined { reason, .. } => writeln!(out, "verdict: undetermined ({reason})").unwrap(),
    }
    out
}

#[derive(Serialize)]
struct SearchListing {
    target_level: usize,
    bound: i64,
    pruning_applied: bool,
    certified_empty: bool,
    /// Fundamental coefficients of each level of each nonzero prefix.
    prefixes: Vec<Vec<Vec<i64>>>,
    pruned: usize,
}

fn search(l: &Loaded, level: usize, options: crate::weights::SearchOptions, as_json: bool) -> Result<Outcome> {
    let outcome = crate::weights::dominant_prefix_search(&l.system, &l.borel, level, options)?;
    let prefixes = outcome
        .nonzero()
        .into_iter()
        .map(|p| {
            p.weights()
                .iter()
                .enumerate()
                .map(|(k, w)| to_fundamental(w, l.borel.chamber(k + 1)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let listing = SearchListing {
        target_level: level,
        bound: options.bound,
        pruning_applied: outcome.pruning_applied,
        certified_empty: outcome.certified_empty(),
        prefixes,
        pruned: outcome.pruned.len(),
    };
    if as_json {
        return Ok(Outcome::ok(json(&listing)));
    }
    let mut out = String::new();
    writeln!(out, "nonzero dominant prefixes to level {level}, bound {}: {}", options.bound, listing.prefixes.len())
        .unwrap();
    if listing.pruning_applied {
        writeln!(out, "pruning applied: {} prefixes discarded", listing.pruned).unwrap();
    }
    if listing.certified_empty {
        writeln!(out, "certified: no nonzero dominant weight exists").unwrap();
    }
    if listing.prefixes.is_empty() {
        writeln!(out, "[]").unwrap();
    }
    for p in &listing.prefixes {
        writeln!(out, "{p:?}").unwrap();
    }
    Ok(Outcome::ok(out))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad {what} entry `{t}`"))))
        .collect()
}

fn tree(
    l: &Loaded,
    root: &str,
    from: usize,
    to: Option<usize>,
    path: Option<&str>,
    as_json: bool,
) -> Result<Outcome> {
    let weights = l.weights()?;
    let coords: Vec<Coord> = root
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| Coord::Text(t.to_string()))
        .collect();
    let alpha = crate::scenario::eps_weight(&coords)?;
    let to = to.unwrap_or(weights.num_levels());
    let t = successor_tree(&l.system, weights, &alpha, from, to)?;
    let stab = match path {
        Some(p) => Some(labels_stabilize(&t, &parse_list::<usize>(p, "path")?)?),
        None => None,
    };
    if as_json {
        #[derive(Serialize)]
        struct TreeOut<'a> {
            tree: &'a SuccessorTree,
            stabilization: Option<crate::weights::Stabilization>,
        }
        return Ok(Outcome::ok(json(&TreeOut { tree: &t, stabilization: stab })));
    }
    let mut out = String::new();
    render_tree(&t, 0, 0, 0, &mut out);
    if let Some(s) = stab {
        writeln!(out, "stabilization: {s:?}").unwrap();
    }
    Ok(Outcome::ok(out))
}

fn render_tree(t: &SuccessorTree, depth: usize, idx: usize, copy: usize, out: &mut String) {
    let node = &t.levels[depth][idx];
    let tag = if depth == 0 { String::new() } else { format!("[{copy}] ") };
    writeln!(out, "{}{tag}{}  label {}", "  ".repeat(depth), node.root, node.label).unwrap();
    if let Some(next) = t.levels.get(depth + 1) {
        for (i, n) in next.iter().enumerate() {
            if let Some((p, c)) = n.parent {
                if p == idx {
                    render_tree(t, depth + 1, i, c, out);
                }
            }
        }
    }
}

fn length(l: &Loaded, horizon: Option<usize>, window: Option<usize>) -> Result<Outcome> {
    let e = l.element()?;
    let h = horizon.unwrap_or(l.system.num_levels());
    let w = window.unwrap_or(l.scenario.options.analyze_options().window);
    Ok(Outcome::ok(json(&e.length_report(&l.system, &l.borel, h, w)?)))
}

fn act(l: &Loaded) -> Result<Outcome> {
    #[derive(Serialize)]
    #[serde(tag = "kind", rename_all = "snake_case")]
    enum Acted<'a> {
        InverseSystem { weights: &'a [EpsWeight] },
        Failure(&'a crate::weyl_limit::ActFailure),
    }
    let result = l.element()?.act_dot(&l.system, &l.borel, l.weights()?)?;
    let out = match &result {
        Ok(w) => json(&Acted::InverseSystem { weights: w.weights() }),
        Err(f) => json(&Acted::Failure(f)),
    };
    Ok(Outcome::ok(out))
}

fn oracle_verify(scenario: Option<&PathBuf>, random: bool, seed: u64, count: usize, max_rank: usize) -> Result<Outcome> {
    let lines: Vec<AuditLine> = match (scenario, random) {
        (Some(path), false) => {
            let l = Loaded::from_file(path)?;
            let weights = l.weights()?;
            let mut lines = Vec::new();
            for n in 1..=weights.num_levels() {
                let ch = l.borel.chamber(n)?;
                if ch.level().rank() > MAX_RANK {
                    break;
                }
                lines.push(audit_weights(ch, std::slice::from_ref(weights.at(n)?))?);
            }
            lines
        }
        (None, true) => {
            if !(2..=MAX_RANK).contains(&max_rank) {
                return Err(Error::Validation(format!("--max-rank must lie in 2..={MAX_RANK}")));
            }
            audit_random(seed, count, 2..=max_rank)?
        }
        _ => return Err(Error::Validation("give a scenario or --random, not both".into())),
    };
    let mut out = String::new();
    for line in &lines {
        let status = if line.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "[{status}] {}{}: {}/{} agree ({} singular)",
            line.family, line.rank, line.agreements, line.samples, line.singular
        )
        .unwrap();
        if let Some(w) = &line.counterexample {
            writeln!(out, "  counterexample: {w}").unwrap();
        }
    }
    let all = lines.iter().all(AuditLine::passed);
    writeln!(out, "{}", if all { "oracle audit passed" } else { "oracle audit FAILED" }).unwrap();
    Ok(Outcome { stdout: out, stderr: String::new(), code: if all { EXIT_OK } else { EXIT_INTERNAL } })
}
