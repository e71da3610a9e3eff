//! Line-bundle cohomology: straightening at each level, then a cross-level
//! pass deciding whether the per-level answers stabilize.

use rayon::prelude::*;
use serde::Serialize;

use crate::borel::{copy_paths, BorelSystem};
use crate::diagsys::{DiagonalSystem, RestrictionMap};
use crate::error::{Error, Result};
use crate::rootdata::{pairing, Chamber, EpsWeight, Family, Level, SignedIndex, Straightened, WeylElt};
use crate::weights::WeightSystem;
use crate::weyl_limit::{BranchElt, LimitWeylElt, DEFAULT_WINDOW};

/// Cap on the number of branches examined when recovering a limit element.
pub const MAX_PATHS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelOutcome {
    Acyclic,
    Regular {
        degree: usize,
        #[serde(serialize_with = "ser_elt")]
        w: WeylElt,
        dominant: EpsWeight,
    },
}

fn ser_elt<S: serde::Serializer>(w: &WeylElt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&w.one_line())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelResult {
    pub level: usize,
    pub outcome: LevelOutcome,
}

impl LevelResult {
    pub fn degree(&self) -> Option<usize> {
        match self.outcome {
            LevelOutcome::Regular { degree, .. } => Some(degree),
            LevelOutcome::Acyclic => None,
        }
    }
}

/// The cross-level checks between levels `level` and `level + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepCheck {
    pub level: usize,
    pub degrees_equal: bool,
    pub restriction_consistent: bool,
    pub coherent: bool,
    /// `ℓ_n` of the piece of `w_n` carried by each copy, when coherent.
    pub factor_degrees: Vec<usize>,
    pub sign_flip_free: bool,
}

impl StepCheck {
    fn passes(&self) -> bool {
        self.degrees_equal && self.restriction_consistent && self.coherent
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AcyclicEvidence {
    /// `λ_n + ρ_n` is singular at every level of the window.
    SingularWindow { levels: Vec<usize> },
    /// Degrees strictly increase and no step of the window is coherent.
    DivergentDegrees { levels: Vec<usize>, degrees: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Acyclic {
        evidence: AcyclicEvidence,
        horizon: usize,
        window: usize,
    },
    Nonvanishing {
        degree: usize,
        limit_element: LimitWeylElt,
        #[serde(serialize_with = "ser_weights")]
        highest_weight: WeightSystem,
        stabilized_at: usize,
        separation_level: usize,
        horizon: usize,
        window: usize,
    },
    Undetermined {
        reason: String,
        horizon: usize,
        window: usize,
    },
}

fn ser_weights<S: serde::Serializer>(w: &WeightSystem, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(w.weights())
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Acyclic { .. } => "acyclic",
            Verdict::Nonvanishing { .. } => "nonvanishing",
            Verdict::Undetermined { .. } => "undetermined",
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Verdict::Nonvanishing { degree, .. } => Some(*degree),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnalyzeOptions {
    /// Last level used; defaults to the length of the weight prefix.
    pub horizon: Option<usize>,
    pub window: usize,
    pub max_paths: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { horizon: None, window: DEFAULT_WINDOW, max_paths: MAX_PATHS }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Analysis {
    pub horizon: usize,
    pub window: usize,
    pub levels: Vec<LevelResult>,
    pub steps: Vec<StepCheck>,
    pub verdict: Verdict,
}

/// Straighten `λ_n`.
pub fn level_cohomology(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    weights: &WeightSystem,
    n: usize,
) -> Result<LevelResult> {
    system.check_level(n)?;
    let outcome = match borel.chamber(n)?.straighten(weights.at(n)?)? {
        Straightened::Singular => LevelOutcome::Acyclic,
        Straightened::Regular { w, degree, dominant } => LevelOutcome::Regular { degree, w, dominant },
    };
    Ok(LevelResult { level: n, outcome })
}

pub fn analyze(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    weights: &WeightSystem,
    options: AnalyzeOptions,
) -> Result<Analysis> {
    let horizon = options.horizon.unwrap_or(weights.num_levels());
    if horizon == 0 || horizon > weights.num_levels() || horizon > system.num_levels() {
        return Err(Error::LevelOutOfRange {
            level: horizon,
            max: weights.num_levels().min(system.num_levels()),
        });
    }
    if options.window == 0 {
        return Err(Error::Validation("window must be positive".into()));
    }
    let window = options.window;
    let levels = (1..=horizon)
        .into_par_iter()
        .map(|n| level_cohomology(system, borel, weights, n))
        .collect::<Result<Vec<_>>>()?;
    let steps = (1..horizon)
        .into_par_iter()
        .filter_map(|n| match (&levels[n - 1].outcome, &levels[n].outcome) {
            (
                LevelOutcome::Regular { degree: d0, w: w0, dominant: m0 },
                LevelOutcome::Regular { degree: d1, w: w1, dominant: m1 },
            ) => Some(step_check(system, borel, n, (*d0, w0, m0), (*d1, w1, m1))),
            _ => None,
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = decide(system, &levels, &steps, horizon, window, options.max_paths)?;
    Ok(Analysis { horizon, window, levels, steps, verdict })
}

fn step_check(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    n: usize,
    (d0, w0, m0): (usize, &WeylElt, &EpsWeight),
    (d1, w1, m1): (usize, &WeylElt, &EpsWeight),
) -> Result<StepCheck> {
    let level = system.level(n)?;
    let restricted = system.restrict_weight(n, m1)?;
    let factors = coherence(system.step(n)?, borel.chamber(n)?, borel.chamber(n + 1)?, w0, w1);
    Ok(StepCheck {
        level: n,
        degrees_equal: d0 == d1,
        restriction_consistent: level.weights_equal(&restricted, m0),
        coherent: factors.is_some(),
        factor_degrees: factors.unwrap_or_default(),
        sign_flip_free: w1.sign_flips() == 0,
    })
}

/// Piece of `w` (level N) on the block `map` (image of each level-L index),
/// read back as a level-L element. `None` if `w` does not preserve the block.
fn extract_block(map: &[SignedIndex], w: &WeylElt, level: Level) -> Option<WeylElt> {
    let mut rev = vec![None; w.images().len()];
    for (j, s) in map.iter().enumerate() {
        rev[s.index] = Some(j);
    }
    let mut images = Vec::with_capacity(map.len());
    for s in map {
        let im = w.image(s.index);
        let p = rev[im.index]?;
        images.push(SignedIndex { index: p, negative: s.negative ^ im.negative ^ map[p].negative });
    }
    WeylElt::new(level, images).ok()
}

/// `x` placed on the block `map` of a level-N element, identity elsewhere.
fn embed_block(map: &[SignedIndex], x: &WeylElt, upper: Level) -> Option<WeylElt> {
    let mut images: Vec<SignedIndex> = (0..upper.dim()).map(SignedIndex::pos).collect();
    for (j, s) in map.iter().enumerate() {
        let xj = x.image(j);
        let t = map[xj.index];
        images[s.index] = SignedIndex { index: t.index, negative: s.negative ^ xj.negative ^ t.negative };
    }
    WeylElt::new(upper, images).ok()
}

/// Check that `w1 = Π_c τ_c(x_c)` with disjointly supported `x_c` whose
/// product is `w0` and with `τ_c` preserving each factor's length.
/// Returns the factor lengths.
fn coherence(
    step: &RestrictionMap,
    lower: &Chamber,
    upper: &Chamber,
    w0: &WeylElt,
    w1: &WeylElt,
) -> Option<Vec<usize>> {
    if step.zero_targets().iter().any(|&i| w1.image(i) != SignedIndex::pos(i)) {
        return None;
    }
    let mut product = WeylElt::identity(lower.level());
    let mut covered = vec![false; lower.level().dim()];
    let mut degrees = Vec::with_capacity(step.num_copies());
    let mut total_upper = 0;
    for copy in step.copies() {
        let x = extract_block(copy, w1, lower.level())?;
        for i in x.support() {
            if covered[i] {
                return None;
            }
            covered[i] = true;
        }
        let lifted = embed_block(copy, &x, upper.level())?;
        let (lo, up) = (lower.length(&x), upper.length(&lifted));
        if lo != up {
            return None;
        }
        total_upper += up;
        degrees.push(lo);
        product = product.compose(&x);
    }
    if product != *w0 || total_upper != upper.length(w1) || degrees.iter().sum::<usize>() != lower.length(w0) {
        return None;
    }
    Some(degrees)
}

fn decide(
    system: &DiagonalSystem,
    levels: &[LevelResult],
    steps: &[StepCheck],
    horizon: usize,
    window: usize,
    max_paths: usize,
) -> Result<Verdict> {
    let undetermined = |reason: String| Verdict::Undetermined { reason, horizon, window };
    if horizon < window {
        return Ok(undetermined(format!("horizon {horizon} is shorter than the window {window}")));
    }
    let step_at = |n: usize| steps.iter().find(|s| s.level == n);
    let family_b = system.family() == Family::B;

    // maximal trailing run of regular levels with passing steps
    let mut start = horizon;
    if levels[horizon - 1].degree().is_some() {
        while start > 1 {
            let Some(s) = step_at(start - 1) else { break };
            if !s.passes() {
                break;
            }
            start -= 1;
        }
        if family_b {
            // the first level of the run is exempt from the sign check
            while start < horizon && !(start + 1..=horizon).all(|n| regular_flip_free(&levels[n - 1])) {
                start += 1;
            }
        }
        let run = horizon - start + 1;
        if run >= window {
            return nonvanishing(system, levels, start, horizon, window, max_paths);
        }
    }

    let tail = &levels[horizon - window..];
    if tail.iter().all(|l| l.degree().is_none()) {
        return Ok(Verdict::Acyclic {
            evidence: AcyclicEvidence::SingularWindow { levels: tail.iter().map(|l| l.level).collect() },
            horizon,
            window,
        });
    }
    let degrees: Option<Vec<usize>> = tail.iter().map(|l| l.degree()).collect();
    if let Some(degrees) = degrees {
        let increasing = degrees.windows(2).all(|p| p[0] < p[1]);
        let first = horizon - window + 1;
        let incoherent = (first..horizon).all(|n| step_at(n).is_some_and(|s| !s.coherent));
        if window >= 2 && increasing && incoherent {
            return Ok(Verdict::Acyclic {
                evidence: AcyclicEvidence::DivergentDegrees {
                    levels: tail.iter().map(|l| l.level).collect(),
                    degrees,
                },
                horizon,
                window,
            });
        }
    }
    Ok(undetermined(describe_failure(levels, steps, horizon, window)))
}

fn regular_flip_free(l: &LevelResult) -> bool {
    matches!(&l.outcome, LevelOutcome::Regular { w, .. } if w.sign_flips() == 0)
}

fn describe_failure(levels: &[LevelResult], steps: &[StepCheck], horizon: usize, window: usize) -> String {
    if levels[horizon - 1].degree().is_none() {
        return format!("level {horizon} is singular but the window of {window} levels is not");
    }
    let Some(s) = steps.iter().rev().find(|s| !s.passes()) else {
        let bad = levels.iter().rev().find(|l| l.degree().is_none()).map(|l| l.level).unwrap_or(0);
        return format!("level {bad} is singular, leaving fewer than {window} stable levels");
    };
    let mut what = Vec::new();
    if !s.degrees_equal {
        what.push("degrees differ");
    }
    if !s.restriction_consistent {
        what.push("dominant weights do not restrict");
    }
    if !s.coherent {
        what.push("Weyl elements are not coherent");
    }
    format!(
        "between levels {} and {}: {}; stable run shorter than the window of {window}",
        s.level,
        s.level + 1,
        what.join(", ")
    )
}

fn nonvanishing(
    system: &DiagonalSystem,
    levels: &[LevelResult],
    start: usize,
    horizon: usize,
    window: usize,
    max_paths: usize,
) -> Result<Verdict> {
    let regular = |n: usize| match &levels[n - 1].outcome {
        LevelOutcome::Regular { degree, w, dominant } => (*degree, w, dominant),
        LevelOutcome::Acyclic => unreachable!("run levels are regular"),
    };
    let (degree, _, mu_start) = regular(start);
    let (_, w_top, _) = regular(horizon);

    let count = system.multiplicity(start, horizon)?;
    if count > max_paths as u128 {
        return Ok(Verdict::Undetermined {
            reason: format!("{count} branches between levels {start} and {horizon} exceed the cap {max_paths}"),
            horizon,
            window,
        });
    }
    let base_level = system.level(start)?;
    let mut support = Vec::new();
    for path in copy_paths(system, start, horizon)? {
        let map: Vec<SignedIndex> = (0..base_level.dim())
            .map(|j| composite_index(system, start, &path, SignedIndex::pos(j)))
            .collect::<Result<_>>()?;
        let y = extract_block(&map, w_top, base_level).ok_or_else(|| {
            Error::Internal(format!("level {horizon} element does not split along branch {path:?}"))
        })?;
        if !y.is_identity() {
            support.push(BranchElt { copies: path, base: y });
        }
    }
    let element = LimitWeylElt::new(system, start, support)?;
    let separation = element.separation_level();
    for n in separation..=horizon {
        if element.level_realization(system, n)? != *regular(n).1 {
            return Err(Error::Internal(format!(
                "recovered element disagrees with the straightening at level {n}"
            )));
        }
    }

    let mut mu = WeightSystem::from_top(system, start, mu_start.clone())?.weights().to_vec();
    mu.extend((start + 1..=horizon).map(|n| regular(n).2.clone()));
    let highest_weight = WeightSystem::new(system, mu)?;
    Ok(Verdict::Nonvanishing {
        degree,
        limit_element: element,
        highest_weight,
        stabilized_at: start,
        separation_level: separation,
        horizon,
        window,
    })
}

fn composite_index(system: &DiagonalSystem, from: usize, path: &[usize], e: SignedIndex) -> Result<SignedIndex> {
    let mut cur = e;
    for (k, &c) in path.iter().enumerate() {
        cur = system.step(from + k)?.copy_index(c - 1, cur);
    }
    Ok(cur)
}

/// Simple roots (1-based Dynkin positions) of a Levi factor, one set per level.
pub type LeviMasks = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParabolicAnalysis {
    /// The verdict concerns `H^j(G/P, O(M_λ^*))` for the parabolic `P ⊇ B`.
    pub parabolic: bool,
    pub levi: Option<LeviMasks>,
    pub analysis: Analysis,
}

/// Cohomology on `G/P` of the bundle induced from the irreducible
/// `P`-module with highest weight `λ`; it agrees with `G/B`.
pub fn parabolic_cohomology(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    weights: &WeightSystem,
    levi: Option<&LeviMasks>,
    options: AnalyzeOptions,
) -> Result<ParabolicAnalysis> {
    if let Some(masks) = levi {
        if masks.len() > weights.num_levels() {
            return Err(Error::Validation("more Levi masks than weight levels".into()));
        }
        for (k, mask) in masks.iter().enumerate() {
            let n = k + 1;
            let ch = borel.chamber(n)?;
            let simple = ch.simple_roots();
            for &i in mask {
                let Some(alpha) = (i >= 1).then(|| simple.get(i - 1)).flatten() else {
                    return Err(Error::Validation(format!("Levi root {i} out of range at level {n}")));
                };
                if pairing(weights.at(n)?, alpha)? < 0.into() {
                    return Err(Error::Precondition(format!(
                        "λ_{n} is not dominant for the Levi factor (simple root {i})"
                    )));
                }
            }
        }
    }
    let analysis = analyze(system, borel, weights, options)?;
    Ok(ParabolicAnalysis { parabolic: true, levi: levi.cloned(), analysis })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectivityWitness {
    /// `s_1^n` for `n = 1..=horizon`.
    pub successor_counts: Vec<u128>,
    /// First step with more than one copy.
    pub first_branching_step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectivityReport {
    pub horizon: usize,
    pub root_reductive: bool,
    pub strictly_dominant_witness_possible: bool,
    pub witness: Option<ProjectivityWitness>,
}

/// Whether strictly dominant weights can exist. A root of level `m` has
/// `s_m^n` successors whose labels sum to its own label, so once
/// `s_m^n` exceeds that label some successor pairs below 1.
pub fn projectivity_obstruction(system: &DiagonalSystem, horizon: usize) -> Result<ProjectivityReport> {
    system.check_level(horizon)?;
    let mut first_branching = None;
    for n in 1..horizon {
        if system.step(n)?.num_copies() != 1 {
            first_branching = Some(n);
            break;
        }
    }
    let root_reductive = first_branching.is_none();
    let witness = if root_reductive {
        None
    } else {
        let counts = (1..=horizon).map(|n| system.multiplicity(1, n)).collect::<Result<Vec<_>>>()?;
        Some(ProjectivityWitness {
            successor_counts: counts,
            first_branching_step: first_branching.expect("not root reductive"),
        })
    };
    Ok(ProjectivityReport {
        horizon,
        root_reductive,
        strictly_dominant_witness_possible: root_reductive,
        witness,
    })
}

/// First level `n > m` with `s_m^n > label`, where a root of level `m`
/// carrying `label` must have a successor pairing below 1.
pub fn strict_dominance_failure_level(system: &DiagonalSystem, m: usize, label: u128) -> Result<Option<usize>> {
    for n in m + 1..=system.num_levels() {
        if system.multiplicity(m, n)? > label {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::NamedBorel;
    use crate::weights::from_fundamental;

    fn sl2() -> (DiagonalSystem, BorelSystem) {
        let sys = DiagonalSystem::sl_two_power(1).unwrap();
        let b = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
        (sys, b)
    }

    #[test]
    fn level_examples() {
        let (sys, b) = sl2();
        let zero = WeightSystem::zero(&sys, 1).unwrap();
        let r = level_cohomology(&sys, &b, &zero, 1).unwrap();
        assert_eq!(r.degree(), Some(0));
        let minus_two = WeightSystem::new(&sys, vec![EpsWeight::from_ints(&[-1, 1])]).unwrap();
        let r = level_cohomology(&sys, &b, &minus_two, 1).unwrap();
        assert_eq!(r.degree(), Some(1));
        let minus_one = WeightSystem::new(&sys, vec![EpsWeight::from_twice(vec![-1, 1])]).unwrap();
        assert_eq!(level_cohomology(&sys, &b, &minus_one, 1).unwrap().outcome, LevelOutcome::Acyclic);
    }

    #[test]
    fn first_plus_last_is_degree_zero() {
        let n = 5;
        let sys = DiagonalSystem::sl_two_power(n).unwrap();
        let b = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
        let ch = b.chamber(n).unwrap();
        let r = ch.level().rank();
        let mut c = vec![0; r];
        c[0] = 1;
        c[r - 1] = 1;
        let ws = WeightSystem::from_top(&sys, n, from_fundamental(&c, ch).unwrap()).unwrap();
        let a = analyze(&sys, &b, &ws, AnalyzeOptions::default()).unwrap();
        match a.verdict {
            Verdict::Nonvanishing { degree, limit_element, highest_weight, .. } => {
                assert_eq!(degree, 0);
                assert!(limit_element.is_identity());
                assert!(highest_weight.equivalent(&ws, &sys));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn recovers_a_single_branch_swap() {
        let n = 5;
        let sys = DiagonalSystem::sl_two_power(n).unwrap();
        let b = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
        let ch = b.chamber(n).unwrap();
        let r = ch.level().rank();
        let mut c = vec![0; r];
        c[0] = 1;
        c[r - 1] = 1;
        let mu = WeightSystem::from_top(&sys, n, from_fundamental(&c, ch).unwrap()).unwrap();
        // labels along copy 1 are only constant from level 2 on
        let s = WeylElt::transposition(sys.level(1).unwrap(), 0, 1).unwrap();
        let w = LimitWeylElt::single(&sys, 1, vec![1; n - 1], s).unwrap();
        let lambda = w.inverse().act_dot(&sys, &b, &mu).unwrap().unwrap();
        let a = analyze(&sys, &b, &lambda, AnalyzeOptions::default()).unwrap();
        match a.verdict {
            Verdict::Nonvanishing { degree, limit_element, highest_weight, .. } => {
                assert_eq!(degree, 1);
                assert!(limit_element.equivalent(&w, &sys).unwrap());
                assert!(highest_weight.equivalent(&mu, &sys));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn singular_window_is_acyclic() {
        let sys = DiagonalSystem::sl_infinity(1, 3).unwrap();
        let b = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
        // λ = −ε^2 at every level: λ + ρ repeats a coordinate
        let top = EpsWeight::from_ints(&[0, -1, 0, 0]);
        let ws = WeightSystem::from_top(&sys, 3, top).unwrap();
        let a = analyze(&sys, &b, &ws, AnalyzeOptions::default()).unwrap();
        assert!(matches!(a.verdict, Verdict::Acyclic { .. }), "{:?}", a.verdict);
    }

    #[test]
    fn projectivity() {
        let sl = DiagonalSystem::sl_infinity(1, 4).unwrap();
        let r = projectivity_obstruction(&sl, 4).unwrap();
        assert!(r.root_reductive && r.witness.is_none());
        let two = DiagonalSystem::sl_two_power(4).unwrap();
        let r = projectivity_obstruction(&two, 4).unwrap();
        assert!(!r.root_reductive);
        let w = r.witness.unwrap();
        assert_eq!(w.first_branching_step, 1);
        assert_eq!(w.successor_counts, vec![1, 2, 4, 8]);
        assert_eq!(strict_dominance_failure_level(&two, 1, 3).unwrap(), Some(3));
    }
}
