use rayon::prelude::*;
use serde::Serialize;

use crate::borel::BorelSystem;
use crate::diagsys::DiagonalSystem;
use crate::error::{Error, Result};
use crate::rootdata::{EpsWeight, Family};

use super::{from_fundamental, fundamental_weight, to_fundamental, WeightSystem};

/// Default cap on the number of weights one enumeration may produce.
pub const DEFAULT_LIMIT: usize = 1 << 20;

/// The restriction equations of one step in fundamental coordinates:
/// `a_n = R b` for `λ_{n+1} = Σ b_k ω_{n+1}^k`.
struct StepSolver {
    rows: usize,
    cols: Vec<Vec<i64>>,
    // last column with a positive entry in each row
    last_col: Vec<Option<usize>>,
}

impl StepSolver {
    fn new(system: &DiagonalSystem, borel: &BorelSystem, n: usize) -> Result<Self> {
        let lower = borel.chamber(n)?;
        let upper = borel.chamber(n + 1)?;
        let step = system.step(n)?;
        let rows = lower.level().rank();
        let mut cols = Vec::with_capacity(upper.level().rank());
        for k in 1..=upper.level().rank() {
            let col = to_fundamental(&step.restrict(&fundamental_weight(k, upper)?)?, lower)?;
            if col.iter().any(|&x| x < 0) {
                return Err(Error::Precondition(format!(
                    "orders at levels {n} and {} are not compatible",
                    n + 1
                )));
            }
            cols.push(col);
        }
        let last_col = (0..rows)
            .map(|i| (0..cols.len()).rev().find(|&k| cols[k][i] > 0))
            .collect();
        Ok(StepSolver { rows, cols, last_col })
    }

    /// All non-negative `b` with `R b = a`, free coordinates in `[0, bound]`,
    /// in lexicographic order.
    fn solve(&self, a: &[i64], bound: i64, limit: usize) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        let mut b = vec![0i64; self.cols.len()];
        let mut res = a.to_vec();
        self.descend(0, &mut b, &mut res, bound, limit, &mut out)?;
        Ok(out)
    }

    fn descend(
        &self,
        k: usize,
        b: &mut Vec<i64>,
        res: &mut Vec<i64>,
        bound: i64,
        limit: usize,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<()> {
        if k == self.cols.len() {
            if res.iter().all(|&x| x == 0) {
                if out.len() >= limit {
                    return Err(Error::SearchLimit(format!(
                        "more than {limit} dominant extensions"
                    )));
                }
                out.push(b.clone());
            }
            return Ok(());
        }
        let col = &self.cols[k];
        let max = if col.iter().all(|&x| x == 0) {
            bound
        } else {
            (0..self.rows).filter(|&i| col[i] > 0).map(|i| res[i] / col[i]).min().unwrap_or(0)
        };
        for v in 0..=max {
            for i in 0..self.rows {
                res[i] -= v * col[i];
            }
            let feasible = (0..self.rows).all(|i| {
                res[i] == 0 || self.last_col[i].is_some_and(|last| last > k)
            });
            if feasible {
                b[k] = v;
                self.descend(k + 1, b, res, bound, limit, out)?;
            }
            for i in 0..self.rows {
                res[i] += v * col[i];
            }
        }
        b[k] = 0;
        Ok(())
    }
}

/// All dominant `λ_{n+1}` restricting to the dominant `λ_n`; coefficients
/// not pinned by the restriction equations range over `[0, bound]`.
pub fn enumerate_dominant_extensions(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    n: usize,
    lambda: &EpsWeight,
    bound: i64,
) -> Result<Vec<EpsWeight>> {
    enumerate_dominant_extensions_limited(system, borel, n, lambda, bound, DEFAULT_LIMIT)
}

pub fn enumerate_dominant_extensions_limited(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    n: usize,
    lambda: &EpsWeight,
    bound: i64,
    limit: usize,
) -> Result<Vec<EpsWeight>> {
    let solver = StepSolver::new(system, borel, n)?;
    extend_with(&solver, system, borel, n, lambda, bound, limit)
}

fn extend_with(
    solver: &StepSolver,
    system: &DiagonalSystem,
    borel: &BorelSystem,
    n: usize,
    lambda: &EpsWeight,
    bound: i64,
    limit: usize,
) -> Result<Vec<EpsWeight>> {
    let lower = borel.chamber(n)?;
    let upper = borel.chamber(n + 1)?;
    if bound < 0 {
        return Err(Error::Validation("coefficient bound must be non-negative".into()));
    }
    if !lower.is_dominant(lambda) {
        return Err(Error::Precondition(format!("{lambda} is not dominant at level {n}")));
    }
    let a = to_fundamental(lambda, lower)?;
    let level = lower.level();
    solver
        .solve(&a, bound, limit)?
        .into_iter()
        .map(|b| {
            let w = from_fundamental(&b, upper)?;
            let back = system.restrict_weight(n, &w)?;
            if !upper.is_dominant(&w) || !level.weights_equal(&back, lambda) {
                return Err(Error::Internal(format!(
                    "extension {w} of {lambda} fails validation at level {}",
                    n + 1
                )));
            }
            Ok(w)
        })
        .collect()
}

/// Options for [`dominant_prefix_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    /// Bound on level-1 coefficients and on free coefficients later on.
    pub bound: i64,
    /// Apply the monotone-mass rule where the system has the matching shape.
    pub prune: bool,
    pub max_results: usize,
}

impl SearchOptions {
    pub fn new(bound: i64) -> Self {
        SearchOptions { bound, prune: false, max_results: DEFAULT_LIMIT }
    }

    pub fn pruned(bound: i64) -> Self {
        SearchOptions { prune: true, ..Self::new(bound) }
    }
}

/// A prefix discarded by the monotone-mass rule. The rule shows that no
/// nonzero dominant inverse system exists, so any nonzero prefix is dead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneCertificate {
    pub level: usize,
    pub first_nonzero_level: usize,
    pub top_coefficients: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub target_level: usize,
    pub bound: i64,
    /// Whether the pruning rule was requested and applicable.
    pub pruning_applied: bool,
    #[serde(skip)]
    pub prefixes: Vec<WeightSystem>,
    pub pruned: Vec<PruneCertificate>,
}

impl SearchOutcome {
    /// Surviving prefixes other than the zero one.
    pub fn nonzero(&self) -> Vec<&WeightSystem> {
        self.prefixes.iter().filter(|p| p.weights().iter().any(|w| !w.is_zero())).collect()
    }

    /// Pruning proved that no nonzero dominant weight exists.
    pub fn certified_empty(&self) -> bool {
        self.pruning_applied && self.nonzero().is_empty()
    }
}

/// Breadth-first enumeration of dominant prefixes up to `target_level`.
pub fn dominant_prefix_search(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    target_level: usize,
    options: SearchOptions,
) -> Result<SearchOutcome> {
    system.check_level(target_level)?;
    if options.bound < 0 {
        return Err(Error::Validation("coefficient bound must be non-negative".into()));
    }
    let prune = options.prune && monotone_mass_applies(system, borel, target_level)?;
    let first = borel.chamber(1)?;
    let r1 = first.level().rank();
    let mut frontier: Vec<Vec<EpsWeight>> = Vec::new();
    let mut pruned = Vec::new();
    let mut coeffs = vec![0i64; r1];
    loop {
        let w = from_fundamental(&coeffs, first)?;
        admit(vec![w], prune, borel, &mut frontier, &mut pruned, options.max_results)?;
        // odometer over [0, bound]^r1
        let mut i = r1;
        while i > 0 && coeffs[i - 1] == options.bound {
            coeffs[i - 1] = 0;
            i -= 1;
        }
        if i == 0 {
            break;
        }
        coeffs[i - 1] += 1;
    }
    for n in 1..target_level {
        let solver = StepSolver::new(system, borel, n)?;
        let children: Vec<Vec<EpsWeight>> = frontier
            .par_iter()
            .map(|p| {
                extend_with(&solver, system, borel, n, &p[n - 1], options.bound, options.max_results)
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (parent, kids) in frontier.iter().zip(children) {
            for k in kids {
                let mut p = parent.clone();
                p.push(k);
                admit(p, prune, borel, &mut next, &mut pruned, options.max_results)?;
            }
        }
        frontier = next;
    }
    Ok(SearchOutcome {
        target_level,
        bound: options.bound,
        pruning_applied: prune,
        prefixes: frontier.into_iter().map(|weights| WeightSystem { weights }).collect(),
        pruned,
    })
}

fn admit(
    prefix: Vec<EpsWeight>,
    prune: bool,
    borel: &BorelSystem,
    out: &mut Vec<Vec<EpsWeight>>,
    pruned: &mut Vec<PruneCertificate>,
    max: usize,
) -> Result<()> {
    if prune {
        if let Some(m) = prefix.iter().position(|w| !w.is_zero()) {
            let level = prefix.len();
            let top = to_fundamental(&prefix[level - 1], borel.chamber(level)?)?;
            pruned.push(PruneCertificate { level, first_nonzero_level: m + 1, top_coefficients: top });
            return Ok(());
        }
    }
    if out.len() >= max {
        return Err(Error::SearchLimit(format!("more than {max} dominant prefixes")));
    }
    out.push(prefix);
    Ok(())
}

/// The monotone-mass rule needs, at every step, a symplectic order whose
/// first position restricts to zero and whose positions `2p`, `2p+1`
/// restrict to position `p` of the previous level.
pub fn monotone_mass_applies(system: &DiagonalSystem, borel: &BorelSystem, upto: usize) -> Result<bool> {
    if system.family() != Family::C {
        return Ok(false);
    }
    for n in 1..upto {
        let step = system.step(n)?;
        let lower = borel.order(n)?.entries();
        let upper = borel.order(n + 1)?.entries();
        if upper.len() != 2 * lower.len() + 1 || step.targets()[upper[0].index].is_some() {
            return Ok(false);
        }
        for (p, e) in lower.iter().enumerate() {
            for q in [2 * p + 1, 2 * p + 2] {
                let u = upper[q];
                match step.targets()[u.index] {
                    Some(t) if t.times(u.negative) == *e => {}
                    _ => return Ok(false),
                }
            }
        }
    }
    Ok(true)
}

/// The masses `b_k = Σ_{i ≥ 2^k} a^i_{m+1+k}` of a prefix whose first nonzero
/// level is `m`, for every `k` the prefix reaches. `None` for the zero
/// prefix or when the rule does not apply.
pub fn monotone_mass(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    prefix: &WeightSystem,
) -> Result<Option<(usize, Vec<i64>)>> {
    let top = prefix.num_levels();
    if !monotone_mass_applies(system, borel, top)? {
        return Ok(None);
    }
    let Some(m) = prefix.weights().iter().position(|w| !w.is_zero()).map(|i| i + 1) else {
        return Ok(None);
    };
    let mut b = Vec::new();
    let mut k = 0;
    while m + 1 + k <= top {
        let n = m + 1 + k;
        let a = to_fundamental(prefix.at(n)?, borel.chamber(n)?)?;
        let start = (1usize << k).min(a.len() + 1);
        b.push(a[start - 1..].iter().sum());
        k += 1;
    }
    Ok(Some((m, b)))
}
