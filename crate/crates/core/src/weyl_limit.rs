//! Finitely supported elements of the limit Weyl group `W_B`.
//!
//! An element is a list of branches sharing a base level `n0`, each carrying
//! a Weyl element of level `n0`. Once the recorded copy sequences separate,
//! the branch images act on disjoint blocks and their product is the level
//! realization `w(n)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::borel::BorelSystem;
use crate::diagsys::{Branch, DiagonalSystem};
use crate::error::{invalid, Error, Result};
use crate::rootdata::{EpsWeight, Family, WeylElt};
use crate::weights::{RestrictionFailure, WeightSystem};

pub const DEFAULT_WINDOW: usize = 2;

/// One branch of the support: copy choices `t_{n0}, …` and a base element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BranchElt {
    pub copies: Vec<usize>,
    pub base: WeylElt,
}

impl Serialize for BranchElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BranchElt", 2)?;
        st.serialize_field("copies", &self.copies)?;
        st.serialize_field("base", &self.base.one_line())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitWeylElt {
    base_level: usize,
    end_level: usize,
    support: Vec<BranchElt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LengthVerdict {
    Stable { value: usize, stabilized_at: usize },
    UnboundedWithinHorizon,
    Inconclusive,
}

/// `ℓ_n(w(n))` for `n = first_level..=horizon`, with the verdict drawn from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthReport {
    pub first_level: usize,
    pub horizon: usize,
    pub window: usize,
    pub lengths: Vec<usize>,
    pub verdict: LengthVerdict,
}

impl LengthReport {
    pub fn stable_value(&self) -> Option<usize> {
        match self.verdict {
            LengthVerdict::Stable { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// `w·λ` failed to restrict: the levels and weights of the failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActFailure {
    pub failure: RestrictionFailure,
    pub discrepancy: EpsWeight,
}

impl LimitWeylElt {
    /// Validate and canonicalize: branches with identical recorded paths are
    /// merged by product, identity bases dropped, branches sorted.
    pub fn new(system: &DiagonalSystem, base_level: usize, support: Vec<BranchElt>) -> Result<Self> {
        let level = system.level(base_level)?;
        let len = support.first().map(|b| b.copies.len()).unwrap_or(0);
        for b in &support {
            if b.copies.len() != len {
                return invalid("all branches must record the same number of copy choices");
            }
            system.check_branch(&Branch::new(base_level, b.copies.clone()))?;
            if b.base.level() != level {
                return invalid(format!("branch base {} is not an element of level {base_level}", b.base));
            }
            if level.family() == Family::B && b.base.sign_flips() > 0 {
                return invalid(format!(
                    "type B branch elements must be sign-flip-free, got {}",
                    b.base
                ));
            }
        }
        let mut merged: Vec<BranchElt> = Vec::new();
        for b in support {
            match merged.iter_mut().find(|m| m.copies == b.copies) {
                Some(m) => m.base = m.base.compose(&b.base),
                None => merged.push(b),
            }
        }
        merged.retain(|b| !b.base.is_identity());
        merged.sort();
        // the identity is defined on the whole prefix
        let end_level = if merged.is_empty() { system.num_levels() } else { base_level + len };
        Ok(LimitWeylElt { base_level, end_level, support: merged })
    }

    pub fn identity(system: &DiagonalSystem, base_level: usize) -> Result<Self> {
        Self::new(system, base_level, Vec::new())
    }

    /// A single branch `(c, c, …)` up to `end_level` carrying `base`.
    pub fn single(
        system: &DiagonalSystem,
        base_level: usize,
        copies: Vec<usize>,
        base: WeylElt,
    ) -> Result<Self> {
        Self::new(system, base_level, vec![BranchElt { copies, base }])
    }

    pub fn base_level(&self) -> usize {
        self.base_level
    }

    /// Last level the recorded branches reach.
    pub fn end_level(&self) -> usize {
        self.end_level
    }

    pub fn support(&self) -> &[BranchElt] {
        &self.support
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    /// First level at which the truncated branches are pairwise distinct.
    pub fn separation_level(&self) -> usize {
        for n in self.base_level..=self.end_level {
            let k = n - self.base_level;
            let mut prefixes: Vec<&[usize]> = self.support.iter().map(|b| &b.copies[..k]).collect();
            prefixes.sort();
            if prefixes.windows(2).all(|p| p[0] != p[1]) {
                return n;
            }
        }
        self.end_level
    }

    /// `w(n)`: product of the branch images at level `n`.
    pub fn level_realization(&self, system: &DiagonalSystem, n: usize) -> Result<WeylElt> {
        let n1 = self.separation_level();
        if n < n1 {
            return Err(Error::Precondition(format!(
                "level {n} is below the separation level {n1}"
            )));
        }
        if n > self.end_level {
            return Err(Error::LevelOutOfRange { level: n, max: self.end_level });
        }
        let mut w = WeylElt::identity(system.level(n)?);
        for b in &self.support {
            let k = n - self.base_level;
            w = w.compose(&system.push_along(self.base_level, &b.copies[..k], &b.base)?);
        }
        Ok(w)
    }

    /// Lengths `ℓ_n(w(n))` from the separation level to `horizon`.
    pub fn length_report(
        &self,
        system: &DiagonalSystem,
        borel: &BorelSystem,
        horizon: usize,
        window: usize,
    ) -> Result<LengthReport> {
        if window == 0 {
            return invalid("window must be positive");
        }
        let horizon = horizon.min(self.end_level);
        let first = self.separation_level();
        let lengths = (first..=horizon)
            .into_par_iter()
            .map(|n| Ok(borel.chamber(n)?.length(&self.level_realization(system, n)?)))
            .collect::<Result<Vec<_>>>()?;
        let verdict = classify(&lengths, first, window);
        Ok(LengthReport { first_level: first, horizon, window, lengths, verdict })
    }

    /// `ℓ_B(w)` with the default window.
    pub fn length_b(
        &self,
        system: &DiagonalSystem,
        borel: &BorelSystem,
        horizon: usize,
    ) -> Result<LengthReport> {
        self.length_report(system, borel, horizon, DEFAULT_WINDOW)
    }

    /// The same element with base level `l`, branches cut at `l`. Branches
    /// whose remaining choices agree are merged.
    pub fn rebase(&self, system: &DiagonalSystem, l: usize) -> Result<Self> {
        if l < self.separation_level() || l > self.end_level {
            return Err(Error::Precondition(format!(
                "cannot rebase at level {l}: valid range is {}..={}",
                self.separation_level(),
                self.end_level
            )));
        }
        let k = l - self.base_level;
        let support = self
            .support
            .iter()
            .map(|b| {
                Ok(BranchElt {
                    copies: b.copies[k..].to_vec(),
                    base: system.push_along(self.base_level, &b.copies[..k], &b.base)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(system, l, support)
    }

    /// Equal realizations on every level where both are defined.
    pub fn equivalent(&self, other: &Self, system: &DiagonalSystem) -> Result<bool> {
        let lo = self
            .separation_level()
            .max(other.separation_level())
            .max(self.base_level)
            .max(other.base_level);
        let hi = self.end_level.min(other.end_level);
        if lo > hi {
            return invalid("the two elements share no level of definition");
        }
        for n in lo..=hi {
            if self.level_realization(system, n)? != other.level_realization(system, n)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn inverse(&self) -> Self {
        let support = self
            .support
            .iter()
            .map(|b| BranchElt { copies: b.copies.clone(), base: b.base.inverse() })
            .collect();
        LimitWeylElt { base_level: self.base_level, end_level: self.end_level, support }
    }

    /// `w(n)·0 = −Σ_{α ∈ Φ_{w(n)⁻¹}} α`.
    pub fn dot_zero(&self, system: &DiagonalSystem, borel: &BorelSystem, n: usize) -> Result<EpsWeight> {
        let w = self.level_realization(system, n)?;
        let ch = borel.chamber(n)?;
        let mut sum = EpsWeight::zero(ch.level().dim());
        for a in ch.inversion_set(&w.inverse()) {
            sum = &sum - &a;
        }
        Ok(sum)
    }

    /// `w·λ` level by level from the separation level. The results must
    /// restrict to one another over a trailing run of at least `window`
    /// levels; lower levels come by restriction. On failure the first
    /// inconsistent pair is reported.
    pub fn act_dot(
        &self,
        system: &DiagonalSystem,
        borel: &BorelSystem,
        weights: &WeightSystem,
    ) -> Result<Result<WeightSystem, ActFailure>> {
        self.act_dot_window(system, borel, weights, DEFAULT_WINDOW)
    }

    pub fn act_dot_window(
        &self,
        system: &DiagonalSystem,
        borel: &BorelSystem,
        weights: &WeightSystem,
        window: usize,
    ) -> Result<Result<WeightSystem, ActFailure>> {
        let horizon = weights.num_levels().min(self.end_level);
        let report = self.length_report(system, borel, horizon, window)?;
        if report.stable_value().is_none() {
            return Err(Error::Precondition(format!(
                "length of the element is not stable within horizon {horizon}: {:?}",
                report.lengths
            )));
        }
        let first = report.first_level;
        let acted = (first..=horizon)
            .into_par_iter()
            .map(|n| {
                let w = self.level_realization(system, n)?;
                Ok(borel.chamber(n)?.dot_action(&w, weights.at(n)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut failures = Vec::new();
        for n in first..horizon {
            let restricted = system.restrict_weight(n, &acted[n + 1 - first])?;
            let actual = &acted[n - first];
            if !system.level(n)?.weights_equal(&restricted, actual) {
                let discrepancy = &restricted - actual;
                failures.push(ActFailure {
                    failure: RestrictionFailure { level: n, restricted, actual: actual.clone() },
                    discrepancy,
                });
            }
        }
        let consistent_from = failures.last().map_or(first, |f| f.failure.level + 1);
        if horizon + 1 - consistent_from < window {
            return Ok(Err(failures.swap_remove(0)));
        }
        let k = consistent_from - first;
        let mut full = WeightSystem::from_top(system, consistent_from, acted[k].clone())?.weights().to_vec();
        full.extend(acted.into_iter().skip(k + 1));
        Ok(Ok(WeightSystem::new(system, full)?))
    }
}

fn classify(lengths: &[usize], first: usize, window: usize) -> LengthVerdict {
    let Some(&last) = lengths.last() else {
        return LengthVerdict::Inconclusive;
    };
    let run = lengths.iter().rev().take_while(|&&l| l == last).count();
    if run >= window {
        return LengthVerdict::Stable { value: last, stabilized_at: first + lengths.len() - run };
    }
    if lengths.len() >= 2 && lengths.windows(2).all(|p| p[0] < p[1]) {
        return LengthVerdict::UnboundedWithinHorizon;
    }
    LengthVerdict::Inconclusive
}
