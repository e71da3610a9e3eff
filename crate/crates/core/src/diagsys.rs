//! Finite prefixes of diagonal direct systems of classical groups.
//!
//! A step `G_n → G_{n+1}` is recorded through its effect on ε-coordinates:
//! every index of level `n+1` restricts to `±ε_j` of level `n` or to zero,
//! and the nonzero targets are grouped into copies of the natural
//! representation of `g_n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rootdata::{EpsWeight, Family, Level, SignedIndex, WeylElt};

/// Restriction data of one embedding step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionMap {
    source: Level,
    target: Level,
    targets: Vec<Option<SignedIndex>>,
    // copies[c][j] = signed level-(n+1) index whose restriction is ±ε_j
    copies: Vec<Vec<SignedIndex>>,
}

/// Shape counts of a step: copies, type A dual copies, and trivial constituents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepShape {
    pub copies: usize,
    pub dual_copies: usize,
    pub trivial: usize,
}

impl RestrictionMap {
    /// Build from per-index targets with an explicit copy partition.
    pub fn new(
        source: Level,
        targets: Vec<Option<SignedIndex>>,
        copies: Vec<Vec<SignedIndex>>,
    ) -> Result<Self> {
        let target = level_for_dim(source.family(), targets.len())?;
        let m = source.dim();
        for t in targets.iter().flatten() {
            if t.index >= m {
                return invalid(format!("restriction target {t} out of range for {source}"));
            }
        }
        let mut used = vec![false; targets.len()];
        for (c, copy) in copies.iter().enumerate() {
            if copy.len() != m {
                return invalid(format!("copy {} must list {m} indices", c + 1));
            }
            for (j, img) in copy.iter().enumerate() {
                if img.index >= targets.len() || used[img.index] {
                    return invalid(format!("copy {} reuses or overruns index {img}", c + 1));
                }
                used[img.index] = true;
                let want = SignedIndex { index: j, negative: img.negative };
                if targets[img.index] != Some(want) {
                    return invalid(format!(
                        "copy {} sends ε{} to {img}, but that index restricts elsewhere",
                        c + 1,
                        j + 1
                    ));
                }
            }
            if source.family() == Family::A && copy.iter().any(|s| s.negative != copy[0].negative) {
                return invalid(format!("type A copy {} mixes natural and dual signs", c + 1));
            }
        }
        for (i, t) in targets.iter().enumerate() {
            if t.is_some() && !used[i] {
                return invalid(format!("index {} of level n+1 belongs to no copy", i + 1));
            }
        }
        let map = RestrictionMap { source, target, targets, copies };
        map.check_counts()?;
        Ok(map)
    }

    /// Build from targets alone. The c-th occurrence of `j` joins copy c;
    /// in type A natural occurrences are numbered before dual ones.
    pub fn from_targets(source: Level, targets: Vec<Option<SignedIndex>>) -> Result<Self> {
        let m = source.dim();
        let mut hits: Vec<Vec<(usize, bool)>> = vec![Vec::new(); m];
        for (i, t) in targets.iter().enumerate() {
            if let Some(t) = t {
                if t.index >= m {
                    return invalid(format!("restriction target {t} out of range for {source}"));
                }
                hits[t.index].push((i, t.negative));
            }
        }
        if source.family() == Family::A {
            for h in &mut hits {
                h.sort_by_key(|&(i, neg)| (neg, i));
            }
        }
        let s = hits[0].len();
        if hits.iter().any(|h| h.len() != s) {
            return invalid("every index of level n must be hit the same number of times");
        }
        let copies = (0..s)
            .map(|c| {
                hits.iter()
                    .map(|h| SignedIndex { index: h[c].0, negative: h[c].1 })
                    .collect()
            })
            .collect();
        Self::new(source, targets, copies)
    }

    fn check_counts(&self) -> Result<()> {
        let zeros = self.targets.iter().filter(|t| t.is_none()).count();
        let s = self.copies.len();
        if s == 0 {
            return invalid("a diagonal step needs at least one copy");
        }
        if self.source.family() == Family::B && 2 * zeros + 1 < s {
            return invalid(format!(
                "type B step with {s} copies needs at least {} zero targets",
                (s - 1).div_ceil(2)
            ));
        }
        Ok(())
    }

    pub fn source(&self) -> Level {
        self.source
    }

    pub fn target(&self) -> Level {
        self.target
    }

    /// Image at level n of each index of level n+1 (`None` for zero).
    pub fn targets(&self) -> &[Option<SignedIndex>] {
        &self.targets
    }

    pub fn copies(&self) -> &[Vec<SignedIndex>] {
        &self.copies
    }

    pub fn num_copies(&self) -> usize {
        self.copies.len()
    }

    /// Level-(n+1) indices restricting to zero.
    pub fn zero_targets(&self) -> Vec<usize> {
        (0..self.targets.len()).filter(|&i| self.targets[i].is_none()).collect()
    }

    pub fn shape(&self) -> StepShape {
        let zeros = self.zero_targets().len();
        let dual_copies = self.copies.iter().filter(|c| self.is_dual_copy(c)).count();
        let trivial = match self.source.family() {
            Family::A => zeros,
            Family::C | Family::D => 2 * zeros,
            Family::B => 2 * zeros + 1 - self.copies.len(),
        };
        StepShape { copies: self.copies.len(), dual_copies, trivial }
    }

    fn is_dual_copy(&self, copy: &[SignedIndex]) -> bool {
        self.source.family() == Family::A && copy[0].negative
    }

    pub fn restrict(&self, lambda: &EpsWeight) -> Result<EpsWeight> {
        self.target.check_weight(lambda)?;
        let mut out = vec![0i64; self.source.dim()];
        for (i, t) in self.targets.iter().enumerate() {
            if let Some(t) = t {
                out[t.index] += t.sign() * lambda.twice()[i];
            }
        }
        Ok(EpsWeight::from_twice(out))
    }

    /// `γ_c(Σ a_j ε_j) = Σ a_j σ_j ε^{i_j}` for copy `c` (0-based).
    pub fn copy_image(&self, c: usize, lambda: &EpsWeight) -> EpsWeight {
        let mut out = vec![0i64; self.target.dim()];
        for (j, img) in self.copies[c].iter().enumerate() {
            out[img.index] = img.sign() * lambda.twice()[j];
        }
        EpsWeight::from_twice(out)
    }

    /// Image of a level-n signed index under copy `c` (0-based).
    pub fn copy_index(&self, c: usize, e: SignedIndex) -> SignedIndex {
        self.copies[c][e.index].times(e.negative)
    }

    /// `τ_c(w)`: `w` acting on the block of copy `c` (0-based), identity elsewhere.
    pub fn inject(&self, c: usize, w: &WeylElt) -> Result<WeylElt> {
        if w.level() != self.source {
            return invalid(format!("Weyl element of {} injected from {}", w.level(), self.source));
        }
        if c >= self.copies.len() {
            return invalid(format!("copy {} out of range 1..={}", c + 1, self.copies.len()));
        }
        if self.source.family() == Family::B && w.sign_flips() > 0 {
            return Err(Error::Precondition(format!(
                "type B branch injection needs a sign-flip-free element, got {w}"
            )));
        }
        let copy = &self.copies[c];
        let mut images: Vec<SignedIndex> = (0..self.target.dim()).map(SignedIndex::pos).collect();
        for (j, ij) in copy.iter().enumerate() {
            let wj = w.image(j);
            let ip = copy[wj.index];
            images[ij.index] = SignedIndex {
                index: ip.index,
                negative: ij.negative ^ wj.negative ^ ip.negative,
            };
        }
        WeylElt::new(self.target, images)
    }
}

fn level_for_dim(family: Family, dim: usize) -> Result<Level> {
    match family {
        Family::A if dim < 2 => invalid("type A level needs at least two ε-indices"),
        Family::A => Level::new(family, dim - 1),
        _ => Level::new(family, dim),
    }
}

/// Uniform step pattern: `natural` copies, `dual` type A dual copies and
/// `zeros` zero-target indices, laid out in contiguous blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepPattern {
    pub natural: usize,
    #[serde(default)]
    pub dual: usize,
    #[serde(default)]
    pub zeros: usize,
    #[serde(default)]
    pub zeros_first: bool,
}

impl StepPattern {
    pub fn build(&self, source: Level) -> Result<RestrictionMap> {
        if self.dual > 0 && source.family() != Family::A {
            return invalid("dual copies only exist in type A; other families are self-dual");
        }
        let m = source.dim();
        let mut targets = Vec::new();
        if self.zeros_first {
            targets.extend(std::iter::repeat(None).take(self.zeros));
        }
        for _ in 0..self.natural {
            targets.extend((0..m).map(|j| Some(SignedIndex::pos(j))));
        }
        for _ in 0..self.dual {
            targets.extend((0..m).map(|j| Some(SignedIndex::neg(j))));
        }
        if !self.zeros_first {
            targets.extend(std::iter::repeat(None).take(self.zeros));
        }
        RestrictionMap::from_targets(source, targets)
    }
}

/// A representative `(t_{n0}, t_{n0+1}, …)` of a branch, with 1-based copy choices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Branch {
    pub base_level: usize,
    pub copies: Vec<usize>,
}

impl Branch {
    pub fn new(base_level: usize, copies: Vec<usize>) -> Self {
        Branch { base_level, copies }
    }

    /// Last level reached by the recorded choices.
    pub fn end_level(&self) -> usize {
        self.base_level + self.copies.len()
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.copies.iter().map(|c| c.to_string()).collect();
        write!(f, "@{}({})", self.base_level, parts.join(","))
    }
}

/// A horizon-limited yes/no answer with the first offending step, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixVerdict {
    pub holds: bool,
    pub horizon: usize,
    pub first_violation: Option<usize>,
}

/// Levels `1..=N` of a diagonal system of one classical family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSystem {
    family: Family,
    initial_rank: usize,
    levels: Vec<Level>,
    steps: Vec<RestrictionMap>,
}

impl DiagonalSystem {
    pub fn new(family: Family, initial_rank: usize, steps: Vec<RestrictionMap>) -> Result<Self> {
        let mut levels = vec![Level::new(family, initial_rank)?];
        for (k, step) in steps.iter().enumerate() {
            let expected = levels[k];
            if step.source() != expected {
                return invalid(format!(
                    "step {} starts at {} but level {} is {expected}",
                    k + 1,
                    step.source(),
                    k + 1
                ));
            }
            levels.push(step.target());
        }
        Ok(DiagonalSystem { family, initial_rank, levels, steps })
    }

    /// Repeat one step pattern until `num_levels` levels exist.
    pub fn from_pattern(
        family: Family,
        initial_rank: usize,
        pattern: StepPattern,
        num_levels: usize,
    ) -> Result<Self> {
        if num_levels == 0 {
            return invalid("a system needs at least one level");
        }
        let mut level = Level::new(family, initial_rank)?;
        let mut steps = Vec::with_capacity(num_levels - 1);
        for _ in 1..num_levels {
            let step = pattern.build(level)?;
            level = step.target();
            steps.push(step);
        }
        Self::new(family, initial_rank, steps)
    }

    /// `SL(∞)`: each `sl_n` sits in the corner of `sl_{n+1}`.
    pub fn sl_infinity(initial_rank: usize, num_levels: usize) -> Result<Self> {
        let p = StepPattern { natural: 1, dual: 0, zeros: 1, zeros_first: false };
        Self::from_pattern(Family::A, initial_rank, p, num_levels)
    }

    /// `SL(2^∞)` from `SL(2)`: indices `i` and `2^n + i` of level `n+1` restrict to `i`.
    pub fn sl_two_power(num_levels: usize) -> Result<Self> {
        let p = StepPattern { natural: 2, dual: 0, zeros: 0, zeros_first: false };
        Self::from_pattern(Family::A, 1, p, num_levels)
    }

    /// `Sp(2^∞+1)`: level `n` has rank `2^n − 1`; index 1 of level `n+1`
    /// restricts to zero, `1+j` and `2^n+j` restrict to `j`.
    pub fn sp_two_power_plus_one(num_levels: usize) -> Result<Self> {
        let p = StepPattern { natural: 2, dual: 0, zeros: 1, zeros_first: true };
        Self::from_pattern(Family::C, 1, p, num_levels)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn initial_rank(&self) -> usize {
        self.initial_rank
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Level `n`, 1-based.
    pub fn level(&self, n: usize) -> Result<Level> {
        self.check_level(n)?;
        Ok(self.levels[n - 1])
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::LevelOutOfRange { level: n, max: self.levels.len() });
        }
        Ok(())
    }

    /// The step `G_n → G_{n+1}`.
    pub fn step(&self, n: usize) -> Result<&RestrictionMap> {
        if n == 0 || n >= self.levels.len() {
            return Err(Error::LevelOutOfRange { level: n + 1, max: self.levels.len() });
        }
        Ok(&self.steps[n - 1])
    }

    pub fn steps(&self) -> &[RestrictionMap] {
        &self.steps
    }

    /// Restrict a level-(n+1) weight to level n.
    pub fn restrict_weight(&self, n: usize, lambda: &EpsWeight) -> Result<EpsWeight> {
        self.step(n)?.restrict(lambda)
    }

    /// Restrict a level-`from` weight down to level `to ≤ from`.
    pub fn restrict_to(&self, from: usize, to: usize, lambda: &EpsWeight) -> Result<EpsWeight> {
        self.check_level(from)?;
        self.check_level(to)?;
        if to > from {
            return invalid(format!("cannot restrict from level {from} up to level {to}"));
        }
        let mut cur = lambda.clone();
        for n in (to..from).rev() {
            cur = self.restrict_weight(n, &cur)?;
        }
        Ok(cur)
    }

    /// `τ_n^c` with a 1-based copy index.
    pub fn branch_injection(&self, n: usize, c: usize, w: &WeylElt) -> Result<WeylElt> {
        if c == 0 {
            return invalid("copy indices are 1-based");
        }
        self.step(n)?.inject(c - 1, w)
    }

    /// `s_m^n = s_m ⋯ s_{n−1}`.
    pub fn multiplicity(&self, m: usize, n: usize) -> Result<u128> {
        self.check_level(m)?;
        self.check_level(n)?;
        if m > n {
            return invalid(format!("multiplicity needs m ≤ n, got {m} > {n}"));
        }
        let mut prod: u128 = 1;
        for k in m..n {
            prod = prod.saturating_mul(self.steps[k - 1].num_copies() as u128);
        }
        Ok(prod)
    }

    /// No trivial constituents in any step after the first.
    pub fn is_pure(&self) -> PrefixVerdict {
        let bad = (2..self.levels.len()).find(|&n| self.steps[n - 1].shape().trivial > 0);
        self.verdict(bad)
    }

    /// Every step is a root injection, i.e. has a single copy.
    pub fn is_root_reductive(&self) -> PrefixVerdict {
        let bad = (1..self.levels.len()).find(|&n| self.steps[n - 1].num_copies() != 1);
        self.verdict(bad)
    }

    fn verdict(&self, bad: Option<usize>) -> PrefixVerdict {
        PrefixVerdict { holds: bad.is_none(), horizon: self.levels.len(), first_violation: bad }
    }

    /// Validate that a branch stays within the horizon and copy ranges.
    pub fn check_branch(&self, branch: &Branch) -> Result<()> {
        self.check_level(branch.base_level)?;
        if branch.end_level() > self.levels.len() {
            return Err(Error::LevelOutOfRange { level: branch.end_level(), max: self.levels.len() });
        }
        for (k, &c) in branch.copies.iter().enumerate() {
            let n = branch.base_level + k;
            let s = self.steps[n - 1].num_copies();
            if c == 0 || c > s {
                return invalid(format!("branch choice {c} at level {n} outside 1..={s}"));
            }
        }
        Ok(())
    }

    /// Push a level-`from` Weyl element along 1-based copy choices.
    pub fn push_along(&self, from: usize, copies: &[usize], w: &WeylElt) -> Result<WeylElt> {
        let mut cur = w.clone();
        for (k, &c) in copies.iter().enumerate() {
            cur = self.branch_injection(from + k, c, &cur)?;
        }
        Ok(cur)
    }

    /// Image of a level-`from` root along 1-based copy choices.
    pub fn push_root(&self, from: usize, copies: &[usize], alpha: &EpsWeight) -> Result<EpsWeight> {
        let mut cur = alpha.clone();
        for (k, &c) in copies.iter().enumerate() {
            let step = self.step(from + k)?;
            if c == 0 || c > step.num_copies() {
                return invalid(format!("copy {c} out of range at level {}", from + k));
            }
            cur = step.copy_image(c - 1, &cur);
        }
        Ok(cur)
    }
}
