//! Exhaustive references for small ranks: whole Weyl groups, brute-force
//! straightening and reduced words found by breadth-first search.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rootdata::{rho, Chamber, EpsWeight, Family, Level, LinearOrder, SignedIndex, Straightened, WeylElt};

pub const MAX_RANK: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylEnumeration {
    pub level: Level,
    pub elements: Vec<WeylElt>,
}

fn check_rank(level: Level) -> Result<()> {
    if level.rank() > MAX_RANK {
        return invalid(format!("oracle supports rank at most {MAX_RANK}, got {level}"));
    }
    Ok(())
}

/// All signed permutations allowed in the family, in lexicographic order
/// of (permutation, sign mask).
pub fn enumerate_weyl(level: Level) -> Result<WeylEnumeration> {
    check_rank(level)?;
    let m = level.dim();
    let signed = level.family() != Family::A;
    let mut elements = Vec::new();
    for perm in permutations(m) {
        let masks = if signed { 1u32 << m } else { 1 };
        for mask in 0..masks {
            if level.family() == Family::D && mask.count_ones() % 2 == 1 {
                continue;
            }
            let images = perm
                .iter()
                .enumerate()
                .map(|(i, &p)| SignedIndex { index: p, negative: mask >> i & 1 == 1 })
                .collect();
            elements.push(WeylElt::new(level, images)?);
        }
    }
    Ok(WeylEnumeration { level, elements })
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Try every Weyl element; at most one may move `λ` to a dominant weight
/// under the dot action, and none does exactly when `λ + ρ` is singular.
pub fn brute_force_straighten(lambda: &EpsWeight, chamber: &Chamber) -> Result<Straightened> {
    let level = chamber.level();
    level.check_weight(lambda)?;
    let rho = rho(level, chamber.order())?;
    let shifted = lambda + &rho;
    let group = enumerate_weyl(level)?;
    let hits = group
        .elements
        .par_iter()
        .filter_map(|w| {
            let mu = &w.apply(&shifted) - &rho;
            match chamber.is_dominant_by_pairing(&mu) {
                Ok(true) => Some(Ok((w.clone(), mu))),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    match hits.len() {
        0 => Ok(Straightened::Singular),
        1 => {
            let (w, dominant) = hits.into_iter().next().expect("one hit");
            let degree = inversion_count(&w, chamber);
            Ok(Straightened::Regular { w, degree, dominant })
        }
        k => Err(Error::Internal(format!("{k} Weyl elements straighten {lambda}"))),
    }
}

/// Positive roots sent to negative roots by `w⁻¹`, counted directly.
fn inversion_count(w: &WeylElt, chamber: &Chamber) -> usize {
    let positive = chamber.positive_roots();
    let set: HashSet<&EpsWeight> = positive.iter().collect();
    let inv = w.inverse();
    positive.iter().filter(|a| !set.contains(&inv.apply(a))).count()
}

/// A shortest word `w = s_{i_1} ⋯ s_{i_k}` in the simple reflections of the
/// chamber (1-based indices).
pub fn reduced_word(w: &WeylElt, chamber: &Chamber) -> Result<Vec<usize>> {
    let level = chamber.level();
    check_rank(level)?;
    chamber.validate_elt(w)?;
    let gens = chamber
        .simple_roots()
        .iter()
        .map(|a| WeylElt::reflection(level, a))
        .collect::<Result<Vec<_>>>()?;
    let start = WeylElt::identity(level);
    let mut prev: HashMap<WeylElt, Option<(WeylElt, usize)>> = HashMap::new();
    prev.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        if x == *w {
            let mut word = Vec::new();
            let mut cur = x;
            while let Some(Some((p, i))) = prev.get(&cur) {
                word.push(*i);
                cur = p.clone();
            }
            word.reverse();
            return Ok(word);
        }
        for (i, s) in gens.iter().enumerate() {
            let y = x.compose(s);
            if !prev.contains_key(&y) {
                prev.insert(y.clone(), Some((x.clone(), i + 1)));
                queue.push_back(y);
            }
        }
    }
    Err(Error::Internal(format!("{} not reached by simple reflections", w.one_line())))
}

pub fn reduced_word_length(w: &WeylElt, chamber: &Chamber) -> Result<usize> {
    Ok(reduced_word(w, chamber)?.len())
}

/// A weight with ε-coordinates in `[−6, 6]`; for B and D half the samples
/// use half-odd coordinates throughout.
pub fn random_weight(rng: &mut impl Rng, level: Level) -> EpsWeight {
    let half = matches!(level.family(), Family::B | Family::D) && rng.gen_bool(0.5);
    let twice = (0..level.dim())
        .map(|_| if half { 2 * rng.gen_range(-6..6) + 1 } else { 2 * rng.gen_range(-6..=6) })
        .collect();
    EpsWeight::from_twice(twice)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditLine {
    pub family: Family,
    pub rank: usize,
    pub samples: usize,
    pub agreements: usize,
    pub singular: usize,
    /// First disagreeing weight, if any.
    pub counterexample: Option<EpsWeight>,
}

impl AuditLine {
    pub fn passed(&self) -> bool {
        self.agreements == self.samples
    }
}

/// A uniformly random chamber: any order for A, any signed order otherwise.
pub fn random_chamber(rng: &mut impl Rng, level: Level) -> Result<Chamber> {
    let mut entries: Vec<i64> = (1..=level.dim() as i64).collect();
    entries.shuffle(rng);
    if level.family() != Family::A {
        for e in &mut entries {
            if rng.gen_bool(0.5) {
                *e = -*e;
            }
        }
    }
    Chamber::new(level, LinearOrder::from_signed(level, &entries)?)
}

/// Compare [`Chamber::straighten`] with [`brute_force_straighten`] on
/// `count` random (chamber, weight) pairs per family and rank.
pub fn audit_random(seed: u64, count: usize, ranks: std::ops::RangeInclusive<usize>) -> Result<Vec<AuditLine>> {
    let mut lines = Vec::new();
    for family in Family::ALL {
        for rank in ranks.clone() {
            let level = Level::new(family, rank)?;
            check_rank(level)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((family as u64) << 32) ^ rank as u64);
            let sample = (0..count)
                .map(|_| Ok((random_chamber(&mut rng, level)?, random_weight(&mut rng, level))))
                .collect::<Result<Vec<_>>>()?;
            lines.push(audit_pairs(level, &sample)?);
        }
    }
    Ok(lines)
}

/// Audit one chamber on the given weights.
pub fn audit_weights(chamber: &Chamber, sample: &[EpsWeight]) -> Result<AuditLine> {
    let pairs: Vec<_> = sample.iter().map(|w| (chamber.clone(), w.clone())).collect();
    audit_pairs(chamber.level(), &pairs)
}

fn audit_pairs(level: Level, sample: &[(Chamber, EpsWeight)]) -> Result<AuditLine> {
    check_rank(level)?;
    let results = sample
        .par_iter()
        .map(|(c, w)| Ok((c.straighten(w)?, brute_force_straighten(w, c)?)))
        .collect::<Result<Vec<_>>>()?;
    let agreements = results.iter().filter(|(a, b)| a == b).count();
    Ok(AuditLine {
        family: level.family(),
        rank: level.rank(),
        samples: sample.len(),
        agreements,
        singular: results.iter().filter(|(a, _)| a.is_singular()).count(),
        counterexample: results.iter().zip(sample).find(|((a, b), _)| a != b).map(|(_, (_, w))| w.clone()),
    })
}
