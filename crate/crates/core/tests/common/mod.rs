#![allow(dead_code)]

use std::path::PathBuf;

use diagbbw::borel::{BorelSystem, NamedBorel};
use diagbbw::diagsys::DiagonalSystem;
use diagbbw::oracle::enumerate_weyl;
use diagbbw::rootdata::Chamber;
use diagbbw::weights::{from_fundamental, WeightSystem};
use diagbbw::weyl_limit::{BranchElt, LimitWeylElt};
use rand::Rng;

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

pub fn scenario(name: &str) -> PathBuf {
    scenario_dir().join(name)
}

pub fn shipped_scenarios() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    v.sort();
    v
}

pub fn sl2_upper(levels: usize) -> (DiagonalSystem, BorelSystem) {
    let sys = DiagonalSystem::sl_two_power(levels).unwrap();
    let b = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
    (sys, b)
}

pub fn sl2_interlacing(levels: usize) -> (DiagonalSystem, BorelSystem) {
    let sys = DiagonalSystem::sl_two_power(levels).unwrap();
    let b = BorelSystem::named(&sys, NamedBorel::Interlacing).unwrap();
    (sys, b)
}

/// A dominant weight of `SL(2^∞)` (upper triangular) whose labels are
/// inherited along the first copy: at each step the old coefficients stay
/// in the first block, the middle coefficient is new and the second block
/// is zero.
pub fn stable_dominant(rng: &mut impl Rng, sys: &DiagonalSystem, borel: &BorelSystem) -> WeightSystem {
    let mut coeffs = vec![rng.gen_range(0..=3)];
    let mut ws = vec![from_fundamental(&coeffs, borel.chamber(1).unwrap()).unwrap()];
    for n in 2..=sys.num_levels() {
        let mut next = coeffs.clone();
        next.push(rng.gen_range(0..=2));
        next.extend(std::iter::repeat(0).take(coeffs.len()));
        coeffs = next;
        ws.push(from_fundamental(&coeffs, borel.chamber(n).unwrap()).unwrap());
    }
    WeightSystem::new(sys, ws).unwrap()
}

/// One or two branches at `base`, the i-th starting with copy i, so the
/// branches separate one level above the base. With `last_copy_one` every
/// path ends in copy 1. Total base length is at most `max_len`.
pub fn random_element(
    rng: &mut impl Rng,
    sys: &DiagonalSystem,
    borel: &BorelSystem,
    base: usize,
    horizon: usize,
    max_len: usize,
    last_copy_one: bool,
) -> LimitWeylElt {
    let level = sys.level(base).unwrap();
    let chamber: &Chamber = borel.chamber(base).unwrap();
    let group = enumerate_weyl(level).unwrap().elements;
    let branches = rng.gen_range(1..=2);
    let mut budget = max_len;
    let mut support = Vec::new();
    for i in 0..branches {
        let candidates: Vec<_> = group.iter().filter(|w| chamber.length(w) <= budget).collect();
        let w = candidates[rng.gen_range(0..candidates.len())].clone();
        budget -= chamber.length(&w);
        let len = horizon - base;
        let mut copies: Vec<usize> = (0..len).map(|_| rng.gen_range(1..=2)).collect();
        copies[0] = i + 1;
        if last_copy_one {
            copies[len - 1] = 1;
        }
        support.push(BranchElt { copies, base: w });
    }
    LimitWeylElt::new(sys, base, support).unwrap()
}
