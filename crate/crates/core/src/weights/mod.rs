//! Inverse systems of weights, fundamental coordinates, dominant extensions
//! and successor trees.

mod extend;
mod tree;

pub use extend::{
    dominant_prefix_search, enumerate_dominant_extensions, enumerate_dominant_extensions_limited,
    monotone_mass, PruneCertificate, SearchOptions, SearchOutcome,
};
pub use tree::{labels_stabilize, successor_tree, Stabilization, SuccessorTree, TreeNode};

use serde::Serialize;

use crate::diagsys::DiagonalSystem;
use crate::error::{invalid, Error, Result};
use crate::rootdata::{pairing, Chamber, EpsWeight, Family};

/// Where a candidate prefix stops restricting correctly: `restricted` is the
/// restriction of level `level + 1`, `actual` the weight given at `level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionFailure {
    pub level: usize,
    pub restricted: EpsWeight,
    pub actual: EpsWeight,
}

impl RestrictionFailure {
    /// `restricted − actual`.
    pub fn discrepancy(&self) -> EpsWeight {
        &self.restricted - &self.actual
    }
}

/// A restriction-consistent prefix `λ_1, …, λ_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    weights: Vec<EpsWeight>,
}

impl WeightSystem {
    pub fn new(system: &DiagonalSystem, weights: Vec<EpsWeight>) -> Result<Self> {
        if let Err(f) = is_inverse_system(system, &weights)? {
            return invalid(format!(
                "weights do not restrict: level {} restricts to {} but level {} is {}",
                f.level + 1,
                f.restricted,
                f.level,
                f.actual
            ));
        }
        Ok(WeightSystem { weights })
    }

    /// The prefix obtained by restricting one weight of level `n` downwards.
    pub fn from_top(system: &DiagonalSystem, n: usize, top: EpsWeight) -> Result<Self> {
        system.level(n)?.check_weight(&top)?;
        let mut weights = vec![top];
        for k in (1..n).rev() {
            let next = system.restrict_weight(k, weights.last().expect("nonempty"))?;
            weights.push(next);
        }
        weights.reverse();
        Ok(WeightSystem { weights })
    }

    pub fn zero(system: &DiagonalSystem, n: usize) -> Result<Self> {
        Self::from_top(system, n, EpsWeight::zero(system.level(n)?.dim()))
    }

    pub fn num_levels(&self) -> usize {
        self.weights.len()
    }

    /// `λ_n`, 1-based.
    pub fn at(&self, n: usize) -> Result<&EpsWeight> {
        if n == 0 || n > self.weights.len() {
            return Err(Error::LevelOutOfRange { level: n, max: self.weights.len() });
        }
        Ok(&self.weights[n - 1])
    }

    pub fn weights(&self) -> &[EpsWeight] {
        &self.weights
    }

    pub fn truncate(&self, n: usize) -> Result<Self> {
        self.at(n)?;
        Ok(WeightSystem { weights: self.weights[..n].to_vec() })
    }

    /// Equality level by level, modulo the trace in type A.
    pub fn equivalent(&self, other: &WeightSystem, system: &DiagonalSystem) -> bool {
        self.weights.len() == other.weights.len()
            && self.weights.iter().zip(&other.weights).enumerate().all(|(k, (a, b))| {
                system.level(k + 1).map(|l| l.weights_equal(a, b)).unwrap_or(false)
            })
    }
}

/// Check `restrict(λ_{n+1}) = λ_n` for every `n`; the inner error names the
/// first failing level.
pub fn is_inverse_system(
    system: &DiagonalSystem,
    prefix: &[EpsWeight],
) -> Result<Result<(), RestrictionFailure>> {
    if prefix.len() > system.num_levels() {
        return Err(Error::LevelOutOfRange { level: prefix.len(), max: system.num_levels() });
    }
    for (k, w) in prefix.iter().enumerate() {
        system.level(k + 1)?.check_weight(w)?;
    }
    for n in 1..prefix.len() {
        let restricted = system.restrict_weight(n, &prefix[n])?;
        let level = system.level(n)?;
        if !level.weights_equal(&restricted, &prefix[n - 1]) {
            return Ok(Err(RestrictionFailure {
                level: n,
                restricted,
                actual: prefix[n - 1].clone(),
            }));
        }
    }
    Ok(Ok(()))
}

/// Coefficients `a^i = 2(λ, α_i)/(α_i, α_i)` over the simple roots, read
/// off from order coordinates.
pub fn to_fundamental(lambda: &EpsWeight, chamber: &Chamber) -> Result<Vec<i64>> {
    let level = chamber.level();
    level.check_weight(lambda)?;
    let mu = chamber.order().to_positions(lambda);
    let m = mu.len();
    // doubled pairings
    let mut twice: Vec<i64> = mu.windows(2).map(|p| p[0] - p[1]).collect();
    match level.family() {
        Family::A => {}
        Family::B => twice.push(2 * mu[m - 1]),
        Family::C => twice.push(mu[m - 1]),
        Family::D => twice.push(mu[m - 2] + mu[m - 1]),
    }
    twice
        .into_iter()
        .map(|t| {
            if t % 2 != 0 {
                return Err(Error::Domain(format!("{lambda} is not an integral weight")));
            }
            Ok(t / 2)
        })
        .collect()
}

/// [`to_fundamental`] computed by pairing with each simple root.
pub fn to_fundamental_by_pairing(lambda: &EpsWeight, chamber: &Chamber) -> Result<Vec<i64>> {
    chamber.level().check_weight(lambda)?;
    chamber
        .simple_roots()
        .iter()
        .map(|a| {
            let p = pairing(lambda, a)?;
            if !p.is_integer() {
                return Err(Error::Domain(format!("{lambda} is not an integral weight")));
            }
            Ok(p.to_integer())
        })
        .collect()
}

/// Inverse of [`to_fundamental`]; type A returns the representative with
/// last order coordinate zero.
pub fn from_fundamental(coeffs: &[i64], chamber: &Chamber) -> Result<EpsWeight> {
    let level = chamber.level();
    let r = level.rank();
    if coeffs.len() != r {
        return invalid(format!("{level} needs {r} fundamental coefficients"));
    }
    let m = level.dim();
    // doubled order coordinates, filled from the bottom
    let mut mu = vec![0i64; m];
    let first_chain = match level.family() {
        Family::A => {
            mu[m - 1] = 0;
            m - 1
        }
        Family::B => {
            mu[m - 1] = coeffs[r - 1];
            m - 1
        }
        Family::C => {
            mu[m - 1] = 2 * coeffs[r - 1];
            m - 1
        }
        Family::D => {
            mu[m - 1] = coeffs[r - 1] - coeffs[r - 2];
            mu[m - 2] = coeffs[r - 1] + coeffs[r - 2];
            m - 2
        }
    };
    for a in (0..first_chain).rev() {
        mu[a] = mu[a + 1] + 2 * coeffs[a];
    }
    Ok(chamber.order().from_positions(&mu))
}

/// The fundamental weight `ω^i` (1-based) of a chamber.
pub fn fundamental_weight(i: usize, chamber: &Chamber) -> Result<EpsWeight> {
    let r = chamber.level().rank();
    if i == 0 || i > r {
        return invalid(format!("fundamental weight index {i} outside 1..={r}"));
    }
    let mut c = vec![0; r];
    c[i - 1] = 1;
    from_fundamental(&c, chamber)
}
