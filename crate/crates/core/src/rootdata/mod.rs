//! Finite-level root data for the classical families: orders, simple and
//! positive roots, `ρ`, Weyl group lengths, the dot action, and the
//! straightening step of the classical Bott–Borel–Weil theorem.

mod order;
mod weight;
mod weyl;

pub use order::LinearOrder;
pub use weight::{pairing, EpsWeight, Family, Level, SignedIndex};
pub use weyl::WeylElt;

use num_rational::Rational64;

use crate::error::{invalid, Result};

/// Root data of one level with a fixed Borel. Precomputes `ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    level: Level,
    order: LinearOrder,
    rho: EpsWeight,
}

/// Output of [`straighten`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Straightened {
    /// `λ + ρ` lies on a wall: every cohomology group vanishes.
    Singular,
    Regular { w: WeylElt, degree: usize, dominant: EpsWeight },
}

impl Straightened {
    pub fn is_singular(&self) -> bool {
        matches!(self, Straightened::Singular)
    }
}

impl Chamber {
    pub fn new(level: Level, order: LinearOrder) -> Result<Self> {
        if order.level() != level {
            return invalid(format!("order for {} used with level {level}", order.level()));
        }
        let r = level.rank() as i64;
        let mu: Vec<i64> = (0..level.dim() as i64)
            .map(|a| match level.family() {
                Family::A => r - 2 * a,
                Family::B => 2 * (r - a) - 1,
                Family::C => 2 * (r - a),
                Family::D => 2 * (r - a - 1),
            })
            .collect();
        let rho = order.from_positions(&mu);
        Ok(Chamber { level, order, rho })
    }

    pub fn standard(level: Level) -> Self {
        Self::new(level, LinearOrder::standard(level)).expect("standard chamber")
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn order(&self) -> &LinearOrder {
        &self.order
    }

    pub fn rho(&self) -> &EpsWeight {
        &self.rho
    }

    /// Simple roots in Dynkin order: consecutive differences along the
    /// order, then the terminal root of the family.
    pub fn simple_roots(&self) -> Vec<EpsWeight> {
        let m = self.level.dim();
        let mut out = Vec::with_capacity(self.level.rank());
        let std_root = |v: Vec<i64>| self.order.from_positions(&v);
        for a in 0..m - 1 {
            let mut v = vec![0; m];
            v[a] = 2;
            v[a + 1] = -2;
            out.push(std_root(v));
        }
        let mut v = vec![0; m];
        match self.level.family() {
            Family::A => return out,
            Family::B => v[m - 1] = 2,
            Family::C => v[m - 1] = 4,
            Family::D => {
                v[m - 2] = 2;
                v[m - 1] = 2;
            }
        }
        out.push(std_root(v));
        out
    }

    pub fn positive_roots(&self) -> Vec<EpsWeight> {
        self.level.roots().into_iter().filter(|a| self.order.is_positive(a)).collect()
    }

    fn check_weight(&self, w: &EpsWeight) -> Result<()> {
        self.level.check_weight(w)
    }

    fn check_elt(&self, w: &WeylElt) -> Result<()> {
        if w.level() != self.level {
            return invalid(format!("Weyl element of {} used at level {}", w.level(), self.level));
        }
        Ok(())
    }

    /// Dominance via signs of order coordinates (no rational arithmetic).
    pub fn is_dominant(&self, lambda: &EpsWeight) -> bool {
        let mu = self.order.to_positions(lambda);
        let m = mu.len();
        if mu.windows(2).any(|p| p[0] < p[1]) {
            return false;
        }
        match self.level.family() {
            Family::A => true,
            Family::B | Family::C => mu[m - 1] >= 0,
            Family::D => mu[m - 2] + mu[m - 1] >= 0,
        }
    }

    /// Dominance by pairing against every simple root.
    pub fn is_dominant_by_pairing(&self, lambda: &EpsWeight) -> Result<bool> {
        for alpha in self.simple_roots() {
            if pairing(lambda, &alpha)? < Rational64::from_integer(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `ℓ(w) = |{α > 0 : wα < 0}|`, counted on order positions.
    pub fn length(&self, w: &WeylElt) -> usize {
        let u = w.to_positions(&self.order);
        let m = u.len();
        let typed = self.level.family() != Family::A;
        let mut count = 0;
        for a in 0..m {
            for b in a + 1..m {
                let (ua, ub) = (u[a], u[b]);
                // e_a - e_b
                let neg = if ua.index < ub.index { ua.negative } else { !ub.negative };
                count += neg as usize;
                if typed {
                    // e_a + e_b
                    let neg = if ua.index < ub.index { ua.negative } else { ub.negative };
                    count += neg as usize;
                }
            }
            if matches!(self.level.family(), Family::B | Family::C) {
                count += u[a].negative as usize;
            }
        }
        count
    }

    /// `Φ_w = (w⁻¹Δ⁻) ∩ Δ⁺`, the positive roots sent negative by `w`.
    pub fn inversion_set(&self, w: &WeylElt) -> Vec<EpsWeight> {
        self.positive_roots()
            .into_iter()
            .filter(|a| !self.order.is_positive(&w.apply(a)))
            .collect()
    }

    pub fn dot_action(&self, w: &WeylElt, lambda: &EpsWeight) -> EpsWeight {
        let shifted = lambda + &self.rho;
        &w.apply(&shifted) - &self.rho
    }

    /// Wall test on `λ + ρ` by coordinate multisets in order coordinates.
    pub fn is_singular(&self, lambda: &EpsWeight) -> bool {
        let v = self.order.to_positions(&(lambda + &self.rho));
        let mut keys: Vec<i64> = match self.level.family() {
            Family::A => v,
            Family::B | Family::C => {
                if v.contains(&0) {
                    return true;
                }
                v.iter().map(|x| x.abs()).collect()
            }
            Family::D => v.iter().map(|x| x.abs()).collect(),
        };
        keys.sort_unstable();
        keys.windows(2).any(|p| p[0] == p[1])
    }

    /// Wall test by pairing `λ + ρ` with every positive root.
    pub fn is_singular_by_roots(&self, lambda: &EpsWeight) -> bool {
        let shifted = lambda + &self.rho;
        self.positive_roots()
            .iter()
            .any(|a| pairing(&shifted, a).map(|p| p == Rational64::from_integer(0)).unwrap_or(false))
    }

    /// Find the unique `w` with `w·λ` dominant, or report that `λ + ρ` is singular.
    pub fn straighten(&self, lambda: &EpsWeight) -> Result<Straightened> {
        self.check_weight(lambda)?;
        if self.is_singular(lambda) {
            return Ok(Straightened::Singular);
        }
        let v = self.order.to_positions(&(lambda + &self.rho));
        let m = v.len();
        let family = self.level.family();
        let key = |a: usize| if family == Family::A { v[a] } else { v[a].abs() };
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by_key(|&a| std::cmp::Reverse(key(a)));
        let mut u = vec![SignedIndex::pos(0); m];
        for (rank, &a) in idx.iter().enumerate() {
            u[a] = SignedIndex { index: rank, negative: family != Family::A && v[a] < 0 };
        }
        if family == Family::D && u.iter().filter(|s| s.negative).count() % 2 == 1 {
            // the smallest |v| sits last; a zero there absorbs the flip for free
            let last = idx[m - 1];
            u[last].negative = !u[last].negative;
        }
        let w = WeylElt::from_positions(self.level, &self.order, &u)?;
        let dominant = self.dot_action(&w, lambda);
        debug_assert!(self.is_dominant(&dominant));
        let degree = self.length(&w);
        Ok(Straightened::Regular { w, degree, dominant })
    }

    pub fn validate_elt(&self, w: &WeylElt) -> Result<()> {
        self.check_elt(w)
    }
}

pub fn simple_roots(level: Level, order: &LinearOrder) -> Result<Vec<EpsWeight>> {
    Ok(Chamber::new(level, order.clone())?.simple_roots())
}

/// Half-sum of the positive roots, computed literally from the root list.
pub fn rho(level: Level, order: &LinearOrder) -> Result<EpsWeight> {
    let ch = Chamber::new(level, order.clone())?;
    let mut sum = EpsWeight::zero(level.dim());
    for a in ch.positive_roots() {
        sum = &sum + &a;
    }
    Ok(EpsWeight::from_twice(sum.twice().iter().map(|c| c / 2).collect()))
}

pub fn is_dominant(lambda: &EpsWeight, level: Level, order: &LinearOrder) -> Result<bool> {
    let ch = Chamber::new(level, order.clone())?;
    ch.check_weight(lambda)?;
    Ok(ch.is_dominant(lambda))
}

pub fn length(w: &WeylElt, level: Level, order: &LinearOrder) -> Result<usize> {
    let ch = Chamber::new(level, order.clone())?;
    ch.check_elt(w)?;
    Ok(ch.length(w))
}

pub fn dot_action(w: &WeylElt, lambda: &EpsWeight, level: Level, order: &LinearOrder) -> Result<EpsWeight> {
    let ch = Chamber::new(level, order.clone())?;
    ch.check_elt(w)?;
    ch.check_weight(lambda)?;
    Ok(ch.dot_action(w, lambda))
}

pub fn straighten(lambda: &EpsWeight, level: Level, order: &LinearOrder) -> Result<Straightened> {
    Chamber::new(level, order.clone())?.straighten(lambda)
}
