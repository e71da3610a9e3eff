use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Classical family of the simple Lie algebras at every level of an exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => invalid(format!("unknown family `{other}`")),
        }
    }
}

/// A root system of one level: a family together with its rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    family: Family,
    rank: usize,
}

impl Level {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        if rank == 0 {
            return invalid("rank must be at least 1");
        }
        if family == Family::D && rank < 2 {
            return invalid("type D requires rank at least 2");
        }
        Ok(Level { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of ε-coordinates: `rank + 1` in type A, `rank` otherwise.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::A => self.rank + 1,
            _ => self.rank,
        }
    }

    /// All roots in ε-coordinates, in a fixed deterministic order.
    pub fn roots(&self) -> Vec<EpsWeight> {
        let m = self.dim();
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                out.push(EpsWeight::unit(m, i) - EpsWeight::unit(m, j));
                if self.family != Family::A && i < j {
                    out.push(EpsWeight::unit(m, i) + EpsWeight::unit(m, j));
                    out.push(-(EpsWeight::unit(m, i) + EpsWeight::unit(m, j)));
                }
            }
        }
        match self.family {
            Family::B => {
                for i in 0..m {
                    out.push(EpsWeight::unit(m, i));
                    out.push(-EpsWeight::unit(m, i));
                }
            }
            Family::C => {
                for i in 0..m {
                    out.push(EpsWeight::unit(m, i).scaled(2));
                    out.push(EpsWeight::unit(m, i).scaled(-2));
                }
            }
            _ => {}
        }
        out
    }

    /// Equality of weights of this level. In type A weights are compared
    /// modulo the all-ones vector.
    pub fn weights_equal(&self, a: &EpsWeight, b: &EpsWeight) -> bool {
        if a.dim() != b.dim() {
            return false;
        }
        match self.family {
            Family::A => {
                let diff = a - b;
                diff.twice.windows(2).all(|w| w[0] == w[1])
            }
            _ => a == b,
        }
    }

    pub fn check_weight(&self, w: &EpsWeight) -> Result<()> {
        if w.dim() != self.dim() {
            return invalid(format!(
                "weight has {} coordinates, level {}{} expects {}",
                w.dim(),
                self.family,
                self.rank,
                self.dim()
            ));
        }
        if self.family == Family::A && !w.uniform_parity() {
            return invalid("type A weight coordinates must share one denominator");
        }
        Ok(())
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// `±ε^{index+1}`; indices are 0-based internally and 1-based in text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedIndex {
    pub index: usize,
    pub negative: bool,
}

impl SignedIndex {
    pub fn pos(index: usize) -> Self {
        SignedIndex { index, negative: false }
    }

    pub fn neg(index: usize) -> Self {
        SignedIndex { index, negative: true }
    }

    /// From a 1-based signed integer such as `-3`.
    pub fn from_signed(value: i64) -> Result<Self> {
        if value == 0 {
            return invalid("signed index 0 is not allowed here");
        }
        Ok(SignedIndex {
            index: value.unsigned_abs() as usize - 1,
            negative: value < 0,
        })
    }

    pub fn to_signed(self) -> i64 {
        let v = self.index as i64 + 1;
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn sign(self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn flipped(self) -> Self {
        SignedIndex { index: self.index, negative: !self.negative }
    }

    /// Multiply the sign by another sign.
    pub fn times(self, negative: bool) -> Self {
        SignedIndex { index: self.index, negative: self.negative ^ negative }
    }
}

impl fmt::Display for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_signed())
    }
}

/// A weight in ε-coordinates. Coordinates are rationals with denominator
/// dividing 2, stored exactly as twice their value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpsWeight {
    twice: Vec<i64>,
}

impl EpsWeight {
    pub fn zero(dim: usize) -> Self {
        EpsWeight { twice: vec![0; dim] }
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut w = Self::zero(dim);
        w.twice[i] = 2;
        w
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        EpsWeight { twice: coords.iter().map(|c| 2 * c).collect() }
    }

    /// From doubled coordinates: `[3, 1]` is `(3/2, 1/2)`.
    pub fn from_twice(twice: Vec<i64>) -> Self {
        EpsWeight { twice }
    }

    pub fn from_rationals(coords: &[Rational64]) -> Result<Self> {
        let mut twice = Vec::with_capacity(coords.len());
        for c in coords {
            let d = *c * Rational64::from_integer(2);
            if !d.is_integer() {
                return invalid(format!("coordinate {c} has a denominator not dividing 2"));
            }
            twice.push(d.to_integer());
        }
        Ok(EpsWeight { twice })
    }

    pub fn dim(&self) -> usize {
        self.twice.len()
    }

    pub fn twice(&self) -> &[i64] {
        &self.twice
    }

    pub fn coord(&self, i: usize) -> Rational64 {
        Rational64::new(self.twice[i], 2)
    }

    pub fn coords(&self) -> Vec<Rational64> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.twice.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        EpsWeight { twice: self.twice.iter().map(|c| c * k).collect() }
    }

    /// All coordinates integral, or all strictly half-integral.
    pub fn uniform_parity(&self) -> bool {
        match self.twice.first() {
            None => true,
            Some(first) => {
                let p = first.rem_euclid(2);
                self.twice.iter().all(|c| c.rem_euclid(2) == p)
            }
        }
    }

    /// Standard inner product with orthonormal ε's.
    pub fn inner(&self, other: &EpsWeight) -> Rational64 {
        let s: i64 = self.twice.iter().zip(&other.twice).map(|(a, b)| a * b).sum();
        Rational64::new(s, 4)
    }
}

impl fmt::Display for EpsWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for EpsWeight {
    /// Integer coordinates as numbers, half-integers as `"p/2"` strings.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.twice.len()))?;
        for &t in &self.twice {
            if t % 2 == 0 {
                seq.serialize_element(&(t / 2))?;
            } else {
                seq.serialize_element(&format!("{t}/2"))?;
            }
        }
        seq.end()
    }
}

impl<'a> Add<&'a EpsWeight> for &'a EpsWeight {
    type Output = EpsWeight;
    fn add(self, rhs: &EpsWeight) -> EpsWeight {
        assert_eq!(self.dim(), rhs.dim(), "weight dimension mismatch");
        EpsWeight { twice: self.twice.iter().zip(&rhs.twice).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a EpsWeight> for &'a EpsWeight {
    type Output = EpsWeight;
    fn sub(self, rhs: &EpsWeight) -> EpsWeight {
        assert_eq!(self.dim(), rhs.dim(), "weight dimension mismatch");
        EpsWeight { twice: self.twice.iter().zip(&rhs.twice).map(|(a, b)| a - b).collect() }
    }
}

impl Add for EpsWeight {
    type Output = EpsWeight;
    fn add(self, rhs: EpsWeight) -> EpsWeight {
        &self + &rhs
    }
}

impl Sub for EpsWeight {
    type Output = EpsWeight;
    fn sub(self, rhs: EpsWeight) -> EpsWeight {
        &self - &rhs
    }
}

impl Neg for EpsWeight {
    type Output = EpsWeight;
    fn neg(self) -> EpsWeight {
        self.scaled(-1)
    }
}

/// `2(λ, α)/(α, α)`.
pub fn pairing(lambda: &EpsWeight, alpha: &EpsWeight) -> Result<Rational64> {
    if lambda.dim() != alpha.dim() {
        return invalid(format!(
            "pairing of weights with {} and {} coordinates",
            lambda.dim(),
            alpha.dim()
        ));
    }
    let norm: i64 = alpha.twice.iter().map(|a| a * a).sum();
    if norm == 0 {
        return Err(Error::Domain("pairing against the zero vector".into()));
    }
    let dot: i64 = lambda.twice.iter().zip(&alpha.twice).map(|(a, b)| a * b).sum();
    Ok(Rational64::new(2 * dot, norm))
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn pairing_examples() {
        let a = EpsWeight::from_ints(&[1, -1, 0]);
        assert_eq!(pairing(&a, &a).unwrap(), Rational64::from_integer(2));
        let b = EpsWeight::from_ints(&[0, 0, 1]);
        assert_eq!(pairing(&b, &a).unwrap(), Rational64::zero());
        // (3/2, 1/2) against ε2
        let lam = EpsWeight::from_twice(vec![3, 1]);
        let e2 = EpsWeight::unit(2, 1);
        assert_eq!(pairing(&lam, &e2).unwrap(), Rational64::from_integer(1));
    }

    #[test]
    fn pairing_zero_root_is_domain_error() {
        let lam = EpsWeight::from_ints(&[1, 2]);
        assert!(matches!(pairing(&lam, &EpsWeight::zero(2)), Err(Error::Domain(_))));
    }

    #[test]
    fn rationals_must_have_small_denominators() {
        assert!(EpsWeight::from_rationals(&[Rational64::new(1, 3)]).is_err());
        let w = EpsWeight::from_rationals(&[Rational64::new(-1, 2), Rational64::from_integer(2)])
            .unwrap();
        assert_eq!(w.twice(), &[-1, 4]);
    }

    #[test]
    fn type_a_equality_is_modulo_trace() {
        let l = Level::new(Family::A, 2).unwrap();
        let a = EpsWeight::from_ints(&[1, 0, 0]);
        let b = EpsWeight::from_ints(&[2, 1, 1]);
        assert!(l.weights_equal(&a, &b));
        let c = Level::new(Family::C, 3).unwrap();
        assert!(!c.weights_equal(&a, &b));
    }

    #[test]
    fn root_counts() {
        let count = |f, r| Level::new(f, r).unwrap().roots().len();
        assert_eq!(count(Family::A, 3), 12);
        assert_eq!(count(Family::B, 3), 18);
        assert_eq!(count(Family::C, 3), 18);
        assert_eq!(count(Family::D, 4), 24);
    }

    #[test]
    fn d1_is_rejected() {
        assert!(Level::new(Family::D, 1).is_err());
        assert!(Level::new(Family::A, 0).is_err());
    }
}
