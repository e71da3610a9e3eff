use std::fmt;

use crate::error::{invalid, Result};

use super::weight::{EpsWeight, Family, Level, SignedIndex};

/// A linear order on the weights of the natural representation, which is
/// the same thing as a Borel subalgebra containing the fixed Cartan.
///
/// Type A stores the full arrangement `ε^{o_1} > ε^{o_2} > …`. Types B, C
/// and D store the positive half `s_1 ε^{i_1} > … > s_r ε^{i_r}`; the rest
/// of the order is forced by compatibility with `−1`. In type D the sign of
/// the last entry is normalized to `+`, since both choices give one Borel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    level: Level,
    entries: Vec<SignedIndex>,
    // slot[i] = position of ε^i together with the sign it carries there
    slot: Vec<(usize, bool)>,
}

impl LinearOrder {
    pub fn new(level: Level, mut entries: Vec<SignedIndex>) -> Result<Self> {
        let m = level.dim();
        if entries.len() != m {
            return invalid(format!(
                "order for {level} needs {m} entries, got {}",
                entries.len()
            ));
        }
        let mut slot = vec![(usize::MAX, false); m];
        for (pos, e) in entries.iter().enumerate() {
            if e.index >= m {
                return invalid(format!("order entry {e} out of range for {level}"));
            }
            if slot[e.index].0 != usize::MAX {
                return invalid(format!("order lists ε{} twice", e.index + 1));
            }
            if level.family() == Family::A && e.negative {
                return invalid("type A orders cannot contain signs");
            }
            slot[e.index] = (pos, e.negative);
        }
        if level.family() == Family::D {
            let last = entries.len() - 1;
            if entries[last].negative {
                entries[last].negative = false;
                slot[entries[last].index].1 = false;
            }
        }
        Ok(LinearOrder { level, entries, slot })
    }

    /// From 1-based signed integers, e.g. `[1, 3, 2, 4]` or `[2, -1]`.
    pub fn from_signed(level: Level, entries: &[i64]) -> Result<Self> {
        let e = entries
            .iter()
            .map(|&v| SignedIndex::from_signed(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(level, e)
    }

    pub fn standard(level: Level) -> Self {
        let entries = (0..level.dim()).map(SignedIndex::pos).collect();
        Self::new(level, entries).expect("standard order is valid")
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn entries(&self) -> &[SignedIndex] {
        &self.entries
    }

    /// Position of `ε^index` and whether it appears negated there.
    pub fn slot(&self, index: usize) -> (usize, bool) {
        self.slot[index]
    }

    /// Doubled order coordinates `μ_a = s_a λ_{i_a}`; in these coordinates
    /// the Borel is the standard one.
    pub fn to_positions(&self, w: &EpsWeight) -> Vec<i64> {
        let t = w.twice();
        self.entries.iter().map(|e| t[e.index] * e.sign()).collect()
    }

    pub fn from_positions(&self, mu: &[i64]) -> EpsWeight {
        let mut twice = vec![0; mu.len()];
        for (a, e) in self.entries.iter().enumerate() {
            twice[e.index] = mu[a] * e.sign();
        }
        EpsWeight::from_twice(twice)
    }

    /// A root is positive iff its first nonzero order coordinate is positive.
    pub fn is_positive(&self, root: &EpsWeight) -> bool {
        self.to_positions(root)
            .into_iter()
            .find(|&c| c != 0)
            .map(|c| c > 0)
            .unwrap_or(false)
    }
}

impl fmt::Display for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_range() {
        let l = Level::new(Family::A, 2).unwrap();
        assert!(LinearOrder::from_signed(l, &[1, 1, 2]).is_err());
        assert!(LinearOrder::from_signed(l, &[1, 2, 4]).is_err());
        assert!(LinearOrder::from_signed(l, &[1, -2, 3]).is_err());
        let c = Level::new(Family::C, 2).unwrap();
        assert!(LinearOrder::from_signed(c, &[1]).is_err());
        assert!(LinearOrder::from_signed(c, &[-2, 1]).is_ok());
    }

    #[test]
    fn type_d_last_sign_is_canonical() {
        let d = Level::new(Family::D, 3).unwrap();
        let a = LinearOrder::from_signed(d, &[2, -1, -3]).unwrap();
        let b = LinearOrder::from_signed(d, &[2, -1, 3]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn positions_round_trip() {
        let c = Level::new(Family::C, 3).unwrap();
        let o = LinearOrder::from_signed(c, &[3, -1, 2]).unwrap();
        let w = EpsWeight::from_ints(&[1, 2, 3]);
        let mu = o.to_positions(&w);
        assert_eq!(mu, vec![6, -2, 4]);
        assert_eq!(o.from_positions(&mu), w);
    }
}
