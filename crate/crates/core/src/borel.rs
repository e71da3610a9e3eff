//! Projective systems of linear orders, i.e. Borel subgroups of the ind-group.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagsys::DiagonalSystem;
use crate::error::{invalid, Error, Result};
use crate::rootdata::{Chamber, EpsWeight, Family, LinearOrder, SignedIndex};

/// Named Borel constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBorel {
    /// Copies laid out one after another, zero targets last.
    UpperTriangular,
    /// Copies of each weight placed next to each other, zero targets first.
    Interlacing,
}

impl std::str::FromStr for NamedBorel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper_triangular" => Ok(NamedBorel::UpperTriangular),
            "interlacing" => Ok(NamedBorel::Interlacing),
            _ => Err(Error::Parse(format!("unknown Borel `{s}`"))),
        }
    }
}

/// An incompatible step: at `level`, copy `copy` sends the simple root
/// `higher − lower` to a negative root of the next level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub level: usize,
    pub copy: usize,
    pub higher: SignedIndex,
    pub lower: SignedIndex,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level {}: the order has {} > {}, but copy {} reverses them at level {}",
            self.level,
            weight_name(self.higher),
            weight_name(self.lower),
            self.copy,
            self.level + 1
        )
    }
}

fn weight_name(s: SignedIndex) -> String {
    format!("{}ε{}", if s.negative { "-" } else { "" }, s.index + 1)
}

/// One order per level of a diagonal system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorelSystem {
    chambers: Vec<Chamber>,
}

impl BorelSystem {
    /// Orders must match the levels of `system`; compatibility is checked
    /// separately by [`check_compatibility`].
    pub fn new(system: &DiagonalSystem, orders: Vec<LinearOrder>) -> Result<Self> {
        if orders.len() != system.num_levels() {
            return invalid(format!(
                "{} orders given for {} levels",
                orders.len(),
                system.num_levels()
            ));
        }
        let chambers = system
            .levels()
            .iter()
            .zip(orders)
            .map(|(&l, o)| Chamber::new(l, o))
            .collect::<Result<Vec<_>>>()?;
        Ok(BorelSystem { chambers })
    }

    /// Orders given as 1-based signed integers per level.
    pub fn from_signed(system: &DiagonalSystem, orders: &[Vec<i64>]) -> Result<Self> {
        let orders = system
            .levels()
            .iter()
            .zip(orders)
            .map(|(&l, o)| LinearOrder::from_signed(l, o))
            .collect::<Result<Vec<_>>>()?;
        Self::new(system, orders)
    }

    pub fn named(system: &DiagonalSystem, name: NamedBorel) -> Result<Self> {
        let mut orders = vec![LinearOrder::standard(system.level(1)?)];
        for (k, step) in system.steps().iter().enumerate() {
            let prev = orders[k].entries();
            let zeros: Vec<SignedIndex> =
                step.zero_targets().into_iter().map(SignedIndex::pos).collect();
            let mut next = Vec::with_capacity(step.target().dim());
            match name {
                NamedBorel::UpperTriangular => {
                    for (c, copy) in step.copies().iter().enumerate() {
                        let dual = system.family() == Family::A && copy[0].negative;
                        let images = prev.iter().map(|&e| step.copy_index(c, e).times(dual));
                        if dual {
                            let mut v: Vec<_> = images.collect();
                            v.reverse();
                            next.extend(v);
                        } else {
                            next.extend(images);
                        }
                    }
                    next.extend(zeros);
                }
                NamedBorel::Interlacing => {
                    if step.shape().dual_copies > 0 {
                        return Err(Error::Construction(format!(
                            "interlacing order needs natural copies only, step {} has dual copies",
                            k + 1
                        )));
                    }
                    next.extend(zeros);
                    for &e in prev {
                        next.extend((0..step.num_copies()).map(|c| step.copy_index(c, e)));
                    }
                }
            }
            orders.push(LinearOrder::new(step.target(), next)?);
        }
        Self::new(system, orders)
    }

    pub fn num_levels(&self) -> usize {
        self.chambers.len()
    }

    /// Root data of level `n` (1-based) under this Borel.
    pub fn chamber(&self, n: usize) -> Result<&Chamber> {
        if n == 0 || n > self.chambers.len() {
            return Err(Error::LevelOutOfRange { level: n, max: self.chambers.len() });
        }
        Ok(&self.chambers[n - 1])
    }

    pub fn order(&self, n: usize) -> Result<&LinearOrder> {
        Ok(self.chamber(n)?.order())
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }
}

/// Simple roots of a level, each with the pair of weights it compares.
pub fn simple_root_pairs(order: &LinearOrder) -> Vec<(SignedIndex, SignedIndex)> {
    let e = order.entries();
    let m = e.len();
    let mut out: Vec<_> = e.windows(2).map(|p| (p[0], p[1])).collect();
    match order.level().family() {
        Family::A => {}
        Family::B | Family::C => out.push((e[m - 1], e[m - 1].flipped())),
        Family::D => out.push((e[m - 2], e[m - 1].flipped())),
    }
    out
}

fn pair_root(dim: usize, (hi, lo): (SignedIndex, SignedIndex)) -> EpsWeight {
    let mut t = vec![0i64; dim];
    t[hi.index] += 2 * hi.sign();
    t[lo.index] -= 2 * lo.sign();
    EpsWeight::from_twice(t)
}

/// Check that every order restricts to the previous one: each copy must
/// send every simple root of level `n` to a positive root of level `n+1`.
pub fn check_compatibility(system: &DiagonalSystem, borel: &BorelSystem) -> Result<(), Violation> {
    for n in 1..system.num_levels() {
        check_step(system, borel, n)?;
    }
    Ok(())
}

fn check_step(system: &DiagonalSystem, borel: &BorelSystem, n: usize) -> Result<(), Violation> {
    let step = system.step(n).expect("step in range");
    let lower = borel.order(n).expect("level in range");
    let upper = borel.order(n + 1).expect("level in range");
    let dim = lower.level().dim();
    for pair in simple_root_pairs(lower) {
        let alpha = pair_root(dim, pair);
        for c in 0..step.num_copies() {
            if !upper.is_positive(&step.copy_image(c, &alpha)) {
                return Err(Violation { level: n, copy: c + 1, higher: pair.0, lower: pair.1 });
            }
        }
    }
    Ok(())
}

/// Direct check of the composite restriction from level `n` to level `m`.
pub fn check_composite(
    system: &DiagonalSystem,
    borel: &BorelSystem,
    m: usize,
    n: usize,
) -> Result<bool> {
    let lower = borel.order(m)?;
    let upper = borel.order(n)?;
    let dim = lower.level().dim();
    let roots: Vec<EpsWeight> =
        simple_root_pairs(lower).into_iter().map(|p| pair_root(dim, p)).collect();
    for path in copy_paths(system, m, n)? {
        for alpha in &roots {
            if !upper.is_positive(&system.push_root(m, &path, alpha)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All 1-based copy sequences from level `m` to level `n`, lexicographic.
pub fn copy_paths(system: &DiagonalSystem, m: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    system.check_level(m)?;
    system.check_level(n)?;
    let mut paths = vec![Vec::new()];
    for k in m..n {
        let s = system.step(k)?.num_copies();
        paths = paths
            .into_iter()
            .flat_map(|p| {
                (1..=s).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed(o: &LinearOrder) -> Vec<i64> {
        o.entries().iter().map(|e| e.to_signed()).collect()
    }

    #[test]
    fn named_orders_match_examples() {
        let sys = DiagonalSystem::sl_two_power(3).unwrap();
        let up = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
        assert_eq!(signed(up.order(3).unwrap()), (1..=8).collect::<Vec<_>>());
        let il = BorelSystem::named(&sys, NamedBorel::Interlacing).unwrap();
        assert_eq!(signed(il.order(2).unwrap()), vec![1, 3, 2, 4]);
        assert_eq!(signed(il.order(3).unwrap()), vec![1, 5, 3, 7, 2, 6, 4, 8]);

        let sp = DiagonalSystem::sp_two_power_plus_one(3).unwrap();
        let spi = BorelSystem::named(&sp, NamedBorel::Interlacing).unwrap();
        assert_eq!(signed(spi.order(2).unwrap()), vec![1, 2, 3]);
        assert_eq!(signed(spi.order(3).unwrap()), vec![1, 2, 5, 3, 6, 4, 7]);
    }

    #[test]
    fn named_orders_are_compatible() {
        let systems = [
            DiagonalSystem::sl_two_power(5).unwrap(),
            DiagonalSystem::sp_two_power_plus_one(5).unwrap(),
            DiagonalSystem::sl_infinity(2, 5).unwrap(),
        ];
        for sys in &systems {
            for name in [NamedBorel::UpperTriangular, NamedBorel::Interlacing] {
                let b = BorelSystem::named(sys, name).unwrap();
                assert_eq!(check_compatibility(sys, &b), Ok(()), "{name:?}");
                assert!(check_composite(sys, &b, 1, sys.num_levels()).unwrap());
            }
        }
    }

    #[test]
    fn reversed_pair_is_reported() {
        let sys = DiagonalSystem::sl_two_power(2).unwrap();
        let b = BorelSystem::from_signed(&sys, &[vec![1, 2], vec![2, 1, 3, 4]]).unwrap();
        let v = check_compatibility(&sys, &b).unwrap_err();
        assert_eq!(v.level, 1);
        assert_eq!((v.higher, v.lower), (SignedIndex::pos(0), SignedIndex::pos(1)));
    }

    #[test]
    fn dual_copies_block_interlacing() {
        let p = crate::diagsys::StepPattern { natural: 1, dual: 1, zeros: 0, zeros_first: false };
        let sys = DiagonalSystem::from_pattern(Family::A, 1, p, 3).unwrap();
        assert!(matches!(
            BorelSystem::named(&sys, NamedBorel::Interlacing),
            Err(Error::Construction(_))
        ));
        let up = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
        assert_eq!(check_compatibility(&sys, &up), Ok(()));
    }
}
