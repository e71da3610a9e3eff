use num_rational::Rational64;
use serde::Serialize;

use crate::diagsys::DiagonalSystem;
use crate::error::{invalid, Result};
use crate::rootdata::{pairing, EpsWeight};

use super::WeightSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub root: EpsWeight,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub label: Rational64,
    /// Index of the parent in the previous level, with the 1-based copy used.
    pub parent: Option<(usize, usize)>,
}

/// Successors of a root `α` of level `m`: the nodes of level `n` are the
/// images of `α` along every copy sequence from `m` to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuccessorTree {
    pub base_level: usize,
    pub levels: Vec<Vec<TreeNode>>,
}

impl SuccessorTree {
    pub fn last_level(&self) -> usize {
        self.base_level + self.levels.len() - 1
    }

    /// Nodes of level `n`.
    pub fn nodes(&self, n: usize) -> Option<&[TreeNode]> {
        n.checked_sub(self.base_level).and_then(|k| self.levels.get(k)).map(|v| v.as_slice())
    }

    pub fn label_sums(&self) -> Vec<Rational64> {
        self.levels.iter().map(|l| l.iter().map(|n| n.label).sum()).collect()
    }

    /// Node index at each level reached by following 1-based copy choices.
    fn path_indices(&self, path: &[usize]) -> Option<Vec<usize>> {
        let mut idx = vec![0];
        for (k, &c) in path.iter().enumerate() {
            let next = self.levels.get(k + 1)?;
            let i = next.iter().position(|n| n.parent == Some((idx[k], c)))?;
            idx.push(i);
        }
        Some(idx)
    }
}

pub fn successor_tree(
    system: &DiagonalSystem,
    weights: &WeightSystem,
    alpha: &EpsWeight,
    m: usize,
    to_level: usize,
) -> Result<SuccessorTree> {
    let level = system.level(m)?;
    if !level.roots().contains(alpha) {
        return invalid(format!("{alpha} is not a root of level {m}"));
    }
    if to_level < m || to_level > weights.num_levels() {
        return invalid(format!(
            "tree levels {m}..={to_level} not covered by a weight prefix of length {}",
            weights.num_levels()
        ));
    }
    let label = |n: usize, a: &EpsWeight| -> Result<Rational64> { pairing(weights.at(n)?, a) };
    let mut levels = vec![vec![TreeNode { root: alpha.clone(), label: label(m, alpha)?, parent: None }]];
    for n in m..to_level {
        let step = system.step(n)?;
        let mut next = Vec::new();
        for (i, node) in levels.last().expect("nonempty").iter().enumerate() {
            for c in 0..step.num_copies() {
                let root = step.copy_image(c, &node.root);
                let l = label(n + 1, &root)?;
                next.push(TreeNode { root, label: l, parent: Some((i, c + 1)) });
            }
        }
        levels.push(next);
    }
    Ok(SuccessorTree { base_level: m, levels })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stabilization {
    /// From `level` on the path label is constant and every sibling label is zero.
    At { level: usize, label: i64 },
    NotWithinHorizon,
}

/// Stabilization of labels along the path given by 1-based copy choices
/// from the base of the tree to its last level.
pub fn labels_stabilize(tree: &SuccessorTree, path: &[usize]) -> Result<Stabilization> {
    if path.len() + 1 != tree.levels.len() {
        return invalid(format!(
            "path of length {} does not span the {} tree levels",
            path.len(),
            tree.levels.len()
        ));
    }
    let Some(idx) = tree.path_indices(path) else {
        return invalid("path leaves the tree");
    };
    // smallest k such that every step after k has zero siblings
    let mut start = tree.levels.len() - 1;
    while start > 0 {
        let k = start;
        let parent = idx[k - 1];
        let zero_siblings = tree.levels[k]
            .iter()
            .enumerate()
            .filter(|(i, n)| *i != idx[k] && n.parent.map(|p| p.0) == Some(parent))
            .all(|(_, n)| n.label == Rational64::from_integer(0));
        if !zero_siblings {
            break;
        }
        start -= 1;
    }
    if start == tree.levels.len() - 1 {
        return Ok(Stabilization::NotWithinHorizon);
    }
    let l = tree.levels[start][idx[start]].label;
    Ok(Stabilization::At { level: tree.base_level + start, label: l.to_integer() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::{BorelSystem, NamedBorel};
    use crate::weights::from_fundamental;

    fn first_plus_last(n: usize) -> (DiagonalSystem, WeightSystem) {
        let sys = DiagonalSystem::sl_two_power(n).unwrap();
        let b = BorelSystem::named(&sys, NamedBorel::UpperTriangular).unwrap();
        let ch = b.chamber(n).unwrap();
        let r = ch.level().rank();
        let mut c = vec![0; r];
        c[0] = 1;
        c[r - 1] += 1;
        let top = from_fundamental(&c, ch).unwrap();
        let ws = WeightSystem::from_top(&sys, n, top).unwrap();
        (sys, ws)
    }

    #[test]
    fn zero_weight_has_zero_labels() {
        let sys = DiagonalSystem::sl_two_power(4).unwrap();
        let ws = WeightSystem::zero(&sys, 4).unwrap();
        let t = successor_tree(&sys, &ws, &EpsWeight::from_ints(&[1, -1]), 1, 4).unwrap();
        assert!(t.levels.iter().flatten().all(|n| n.label == Rational64::from_integer(0)));
        assert_eq!(t.levels[3].len(), 8);
    }

    #[test]
    fn labels_are_conserved() {
        let (sys, ws) = first_plus_last(5);
        let alpha = EpsWeight::from_ints(&[1, -1]);
        let t = successor_tree(&sys, &ws, &alpha, 1, 5).unwrap();
        let sums = t.label_sums();
        assert!(sums.iter().all(|s| *s == pairing(ws.at(1).unwrap(), &alpha).unwrap()));
        assert_eq!(sums[0], Rational64::from_integer(2));
    }

    #[test]
    fn stabilization_along_first_copy() {
        let (sys, ws) = first_plus_last(5);
        let t = successor_tree(&sys, &ws, &EpsWeight::from_ints(&[1, -1]), 1, 5).unwrap();
        // the ω^1 part follows copy 1, the ω^{last} part follows the last copy
        assert_eq!(labels_stabilize(&t, &[1, 1, 1, 1]).unwrap(), Stabilization::At { level: 2, label: 1 });
        assert_eq!(labels_stabilize(&t, &[2, 2, 2, 2]).unwrap(), Stabilization::At { level: 2, label: 1 });
        assert_eq!(labels_stabilize(&t, &[1, 2, 1, 1]).unwrap(), Stabilization::At { level: 3, label: 0 });
    }
}
