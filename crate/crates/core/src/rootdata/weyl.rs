use std::fmt;

use crate::error::{invalid, Result};

use super::order::LinearOrder;
use super::weight::{pairing, EpsWeight, Family, Level, SignedIndex};

/// A Weyl group element as a signed permutation of the ε's:
/// `w(ε^i) = ±ε^{images[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElt {
    level: Level,
    images: Vec<SignedIndex>,
}

impl WeylElt {
    pub fn identity(level: Level) -> Self {
        WeylElt { level, images: (0..level.dim()).map(SignedIndex::pos).collect() }
    }

    pub fn new(level: Level, images: Vec<SignedIndex>) -> Result<Self> {
        let m = level.dim();
        if images.len() != m {
            return invalid(format!("Weyl element for {level} needs {m} images"));
        }
        let mut seen = vec![false; m];
        for im in &images {
            if im.index >= m || seen[im.index] {
                return invalid(format!("images do not form a signed permutation of 1..{m}"));
            }
            seen[im.index] = true;
        }
        let w = WeylElt { level, images };
        match level.family() {
            Family::A if w.sign_flips() > 0 => invalid("type A Weyl elements have no sign changes"),
            Family::D if w.sign_flips() % 2 == 1 => {
                invalid("type D Weyl elements have an even number of sign changes")
            }
            _ => Ok(w),
        }
    }

    /// One-line signed notation, 1-based: `"2 1 3"`, `"-1 2"`.
    pub fn from_one_line(level: Level, text: &str) -> Result<Self> {
        let mut images = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            let v: i64 = tok
                .parse()
                .map_err(|_| crate::Error::Validation(format!("bad entry `{tok}` in `{text}`")))?;
            images.push(SignedIndex::from_signed(v)?);
        }
        Self::new(level, images)
    }

    pub fn transposition(level: Level, i: usize, j: usize) -> Result<Self> {
        let mut images: Vec<_> = (0..level.dim()).map(SignedIndex::pos).collect();
        if i >= images.len() || j >= images.len() {
            return invalid("transposition index out of range");
        }
        images.swap(i, j);
        Self::new(level, images)
    }

    /// The reflection `s_α`, read off from its action on the ε basis.
    pub fn reflection(level: Level, alpha: &EpsWeight) -> Result<Self> {
        let m = level.dim();
        level.check_weight(alpha)?;
        if !level.roots().contains(alpha) {
            return invalid(format!("{alpha} is not a root of {level}"));
        }
        let mut images = Vec::with_capacity(m);
        for i in 0..m {
            let e = EpsWeight::unit(m, i);
            let c = pairing(&e, alpha)?;
            if !c.is_integer() {
                return invalid(format!("{alpha} is not a root of {level}"));
            }
            let img = &e - &alpha.scaled(c.to_integer());
            let nz: Vec<usize> = (0..m).filter(|&k| img.twice()[k] != 0).collect();
            if nz.len() != 1 || img.twice()[nz[0]].abs() != 2 {
                return invalid(format!("{alpha} is not a root of {level}"));
            }
            images.push(SignedIndex { index: nz[0], negative: img.twice()[nz[0]] < 0 });
        }
        Self::new(level, images)
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn images(&self) -> &[SignedIndex] {
        &self.images
    }

    pub fn image(&self, i: usize) -> SignedIndex {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, im)| im.index == i && !im.negative)
    }

    pub fn sign_flips(&self) -> usize {
        self.images.iter().filter(|im| im.negative).count()
    }

    /// Indices not fixed by `w`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.images.len())
            .filter(|&i| self.images[i] != SignedIndex::pos(i))
            .collect()
    }

    pub fn apply(&self, w: &EpsWeight) -> EpsWeight {
        assert_eq!(w.dim(), self.images.len(), "weight/Weyl dimension mismatch");
        let mut out = vec![0; w.dim()];
        for (i, im) in self.images.iter().enumerate() {
            out[im.index] = w.twice()[i] * im.sign();
        }
        EpsWeight::from_twice(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElt) -> WeylElt {
        assert_eq!(self.images.len(), other.images.len(), "Weyl dimension mismatch");
        let images = other
            .images
            .iter()
            .map(|o| self.images[o.index].times(o.negative))
            .collect();
        WeylElt { level: self.level, images }
    }

    pub fn inverse(&self) -> WeylElt {
        let mut images = vec![SignedIndex::pos(0); self.images.len()];
        for (i, im) in self.images.iter().enumerate() {
            images[im.index] = SignedIndex { index: i, negative: im.negative };
        }
        WeylElt { level: self.level, images }
    }

    /// The conjugate acting on order positions, where the Borel is standard.
    pub fn to_positions(&self, order: &LinearOrder) -> Vec<SignedIndex> {
        order
            .entries()
            .iter()
            .map(|e| {
                let im = self.images[e.index];
                let (pos, neg) = order.slot(im.index);
                SignedIndex { index: pos, negative: e.negative ^ im.negative ^ neg }
            })
            .collect()
    }

    pub fn from_positions(level: Level, order: &LinearOrder, u: &[SignedIndex]) -> Result<Self> {
        let entries = order.entries();
        let mut images = vec![SignedIndex::pos(0); u.len()];
        for (a, ua) in u.iter().enumerate() {
            let target = entries[ua.index];
            images[entries[a].index] = SignedIndex {
                index: target.index,
                negative: entries[a].negative ^ ua.negative ^ target.negative,
            };
        }
        Self::new(level, images)
    }

    pub fn one_line(&self) -> String {
        self.images.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for WeylElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.one_line())
    }
}
