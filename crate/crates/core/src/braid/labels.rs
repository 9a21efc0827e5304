//! Bondal–Thomsen labels on the strata of `φ_n` and how the generators move them.
//!
//! The top strata are the `n` faces of `φ_n`; face `p` starts out labelled `O(−p)`. Between
//! faces `p − 1` and `p` sits the middle stratum `p` (the `p`-th segment). Braiding the two faces
//! on either side of a segment records a cone `M_i` there, where `i` is read off the labels: `τ_i`
//! acts on the segment between the faces labelled `O(−i+1)` and `O(−i)`. This makes the action
//! commute with `ρ`, which tensors every label by `O(−1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BraidError, BraidWord, Generator, Letter};
use crate::equivariant::{AlgebraError, LocalModel, WeightedRing};

/// The cone `M_i = cone(O(−i−n) → O(−i−1) ⊕ O(−i+1))`, quasi-isomorphic to `I_0(−i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConeRecord {
    /// `i mod n`, in `0..n`.
    pub index: i64,
}

impl ConeRecord {
    /// The twist `−i` of the ideal sheaf `I_0(−i)` the cone resolves.
    pub fn ideal_sheaf_twist(&self) -> i64 {
        -self.index
    }

    /// The explicit complex, with its map to `O(−i)`.
    pub fn local_model(&self, ring: &WeightedRing) -> Result<LocalModel, AlgebraError> {
        LocalModel::new(ring, self.index)
    }
}

/// Labels of the strata of a `φ_n`-type graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BTLabeling {
    pub n: i64,
    /// Face `p` is labelled `O(top[p])`, twists normalized to `−(n−1)..=0`.
    pub top: Vec<i64>,
    /// Cone record on segment `p`, if any.
    pub middle: Vec<Option<ConeRecord>>,
}

fn twist(n: i64, c: i64) -> i64 {
    let r = c.rem_euclid(n);
    if r == 0 {
        0
    } else {
        r - n
    }
}

fn line_name(c: i64) -> String {
    if c == 0 {
        "O".to_string()
    } else {
        format!("O({c})")
    }
}

/// A label-level move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BTMove {
    /// `τ_i`, with `i` read modulo `n` (so `τ_n = τ_0` is the cyclic translate).
    Tau(i64),
    Rho,
    RhoInverse,
}

impl From<Letter> for BTMove {
    fn from(l: Letter) -> Self {
        match (l.generator, l.inverse) {
            // τ is an involution on labels.
            (Generator::Tau(i), _) => BTMove::Tau(i),
            (Generator::Rho, false) => BTMove::Rho,
            (Generator::Rho, true) => BTMove::RhoInverse,
        }
    }
}

impl BTLabeling {
    /// `O, O(−1), …, O(−(n−1))` on the faces, no cone records.
    pub fn base(n: i64) -> Result<Self, BraidError> {
        if n < 2 {
            return Err(BraidError::InvalidStrandCount(n));
        }
        Ok(BTLabeling { n, top: (0..n).map(|p| twist(n, -p)).collect(), middle: vec![None; n as usize] })
    }

    /// Face labels must decrease by one from face to face (cyclically); records in range.
    pub fn validate(&self) -> Result<(), BraidError> {
        let n = self.n;
        if n < 2 {
            return Err(BraidError::InvalidStrandCount(n));
        }
        if self.top.len() != n as usize || self.middle.len() != n as usize {
            return Err(BraidError::InvalidLabeling(format!("expected {n} face and {n} segment labels")));
        }
        for p in 0..n as usize {
            if self.top[p] != twist(n, self.top[p]) {
                return Err(BraidError::InvalidLabeling(format!("face {p}: twist {} is not normalized", self.top[p])));
            }
            let next = self.top[(p + 1) % n as usize];
            if next != twist(n, self.top[p] - 1) {
                return Err(BraidError::InvalidLabeling(format!("faces {p} and {}: {} then {}", (p + 1) % n as usize, line_name(self.top[p]), line_name(next))));
            }
            if let Some(c) = self.middle[p] {
                if !(0..n).contains(&c.index) {
                    return Err(BraidError::InvalidLabeling(format!("segment {p}: cone index {} out of range", c.index)));
                }
            }
        }
        Ok(())
    }

    /// The segment `τ_i` acts on: between the faces labelled `O(−i+1)` and `O(−i)`.
    pub fn segment_of(&self, i: i64) -> usize {
        let target = twist(self.n, -i);
        self.top.iter().position(|&c| c == target).expect("validated labeling contains every twist")
    }

    pub fn apply(&self, m: BTMove) -> Result<BTLabeling, BraidError> {
        self.validate()?;
        let n = self.n;
        let mut out = self.clone();
        let shift = |d: i64, out: &mut BTLabeling| {
            for c in &mut out.top {
                *c = twist(n, *c + d);
            }
            for r in out.middle.iter_mut().flatten() {
                r.index = (r.index - d).rem_euclid(n);
            }
        };
        match m {
            BTMove::Rho => shift(-1, &mut out),
            BTMove::RhoInverse => shift(1, &mut out),
            BTMove::Tau(i) => {
                let i = i.rem_euclid(n);
                let p = self.segment_of(i);
                out.middle[p] = match self.middle[p] {
                    None => Some(ConeRecord { index: i }),
                    Some(c) if c.index == i => None,
                    Some(c) => return Err(BraidError::UnsupportedStratum { stratum: p, present: c.index, requested: i }),
                };
            }
        }
        Ok(out)
    }

    /// Human-readable labels: faces then segments, e.g. `["O", "O(-1)", …, "M_1", …]`.
    pub fn describe(&self) -> (Vec<String>, Vec<Option<String>>) {
        let faces = self.top.iter().map(|&c| line_name(c)).collect();
        let segments = self.middle.iter().map(|m| m.map(|c| format!("M_{}", c.index))).collect();
        (faces, segments)
    }
}

impl fmt::Display for BTLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (faces, segments) = self.describe();
        for (p, (face, seg)) in faces.iter().zip(segments).enumerate() {
            if p > 0 {
                write!(f, " ")?;
            }
            if let Some(s) = seg {
                write!(f, "[{s}] ")?;
            }
            write!(f, "{face}")?;
        }
        Ok(())
    }
}

/// Applies one move.
pub fn bt_relabel(labeling: &BTLabeling, m: BTMove) -> Result<BTLabeling, BraidError> {
    labeling.apply(m)
}

/// Applies the letters of a word in order.
pub fn bt_relabel_word(labeling: &BTLabeling, word: &BraidWord) -> Result<BTLabeling, BraidError> {
    if word.n() != labeling.n {
        return Err(BraidError::InvalidLabeling(format!("word on {} strands, labeling for n = {}", word.n(), labeling.n)));
    }
    word.letters().iter().try_fold(labeling.clone(), |acc, &l| acc.apply(l.into()))
}
