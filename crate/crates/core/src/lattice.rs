//! Index bookkeeping for the anti-symmetric monomial basis.
//!
//! The orthonormal basis of the anti-symmetric part of `L²(𝕋²)` is
//! `ê_{a,b} = (z₁^a z₂^b − z₁^b z₂^a)/√2` with `a > b`. Only the canonical
//! orientation is stored; `ê_{b,a} = −ê_{a,b}` is handled by sign tracking.
//!
//! Indices with `b ≥ 0` span the Hardy part, indices with `b ≤ −1` span its
//! orthogonal complement. A finite section is taken over an [`IndexWindow`],
//! a rectangle in `(b, a)` space enumerated lexicographically by `(b, a)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical label `(a, b)`, `a > b`, of the basis vector `ê_{a,b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntiIndex {
    a: i64,
    b: i64,
}

impl AntiIndex {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a > b {
            Ok(Self { a, b })
        } else {
            Err(Error::NonCanonicalIndex { a, b })
        }
    }

    /// Canonical form of the (possibly unordered) pair `(i, j)`.
    ///
    /// Returns `None` when `i == j` (the anti-symmetrized monomial vanishes),
    /// otherwise the canonical index and the sign relating the two orientations.
    pub fn canonical(i: i64, j: i64) -> Option<(Self, i8)> {
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => Some((Self { a: i, b: j }, 1)),
            std::cmp::Ordering::Less => Some((Self { a: j, b: i }, -1)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn hardy(&self) -> bool {
        self.b >= 0
    }

    pub fn co_hardy(&self) -> bool {
        self.b <= -1
    }

    /// Label shift `(a, b) ↦ (a + dm, b + dn)`, re-canonicalized.
    ///
    /// This is the anti-symmetrization of `z₁^dm z₂^dn · z₁^a z₂^b`. A symmetric
    /// multiplier `z₁^m z₂^n + z₁^n z₂^m` acts on `ê_{a,b}` as
    /// `shift(m, n) + shift(n, m)`.
    pub fn shift(&self, dm: i64, dn: i64) -> Option<(Self, i8)> {
        Self::canonical(self.a + dm, self.b + dn)
    }
}

impl PartialOrd for AntiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AntiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.b, self.a).cmp(&(other.b, other.a))
    }
}

impl std::fmt::Display for AntiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Which closed subspace a window's operators live on.
///
/// Only truncation boundaries need a safety margin. The lower edge `b = 0` of
/// the Hardy lattice and the upper edge `b = −1` of the co-Hardy lattice are
/// boundaries of the space itself, so matrix products are exact up to them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lattice {
    Full,
    Hardy,
    CoHardy,
}

/// Rectangle `b_min ≤ b ≤ b_max`, `b < a ≤ a_max` of canonical indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexWindow {
    pub b_min: i64,
    pub b_max: i64,
    pub a_max: i64,
}

impl IndexWindow {
    pub fn new(b_min: i64, b_max: i64, a_max: i64) -> Result<Self> {
        if b_min <= b_max && b_max < a_max {
            Ok(Self {
                b_min,
                b_max,
                a_max,
            })
        } else {
            Err(Error::EmptyWindow {
                b_min,
                b_max,
                a_max,
            })
        }
    }

    /// `b ∈ [0, D−1]`, `a ≤ D`.
    pub fn hardy(d: i64) -> Result<Self> {
        Self::new(0, d - 1, d)
    }

    /// `b ∈ [−D, D−1]`, `a ≤ D`.
    pub fn full(d: i64) -> Result<Self> {
        Self::new(-d, d - 1, d)
    }

    /// `b ∈ [−D, −1]`, `a ≤ D`.
    pub fn co_hardy(d: i64) -> Result<Self> {
        Self::new(-d, -1, d)
    }

    pub fn len(&self) -> usize {
        (self.b_min..=self.b_max)
            .map(|b| (self.a_max - b) as usize)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, idx: &AntiIndex) -> bool {
        idx.b >= self.b_min && idx.b <= self.b_max && idx.a <= self.a_max
    }

    pub fn is_subwindow_of(&self, other: &IndexWindow) -> bool {
        self.b_min >= other.b_min && self.b_max <= other.b_max && self.a_max <= other.a_max
    }

    /// Position of `idx` in the canonical `(b, a)` order.
    pub fn position(&self, idx: &AntiIndex) -> Option<usize> {
        if !self.contains(idx) {
            return None;
        }
        // rows b_min..b contribute (a_max - b') entries each
        let k = idx.b - self.b_min;
        let before = k * self.a_max - (k * (self.b_min + idx.b - 1)) / 2;
        Some((before + idx.a - idx.b - 1) as usize)
    }

    pub fn index_at(&self, pos: usize) -> Option<AntiIndex> {
        let mut rest = pos as i64;
        for b in self.b_min..=self.b_max {
            let row = self.a_max - b;
            if rest < row {
                return Some(AntiIndex {
                    a: b + 1 + rest,
                    b,
                });
            }
            rest -= row;
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = AntiIndex> + '_ {
        (self.b_min..=self.b_max)
            .flat_map(move |b| ((b + 1)..=self.a_max).map(move |a| AntiIndex { a, b }))
    }

    /// All indices of the window in canonical order.
    pub fn enumerate(&self) -> Vec<AntiIndex> {
        self.iter().collect()
    }

    /// Shrink every boundary by `margin`.
    pub fn safe_subwindow(&self, margin: i64) -> Result<Self> {
        if margin < 0 {
            return Err(Error::OutOfRange(format!("negative margin {margin}")));
        }
        Self::new(
            self.b_min + margin,
            self.b_max - margin,
            self.a_max - margin,
        )
        .map_err(|_| Error::EmptySafeWindow { margin })
    }

    /// Shrink only the boundaries that are truncations for operators on `lattice`.
    pub fn safe_subwindow_in(&self, margin: i64, lattice: Lattice) -> Result<Self> {
        if margin < 0 {
            return Err(Error::OutOfRange(format!("negative margin {margin}")));
        }
        let (b_min, b_max) = match lattice {
            Lattice::Full => (self.b_min + margin, self.b_max - margin),
            Lattice::Hardy => (self.b_min, self.b_max.min(self.a_max - margin - 1)),
            Lattice::CoHardy => (self.b_min + margin, self.b_max.min(self.a_max - margin - 1)),
        };
        Self::new(b_min, b_max, self.a_max - margin).map_err(|_| Error::EmptySafeWindow { margin })
    }
}

impl std::fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "b:{}..{}, a<={}",
            self.b_min, self.b_max, self.a_max
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn idx(a: i64, b: i64) -> AntiIndex {
        AntiIndex::new(a, b).unwrap()
    }

    #[test]
    fn hardy_window_enumeration() {
        let w = IndexWindow::hardy(2).unwrap();
        assert_eq!(w.enumerate(), vec![idx(1, 0), idx(2, 0), idx(2, 1)]);
        assert_eq!(IndexWindow::hardy(1).unwrap().enumerate(), vec![idx(1, 0)]);
    }

    #[test]
    fn full_window_matches_brute_force() {
        // brute force: b in {-1, 0}, b < a <= 1
        let mut expected = Vec::new();
        for b in -1..=0 {
            for a in -5..=5 {
                if b < a && a <= 1 {
                    expected.push(idx(a, b));
                }
            }
        }
        expected.sort();
        assert_eq!(IndexWindow::full(1).unwrap().enumerate(), expected);
        assert_eq!(expected, vec![idx(0, -1), idx(1, -1), idx(1, 0)]);
    }

    #[test]
    fn malformed_window_is_rejected() {
        assert!(matches!(
            IndexWindow::new(3, 2, 5),
            Err(Error::EmptyWindow { .. })
        ));
        assert!(IndexWindow::new(0, 4, 4).is_err());
        assert!(IndexWindow::hardy(0).is_err());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(idx(2, 0).shift(1, 1), Some((idx(3, 1), 1)));
        assert_eq!(idx(2, 1).shift(-1, 0), None);
        assert_eq!(idx(1, 0).shift(0, 2), Some((idx(2, 1), -1)));
    }

    /// Anti-symmetric Laurent polynomial with integer coefficients, used as an
    /// independent oracle for the sign conventions of `shift`.
    fn expand_basis(i: AntiIndex) -> BTreeMap<(i64, i64), i64> {
        let mut m = BTreeMap::new();
        *m.entry((i.a(), i.b())).or_insert(0) += 1;
        *m.entry((i.b(), i.a())).or_insert(0) -= 1;
        m
    }

    fn multiply(
        p: &BTreeMap<(i64, i64), i64>,
        q: &BTreeMap<(i64, i64), i64>,
    ) -> BTreeMap<(i64, i64), i64> {
        let mut out = BTreeMap::new();
        for (&(a, b), &x) in p {
            for (&(c, d), &y) in q {
                *out.entry((a + c, b + d)).or_insert(0) += x * y;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    #[test]
    fn shift_agrees_with_polynomial_multiplication() {
        for a in -3..=3 {
            for b in -3..a {
                let e = idx(a, b);
                for m in -2..=2 {
                    for n in -2..=2 {
                        let mut mult = BTreeMap::new();
                        *mult.entry((m, n)).or_insert(0) += 1;
                        *mult.entry((n, m)).or_insert(0) += 1;
                        let brute = multiply(&mult, &expand_basis(e));
                        let mut via_shift: BTreeMap<(i64, i64), i64> = BTreeMap::new();
                        for (dm, dn) in [(m, n), (n, m)] {
                            if let Some((t, s)) = e.shift(dm, dn) {
                                for (k, v) in expand_basis(t) {
                                    *via_shift.entry(k).or_insert(0) += s as i64 * v;
                                }
                            }
                        }
                        via_shift.retain(|_, v| *v != 0);
                        assert_eq!(brute, via_shift, "e={e} m={m} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn safe_subwindow_examples() {
        let w = IndexWindow::hardy(10).unwrap().safe_subwindow(2).unwrap();
        assert_eq!(w, IndexWindow::new(2, 7, 8).unwrap());
        assert!(matches!(
            IndexWindow::hardy(3).unwrap().safe_subwindow(3),
            Err(Error::EmptySafeWindow { .. })
        ));
    }

    #[test]
    fn lattice_aware_subwindow_keeps_natural_edges() {
        let h = IndexWindow::hardy(10).unwrap();
        assert_eq!(
            h.safe_subwindow_in(3, Lattice::Hardy).unwrap(),
            IndexWindow::new(0, 6, 7).unwrap()
        );
        let c = IndexWindow::co_hardy(10).unwrap();
        assert_eq!(
            c.safe_subwindow_in(2, Lattice::CoHardy).unwrap(),
            IndexWindow::new(-8, -1, 8).unwrap()
        );
        // horizon D/2 stays nonempty on Hardy windows
        assert!(IndexWindow::hardy(24)
            .unwrap()
            .safe_subwindow_in(12, Lattice::Hardy)
            .is_ok());
    }

    #[test]
    fn window_monotonicity() {
        for d in 1..12 {
            let small = IndexWindow::hardy(d).unwrap().enumerate();
            let big: Vec<_> = IndexWindow::hardy(d + 1)
                .unwrap()
                .enumerate()
                .into_iter()
                .filter(|i| small.contains(i))
                .collect();
            assert_eq!(small, big);
        }
    }

    proptest! {
        #[test]
        fn position_round_trips(b_min in -8i64..4, h in 0i64..6, extra in 1i64..8) {
            let w = IndexWindow::new(b_min, b_min + h, b_min + h + extra).unwrap();
            let all = w.enumerate();
            prop_assert_eq!(all.len(), w.len());
            for (k, i) in all.iter().enumerate() {
                prop_assert_eq!(w.position(i), Some(k));
                prop_assert_eq!(w.index_at(k), Some(*i));
            }
            prop_assert_eq!(w.index_at(all.len()), None);
        }

        #[test]
        fn shift_inverse(a in -20i64..20, gap in 1i64..10, m in -5i64..5, n in -5i64..5) {
            let i = idx(a, a - gap);
            if let Some((j, s1)) = i.shift(m, n) {
                if let Some((k, s2)) = j.shift(if s1 > 0 { -m } else { -n }, if s1 > 0 { -n } else { -m }) {
                    prop_assert_eq!(k, i);
                    prop_assert_eq!(s1 * s2, 1);
                }
            }
        }
    }
}
