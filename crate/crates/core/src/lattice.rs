//! Lattice points of `Z^d` / `Z_+^d`, centered boxes, norms, and shell counts.
//!
//! All point collections are kept sorted in lexicographic order (first
//! coordinate most significant), which fixes every enumeration order
//! downstream.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of the ambient integer lattice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn origin(d: usize) -> Self {
        LatticePoint(vec![0; d])
    }

    /// n-th standard basis vector (0-indexed axis).
    pub fn unit(d: usize, axis: usize) -> Self {
        let mut c = vec![0; d];
        c[axis] = 1;
        LatticePoint(c)
    }

    /// Max of absolute coordinates.
    pub fn sup_norm(&self) -> u64 {
        self.0.iter().map(|&c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Sum of absolute coordinates; two sites are nearest neighbours when
    /// the one-norm of their difference is 1.
    pub fn one_norm(&self) -> u64 {
        self.0.iter().map(|&c| c.unsigned_abs()).sum()
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| -a).collect())
    }
}

impl std::fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Which infinite lattice a centered box lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// Two-sided lattice `Z^d`.
    Full,
    /// One-sided lattice `Z_+^d`.
    NonNegative,
}

/// How a box was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxKind {
    Centered { n: u64, lattice: LatticeKind },
    Explicit,
}

/// A finite, duplicate-free, lexicographically sorted set of lattice points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeBox {
    points: Vec<LatticePoint>,
    dim: usize,
}

impl LatticeBox {
    /// Build from an arbitrary point list; sorts and deduplicates.
    pub fn from_points(dim: usize, mut points: Vec<LatticePoint>) -> Result<Self> {
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        points.sort();
        points.dedup();
        Ok(LatticeBox { points, dim })
    }

    pub fn empty(dim: usize) -> Self {
        LatticeBox { points: Vec::new(), dim }
    }

    /// Rectangular box with corners `lo..=hi` per axis.
    pub fn rect(lo: &[i64], hi: &[i64]) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Invalid("rect: corner dimension mismatch".into()));
        }
        for (a, b) in lo.iter().zip(hi) {
            if a > b {
                return Ok(LatticeBox::empty(lo.len()));
            }
        }
        let dim = lo.len();
        let mut points = Vec::new();
        let mut cur: Vec<i64> = lo.to_vec();
        loop {
            points.push(LatticePoint(cur.clone()));
            // odometer with the last axis fastest keeps lexicographic order
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return LatticeBox::from_points(dim, points);
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    for (k, c) in cur.iter_mut().enumerate().skip(axis + 1) {
                        *c = lo[k];
                    }
                    break;
                }
            }
        }
    }

    /// Interval `[a, b]` in `Z` (d = 1 convenience).
    pub fn interval(a: i64, b: i64) -> Self {
        LatticeBox::rect(&[a], &[b]).expect("interval corners have dimension 1")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// Position of `p` in the sorted point list.
    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn translate(&self, j: &LatticePoint) -> LatticeBox {
        // adding a constant vector preserves lexicographic order
        LatticeBox {
            points: self.points.iter().map(|p| p.add(j)).collect(),
            dim: self.dim,
        }
    }

    pub fn union(&self, other: &LatticeBox) -> LatticeBox {
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        LatticeBox::from_points(self.dim, pts).expect("same dimension")
    }

    pub fn difference(&self, other: &LatticeBox) -> LatticeBox {
        LatticeBox {
            points: self
                .points
                .iter()
                .filter(|p| !other.contains(p))
                .cloned()
                .collect(),
            dim: self.dim,
        }
    }

    pub fn intersects(&self, other: &LatticeBox) -> bool {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.points.iter().any(|p| big.contains(p))
    }

    pub fn is_subset_of(&self, other: &LatticeBox) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    /// Pointwise sums `{a + b : a in self, b in other}`.
    pub fn minkowski_sum(&self, other: &LatticeBox) -> LatticeBox {
        let mut pts = Vec::with_capacity(self.len() * other.len());
        for a in &self.points {
            for b in &other.points {
                pts.push(a.add(b));
            }
        }
        LatticeBox::from_points(self.dim, pts).expect("same dimension")
    }

    /// Pointwise differences `{a - b : a in self, b in other}`.
    pub fn minkowski_diff(&self, other: &LatticeBox) -> LatticeBox {
        let mut pts = Vec::with_capacity(self.len() * other.len());
        for a in &self.points {
            for b in &other.points {
                pts.push(a.sub(b));
            }
        }
        LatticeBox::from_points(self.dim, pts).expect("same dimension")
    }

    /// Largest sup-norm among the points (0 for the empty box).
    pub fn radius(&self) -> u64 {
        self.points.iter().map(|p| p.sup_norm()).max().unwrap_or(0)
    }

    /// True when the box is a d-dimensional rectangle with no holes.
    pub fn is_rect(&self) -> bool {
        match self.bounds() {
            None => true,
            Some((lo, hi)) => {
                let vol: i128 = lo
                    .0
                    .iter()
                    .zip(&hi.0)
                    .map(|(a, b)| (b - a + 1) as i128)
                    .product();
                vol == self.points.len() as i128
            }
        }
    }

    /// Coordinatewise min and max corners.
    pub fn bounds(&self) -> Option<(LatticePoint, LatticePoint)> {
        if self.points.is_empty() {
            return None;
        }
        let mut lo = self.points[0].0.clone();
        let mut hi = self.points[0].0.clone();
        for p in &self.points {
            for (k, &c) in p.0.iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        Some((LatticePoint(lo), LatticePoint(hi)))
    }

    /// Smallest rectangle containing the box.
    pub fn hull(&self) -> LatticeBox {
        match self.bounds() {
            None => LatticeBox::empty(self.dim),
            Some((lo, hi)) => LatticeBox::rect(&lo.0, &hi.0).expect("valid corners"),
        }
    }
}

/// The centered box of radius `n`: all points with sup-norm < `n`.
///
/// Size is `(2n-1)^d` on the full lattice and `n^d` on the one-sided
/// lattice; `n = 0` gives the empty box.
pub fn centered_box(n: u64, d: usize, kind: LatticeKind) -> LatticeBox {
    if n == 0 {
        return LatticeBox::empty(d);
    }
    let m = n as i64 - 1;
    match kind {
        LatticeKind::Full => LatticeBox::rect(&vec![-m; d], &vec![m; d]).expect("valid corners"),
        LatticeKind::NonNegative => {
            LatticeBox::rect(&vec![0; d], &vec![m; d]).expect("valid corners")
        }
    }
}

/// Closed ball of radius `n` (all points with sup-norm <= `n`), i.e. the
/// centered box of radius `n + 1`. One convention internally avoids
/// off-by-one drift.
pub fn ball(n: u64, d: usize) -> LatticeBox {
    centered_box(n + 1, d, LatticeKind::Full)
}

/// Number of points of `Z^d` at sup-norm exactly `n`:
/// `(2n+1)^d - (2n-1)^d` for `n >= 1`.
pub fn sphere_count(n: u64, d: usize) -> u64 {
    assert!(n >= 1, "sphere_count requires n >= 1");
    let outer = (2 * n as i128 + 1).pow(d as u32);
    let inner = (2 * n as i128 - 1).pow(d as u32);
    (outer - inner) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_box_sizes() {
        assert!(centered_box(0, 3, LatticeKind::Full).is_empty());
        let b = centered_box(2, 1, LatticeKind::Full);
        assert_eq!(
            b.points(),
            &[
                LatticePoint(vec![-1]),
                LatticePoint(vec![0]),
                LatticePoint(vec![1])
            ]
        );
        let b = centered_box(1, 2, LatticeKind::Full);
        assert_eq!(b.points(), &[LatticePoint(vec![0, 0])]);
        assert_eq!(centered_box(3, 2, LatticeKind::Full).len(), 25);
        assert_eq!(centered_box(3, 2, LatticeKind::NonNegative).len(), 9);
    }

    #[test]
    fn norms() {
        assert_eq!(LatticePoint(vec![0, 0]).sup_norm(), 0);
        assert_eq!(LatticePoint(vec![2, -3]).sup_norm(), 3);
        assert_eq!(LatticePoint(vec![-5]).sup_norm(), 5);
        assert_eq!(LatticePoint(vec![0, 0]).one_norm(), 0);
        assert_eq!(LatticePoint(vec![1, -1]).one_norm(), 2);
        // neighbours at one-norm distance 1
        let i = LatticePoint(vec![1, 0]);
        let j = LatticePoint(vec![0, 0]);
        assert_eq!(i.sub(&j).one_norm(), 1);
    }

    /// Brute-force count of points at sup-norm exactly n.
    fn sphere_count_brute(n: u64, d: usize) -> u64 {
        let outer = centered_box(n + 1, d, LatticeKind::Full);
        outer
            .points()
            .iter()
            .filter(|p| p.sup_norm() == n)
            .count() as u64
    }

    #[test]
    fn sphere_counts_match_enumeration() {
        assert_eq!(sphere_count(1, 1), 2);
        assert_eq!(sphere_count(1, 2), 8);
        assert_eq!(sphere_count(2, 2), 16);
        for d in 1..=3 {
            for n in 1..=6 {
                assert_eq!(sphere_count(n, d), sphere_count_brute(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn disjoint_shell_decomposition() {
        // shells 1..=n plus the origin tile the centered box of radius n+1
        for d in 1..=3 {
            for n in 1..=6u64 {
                let total: u64 = (1..=n).map(|m| sphere_count(m, d)).sum::<u64>() + 1;
                assert_eq!(
                    total,
                    centered_box(n + 1, d, LatticeKind::Full).len() as u64
                );
            }
        }
    }

    #[test]
    fn nesting() {
        for d in 1..=3 {
            for n in 0..=5u64 {
                let small = centered_box(n, d, LatticeKind::Full);
                let big = centered_box(n + 1, d, LatticeKind::Full);
                assert!(small.is_subset_of(&big));
            }
        }
    }

    #[test]
    fn sorted_and_deterministic() {
        let pts = vec![
            LatticePoint(vec![1, 0]),
            LatticePoint(vec![0, 1]),
            LatticePoint(vec![1, 0]),
            LatticePoint(vec![-1, 2]),
        ];
        let a = LatticeBox::from_points(2, pts.clone()).unwrap();
        let b = LatticeBox::from_points(2, pts.into_iter().rev().collect()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let mut sorted = a.points().to_vec();
        sorted.sort();
        assert_eq!(sorted, a.points());
    }

    #[test]
    fn ball_is_next_centered_box() {
        for d in 1..=2 {
            for n in 0..=3 {
                assert_eq!(ball(n, d), centered_box(n + 1, d, LatticeKind::Full));
            }
        }
    }

    #[test]
    fn minkowski_and_translate() {
        let a = LatticeBox::interval(0, 1);
        let w = LatticeBox::interval(-1, 1);
        assert_eq!(a.minkowski_sum(&w), LatticeBox::interval(-1, 2));
        assert_eq!(a.minkowski_diff(&w), LatticeBox::interval(-1, 2));
        assert_eq!(
            a.translate(&LatticePoint(vec![3])),
            LatticeBox::interval(3, 4)
        );
    }
}
