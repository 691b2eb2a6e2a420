//! Pair partitions of `{0, …, 2k−1}`: enumeration, crossings, and pairings
//! that respect a block structure of consecutive intervals.
//!
//! Points are 0-based. Enumeration always pairs the smallest unpaired point
//! first, so the output order is canonical and duplicates cannot occur.

use crate::error::{ChaosError, Result};

/// Largest number of points any enumeration accepts.
pub const MAX_POINTS: usize = 16;

/// A perfect matching of `{0, …, points−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    points: usize,
    /// Blocks `(a, b)` with `a < b`, sorted by `a`.
    blocks: Vec<(usize, usize)>,
}

impl Pairing {
    /// Validates and canonicalises a list of blocks.
    pub fn new(points: usize, blocks: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = vec![false; points];
        let mut out = Vec::new();
        for (a, b) in blocks {
            let (a, b) = (a.min(b), a.max(b));
            if a == b || b >= points || seen[a] || seen[b] {
                return Err(ChaosError::InvalidParameter(format!("block ({a}, {b}) invalid for {points} points")));
            }
            seen[a] = true;
            seen[b] = true;
            out.push((a, b));
        }
        if seen.iter().any(|s| !s) {
            return Err(ChaosError::InvalidParameter("pairing does not cover every point".into()));
        }
        out.sort_unstable();
        Ok(Self { points, blocks: out })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// `partner[i]` is the point paired with `i`.
    pub fn partners(&self) -> Vec<usize> {
        let mut p = vec![0; self.points];
        for &(a, b) in &self.blocks {
            p[a] = b;
            p[b] = a;
        }
        p
    }

    /// True iff no `i < j < k < l` has `{i,k}` and `{j,l}` both blocks.
    pub fn is_noncrossing(&self) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(x, &(a, b))| self.blocks[x + 1..].iter().all(|&(c, d)| !crosses((a, b), (c, d))))
    }

    /// True iff no block lies inside a single interval of `structure`.
    pub fn respects(&self, structure: &BlockStructure) -> bool {
        let labels = structure.interval_labels();
        labels.len() == self.points && self.blocks.iter().all(|&(a, b)| labels[a] != labels[b])
    }
}

fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Lengths `n₁, …, n_r` of consecutive intervals partitioning the points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    lengths: Vec<usize>,
}

impl BlockStructure {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        if lengths.contains(&0) {
            return Err(ChaosError::InvalidParameter("interval lengths must be positive".into()));
        }
        Ok(Self { lengths })
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn total(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Interval number of every point.
    pub fn interval_labels(&self) -> Vec<usize> {
        self.lengths.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat_n(i, n)).collect()
    }

    pub fn reversed(&self) -> Self {
        Self { lengths: self.lengths.iter().rev().copied().collect() }
    }
}

fn check_points(points: usize) -> Result<()> {
    if points % 2 == 1 {
        return Err(ChaosError::OddSize(points));
    }
    if points > MAX_POINTS {
        return Err(ChaosError::SizeGuard { points, guard: MAX_POINTS });
    }
    Ok(())
}

struct Walker<'a, F> {
    paired: [bool; MAX_POINTS],
    blocks: Vec<(usize, usize)>,
    labels: Option<&'a [usize]>,
    noncrossing: bool,
    points: usize,
    visit: F,
}

impl<F: FnMut(&[(usize, usize)])> Walker<'_, F> {
    fn walk(&mut self) {
        let Some(i) = (0..self.points).find(|&i| !self.paired[i]) else {
            (self.visit)(&self.blocks);
            return;
        };
        self.paired[i] = true;
        for j in i + 1..self.points {
            if self.paired[j] {
                continue;
            }
            if let Some(labels) = self.labels {
                if labels[i] == labels[j] {
                    continue;
                }
            }
            // existing blocks all start before i, so (a,b) crosses (i,j) iff i < b < j
            if self.noncrossing && self.blocks.iter().any(|&(_, b)| i < b && b < j) {
                continue;
            }
            self.paired[j] = true;
            self.blocks.push((i, j));
            self.walk();
            self.blocks.pop();
            self.paired[j] = false;
        }
        self.paired[i] = false;
    }
}

/// Calls `visit` with the blocks of every matching pairing, in canonical order.
pub fn for_each_pairing(
    points: usize,
    structure: Option<&BlockStructure>,
    noncrossing: bool,
    visit: impl FnMut(&[(usize, usize)]),
) -> Result<()> {
    check_points(points)?;
    let labels = structure.map(BlockStructure::interval_labels);
    if let Some(l) = &labels {
        if l.len() != points {
            return Err(ChaosError::ShapeMismatch(format!(
                "block structure covers {} points, expected {points}",
                l.len()
            )));
        }
    }
    let mut walker = Walker {
        paired: [false; MAX_POINTS],
        blocks: Vec::with_capacity(points / 2),
        labels: labels.as_deref(),
        noncrossing,
        points,
        visit,
    };
    walker.walk();
    Ok(())
}

/// All `(points − 1)!!` pairings of `points` points.
pub fn enumerate_pairings(points: usize) -> Result<Vec<Pairing>> {
    collect(points, None, false)
}

/// All non-crossing pairings (`Catalan(points/2)` of them).
pub fn enumerate_noncrossing(points: usize) -> Result<Vec<Pairing>> {
    collect(points, None, true)
}

/// Pairings with no block inside one interval, optionally only non-crossing ones.
pub fn enumerate_respecting(structure: &BlockStructure, noncrossing_only: bool) -> Result<Vec<Pairing>> {
    collect(structure.total(), Some(structure), noncrossing_only)
}

fn collect(points: usize, structure: Option<&BlockStructure>, noncrossing: bool) -> Result<Vec<Pairing>> {
    let mut out = Vec::new();
    for_each_pairing(points, structure, noncrossing, |blocks| {
        out.push(Pairing { points, blocks: blocks.to_vec() });
    })?;
    Ok(out)
}

/// Counts pairings without materialising them.
pub fn count_pairings(points: usize, noncrossing: bool) -> Result<u64> {
    let mut n = 0u64;
    for_each_pairing(points, None, noncrossing, |_| n += 1)?;
    Ok(n)
}
