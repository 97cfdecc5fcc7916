//! Exact multi-dimensional dynamic time warping.
//!
//! The cost of an alignment path is the square root of the sum of squared
//! Euclidean ground distances over its index pairs. [`dtw`] finds the
//! minimum with the usual three-neighbour recurrence over cumulative squared
//! costs; [`brute_force_dtw`] enumerates every admissible path and exists to
//! cross-check it.
//!
//! Indices in this module are 0-based: a path for series of lengths `m` and
//! `n` runs from `(0, 0)` to `(m - 1, n - 1)`.

use crate::error::{Error, Result};
use crate::series::MultiSeries;

/// Longest series [`brute_force_dtw`] accepts on either side.
pub const MAX_ENUMERATION_LEN: usize = 8;

/// Euclidean distance between two observation vectors.
pub fn ground_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(col) = a.iter().chain(b).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: col / a.len(),
            col: col % a.len(),
        });
    }
    Ok(squared_distance(a, b).sqrt())
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Ordered index pairs mapping one series onto another.
///
/// A path is admissible for lengths `(m, n)` when it starts at `(0, 0)`, ends
/// at `(m - 1, n - 1)`, and every step advances `i`, `j`, or both by exactly
/// one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentPath {
    pairs: Vec<(usize, usize)>,
}

impl AlignmentPath {
    /// Wraps `pairs` after checking admissibility for lengths `(m, n)`.
    pub fn new(pairs: Vec<(usize, usize)>, m: usize, n: usize) -> Result<Self> {
        let path = Self { pairs };
        path.check_admissible(m, n)?;
        Ok(path)
    }

    /// The diagonal path `(0,0), (1,1), ..., (len-1, len-1)`.
    pub fn diagonal(len: usize) -> Self {
        Self {
            pairs: (0..len).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Same path with the roles of the two series swapped.
    pub fn transposed(&self) -> Self {
        Self {
            pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    pub fn check_admissible(&self, m: usize, n: usize) -> Result<()> {
        if m == 0 || n == 0 {
            return Err(Error::EmptySeries);
        }
        let (first, last) = match (self.pairs.first(), self.pairs.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::InvalidPath("path is empty".into())),
        };
        if first != (0, 0) {
            return Err(Error::InvalidPath(format!("starts at {first:?}, not (0, 0)")));
        }
        if last != (m - 1, n - 1) {
            return Err(Error::InvalidPath(format!(
                "ends at {last:?}, not ({}, {})",
                m - 1,
                n - 1
            )));
        }
        for (p, w) in self.pairs.windows(2).enumerate() {
            let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            if !matches!((di, dj), (1, 0) | (0, 1) | (1, 1)) {
                return Err(Error::InvalidPath(format!(
                    "step {} goes from {:?} to {:?}",
                    p + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        let len = self.pairs.len();
        if len < m.max(n) || len > m + n - 1 {
            return Err(Error::InvalidPath(format!(
                "length {len} outside [{}, {}]",
                m.max(n),
                m + n - 1
            )));
        }
        Ok(())
    }

    /// Sum of squared ground distances along the path, accumulated in path order.
    pub fn squared_cost(&self, x: &MultiSeries, y: &MultiSeries) -> f64 {
        self.pairs
            .iter()
            .fold(0.0, |acc, &(i, j)| acc + squared_distance(x.row(i), y.row(j)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtwResult {
    /// Minimum over admissible paths of the summed squared ground distances.
    pub squared_cost: f64,
    /// `squared_cost.sqrt()`.
    pub distance: f64,
    pub path: AlignmentPath,
}

fn check_pair(x: &MultiSeries, y: &MultiSeries) -> Result<()> {
    if x.dims() != y.dims() {
        return Err(Error::DimensionMismatch {
            left: x.dims(),
            right: y.dims(),
        });
    }
    Ok(())
}

/// Optimal DTW alignment of `x` onto `y`.
///
/// Runs in O(m·n·k) time and O(m·n) memory. On ties the backtrack prefers the
/// diagonal predecessor, then the one that advanced `i`, then the one that
/// advanced `j`.
pub fn dtw(x: &MultiSeries, y: &MultiSeries) -> Result<DtwResult> {
    check_pair(x, y)?;
    let (m, n) = (x.len(), y.len());

    let mut acc = vec![0.0f64; m * n];
    let at = |i: usize, j: usize| i * n + j;
    for i in 0..m {
        let xi = x.row(i);
        for j in 0..n {
            let cost = squared_distance(xi, y.row(j));
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => acc[at(0, j - 1)],
                (_, 0) => acc[at(i - 1, 0)],
                _ => acc[at(i - 1, j - 1)].min(acc[at(i - 1, j)]).min(acc[at(i, j - 1)]),
            };
            acc[at(i, j)] = cost + best;
        }
    }

    let mut pairs = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (m - 1, n - 1);
    pairs.push((i, j));
    while (i, j) != (0, 0) {
        (i, j) = match (i, j) {
            (0, _) => (0, j - 1),
            (_, 0) => (i - 1, 0),
            _ => {
                let diag = acc[at(i - 1, j - 1)];
                let up = acc[at(i - 1, j)];
                let left = acc[at(i, j - 1)];
                if diag <= up && diag <= left {
                    (i - 1, j - 1)
                } else if up <= left {
                    (i - 1, j)
                } else {
                    (i, j - 1)
                }
            }
        };
        pairs.push((i, j));
    }
    pairs.reverse();

    let squared_cost = acc[at(m - 1, n - 1)];
    Ok(DtwResult {
        squared_cost,
        distance: squared_cost.sqrt(),
        path: AlignmentPath { pairs },
    })
}

/// Exhaustive DTW: evaluates every admissible path and keeps the cheapest.
///
/// Exponential in the series lengths; both lengths must be at most
/// [`MAX_ENUMERATION_LEN`]. Intended as a test oracle for [`dtw`].
pub fn brute_force_dtw(x: &MultiSeries, y: &MultiSeries) -> Result<DtwResult> {
    check_pair(x, y)?;
    let (m, n) = (x.len(), y.len());
    if m > MAX_ENUMERATION_LEN || n > MAX_ENUMERATION_LEN {
        return Err(Error::TooLongForEnumeration {
            len_x: m,
            len_y: n,
            max: MAX_ENUMERATION_LEN,
        });
    }

    struct Search<'a> {
        x: &'a MultiSeries,
        y: &'a MultiSeries,
        stack: Vec<(usize, usize)>,
        best: Option<(f64, Vec<(usize, usize)>)>,
    }

    impl Search<'_> {
        fn walk(&mut self, i: usize, j: usize) {
            self.stack.push((i, j));
            if (i, j) == (self.x.len() - 1, self.y.len() - 1) {
                let cost = self
                    .stack
                    .iter()
                    .fold(0.0, |acc, &(a, b)| acc + squared_distance(self.x.row(a), self.y.row(b)));
                if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    self.best = Some((cost, self.stack.clone()));
                }
            } else {
                for (di, dj) in [(1, 1), (1, 0), (0, 1)] {
                    let (ni, nj) = (i + di, j + dj);
                    if ni < self.x.len() && nj < self.y.len() {
                        self.walk(ni, nj);
                    }
                }
            }
            self.stack.pop();
        }
    }

    let mut search = Search {
        x,
        y,
        stack: Vec::new(),
        best: None,
    };
    search.walk(0, 0);
    let (squared_cost, pairs) = search.best.expect("at least one admissible path exists");
    Ok(DtwResult {
        squared_cost,
        distance: squared_cost.sqrt(),
        path: AlignmentPath { pairs },
    })
}

/// Resamples `test` onto the reference timeline of a DTW path.
///
/// `path` must be admissible for `(ref_len, test.len())`, with `i` indexing
/// the reference. Row `i` of the result is the mean of every test row `j`
/// with `(i, j)` on the path, so the output always has exactly `ref_len`
/// rows.
pub fn project_onto_reference(path: &AlignmentPath, test: &MultiSeries, ref_len: usize) -> Result<MultiSeries> {
    path.check_admissible(ref_len, test.len())?;
    let dims = test.dims();
    let mut sums = vec![0.0f64; ref_len * dims];
    let mut counts = vec![0usize; ref_len];
    for &(i, j) in path.pairs() {
        counts[i] += 1;
        for (s, v) in sums[i * dims..(i + 1) * dims].iter_mut().zip(test.row(j)) {
            *s += v;
        }
    }
    for (row, &count) in sums.chunks_exact_mut(dims).zip(&counts) {
        // every reference index occurs on an admissible path
        let c = count as f64;
        row.iter_mut().for_each(|v| *v /= c);
    }
    MultiSeries::new(sums, ref_len, dims)
}
