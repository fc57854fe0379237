//! Down-closed configurations of a Boolean hypercube `HC^(d)`.
//!
//! Cell `c` of `HC^(d)` is the integer whose bit `i` is the offset along
//! the `i`-th hypercube axis. A configuration is a bit mask over cells; it is
//! valid when it is down-closed under the bitwise order.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{check_axes, make_hypercube, validate_partition, LatticeBox, Partition};

pub const MAX_SUBDIM: usize = 10;
pub const MAX_EXHAUSTIVE_SUBDIM: usize = 6;

const WORDS: usize = (1 << MAX_SUBDIM) / 64;

/// Bit set over the cells of a hypercube of dimension at most
/// [`MAX_SUBDIM`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellMask([u64; WORDS]);

impl CellMask {
    pub const EMPTY: Self = Self([0; WORDS]);

    pub fn full(d: usize) -> Self {
        let mut m = Self::EMPTY;
        for c in 0..1usize << d {
            m.insert(c);
        }
        m
    }

    pub fn from_u64(bits: u64) -> Self {
        let mut m = Self::EMPTY;
        m.0[0] = bits;
        m
    }

    /// The low 64 cells; exact for `d <= 6`.
    pub fn low_word(&self) -> u64 {
        self.0[0]
    }

    #[inline]
    pub fn contains(&self, cell: usize) -> bool {
        self.0[cell >> 6] >> (cell & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, cell: usize) {
        self.0[cell >> 6] |= 1 << (cell & 63);
    }

    #[inline]
    pub fn remove(&mut self, cell: usize) {
        self.0[cell >> 6] &= !(1 << (cell & 63));
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

impl fmt::Debug for CellMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.cells()).finish()
    }
}

/// True when every present cell has all of its lower covers present.
pub fn is_down_closed(d: usize, mask: &CellMask) -> bool {
    mask.cells()
        .all(|c| (0..d).all(|i| c >> i & 1 == 0 || mask.contains(c & !(1 << i))))
}

/// A down-closed configuration placed in the ambient lattice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypercubeConfig {
    subdim: usize,
    mask: CellMask,
    axes: Vec<usize>,
    origin: LatticeBox,
}

impl HypercubeConfig {
    pub fn new(mask: CellMask, axes: Vec<usize>, origin: LatticeBox) -> Result<Self> {
        let subdim = axes.len();
        if !(1..=MAX_SUBDIM).contains(&subdim) {
            return Err(Error::SubdimOutOfRange(subdim));
        }
        check_axes(&axes, origin.dimension())?;
        if !mask.is_subset(&CellMask::full(subdim)) || !is_down_closed(subdim, &mask) {
            return Err(Error::Input(format!(
                "mask {mask:?} is not a down-set of HC^({subdim})"
            )));
        }
        Ok(Self {
            subdim,
            mask,
            axes,
            origin,
        })
    }

    /// Configuration at the lattice origin spanned by axes `0..d` of an
    /// `n`-dimensional lattice.
    pub fn at_origin(n: usize, d: usize, mask: CellMask) -> Result<Self> {
        Self::new(mask, (0..d).collect(), LatticeBox::origin(n))
    }

    pub fn subdim(&self) -> usize {
        self.subdim
    }

    pub fn mask(&self) -> &CellMask {
        &self.mask
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn origin(&self) -> &LatticeBox {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    /// The top cell `sum e_{axes[i]}` as a lattice box.
    pub fn top_box(&self) -> LatticeBox {
        self.axes.iter().fold(self.origin.clone(), |b, &a| b.raised(a))
    }

    pub fn boxes(&self) -> Vec<LatticeBox> {
        let cube = make_hypercube(&self.origin, &self.axes).expect("axes checked");
        self.mask.cells().map(|c| cube[c].clone()).collect()
    }

    /// The configuration as a partition; fails unless the origin is the
    /// lattice origin (otherwise the boxes are not down-closed).
    pub fn to_partition(&self) -> Result<Partition> {
        validate_partition(self.origin.dimension(), self.boxes())
    }
}

/// The closed-form description of G-membership for a hypercube at the
/// lattice origin, targeting the top cell: `{HC - top, HC}` when `d < n`,
/// and additionally `{empty, {origin}}` when `d = n`.
pub fn hypercube_g_characterization(config: &HypercubeConfig, n: usize) -> bool {
    let d = config.subdim();
    let full = CellMask::full(d);
    let mut below_top = full;
    below_top.remove((1 << d) - 1);
    let mask = config.mask();
    if *mask == full || *mask == below_top {
        return true;
    }
    d == n && (mask.is_empty() || *mask == CellMask::from_u64(1))
}

/// Depth-first down-set enumerator over the cells of `HC^(d)`, `d <= 6`.
struct DownsetSearch {
    order: Vec<u8>,
    lower: Vec<u64>,
}

impl DownsetSearch {
    fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::SubdimOutOfRange(d));
        }
        if d > MAX_EXHAUSTIVE_SUBDIM {
            return Err(Error::Intractable(d));
        }
        let cells = 1usize << d;
        let mut order: Vec<u8> = (0..cells as u8).collect();
        order.sort_by_key(|&c| (c.count_ones(), c));
        let lower = (0..cells)
            .map(|c| {
                (0..d)
                    .filter(|i| c >> i & 1 == 1)
                    .fold(0u64, |m, i| m | 1 << (c & !(1 << i)))
            })
            .collect();
        Ok(Self { order, lower })
    }

    fn dfs<F: FnMut(u64)>(&self, pos: usize, mask: u64, visit: &mut F) {
        if pos == self.order.len() {
            visit(mask);
            return;
        }
        let cell = self.order[pos] as usize;
        self.dfs(pos + 1, mask, visit);
        if self.lower[cell] & !mask == 0 {
            self.dfs(pos + 1, mask | 1 << cell, visit);
        }
    }

    /// Partial assignments of the first `depth` cells, in visit order.
    fn frontier(&self, depth: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0u64)];
        while let Some((pos, mask)) = stack.pop() {
            if pos == depth {
                out.push(mask);
                continue;
            }
            let cell = self.order[pos] as usize;
            if self.lower[cell] & !mask == 0 {
                stack.push((pos + 1, mask | 1 << cell));
            }
            stack.push((pos + 1, mask));
        }
        out
    }

    /// Split below every cell of popcount at most two.
    fn split_depth(&self) -> usize {
        self.order
            .iter()
            .take_while(|c| c.count_ones() <= 2)
            .count()
            .min(self.order.len())
    }
}

/// Visits every down-set of `HC^(d)` once, in a fixed order, as a 64-bit
/// cell mask. Returns the number visited.
pub fn enumerate_downsets<F: FnMut(u64)>(d: usize, mut visitor: F) -> Result<u64> {
    let search = DownsetSearch::new(d)?;
    let mut count = 0u64;
    search.dfs(0, 0, &mut |m| {
        count += 1;
        visitor(m)
    });
    Ok(count)
}

/// Parallel fold over all down-sets of `HC^(d)`.
///
/// The search tree is cut into subtrees at a fixed depth; each subtree is
/// folded into its own accumulator and the accumulators are merged in
/// subtree order, so the result does not depend on `jobs`.
pub fn fold_downsets<A, I, F, M>(d: usize, jobs: usize, identity: I, fold: F, mut merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, u64) + Sync,
    M: FnMut(&mut A, A),
{
    let search = DownsetSearch::new(d)?;
    let depth = search.split_depth();
    let tasks = search.frontier(depth);
    let run = |&prefix: &u64| {
        let mut acc = identity();
        search.dfs(depth, prefix, &mut |m| fold(&mut acc, m));
        acc
    };
    let parts: Vec<A> = if jobs <= 1 {
        tasks.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };
    let mut total = identity();
    for part in parts {
        merge(&mut total, part);
    }
    Ok(total)
}

pub fn count_downsets(d: usize, jobs: usize) -> Result<u64> {
    fold_downsets(d, jobs, || 0u64, |c, _| *c += 1, |a, b| *a += b)
}

/// Worker count used when the caller does not choose one.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent count: filter all `2^(2^d)` masks.
    fn count_by_filter(d: usize) -> u64 {
        let cells = 1u32 << d;
        (0..1u64 << cells)
            .filter(|&m| is_down_closed(d, &CellMask::from_u64(m)))
            .count() as u64
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_downsets(1, |_| {}).unwrap(), 3);
        assert_eq!(enumerate_downsets(2, |_| {}).unwrap(), 6);
        assert_eq!(enumerate_downsets(3, |_| {}).unwrap(), 20);
        for d in 1..=4 {
            assert_eq!(count_downsets(d, 1).unwrap(), count_by_filter(d), "d = {d}");
        }
    }

    #[test]
    fn every_visit_is_a_distinct_downset() {
        for d in 1..=4 {
            let mut seen = Vec::new();
            enumerate_downsets(d, |m| seen.push(m)).unwrap();
            assert!(seen.iter().all(|&m| is_down_closed(d, &CellMask::from_u64(m))));
            let n = seen.len();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), n);
        }
    }

    #[test]
    fn parallel_fold_matches_sequential_order() {
        let collect = |jobs| {
            fold_downsets(5, jobs, Vec::new, |v, m| v.push(m), |a, b| a.extend(b)).unwrap()
        };
        let mut sequential = Vec::new();
        enumerate_downsets(5, |m| sequential.push(m)).unwrap();
        let one = collect(1);
        let four = collect(4);
        assert_eq!(one, four);
        assert_eq!(one.len(), 7581);
        let mut a = one.clone();
        a.sort_unstable();
        sequential.sort_unstable();
        assert_eq!(a, sequential);
    }

    #[test]
    fn oversized_hypercubes_are_refused() {
        assert_eq!(count_downsets(7, 1), Err(Error::Intractable(7)));
        assert_eq!(count_downsets(8, 1), Err(Error::Intractable(8)));
        assert!(count_downsets(0, 1).is_err());
    }

    #[test]
    fn characterization_examples() {
        let full = HypercubeConfig::at_origin(6, 2, CellMask::full(2)).unwrap();
        assert!(hypercube_g_characterization(&full, 6));
        let empty = HypercubeConfig::at_origin(6, 6, CellMask::EMPTY).unwrap();
        assert!(hypercube_g_characterization(&empty, 6));
        let single = HypercubeConfig::at_origin(6, 2, CellMask::from_u64(1)).unwrap();
        assert!(!hypercube_g_characterization(&single, 6));
    }

    /// The closed-form characterization agrees with G-membership computed
    /// from addable and removable sets.
    #[test]
    fn characterization_agrees_with_direct_membership() {
        for n in 4..=6 {
            for d in 1..=4 {
                enumerate_downsets(d, |m| {
                    let config = HypercubeConfig::at_origin(n, d, CellMask::from_u64(m)).unwrap();
                    let p = config.to_partition().unwrap();
                    assert_eq!(
                        hypercube_g_characterization(&config, n),
                        p.in_g(&config.top_box()),
                        "n = {n}, d = {d}, mask = {m:#x}"
                    );
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn characterization_at_full_dimension() {
        for n in 1..=4 {
            enumerate_downsets(n, |m| {
                let config = HypercubeConfig::at_origin(n, n, CellMask::from_u64(m)).unwrap();
                let p = config.to_partition().unwrap();
                assert_eq!(
                    hypercube_g_characterization(&config, n),
                    p.in_g(&config.top_box()),
                    "n = d = {n}, mask = {m:#x}"
                );
            })
            .unwrap();
        }
    }

    #[test]
    fn config_validation() {
        assert!(HypercubeConfig::at_origin(3, 2, CellMask::from_u64(0b0010)).is_err());
        assert!(HypercubeConfig::new(CellMask::EMPTY, vec![0, 0], LatticeBox::origin(3)).is_err());
        let shifted = HypercubeConfig::new(
            CellMask::from_u64(1),
            vec![0],
            LatticeBox::unit(2, 1),
        )
        .unwrap();
        assert!(shifted.to_partition().is_err());
    }

    #[test]
    fn large_masks() {
        let full = CellMask::full(8);
        assert_eq!(full.len(), 256);
        assert!(is_down_closed(8, &full));
        let mut m = full;
        m.remove(0);
        assert!(!is_down_closed(8, &m));
        assert_eq!(full.cells().last(), Some(255));
    }
}
