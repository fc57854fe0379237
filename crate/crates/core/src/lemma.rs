//! Pole order at the top cell of a hypercube, over all of its down-sets.
//!
//! For a hypercube `HC^(d)` at the lattice origin spanned by axes `0..d`,
//! the net pole order at the top cell only picks up contributions from a
//! fixed, precomputable set of cells and clusters. [`TargetProbe`] tabulates
//! them once per `(n, d)` so each configuration is scored with a few mask
//! operations instead of a full ledger build.

use std::collections::BTreeMap;
use std::io::{self, Write};

use itertools::Itertools;
use serde::Serialize;

use crate::charge::{binomial, potential_box_weight, potential_cluster_weight, MAX_LEDGER_DIMENSION};
use crate::error::{Error, Result};
use crate::hypercube::{fold_downsets, CellMask, MAX_EXHAUSTIVE_SUBDIM, MAX_SUBDIM};
use crate::lattice::LatticeBox;
use crate::projection::ProjectedPoint;

/// Mask operations shared by the 64-bit fast path and [`CellMask`].
pub trait CellSet: Copy {
    fn has(&self, cell: usize) -> bool;
    /// `other` is a subset of `self`.
    fn covers(&self, other: &Self) -> bool;
    fn disjoint(&self, other: &Self) -> bool;
    fn count(&self) -> usize;
    fn sum_over<F: Fn(usize) -> i32>(&self, f: F) -> i32;
    fn from_cells(mask: &CellMask) -> Self;
}

impl CellSet for u64 {
    #[inline]
    fn has(&self, cell: usize) -> bool {
        self >> cell & 1 == 1
    }
    #[inline]
    fn covers(&self, other: &Self) -> bool {
        other & !self == 0
    }
    #[inline]
    fn disjoint(&self, other: &Self) -> bool {
        self & other == 0
    }
    #[inline]
    fn count(&self) -> usize {
        self.count_ones() as usize
    }
    #[inline]
    fn sum_over<F: Fn(usize) -> i32>(&self, f: F) -> i32 {
        let mut w = *self;
        let mut s = 0;
        while w != 0 {
            s += f(w.trailing_zeros() as usize);
            w &= w - 1;
        }
        s
    }
    fn from_cells(mask: &CellMask) -> Self {
        mask.low_word()
    }
}

impl CellSet for CellMask {
    fn has(&self, cell: usize) -> bool {
        self.contains(cell)
    }
    fn covers(&self, other: &Self) -> bool {
        other.is_subset(self)
    }
    fn disjoint(&self, other: &Self) -> bool {
        other.cells().all(|c| !self.contains(c))
    }
    fn count(&self) -> usize {
        self.len()
    }
    fn sum_over<F: Fn(usize) -> i32>(&self, f: F) -> i32 {
        self.cells().map(f).sum()
    }
    fn from_cells(mask: &CellMask) -> Self {
        *mask
    }
}

#[derive(Debug, Clone)]
enum Site<M> {
    /// A hypercube cell projecting onto the target.
    Cell { cell: usize, lower: M, upper: M },
    /// A box outside the hypercube projecting onto the target; addable once
    /// all of its predecessors (all inside the hypercube) are present.
    Outside { required: M },
}

/// Precomputed potential and G-membership at the top cell of `HC^(d)`
/// embedded at the origin of an even-dimensional lattice.
#[derive(Debug, Clone)]
pub struct TargetProbe<M> {
    n: usize,
    d: usize,
    vacuum: i32,
    box_weight: Vec<i32>,
    cluster_terms: Vec<(M, i32)>,
    sites: Vec<Site<M>>,
}

fn cell_box(n: usize, cell: usize) -> LatticeBox {
    let coords: Vec<u16> = (0..n).map(|i| (cell >> i & 1) as u16).collect();
    LatticeBox::new(&coords).expect("dimension checked")
}

fn single(cell: usize) -> CellMask {
    let mut m = CellMask::EMPTY;
    m.insert(cell);
    m
}

impl<M: CellSet> TargetProbe<M> {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if !n.is_multiple_of(2) || !(4..=MAX_LEDGER_DIMENSION).contains(&n) {
            return Err(Error::OddPotential(n));
        }
        if d == 0 || d > n || d > MAX_SUBDIM {
            return Err(Error::SubdimOutOfRange(d));
        }
        if std::mem::size_of::<M>() * 8 < 1 << d {
            return Err(Error::SubdimOutOfRange(d));
        }
        let cells = 1usize << d;
        let target = cell_box(n, cells - 1).project();
        let vacuum = i32::from(target == ProjectedPoint::origin(n));
        let points: Vec<ProjectedPoint> = (0..cells).map(|c| cell_box(n, c).project()).collect();

        let box_weight = points
            .iter()
            .map(|c| potential_box_weight(c, &target))
            .collect();

        let mut cluster_terms = Vec::new();
        for (cell, point) in points.iter().enumerate() {
            let free: Vec<usize> = (0..d).filter(|&i| cell >> i & 1 == 0).collect();
            for size in 2..=free.len() + 1 {
                let Some(weight) = potential_cluster_weight(n, size) else {
                    continue;
                };
                for dirs in free.iter().copied().combinations(size - 1) {
                    if point.shift_axes(&dirs, 1) == target {
                        let mut req = single(cell);
                        dirs.iter().for_each(|&s| req.insert(cell | 1 << s));
                        cluster_terms.push((M::from_cells(&req), weight));
                    }
                }
            }
        }

        let cover = |cell: usize, up: bool| {
            let mut m = CellMask::EMPTY;
            for i in 0..d {
                if (cell >> i & 1 == 1) != up {
                    m.insert(cell ^ 1 << i);
                }
            }
            M::from_cells(&m)
        };
        let mut sites = Vec::new();
        let mut outside = std::collections::BTreeSet::new();
        for (cell, point) in points.iter().enumerate() {
            if *point == target {
                sites.push(Site::Cell {
                    cell,
                    lower: cover(cell, false),
                    upper: cover(cell, true),
                });
            }
            for axis in 0..n {
                if axis < d && cell >> axis & 1 == 0 {
                    continue;
                }
                let b = cell_box(n, cell).raised(axis);
                if b.project() != target || !outside.insert(b.clone()) {
                    continue;
                }
                let mut required = CellMask::EMPTY;
                let reachable = (0..n).all(|k| match b.lowered(k) {
                    None => true,
                    Some(pred) => match hypercube_cell(&pred, d) {
                        Some(c) => {
                            required.insert(c);
                            true
                        }
                        None => false,
                    },
                });
                if reachable {
                    sites.push(Site::Outside {
                        required: M::from_cells(&required),
                    });
                }
            }
        }

        Ok(Self {
            n,
            d,
            vacuum,
            box_weight,
            cluster_terms,
            sites,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn subdim(&self) -> usize {
        self.d
    }

    /// `omega_0` at the top cell for the configuration `mask`.
    #[inline]
    pub fn omega(&self, mask: &M) -> i32 {
        let boxes = mask.sum_over(|c| self.box_weight[c]);
        let clusters: i32 = self
            .cluster_terms
            .iter()
            .filter(|(req, _)| mask.covers(req))
            .map(|&(_, w)| w)
            .sum();
        self.vacuum + boxes + clusters
    }

    /// G-membership of the configuration `mask` for the top cell.
    #[inline]
    pub fn in_g(&self, mask: &M) -> bool {
        self.sites.iter().any(|site| match site {
            Site::Cell { cell, lower, upper } => {
                if mask.has(*cell) {
                    mask.disjoint(upper)
                } else {
                    mask.covers(lower)
                }
            }
            Site::Outside { required } => mask.covers(required),
        })
    }
}

/// Index of `b` within `HC^(d)` at the origin, if it lies there.
fn hypercube_cell(b: &LatticeBox, d: usize) -> Option<usize> {
    let mut cell = 0;
    for (i, &c) in b.coords().iter().enumerate() {
        match c {
            0 => {}
            1 if i < d => cell |= 1 << i,
            _ => return None,
        }
    }
    Some(cell)
}

/// Closed-form G-membership for the top cell: `{HC - top, HC}`, plus
/// `{empty, {origin}}` when `d = n`.
pub fn characterized_member(n: usize, d: usize, mask: u64) -> bool {
    let cells = 1u32 << d;
    let full = if cells == 64 { u64::MAX } else { (1u64 << cells) - 1 };
    let below_top = full & !(1u64 << (cells - 1));
    mask == full || mask == below_top || (d == n && mask <= 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaViolation {
    pub mask: u64,
    pub boxes: usize,
    pub omega: i32,
    pub member: bool,
}

/// Outcome of the exhaustive check over all down-sets of `HC^(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub n: usize,
    pub d: usize,
    pub total_configs: u64,
    pub members: u64,
    pub violations: Vec<LemmaViolation>,
    /// Configurations where direct G-membership disagrees with the closed
    /// form [`characterized_member`].
    pub characterization_mismatches: u64,
    /// `(N, omega) -> count`.
    pub histogram: BTreeMap<(usize, i32), u64>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Largest `omega` seen at each box count `N`.
    pub fn envelope(&self) -> BTreeMap<usize, i32> {
        let mut env = BTreeMap::new();
        for &(n_boxes, omega) in self.histogram.keys() {
            let e = env.entry(n_boxes).or_insert(omega);
            *e = (*e).max(omega);
        }
        env
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_histogram_csv(&self.histogram, out)
    }
}

#[derive(Default)]
struct Tally {
    total: u64,
    members: u64,
    mismatches: u64,
    violations: Vec<LemmaViolation>,
    histogram: BTreeMap<(usize, i32), u64>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.total += other.total;
        self.members += other.members;
        self.mismatches += other.mismatches;
        self.violations.extend(other.violations);
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
    }
}

/// Checks, for every down-set of `HC^(d)` in an `n`-dimensional lattice,
/// that G-members have `omega_0 = 1` at the top cell and non-members have
/// `omega_0 <= 0`.
pub fn verify_lemma(n: usize, d: usize, jobs: usize) -> Result<LemmaReport> {
    if d > MAX_EXHAUSTIVE_SUBDIM {
        return Err(Error::Intractable(d));
    }
    let probe = TargetProbe::<u64>::new(n, d)?;
    let tally = fold_downsets(
        d,
        jobs,
        Tally::default,
        |t, mask| {
            let omega = probe.omega(&mask);
            let member = probe.in_g(&mask);
            let boxes = mask.count_ones() as usize;
            t.total += 1;
            t.members += u64::from(member);
            if member != characterized_member(n, d, mask) {
                t.mismatches += 1;
            }
            if (member && omega != 1) || (!member && omega > 0) {
                t.violations.push(LemmaViolation {
                    mask,
                    boxes,
                    omega,
                    member,
                });
            }
            *t.histogram.entry((boxes, omega)).or_default() += 1;
        },
        Tally::merge,
    )?;
    Ok(LemmaReport {
        n,
        d,
        total_configs: tally.total,
        members: tally.members,
        violations: tally.violations,
        characterization_mismatches: tally.mismatches,
        histogram: tally.histogram,
    })
}

/// Writes `N,omega,count` rows sorted by `(N, omega)`.
pub fn write_histogram_csv<W: Write>(
    histogram: &BTreeMap<(usize, i32), u64>,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "N,omega,count")?;
    for (&(n_boxes, omega), count) in histogram {
        writeln!(out, "{n_boxes},{omega},{count}")?;
    }
    out.flush()
}

pub fn scatter_csv(report: &LemmaReport) -> String {
    let mut buf = Vec::new();
    report.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Number of projected hypercube points `c` with `c + (m distinct
/// direction weights) = top`, counted in a lattice one dimension larger
/// than the hypercube so distinct cells stay distinct.
pub fn neighbor_count(d: usize, m: usize) -> Result<u64> {
    if d == 0 || d > MAX_SUBDIM || m > d {
        return Err(Error::SubdimOutOfRange(d));
    }
    let n = d + 1;
    let cells = 1usize << d;
    let top = cell_box(n, cells - 1).project();
    let mut found = std::collections::BTreeSet::new();
    for cell in 0..cells {
        let point = cell_box(n, cell).project();
        if (0..d)
            .combinations(m)
            .any(|dirs| point.shift_axes(&dirs, 1) == top)
        {
            found.insert(point);
        }
    }
    Ok(found.len() as u64)
}

/// Closed-form pole counts for the full hypercube at its top cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypercubeClosedForm {
    /// Partition-dependent part `omega_{HC}`.
    pub omega: i64,
    /// With the vacuum term added.
    pub omega0: i64,
}

/// `sum_{m=1}^{d} C(d,m) (-1)^{m+1}` for `d < n`. For `d = n` the `m = n`
/// term wraps onto the origin's point: in even dimension it is replaced by
/// the two poles of the top-level cluster, in odd dimension no factor
/// reaches it. The vacuum pole is then added.
pub fn omega_hypercube_closed_form(n: usize, d: usize) -> Result<HypercubeClosedForm> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if d == 0 || d > n {
        return Err(Error::SubdimOutOfRange(d));
    }
    let alt = |m: usize| -> i64 {
        let c = binomial(d as u64, m as u64) as i64;
        if m % 2 == 1 {
            c
        } else {
            -c
        }
    };
    if d < n {
        let omega = (1..=d).map(alt).sum();
        Ok(HypercubeClosedForm {
            omega,
            omega0: omega,
        })
    } else {
        let cluster = if n.is_multiple_of(2) { 2 } else { 0 };
        let omega = (1..n).map(alt).sum::<i64>() - cluster;
        Ok(HypercubeClosedForm {
            omega,
            omega0: 1 + omega,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::potential_omega0;
    use crate::hypercube::{enumerate_downsets, hypercube_g_characterization, HypercubeConfig};
    use rand::{Rng, SeedableRng};

    #[test]
    fn probe_matches_potential_function() {
        for n in [4, 6] {
            for d in 1..=4.min(n) {
                let probe = TargetProbe::<u64>::new(n, d).unwrap();
                enumerate_downsets(d, |m| {
                    let config = HypercubeConfig::at_origin(n, d, CellMask::from_u64(m)).unwrap();
                    let p = config.to_partition().unwrap();
                    let target = config.top_box();
                    assert_eq!(
                        probe.omega(&m),
                        potential_omega0(&p, &target.project()).unwrap(),
                        "n = {n}, d = {d}, mask = {m:#x}"
                    );
                    assert_eq!(probe.in_g(&m), p.in_g(&target));
                    assert_eq!(probe.in_g(&m), hypercube_g_characterization(&config, n));
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn wide_probe_matches_word_probe() {
        let narrow = TargetProbe::<u64>::new(6, 5).unwrap();
        let wide = TargetProbe::<CellMask>::new(6, 5).unwrap();
        enumerate_downsets(5, |m| {
            let cm = CellMask::from_u64(m);
            assert_eq!(narrow.omega(&m), wide.omega(&cm));
            assert_eq!(narrow.in_g(&m), wide.in_g(&cm));
        })
        .unwrap();
    }

    #[test]
    fn probe_matches_potential_on_random_six_cubes() {
        let probe = TargetProbe::<u64>::new(6, 6).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut masks = Vec::new();
        enumerate_downsets(6, |m| {
            if rng.random_ratio(1, 40_000) {
                masks.push(m)
            }
        })
        .unwrap();
        masks.extend([0, 1, u64::MAX, u64::MAX >> 1]);
        for m in masks {
            let config = HypercubeConfig::at_origin(6, 6, CellMask::from_u64(m)).unwrap();
            let p = config.to_partition().unwrap();
            let target = config.top_box();
            assert_eq!(probe.omega(&m), potential_omega0(&p, &target.project()).unwrap());
            assert_eq!(probe.in_g(&m), p.in_g(&target));
        }
    }

    #[test]
    fn two_cube_in_six_dimensions() {
        let r = verify_lemma(6, 2, 1).unwrap();
        assert_eq!(r.total_configs, 6);
        assert!(r.holds());
        assert_eq!(r.members, 2);
        let ones: Vec<_> = r.histogram.keys().filter(|k| k.1 == 1).collect();
        assert_eq!(ones, vec![&(3, 1), &(4, 1)]);
        assert_eq!(r.characterization_mismatches, 0);
    }

    #[test]
    fn four_cube_is_deterministic_across_jobs() {
        assert_eq!(verify_lemma(6, 4, 1).unwrap(), verify_lemma(6, 4, 3).unwrap());
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert_eq!(verify_lemma(6, 7, 1), Err(Error::Intractable(7)));
        assert!(matches!(verify_lemma(5, 3, 1), Err(Error::OddPotential(5))));
        assert!(verify_lemma(4, 5, 1).is_err());
    }

    #[test]
    fn csv_rows_are_sorted() {
        let r = verify_lemma(6, 3, 1).unwrap();
        let csv = scatter_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("N,omega,count"));
        let rows: Vec<(usize, i32, u64)> = lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
            })
            .collect();
        assert!(rows.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        assert_eq!(rows.iter().map(|r| r.2).sum::<u64>(), r.total_configs);
    }

    #[test]
    fn neighbor_counts_are_binomial() {
        assert_eq!(neighbor_count(6, 2).unwrap(), 15);
        assert_eq!(neighbor_count(6, 0).unwrap(), 1);
        assert_eq!(neighbor_count(4, 4).unwrap(), 1);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(omega_hypercube_closed_form(6, 4).unwrap().omega0, 1);
        let full = omega_hypercube_closed_form(6, 6).unwrap();
        assert_eq!((full.omega, full.omega0), (0, 1));
        assert_eq!(omega_hypercube_closed_form(6, 1).unwrap().omega, 1);
        let odd = omega_hypercube_closed_form(5, 5).unwrap();
        assert_eq!((odd.omega, odd.omega0), (0, 1));
        assert!(omega_hypercube_closed_form(1, 1).is_err());
    }

    #[test]
    fn characterization_helper() {
        assert!(characterized_member(6, 6, 0));
        assert!(characterized_member(6, 6, 1));
        assert!(!characterized_member(6, 2, 1));
        assert!(characterized_member(6, 2, 0b1111));
        assert!(characterized_member(6, 2, 0b0111));
        assert!(characterized_member(6, 6, u64::MAX));
        assert!(characterized_member(6, 6, u64::MAX >> 1));
    }
}
