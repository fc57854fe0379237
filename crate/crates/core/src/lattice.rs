//! Boxes, partitions and the melting rule.
//!
//! Axes are 0-based throughout the library: axis `k` is the unit vector
//! `e_{k+1}` in one-based notation.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, MeltingViolation, Result};
use crate::projection::ProjectedPoint;

pub const MAX_DIMENSION: usize = 16;

pub(crate) type Coords = SmallVec<[u16; MAX_DIMENSION]>;

/// One cell of the non-negative integer lattice.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeBox(Coords);

impl LatticeBox {
    pub fn new(coords: &[u16]) -> Result<Self> {
        check_dimension(coords.len())?;
        Ok(Self(Coords::from_slice(coords)))
    }

    /// Builds a box from signed coordinates, rejecting negatives and values
    /// beyond the 16-bit range.
    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        check_dimension(coords.len())?;
        let coords = coords
            .iter()
            .map(|&c| u16::try_from(c).map_err(|_| Error::CoordinateOutOfRange(c)))
            .collect::<Result<Coords>>()?;
        Ok(Self(coords))
    }

    pub fn origin(n: usize) -> Self {
        Self(smallvec::smallvec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut b = Self::origin(n);
        b.0[axis] = 1;
        b
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u16] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }

    /// `self + e_axis`.
    pub fn raised(&self, axis: usize) -> Self {
        let mut b = self.clone();
        b.0[axis] += 1;
        b
    }

    /// `self - e_axis`, or `None` when the coordinate is already zero.
    pub fn lowered(&self, axis: usize) -> Option<Self> {
        let c = self.0[axis].checked_sub(1)?;
        let mut b = self.clone();
        b.0[axis] = c;
        Some(b)
    }

    pub fn project(&self) -> ProjectedPoint {
        ProjectedPoint::from_box(self)
    }
}

impl fmt::Debug for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if (1..=MAX_DIMENSION).contains(&n) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange(n))
    }
}

/// A finite down-closed set of boxes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    n: usize,
    boxes: BTreeSet<LatticeBox>,
}

impl Partition {
    pub fn empty(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            n,
            boxes: BTreeSet::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, b: &LatticeBox) -> bool {
        self.boxes.contains(b)
    }

    pub fn boxes(&self) -> impl Iterator<Item = &LatticeBox> + '_ {
        self.boxes.iter()
    }

    /// Boxes outside the partition whose insertion keeps it down-closed.
    pub fn addable(&self) -> BTreeSet<LatticeBox> {
        let origin = LatticeBox::origin(self.n);
        if self.boxes.is_empty() {
            return BTreeSet::from([origin]);
        }
        self.boxes
            .iter()
            .flat_map(|b| (0..self.n).map(move |k| b.raised(k)))
            .filter(|c| !self.boxes.contains(c) && self.supports(c))
            .collect()
    }

    /// Boxes of the partition whose deletion keeps it down-closed.
    pub fn removable(&self) -> BTreeSet<LatticeBox> {
        self.boxes
            .iter()
            .filter(|b| (0..self.n).all(|k| !self.boxes.contains(&b.raised(k))))
            .cloned()
            .collect()
    }

    /// True when every predecessor of `c` lies in the partition.
    fn supports(&self, c: &LatticeBox) -> bool {
        (0..self.n).all(|k| c.lowered(k).is_none_or(|p| self.boxes.contains(&p)))
    }

    /// G-membership: some addable or removable box projects onto the
    /// target's projected point.
    pub fn in_g(&self, target: &LatticeBox) -> bool {
        let point = target.project();
        self.addable()
            .iter()
            .chain(self.removable().iter())
            .any(|b| b.project() == point)
    }

    pub fn with_box(&self, b: LatticeBox) -> Result<Self> {
        let mut boxes = self.boxes.clone();
        boxes.insert(b);
        validate_partition(self.n, boxes)
    }

    pub fn without_box(&self, b: &LatticeBox) -> Result<Self> {
        let mut boxes = self.boxes.clone();
        boxes.remove(b);
        validate_partition(self.n, boxes)
    }

    /// Relabels axes: coordinate `k` of every box moves to `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let boxes = self
            .boxes
            .iter()
            .map(|b| {
                let mut c: Coords = smallvec::smallvec![0; self.n];
                for (k, &v) in b.coords().iter().enumerate() {
                    c[perm[k]] = v;
                }
                LatticeBox(c)
            })
            .collect();
        Self { n: self.n, boxes }
    }

    /// Grows a random partition from the empty one by adding uniformly
    /// chosen addable boxes.
    pub fn random_growth<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::empty(n)?;
        for _ in 0..size {
            let addable: Vec<_> = p.addable().into_iter().collect();
            let pick = addable[rng.random_range(0..addable.len())].clone();
            p.boxes.insert(pick);
        }
        Ok(p)
    }
}

/// Checks the melting rule. Dimension mismatches and duplicates are input
/// errors; melting-rule failures come back as the complete violation list.
pub fn validate_partition<I>(n: usize, boxes: I) -> Result<Partition>
where
    I: IntoIterator<Item = LatticeBox>,
{
    check_dimension(n)?;
    let mut set = BTreeSet::new();
    for (index, b) in boxes.into_iter().enumerate() {
        if b.dimension() != n {
            return Err(Error::DimensionMismatch {
                index,
                expected: n,
                found: b.dimension(),
            });
        }
        if let Some(dup) = set.replace(b) {
            return Err(Error::DuplicateBox(dup.coords().to_vec()));
        }
    }
    let present = &set;
    let violations: Vec<_> = present
        .iter()
        .flat_map(|b| {
            (0..n).filter_map(move |k| {
                b.lowered(k)
                    .filter(|p| !present.contains(p))
                    .map(|_| MeltingViolation {
                        site: b.coords().to_vec(),
                        axis: k,
                    })
            })
        })
        .collect();
    if violations.is_empty() {
        Ok(Partition { n, boxes: set })
    } else {
        Err(Error::MeltingRule(violations))
    }
}

/// The `2^d` boxes `origin + sum(delta_i e_{axes[i]})`, listed in cell
/// order (bit `i` of the index is `delta_i`).
pub fn make_hypercube(origin: &LatticeBox, axes: &[usize]) -> Result<Vec<LatticeBox>> {
    let n = origin.dimension();
    check_axes(axes, n)?;
    Ok((0..1usize << axes.len())
        .map(|cell| {
            let mut b = origin.clone();
            for (i, &axis) in axes.iter().enumerate() {
                if cell >> i & 1 == 1 {
                    b.0[axis] += 1;
                }
            }
            b
        })
        .collect())
}

pub(crate) fn check_axes(axes: &[usize], n: usize) -> Result<()> {
    for (i, &axis) in axes.iter().enumerate() {
        if axis >= n || axes[..i].contains(&axis) {
            return Err(Error::InvalidAxis { axis, n });
        }
    }
    Ok(())
}

/// Serialized form `{"n": int, "boxes": [[int, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionJson {
    pub n: usize,
    pub boxes: Vec<Vec<i64>>,
}

impl PartitionJson {
    pub fn into_partition(self) -> Result<Partition> {
        let boxes = self
            .boxes
            .iter()
            .map(|c| LatticeBox::from_i64(c))
            .collect::<Result<Vec<_>>>()?;
        validate_partition(self.n, boxes)
    }
}

impl From<&Partition> for PartitionJson {
    fn from(p: &Partition) -> Self {
        Self {
            n: p.n,
            boxes: p
                .boxes
                .iter()
                .map(|b| b.coords().iter().map(|&c| c as i64).collect())
                .collect(),
        }
    }
}
