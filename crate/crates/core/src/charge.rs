//! Net pole-order ledgers of the charge function `psi(u)`.
//!
//! `psi(u)` is a product of shifted linear factors, so it is fully described
//! by the signed multiplicity of its roots: `+k` for a pole of order `k`,
//! `-k` for a zero. Roots live on the projected lattice, so the whole ledger
//! is exact integer bookkeeping.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Partition};
use crate::projection::{Components, ProjectedPoint};

pub const MIN_LEDGER_DIMENSION: usize = 2;
pub const MAX_LEDGER_DIMENSION: usize = 12;
pub const DEFAULT_WORK_LIMIT: u64 = 100_000_000;

/// Which factor structure `psi(u)` uses in a given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChargeModel {
    /// Young diagrams: pair and triple clusters without box zeros.
    TwoDimensional,
    /// Plane partitions.
    Plane,
    /// Solid partitions in their established form.
    Solid,
    /// `n = 2K + 1`.
    Odd { k: usize },
    /// `n = 2K`.
    Even { k: usize },
}

impl ChargeModel {
    pub fn for_dimension(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Self::TwoDimensional),
            3 => Ok(Self::Plane),
            4 => Ok(Self::Solid),
            5..=MAX_LEDGER_DIMENSION if n % 2 == 1 => Ok(Self::Odd { k: n / 2 }),
            6..=MAX_LEDGER_DIMENSION => Ok(Self::Even { k: n / 2 }),
            _ => Err(Error::UnsupportedDimension(n)),
        }
    }

    /// The general even formula, also valid at `n = 4`.
    pub fn even_general(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) && (4..=MAX_LEDGER_DIMENSION).contains(&n) {
            Ok(Self::Even { k: n / 2 })
        } else {
            Err(Error::UnsupportedDimension(n))
        }
    }

    /// The general odd formula, also valid at `n = 3`.
    pub fn odd_general(n: usize) -> Result<Self> {
        if n % 2 == 1 && (3..=MAX_LEDGER_DIMENSION).contains(&n) {
            Ok(Self::Odd { k: n / 2 })
        } else {
            Err(Error::UnsupportedDimension(n))
        }
    }

    pub fn dimension(&self) -> usize {
        match *self {
            Self::TwoDimensional => 2,
            Self::Plane => 3,
            Self::Solid => 4,
            Self::Odd { k } => 2 * k + 1,
            Self::Even { k } => 2 * k,
        }
    }

    /// Root offsets of the single-box factor `phi_1(u - c)` relative to `c`,
    /// with signed multiplicity.
    pub fn box_terms(&self) -> Vec<(Components, i32)> {
        let n = self.dimension();
        let mut terms = Vec::new();
        let subset = |axes: &[usize]| -> Components {
            let mut v: Components = smallvec::smallvec![0; n];
            axes.iter().for_each(|&a| v[a] = 1);
            v
        };
        // Denominator: prod (u - h_i).
        for i in 0..n {
            terms.push((subset(&[i]), 1));
        }
        // Numerator (u + h_i), present in dimensions 3, 4 and every even n.
        if matches!(self, Self::Plane | Self::Solid | Self::Even { .. }) {
            for i in 0..n {
                let mut v: Components = smallvec::smallvec![0; n];
                v[i] = -1;
                terms.push((v, -1));
            }
        }
        // Numerator prod (u - sum of 2m distinct weights).
        let max_m = match *self {
            Self::TwoDimensional | Self::Plane => 0,
            Self::Solid => 1,
            Self::Even { k } => k - 1,
            Self::Odd { k } => k,
        };
        for m in 1..=max_m {
            for axes in (0..n).combinations(2 * m) {
                terms.push((subset(&axes), -1));
            }
        }
        terms
    }

    /// `(cluster size p, signed multiplicity)` for every cluster factor.
    pub fn cluster_terms(&self) -> Vec<(usize, i32)> {
        match *self {
            Self::TwoDimensional => vec![(2, -2), (3, 2)],
            Self::Plane => vec![],
            Self::Solid => vec![(4, 2), (5, -2)],
            Self::Odd { k } => (2..=k).map(|m| (2 * m, 1)).collect(),
            Self::Even { k } => (2..k)
                .map(|m| (2 * m, 1))
                .chain([(2 * k, 2), (2 * k + 1, -2)])
                .collect(),
        }
    }
}

/// A box together with `p - 1` distinct unit neighbours inside a partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cluster {
    pub origin: LatticeBox,
    /// Sorted, distinct, 0-based axes.
    pub directions: Vec<usize>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.directions.len() + 1
    }
}

/// All `size`-box clusters contained in `p`, each direction set once.
pub fn enumerate_clusters(p: &Partition, size: usize) -> Result<Vec<Cluster>> {
    let n = p.dimension();
    if !(2..=n + 1).contains(&size) {
        return Err(Error::ClusterSize { size, max: n + 1 });
    }
    let mut out = Vec::new();
    for b in p.boxes() {
        let free: Vec<usize> = (0..n).filter(|&k| p.contains(&b.raised(k))).collect();
        for directions in free.into_iter().combinations(size - 1) {
            out.push(Cluster {
                origin: b.clone(),
                directions,
            });
        }
    }
    Ok(out)
}

/// The projected point a cluster factor is centred on: the origin shifted
/// by one unit along every direction. In two dimensions both weights are
/// added regardless of the directions, which lands on the origin's point.
pub fn cluster_projection(c: &Cluster) -> ProjectedPoint {
    let point = c.origin.project();
    if c.origin.dimension() == 2 {
        point.shift_axes(&[0, 1], 1)
    } else {
        point.shift_axes(&c.directions, 1)
    }
}

/// Signed net pole orders of `psi(u)` by projected point. Zero entries are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleLedger {
    n: usize,
    entries: BTreeMap<ProjectedPoint, i32>,
}

impl PoleLedger {
    pub(crate) fn from_counts<I>(n: usize, counts: I) -> Self
    where
        I: IntoIterator<Item = (ProjectedPoint, i32)>,
    {
        let entries = counts.into_iter().filter(|&(_, v)| v != 0).collect();
        Self { n, entries }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn pole_order(&self, q: &ProjectedPoint) -> i32 {
        self.entries.get(q).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ProjectedPoint, i32)> + '_ {
        self.entries.iter().map(|(p, &v)| (p, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn poles(&self) -> BTreeSet<ProjectedPoint> {
        self.entries
            .iter()
            .filter(|(_, &v)| v > 0)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Relabels axes: component `k` moves to `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_counts(
            self.n,
            self.entries.iter().map(|(p, &v)| {
                let mut l = vec![0; self.n];
                for (k, &x) in p.components().iter().enumerate() {
                    l[perm[k]] = x;
                }
                (ProjectedPoint::from_vector(&l), v)
            }),
        )
    }
}

/// Ledger construction knobs.
#[derive(Debug, Clone, Copy)]
pub struct LedgerOptions {
    /// Overrides the per-dimension model.
    pub model: Option<ChargeModel>,
    /// Upper bound on the estimated cluster-enumeration work.
    pub work_limit: u64,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        Self {
            model: None,
            work_limit: DEFAULT_WORK_LIMIT,
        }
    }
}

/// `sum_p C(n, p - 1) * |partition|` over the model's cluster sizes.
pub fn cluster_work_estimate(model: &ChargeModel, boxes: usize) -> u64 {
    let n = model.dimension() as u64;
    model
        .cluster_terms()
        .iter()
        .map(|&(p, _)| binomial(n, p as u64 - 1).saturating_mul(boxes as u64))
        .fold(0u64, u64::saturating_add)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn build_ledger(p: &Partition) -> Result<PoleLedger> {
    build_ledger_with(p, &LedgerOptions::default())
}

pub fn build_ledger_with(p: &Partition, options: &LedgerOptions) -> Result<PoleLedger> {
    let n = p.dimension();
    let model = match options.model {
        Some(m) if m.dimension() != n => return Err(Error::UnsupportedDimension(n)),
        Some(m) => m,
        None => ChargeModel::for_dimension(n)?,
    };
    let estimate = cluster_work_estimate(&model, p.len());
    if estimate > options.work_limit {
        return Err(Error::WorkLimit {
            estimate,
            limit: options.work_limit,
        });
    }

    let mut counts: HashMap<ProjectedPoint, i32> = HashMap::new();
    *counts.entry(ProjectedPoint::origin(n)).or_default() += 1;

    let box_terms = model.box_terms();
    for b in p.boxes() {
        let c = b.project();
        for (offset, order) in &box_terms {
            *counts.entry(c.shift(offset)).or_default() += order;
        }
    }
    for (size, order) in model.cluster_terms() {
        for cluster in enumerate_clusters(p, size)? {
            *counts.entry(cluster_projection(&cluster)).or_default() += order;
        }
    }
    Ok(PoleLedger::from_counts(n, counts))
}

pub fn pole_order(ledger: &PoleLedger, q: &ProjectedPoint) -> i32 {
    ledger.pole_order(q)
}

fn check_even(n: usize) -> Result<usize> {
    if n.is_multiple_of(2) && (4..=MAX_LEDGER_DIMENSION).contains(&n) {
        Ok(n / 2)
    } else {
        Err(Error::OddPotential(n))
    }
}

/// Single-box part of the potential at `target` for a box projecting to
/// `c`, in dimension `n = 2K`.
pub(crate) fn potential_box_weight(c: &ProjectedPoint, target: &ProjectedPoint) -> i32 {
    let n = c.dimension();
    let k = n / 2;
    let mut w = 0;
    for i in 0..n {
        if c.shift_axes(&[i], 1) == *target {
            w += 1;
        }
        if c.shift_axes(&[i], -1) == *target {
            w -= 1;
        }
    }
    for m in 1..k {
        for axes in (0..n).combinations(2 * m) {
            if c.shift_axes(&axes, 1) == *target {
                w -= 1;
            }
        }
    }
    w
}

/// Cluster part of the potential for a `p`-box cluster in dimension
/// `n = 2K`; `None` when clusters of that size do not contribute.
pub(crate) fn potential_cluster_weight(n: usize, p: usize) -> Option<i32> {
    let k = n / 2;
    if p == 2 * k {
        Some(2)
    } else if p == 2 * k + 1 {
        Some(-2)
    } else if p >= 4 && p < 2 * k && p.is_multiple_of(2) {
        Some(1)
    } else {
        None
    }
}

/// Net pole order `omega_0` of `psi(u)` at `target`, from the potential
/// function (vacuum, single-box and cluster parts) for even `n >= 4`.
pub fn potential_omega0(p: &Partition, target: &ProjectedPoint) -> Result<i32> {
    let n = p.dimension();
    let k = check_even(n)?;
    let mut omega = i32::from(*target == ProjectedPoint::origin(n));
    for b in p.boxes() {
        omega += potential_box_weight(&b.project(), target);
    }
    for size in (4..=2 * k + 1).filter(|&s| s % 2 == 0 || s == 2 * k + 1) {
        let weight = potential_cluster_weight(n, size).expect("contributing size");
        for cluster in enumerate_clusters(p, size)? {
            if cluster_projection(&cluster) == *target {
                omega += weight;
            }
        }
    }
    Ok(omega)
}

/// Reason a projected point breaks one of the two charge-function
/// properties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchKind {
    /// Pole of order two or more.
    HigherOrderPole,
    /// Simple pole with no addable or removable box projecting onto it.
    UnmatchedPole,
    /// Addable or removable position without a simple pole.
    MissingPole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub l: Vec<i32>,
    pub order: i32,
    pub kind: MismatchKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub simple_poles: bool,
    pub bijection: bool,
    pub mismatches: Vec<Mismatch>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.simple_poles && self.bijection
    }
}

pub fn verify_properties(p: &Partition) -> Result<PropertyReport> {
    verify_properties_with(p, &LedgerOptions::default())
}

/// Checks that `psi(u)` has only simple poles and that its poles are exactly
/// the projections of the addable and removable boxes.
pub fn verify_properties_with(p: &Partition, options: &LedgerOptions) -> Result<PropertyReport> {
    Ok(check_properties(p, &build_ledger_with(p, options)?))
}

pub(crate) fn check_properties(p: &Partition, ledger: &PoleLedger) -> PropertyReport {
    let sites: BTreeSet<ProjectedPoint> = p
        .addable()
        .iter()
        .chain(p.removable().iter())
        .map(LatticeBox::project)
        .collect();
    let mut mismatches = Vec::new();
    for (point, order) in ledger.entries() {
        let kind = if order > 1 {
            MismatchKind::HigherOrderPole
        } else if order == 1 && !sites.contains(point) {
            MismatchKind::UnmatchedPole
        } else {
            continue;
        };
        mismatches.push(Mismatch {
            l: point.components().to_vec(),
            order,
            kind,
        });
    }
    for point in &sites {
        let order = ledger.pole_order(point);
        if order != 1 {
            mismatches.push(Mismatch {
                l: point.components().to_vec(),
                order,
                kind: MismatchKind::MissingPole,
            });
        }
    }
    let simple_poles = ledger.entries().all(|(_, v)| v <= 1);
    let simple: BTreeSet<ProjectedPoint> = ledger
        .entries()
        .filter(|&(_, v)| v == 1)
        .map(|(q, _)| q.clone())
        .collect();
    PropertyReport {
        simple_poles,
        bijection: simple == sites,
        mismatches,
    }
}

/// Compares the root multisets of the two printed forms of the 4D
/// single-box factor: `{-h_i} + {h_i + h_j}` against
/// `{h_i + h_j} + {h_i + h_j + h_k}`. The denominators agree term by term.
pub fn phi1_4d_symmetric_equiv(h: &[BigRational]) -> bool {
    if h.len() != 4 {
        return false;
    }
    let pairs = || (0..4).tuple_combinations().map(|(i, j)| &h[i] + &h[j]);
    let mut standard: Vec<BigRational> = h.iter().map(|x| -x.clone()).chain(pairs()).collect();
    let mut symmetric: Vec<BigRational> = pairs()
        .chain(
            (0..4)
                .tuple_combinations()
                .map(|(i, j, k)| &h[i] + &h[j] + &h[k]),
        )
        .collect();
    standard.sort();
    symmetric.sort();
    standard == symmetric
}

/// Serialized form `{"n": int, "entries": [{"l": [...], "order": int}]}`,
/// entries sorted lexicographically by `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerJson {
    pub n: usize,
    pub entries: Vec<LedgerEntryJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntryJson {
    pub l: Vec<i32>,
    pub order: i32,
}

impl From<&PoleLedger> for LedgerJson {
    fn from(ledger: &PoleLedger) -> Self {
        Self {
            n: ledger.n,
            entries: ledger
                .entries()
                .map(|(p, order)| LedgerEntryJson {
                    l: p.components().to_vec(),
                    order,
                })
                .collect(),
        }
    }
}

impl LedgerJson {
    pub fn into_ledger(self) -> Result<PoleLedger> {
        let n = self.n;
        let mut counts = BTreeMap::new();
        for e in self.entries {
            if e.l.len() != n {
                return Err(Error::Input(format!("ledger entry {:?} is not {n}-dimensional", e.l)));
            }
            let point = ProjectedPoint::from_vector(&e.l);
            if counts.insert(point, e.order).is_some() {
                return Err(Error::Input(format!("duplicate ledger entry {:?}", e.l)));
            }
        }
        Ok(PoleLedger::from_counts(n, counts))
    }
}
