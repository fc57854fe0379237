//! Projected lattice points modulo the all-ones direction, and exact
//! rational weights used by the independent oracle.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, MAX_DIMENSION};

pub(crate) type Components = SmallVec<[i32; MAX_DIMENSION]>;

/// An integer vector modulo `(1, ..., 1)`, stored with its minimal
/// component shifted to zero. Ordering is lexicographic on the components.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectedPoint(Components);

impl ProjectedPoint {
    pub fn origin(n: usize) -> Self {
        Self(smallvec::smallvec![0; n])
    }

    pub fn from_vector(l: &[i32]) -> Self {
        let mut c = Components::from_slice(l);
        normalize(&mut c);
        Self(c)
    }

    pub fn from_box(b: &LatticeBox) -> Self {
        let mut c: Components = b.coords().iter().map(|&x| x as i32).collect();
        normalize(&mut c);
        Self(c)
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// Canonical components `l'`, all non-negative with minimum zero.
    pub fn components(&self) -> &[i32] {
        &self.0
    }

    /// Adds `deltas` componentwise and renormalizes.
    pub fn shift(&self, deltas: &[i32]) -> Self {
        debug_assert_eq!(deltas.len(), self.0.len());
        let mut c = self.0.clone();
        for (x, d) in c.iter_mut().zip(deltas) {
            *x += d;
        }
        normalize(&mut c);
        Self(c)
    }

    /// Adds `sign` along each listed axis.
    pub fn shift_axes(&self, axes: &[usize], sign: i32) -> Self {
        let mut c = self.0.clone();
        for &a in axes {
            c[a] += sign;
        }
        normalize(&mut c);
        Self(c)
    }
}

impl fmt::Debug for ProjectedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l'")?;
        f.debug_list().entries(self.0.iter()).finish()
    }
}

fn normalize(c: &mut Components) {
    if let Some(&m) = c.iter().min() {
        if m != 0 {
            c.iter_mut().for_each(|x| *x -= m);
        }
    }
}

pub const DEFAULT_GENERICITY_BOUND: i32 = 8;

/// Upper limit on the number of points a genericity certificate evaluates.
/// High dimensions get a smaller component bound so the check stays cheap.
pub const CERTIFICATE_POINT_BUDGET: u64 = 2_000_000;

const WEIGHT_RANGE: i64 = 1_000_000_000_000;
const DRAW_BUDGET: usize = 64;

/// Exact rational weights `h_i` with `sum h_i = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightAssignment {
    h: Vec<BigRational>,
}

impl WeightAssignment {
    pub fn new(h: Vec<BigRational>) -> Result<Self> {
        if h.len() < 2 || h.len() > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange(h.len()));
        }
        let sum: BigRational = h.iter().sum();
        if !sum.is_zero() {
            return Err(Error::NotCalabiYau(format_rational(&sum)));
        }
        Ok(Self { h })
    }

    pub fn dimension(&self) -> usize {
        self.h.len()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.h
    }

    /// True when every canonical point with components `<= bound` evaluates
    /// to a distinct rational. The bound is lowered for large `n` so that at
    /// most [`CERTIFICATE_POINT_BUDGET`] points are checked; see
    /// [`certificate_bound`].
    pub fn is_generic(&self, bound: i32) -> bool {
        let n = self.h.len();
        let bound = certificate_bound(n, bound);
        let Some(scaled) = self.scaled_integers() else {
            return false;
        };
        let mut seen = HashSet::new();
        let mut l = vec![0i32; n];
        loop {
            if l.contains(&0) {
                let v: i128 = l.iter().zip(&scaled).map(|(&a, &h)| a as i128 * h).sum();
                if !seen.insert(v) {
                    return false;
                }
            }
            let mut k = 0;
            while k < n && l[k] == bound {
                l[k] = 0;
                k += 1;
            }
            if k == n {
                return true;
            }
            l[k] += 1;
        }
    }

    /// Weights multiplied by the common denominator, when they fit `i128`
    /// with headroom for bounded lattice sums.
    fn scaled_integers(&self) -> Option<Vec<i128>> {
        let lcm = self
            .h
            .iter()
            .fold(BigInt::one(), |acc, x| num_integer_lcm(&acc, x.denom()));
        self.h
            .iter()
            .map(|x| {
                let v = x.numer() * (&lcm / x.denom());
                v.to_i128().filter(|v| v.unsigned_abs() < 1u128 << 100)
            })
            .collect()
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

/// Effective certificate bound for dimension `n`: the requested bound, or
/// the largest smaller one whose point count fits the budget.
pub fn certificate_bound(n: usize, requested: i32) -> i32 {
    let count = |b: i32| -> u64 {
        let hi = (b as u64 + 1).checked_pow(n as u32).unwrap_or(u64::MAX);
        hi.saturating_sub((b as u64).saturating_pow(n as u32))
    };
    let mut b = requested.max(1);
    while b > 1 && count(b) > CERTIFICATE_POINT_BUDGET {
        b -= 1;
    }
    b
}

/// Deterministic generic weights: integers drawn uniformly from a wide range
/// for the first `n - 1` axes, the last set to minus their sum; redrawn until
/// the genericity certificate holds.
pub fn generic_weights(n: usize, seed: u64) -> Result<WeightAssignment> {
    generic_weights_with_bound(n, seed, DEFAULT_GENERICITY_BOUND)
}

pub fn generic_weights_with_bound(n: usize, seed: u64, bound: i32) -> Result<WeightAssignment> {
    if !(2..=MAX_DIMENSION).contains(&n) {
        return Err(Error::DimensionOutOfRange(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DRAW_BUDGET {
        let mut draws: Vec<i64> = (0..n - 1)
            .map(|_| rng.random_range(-WEIGHT_RANGE..=WEIGHT_RANGE))
            .collect();
        draws.push(-draws.iter().sum::<i64>());
        let w = WeightAssignment::new(
            draws
                .into_iter()
                .map(|x| BigRational::from_integer(x.into()))
                .collect(),
        )?;
        if w.is_generic(bound) {
            return Ok(w);
        }
    }
    Err(Error::GenericityBudget(DRAW_BUDGET))
}

/// `sum l'_i h_i` as an exact rational.
pub fn eval_point(p: &ProjectedPoint, w: &WeightAssignment) -> BigRational {
    assert_eq!(p.dimension(), w.dimension(), "dimension mismatch");
    eval_vector(p.components(), w)
}

pub(crate) fn eval_vector(l: &[i32], w: &WeightAssignment) -> BigRational {
    l.iter()
        .zip(&w.h)
        .filter(|(&a, _)| a != 0)
        .map(|(&a, h)| h * BigRational::from_integer(a.into()))
        .sum()
}

/// Renders `p/q` (always with an explicit denominator).
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Input(format!("malformed rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Serialized form `{"n": int, "h": ["p/q", ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightsJson {
    pub n: usize,
    pub h: Vec<String>,
}

impl From<&WeightAssignment> for WeightsJson {
    fn from(w: &WeightAssignment) -> Self {
        Self {
            n: w.dimension(),
            h: w.h.iter().map(format_rational).collect(),
        }
    }
}

impl WeightsJson {
    pub fn into_weights(self) -> Result<WeightAssignment> {
        if self.h.len() != self.n {
            return Err(Error::Input(format!(
                "expected {} weights, found {}",
                self.n,
                self.h.len()
            )));
        }
        let h = self
            .h
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_>>()?;
        WeightAssignment::new(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    #[test]
    fn projection_is_canonical() {
        let p = |c: &[u16]| LatticeBox::new(c).unwrap().project();
        assert_eq!(p(&[0, 0, 0]).components(), &[0, 0, 0]);
        assert_eq!(p(&[2, 3, 1]).components(), &[1, 2, 0]);
        assert_eq!(p(&[1, 2, 0]), p(&[2, 3, 1]));
    }

    #[test]
    fn shifts() {
        let o = ProjectedPoint::origin(3);
        assert_eq!(o.shift(&[1, 0, 0]).components(), &[1, 0, 0]);
        assert_eq!(
            o.shift(&[1, 0, 0]).shift(&[-1, 0, 0]).components(),
            &[0, 0, 0]
        );
        assert_eq!(o.shift(&[1, 1, 1]), o);
        assert_eq!(o.shift_axes(&[0], -1).components(), &[0, 1, 1]);
    }

    #[test]
    fn two_dimensional_weights_are_antipodal() {
        for seed in 0..5 {
            let w = generic_weights(2, seed).unwrap();
            let h = w.values();
            assert!(!h[0].is_zero());
            assert_eq!(h[1], -h[0].clone());
        }
    }

    #[test]
    fn four_dimensional_weights_are_certified() {
        let w = generic_weights(4, 7).unwrap();
        assert_eq!(w.values().iter().sum::<BigRational>(), q(0));
        assert!(w.is_generic(DEFAULT_GENERICITY_BOUND));
    }

    #[test]
    fn small_combinations_do_not_collide() {
        // {0, ±h_i, h_i + h_j}: only CY-forced coincidences (h_i + h_j = -h_k).
        let w = generic_weights(3, 1).unwrap();
        let h = w.values();
        let mut values = vec![(vec![0, 0, 0], q(0))];
        for i in 0..3 {
            let mut e = vec![0; 3];
            e[i] = 1;
            values.push((e.clone(), h[i].clone()));
            e[i] = -1;
            values.push((e, -h[i].clone()));
            for j in i + 1..3 {
                let mut e = vec![0; 3];
                e[i] = 1;
                e[j] = 1;
                values.push((e, &h[i] + &h[j]));
            }
        }
        for (a, x) in &values {
            for (b, y) in &values {
                let same = ProjectedPoint::from_vector(a) == ProjectedPoint::from_vector(b);
                assert_eq!(x == y, same, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn evaluation() {
        let w = WeightAssignment::new(vec![q(5), q(-5)]).unwrap();
        assert_eq!(eval_point(&ProjectedPoint::origin(2), &w), q(0));
        assert_eq!(eval_point(&ProjectedPoint::from_vector(&[1, 0]), &w), q(5));
        let w3 = generic_weights(3, 2).unwrap();
        let h = w3.values();
        assert_eq!(
            eval_point(&ProjectedPoint::from_vector(&[0, 1, 1]), &w3),
            -h[0].clone()
        );
    }

    #[test]
    fn non_calabi_yau_weights_are_rejected() {
        assert!(matches!(
            WeightAssignment::new(vec![q(1), q(1)]),
            Err(Error::NotCalabiYau(_))
        ));
    }

    #[test]
    fn certificate_bound_respects_budget() {
        assert_eq!(certificate_bound(4, 8), 8);
        assert_eq!(certificate_bound(6, 8), 8);
        assert!(certificate_bound(9, 8) < 8);
    }

    #[test]
    fn weights_json_round_trip() {
        let w = generic_weights(5, 11).unwrap();
        let text = serde_json::to_string(&WeightsJson::from(&w)).unwrap();
        let back: WeightsJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_weights().unwrap(), w);
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
    }

    proptest! {
        #[test]
        fn projection_ignores_all_ones_translation(
            coords in proptest::collection::vec(0u16..50, 1..10),
            k in 0u16..20,
        ) {
            let b = LatticeBox::new(&coords).unwrap();
            let shifted: Vec<u16> = coords.iter().map(|c| c + k).collect();
            prop_assert_eq!(b.project(), LatticeBox::new(&shifted).unwrap().project());
        }

        #[test]
        fn evaluation_factors_through_projection(
            l in proptest::collection::vec(-6i32..6, 4),
            k in -5i32..5,
            seed in 0u64..4,
        ) {
            let w = generic_weights(4, seed).unwrap();
            let shifted: Vec<i32> = l.iter().map(|x| x + k).collect();
            prop_assert_eq!(
                eval_vector(&l, &w),
                eval_point(&ProjectedPoint::from_vector(&shifted), &w)
            );
        }
    }
}
