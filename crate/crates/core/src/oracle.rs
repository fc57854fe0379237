//! Independent check of the pole ledger: expand `psi(u)` into its literal
//! linear factors with exact rational roots, group equal roots, and only
//! then map back to lattice points.
//!
//! The factor lists here are written out per dimension from the factor
//! definitions and do not share code with [`crate::charge`].

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use crate::charge::PoleLedger;
use crate::error::{Error, Result};
use crate::lattice::Partition;
use crate::projection::{eval_vector, format_rational, ProjectedPoint, WeightAssignment};

/// One linear factor `(u - root)^(-order)`: `order > 0` is a pole.
#[derive(Debug, Clone)]
struct Root {
    lattice: Vec<i32>,
    order: i32,
}

struct Expansion<'a> {
    w: &'a WeightAssignment,
    roots: Vec<(BigRational, Root)>,
}

impl Expansion<'_> {
    fn push(&mut self, lattice: Vec<i32>, order: i32) {
        let value = eval_vector(&lattice, self.w);
        self.roots.push((value, Root { lattice, order }));
    }

    /// Factor centred at `base` with root `base + sum_{i in plus} h_i - sum_{i in minus} h_i`.
    fn push_offset(&mut self, base: &[i32], plus: &[usize], minus: &[usize], order: i32) {
        let mut l = base.to_vec();
        plus.iter().for_each(|&i| l[i] += 1);
        minus.iter().for_each(|&i| l[i] -= 1);
        self.push(l, order);
    }
}

/// Builds the ledger from rational roots. Fails when two roots coincide as
/// rationals without coinciding on the projected lattice, which means the
/// weights are not generic enough for this partition.
pub fn rational_oracle_ledger(p: &Partition, w: &WeightAssignment) -> Result<PoleLedger> {
    let n = p.dimension();
    if w.dimension() != n {
        return Err(Error::Input(format!(
            "weights are {}-dimensional, partition is {n}-dimensional",
            w.dimension()
        )));
    }
    if !(2..=12).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut ex = Expansion {
        w,
        roots: Vec::new(),
    };
    // psi_0 = 1/u.
    ex.push(vec![0; n], 1);

    let boxes: Vec<Vec<i32>> = p
        .boxes()
        .map(|b| b.coords().iter().map(|&c| c as i32).collect())
        .collect();
    for c in &boxes {
        single_box_factor(&mut ex, n, c);
    }
    cluster_factors(&mut ex, n, &boxes);
    group(n, ex.roots)
}

fn single_box_factor(ex: &mut Expansion<'_>, n: usize, c: &[i32]) {
    let k = n / 2;
    match n {
        // 1 / ((u - h1)(u - h2))
        2 => {
            ex.push_offset(c, &[0], &[], 1);
            ex.push_offset(c, &[1], &[], 1);
        }
        // prod (u + h_i) / (u - h_i)
        3 => {
            for i in 0..3 {
                ex.push_offset(c, &[i], &[], 1);
                ex.push_offset(c, &[], &[i], -1);
            }
        }
        // prod (u + h_i) prod_{i<j} (u - h_i - h_j) / prod (u - h_i), and the
        // even formula with 2m-subsets for m < K.
        _ if n.is_multiple_of(2) => {
            for i in 0..n {
                ex.push_offset(c, &[i], &[], 1);
                ex.push_offset(c, &[], &[i], -1);
            }
            for m in 1..k {
                for s in (0..n).combinations(2 * m) {
                    ex.push_offset(c, &s, &[], -1);
                }
            }
        }
        // prod_{m=1..K} prod (u - sum of 2m weights) / prod (u - h_i)
        _ => {
            for i in 0..n {
                ex.push_offset(c, &[i], &[], 1);
            }
            for m in 1..=k {
                for s in (0..n).combinations(2 * m) {
                    ex.push_offset(c, &s, &[], -1);
                }
            }
        }
    }
}

/// `(p, order)` pairs for the cluster factors `u^{-order}`.
fn cluster_orders(n: usize) -> Vec<(usize, i32)> {
    let k = n / 2;
    match n {
        2 => vec![(2, -2), (3, 2)],
        3 => vec![],
        _ if n % 2 == 1 => (2..=k).map(|m| (2 * m, 1)).collect(),
        _ => {
            let mut v: Vec<(usize, i32)> = (2..k).map(|m| (2 * m, 1)).collect();
            v.push((2 * k, 2));
            v.push((2 * k + 1, -2));
            v
        }
    }
}

fn cluster_factors(ex: &mut Expansion<'_>, n: usize, boxes: &[Vec<i32>]) {
    let present: std::collections::HashSet<&[i32]> = boxes.iter().map(Vec::as_slice).collect();
    for (p, order) in cluster_orders(n) {
        for c in boxes {
            for dirs in (0..n).combinations(p - 1) {
                let inside = dirs.iter().all(|&s| {
                    let mut b = c.clone();
                    b[s] += 1;
                    present.contains(b.as_slice())
                });
                if !inside {
                    continue;
                }
                if n == 2 {
                    ex.push_offset(c, &[0, 1], &[], order);
                } else {
                    ex.push_offset(c, &dirs, &[], order);
                }
            }
        }
    }
}

fn group(n: usize, roots: Vec<(BigRational, Root)>) -> Result<PoleLedger> {
    let mut by_value: BTreeMap<BigRational, (ProjectedPoint, Vec<i32>, i32)> = BTreeMap::new();
    for (value, root) in roots {
        let point = ProjectedPoint::from_vector(&root.lattice);
        match by_value.get_mut(&value) {
            Some((existing, first, order)) => {
                if *existing != point {
                    return Err(Error::GenericityFailure {
                        value: format_rational(&value),
                        first: first.clone(),
                        second: root.lattice,
                    });
                }
                *order += root.order;
            }
            None => {
                by_value.insert(value, (point, root.lattice, root.order));
            }
        }
    }
    let mut counts = BTreeMap::new();
    for (_, (point, lattice, order)) in by_value {
        if order.is_zero() {
            continue;
        }
        // Distinct rationals always come from distinct lattice classes.
        if counts.insert(point, order).is_some() {
            return Err(Error::Input(format!(
                "lattice point {lattice:?} evaluated to two rationals"
            )));
        }
    }
    Ok(PoleLedger::from_counts(n, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::build_ledger;
    use crate::lattice::{validate_partition, LatticeBox};
    use crate::projection::generic_weights;
    use rand::SeedableRng;

    #[test]
    fn plane_single_box() {
        let p = validate_partition(3, [LatticeBox::origin(3)]).unwrap();
        let w = generic_weights(3, 7).unwrap();
        assert_eq!(rational_oracle_ledger(&p, &w).unwrap(), build_ledger(&p).unwrap());
    }

    #[test]
    fn young_single_box_has_three_poles() {
        let p = validate_partition(2, [LatticeBox::origin(2)]).unwrap();
        let w = generic_weights(2, 3).unwrap();
        let l = rational_oracle_ledger(&p, &w).unwrap();
        let h = &w.values()[0];
        let mut values: Vec<BigRational> = l
            .entries()
            .map(|(q, order)| {
                assert_eq!(order, 1);
                crate::projection::eval_point(q, &w)
            })
            .collect();
        values.sort();
        let mut expected = vec![BigRational::zero(), h.clone(), -h.clone()];
        expected.sort();
        assert_eq!(values, expected);
    }

    #[test]
    fn random_six_dimensional_partitions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let w = generic_weights(6, 1).unwrap();
        for _ in 0..20 {
            let p = Partition::random_growth(6, 6, &mut rng).unwrap();
            assert_eq!(rational_oracle_ledger(&p, &w).unwrap(), build_ledger(&p).unwrap());
        }
    }

    #[test]
    fn degenerate_weights_are_detected() {
        use num_traits::One;
        // h = (1, 1, -2): h1 and h2 coincide.
        let one = BigRational::one();
        let w = WeightAssignment::new(vec![one.clone(), one.clone(), -(one.clone() + one)]).unwrap();
        let p = validate_partition(3, [LatticeBox::origin(3)]).unwrap();
        assert!(matches!(
            rational_oracle_ledger(&p, &w),
            Err(Error::GenericityFailure { .. })
        ));
    }
}
