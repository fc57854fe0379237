//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;

use charge_lattice::charge::LedgerOptions;
use charge_lattice::lattice::PartitionJson;
use charge_lattice::{
    build_ledger, build_ledger_with, count_downsets, generic_weights, make_hypercube, neighbor_count,
    omega_hypercube_closed_form, phi1_4d_symmetric_equiv, potential_omega0, rational_oracle_ledger,
    run_mc_experiment, validate_partition, verify_lemma, verify_properties, ChargeModel, LatticeBox,
    McParams, Partition, ProjectedPoint, SampleMethod,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const JOBS: usize = 8;
const MC_SEED: u64 = 42;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            ok,
            detail: detail.into(),
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn dump(p: &Partition) -> String {
    serde_json::to_string(&PartitionJson::from(p)).unwrap()
}

// Outputs of criteria 1-3, compared byte for byte in criterion 8.

fn downset_counts(jobs: usize) -> String {
    (1..=6)
        .map(|d| format!("{d},{}\n", count_downsets(d, jobs).unwrap()))
        .collect()
}

fn lemma_csvs(jobs: usize) -> Vec<Vec<u8>> {
    (1..=6)
        .map(|d| {
            let mut buf = Vec::new();
            verify_lemma(6, d, jobs).unwrap().write_csv(&mut buf).unwrap();
            buf
        })
        .collect()
}

fn mc_csv(jobs: usize) -> Vec<u8> {
    let mut buf = Vec::new();
    run_mc_experiment(&McParams::default_8d(MC_SEED, jobs))
        .unwrap()
        .write_csv(&mut buf)
        .unwrap();
    buf
}

fn criterion_1() -> Outcome {
    let expected = [3u64, 6, 20, 168, 7581, 7_828_354];
    let counts: Vec<u64> = (1..=6).map(|d| count_downsets(d, JOBS).unwrap()).collect();
    let sum: u64 = counts.iter().sum();
    Outcome::new(
        counts == expected && sum == 7_836_132,
        format!("counts {counts:?}, sum {sum}"),
    )
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in 1..=6 {
        let r = verify_lemma(6, d, JOBS).unwrap();
        ok &= r.violations.is_empty() && r.characterization_mismatches == 0;
        notes.push(format!("d={d}: {} configs, {} violations", r.total_configs, r.violations.len()));
        if d == 6 {
            let at_one: BTreeSet<usize> = r
                .histogram
                .keys()
                .filter(|&&(_, w)| w == 1)
                .map(|&(n, _)| n)
                .collect();
            let envelope = r.envelope();
            let max = envelope.values().copied().max().unwrap();
            ok &= at_one == BTreeSet::from([0, 1, 63, 64]);
            ok &= max <= 1 && envelope.len() == 65;
            notes.push(format!("omega=1 at N={at_one:?}, envelope max {max}"));
        }
    }
    Outcome::new(ok, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let r = run_mc_experiment(&McParams::default_8d(MC_SEED, JOBS)).unwrap();
    let boundary = [0usize, 1, 255, 256];
    let mut ok = r.samples >= 100_000 && r.above_bound == 0 && r.boundary_failures == 0;
    for n in boundary {
        let cells: Vec<_> = r.histogram.iter().filter(|((m, _), _)| *m == n).collect();
        ok &= !cells.is_empty() && cells.iter().all(|((_, w), _)| *w == 1);
    }
    let chain = run_mc_experiment(&McParams {
        method: SampleMethod::Chain,
        ..McParams::default_8d(MC_SEED, JOBS)
    })
    .unwrap();
    ok &= chain.above_bound == 0;
    Outcome::new(
        ok,
        format!(
            "{} samples, max omega {}, {} above bound, {} boundary failures; chain max omega {}",
            r.samples, r.max_omega, r.above_bound, r.boundary_failures, chain.max_omega
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    for d in 1..=8 {
        for m in 0..=d {
            ok &= neighbor_count(d, m).unwrap() == binomial(d as u64, m as u64);
        }
    }
    let mut cross = 0;
    for n in 2..=8usize {
        for d in 1..=n {
            let f = omega_hypercube_closed_form(n, d).unwrap();
            ok &= if d < n {
                f.omega == 1 && f.omega0 == 1
            } else {
                f.omega == 0 && f.omega0 == 1
            };
            let axes: Vec<usize> = (0..d).collect();
            let boxes = make_hypercube(&LatticeBox::origin(n), &axes).unwrap();
            let top = boxes.iter().max_by_key(|b| b.total()).unwrap().project();
            let p = validate_partition(n, boxes).unwrap();
            ok &= i64::from(build_ledger(&p).unwrap().pole_order(&top)) == f.omega0;
            if n >= 4 && n % 2 == 0 {
                ok &= i64::from(potential_omega0(&p, &top).unwrap()) == f.omega0;
            }
            cross += 1;
        }
    }
    Outcome::new(ok, format!("C(d,m) for d<=8, closed form for 2<=n<=8, {cross} full-hypercube cross-checks"))
}

fn random_probe<R: Rng>(p: &Partition, rng: &mut R) -> ProjectedPoint {
    let n = p.dimension();
    let boxes: Vec<&LatticeBox> = p.boxes().collect();
    let base = if boxes.is_empty() || rng.random_bool(0.1) {
        ProjectedPoint::origin(n)
    } else {
        boxes[rng.random_range(0..boxes.len())].project()
    };
    let deltas: Vec<i32> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
    base.shift(&deltas)
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut checked = 0u64;
    let mut probes = 0u64;
    let mut failures = Vec::new();
    for n in 2..=9usize {
        let weights: Vec<_> = (1..=3).map(|s| generic_weights(n, s).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(500 + n as u64);
        for i in 0..200 {
            let p = Partition::random_growth(n, i % 11, &mut rng).unwrap();
            let ledger = build_ledger(&p).unwrap();
            for w in &weights {
                let same = rational_oracle_ledger(&p, w).map(|o| o == ledger);
                if !matches!(same, Ok(true)) {
                    ok = false;
                    failures.push(format!("n={n} {} -> {same:?}", dump(&p)));
                }
                checked += 1;
            }
            if n >= 4 && n % 2 == 0 {
                for _ in 0..50 {
                    let q = random_probe(&p, &mut rng);
                    if potential_omega0(&p, &q).unwrap() != ledger.pole_order(&q) {
                        ok = false;
                        failures.push(format!("n={n} probe {:?} on {}", q.components(), dump(&p)));
                    }
                    probes += 1;
                }
            }
        }
    }
    for f in failures.iter().take(10) {
        eprintln!("  criterion 5 failure: {f}");
    }
    Outcome::new(
        ok,
        format!("{checked} oracle comparisons, {probes} potential probes, {} failures", failures.len()),
    )
}

/// All integer partitions of `total` with parts at most `max`.
fn integer_partitions(total: usize, max: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(total)).rev() {
        for mut rest in integer_partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn young_diagram(rows: &[usize]) -> Partition {
    let boxes = rows
        .iter()
        .enumerate()
        .flat_map(|(i, &len)| (0..len).map(move |j| LatticeBox::new(&[i as u16, j as u16]).unwrap()));
    validate_partition(2, boxes).unwrap()
}

/// Partitions checked by criterion 6, keyed by dimension.
fn bijection_suite() -> Vec<(usize, Vec<Partition>)> {
    let young = (0..=8)
        .flat_map(|t| integer_partitions(t, t))
        .map(|rows| young_diagram(&rows))
        .collect();
    let mut suite = vec![(2, young)];
    for n in 3..=6usize {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + n as u64);
        let sampled = (0..500)
            .map(|i| Partition::random_growth(n, 1 + i % 10, &mut rng).unwrap())
            .collect();
        suite.push((n, sampled));
    }
    suite
}

fn criterion_6(suite: &[(usize, Vec<Partition>)]) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, parts) in suite {
        let mut failed = 0;
        for p in parts {
            let r = verify_properties(p).unwrap();
            if !(r.simple_poles && r.bijection) {
                failed += 1;
                eprintln!("  criterion 6 failure: {} mismatches {:?}", dump(p), r.mismatches);
            }
        }
        ok &= failed == 0;
        notes.push(format!("n={n}: {}/{}", parts.len() - failed, parts.len()));
    }
    let young = suite[0].1.len();
    ok &= young == 67;
    Outcome::new(ok, notes.join(", "))
}

fn criterion_7(suite: &[(usize, Vec<Partition>)]) -> Outcome {
    let solid = LedgerOptions {
        model: Some(ChargeModel::Solid),
        ..LedgerOptions::default()
    };
    let general = LedgerOptions {
        model: Some(ChargeModel::even_general(4).unwrap()),
        ..LedgerOptions::default()
    };
    let four = &suite.iter().find(|(n, _)| *n == 4).unwrap().1;
    let identical = four
        .iter()
        .filter(|p| build_ledger_with(p, &solid).unwrap() == build_ledger_with(p, &general).unwrap())
        .count();
    let symmetric = (1..=100)
        .filter(|&s| phi1_4d_symmetric_equiv(generic_weights(4, s).unwrap().values()))
        .count();
    Outcome::new(
        identical == four.len() && symmetric == 100,
        format!("{identical}/{} identical ledgers, {symmetric}/100 weight seeds", four.len()),
    )
}

fn criterion_8(first: &(String, Vec<Vec<u8>>, Vec<u8>)) -> Outcome {
    let again = (downset_counts(JOBS), lemma_csvs(JOBS), mc_csv(JOBS));
    let single = (downset_counts(1), lemma_csvs(1), mc_csv(1));
    let same = |a: &(String, Vec<Vec<u8>>, Vec<u8>), b: &(String, Vec<Vec<u8>>, Vec<u8>)| {
        [a.0 == b.0, a.1 == b.1, a.2 == b.2]
    };
    let rerun = same(first, &again);
    let jobs = same(first, &single);
    Outcome::new(
        rerun.iter().chain(&jobs).all(|&x| x),
        format!("rerun {rerun:?}, jobs 1 vs {JOBS} {jobs:?}"),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    let mut line = |id: usize, name: &str, o: Outcome| {
        all &= o.ok;
        let verdict = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {id} [{name}]: {verdict} ({})", o.detail);
    };

    line(1, "down-set counts", criterion_1());
    line(2, "6D lemma exhaustion", criterion_2());
    line(3, "8D Monte Carlo", criterion_3());
    line(4, "closed forms", criterion_4());
    line(5, "oracle equivalence", criterion_5());
    let suite = bijection_suite();
    line(6, "bijection", criterion_6(&suite));
    line(7, "4D consistency", criterion_7(&suite));
    let first = (downset_counts(JOBS), lemma_csvs(JOBS), mc_csv(JOBS));
    line(8, "determinism", criterion_8(&first));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
