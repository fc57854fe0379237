//! Random down-sets of `HC^(d)` and the Monte Carlo bound check on the
//! potential at the top cell.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::{is_down_closed, CellMask, HypercubeConfig, MAX_SUBDIM};
use crate::lemma::TargetProbe;

/// Cover relations of the Boolean lattice of dimension `d`.
#[derive(Debug, Clone)]
pub struct CoverTable {
    d: usize,
    lower: Vec<Vec<u16>>,
    upper: Vec<Vec<u16>>,
}

impl CoverTable {
    pub fn new(d: usize) -> Result<Self> {
        if !(1..=MAX_SUBDIM).contains(&d) {
            return Err(Error::SubdimOutOfRange(d));
        }
        let cells = 1usize << d;
        let covers = |up: bool| -> Vec<Vec<u16>> {
            (0..cells)
                .map(|c| {
                    (0..d)
                        .filter(|&i| (c >> i & 1 == 1) != up)
                        .map(|i| (c ^ 1 << i) as u16)
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            d,
            lower: covers(false),
            upper: covers(true),
        })
    }

    pub fn subdim(&self) -> usize {
        self.d
    }

    pub fn cells(&self) -> usize {
        1 << self.d
    }

    fn addable(&self, mask: &CellMask, cell: usize) -> bool {
        !mask.contains(cell) && self.lower[cell].iter().all(|&c| mask.contains(c as usize))
    }

    fn removable(&self, mask: &CellMask, cell: usize) -> bool {
        mask.contains(cell) && self.upper[cell].iter().all(|&c| !mask.contains(c as usize))
    }
}

/// Single-cell toggle chain on down-sets. The proposal is a uniform cell;
/// the flip is taken when it keeps the set down-closed, so the stationary
/// distribution is uniform over down-sets.
#[derive(Debug, Clone)]
pub struct DownsetChain<'a> {
    table: &'a CoverTable,
    mask: CellMask,
}

impl<'a> DownsetChain<'a> {
    pub fn new(table: &'a CoverTable) -> Self {
        Self {
            table,
            mask: CellMask::EMPTY,
        }
    }

    pub fn mask(&self) -> &CellMask {
        &self.mask
    }

    /// One proposal; returns whether it was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let cell = rng.random_range(0..self.table.cells());
        if self.table.removable(&self.mask, cell) {
            self.mask.remove(cell);
            true
        } else if self.table.addable(&self.mask, cell) {
            self.mask.insert(cell);
            true
        } else {
            false
        }
    }
}

/// Grows a down-set from empty by adding uniformly chosen addable cells
/// until it has `target` cells.
pub fn grow_downset<R: Rng + ?Sized>(table: &CoverTable, target: usize, rng: &mut R) -> Result<CellMask> {
    if target > table.cells() {
        return Err(Error::StratumOutOfRange {
            target,
            cells: table.cells(),
        });
    }
    let mut mask = CellMask::EMPTY;
    let mut frontier = vec![0u16];
    for _ in 0..target {
        let pick = frontier.swap_remove(rng.random_range(0..frontier.len())) as usize;
        mask.insert(pick);
        for &up in &table.upper[pick] {
            if table.addable(&mask, up as usize) {
                frontier.push(up);
            }
        }
    }
    Ok(mask)
}

fn origin_config(d: usize, mask: CellMask) -> Result<HypercubeConfig> {
    HypercubeConfig::at_origin(d, d, mask)
}

/// Runs the toggle chain for `steps` proposals from the empty set.
pub fn sample_downset_chain(d: usize, seed: u64, steps: u64) -> Result<HypercubeConfig> {
    let table = CoverTable::new(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = DownsetChain::new(&table);
    for _ in 0..steps {
        chain.step(&mut rng);
    }
    origin_config(d, *chain.mask())
}

pub fn sample_downset_sequential(d: usize, seed: u64, target: usize) -> Result<HypercubeConfig> {
    let table = CoverTable::new(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    origin_config(d, grow_downset(&table, target, &mut rng)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMethod {
    Chain,
    Sequential,
}

impl fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Chain => "chain",
            Self::Sequential => "sequential",
        })
    }
}

impl FromStr for SampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(Self::Chain),
            "sequential" => Ok(Self::Sequential),
            _ => Err(Error::Input(format!("unknown sampling method {s:?}"))),
        }
    }
}

/// One sampled configuration. `seed` is the stream seed it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleRecord {
    pub seed: u64,
    #[serde(rename = "N")]
    pub boxes: usize,
    pub omega: i32,
    pub method: SampleMethod,
}

#[derive(Debug, Clone)]
pub struct McParams {
    pub n: usize,
    pub d: usize,
    pub samples_per_n: usize,
    pub seed: u64,
    pub method: SampleMethod,
    pub jobs: usize,
}

impl McParams {
    /// 512 samples per stratum in the 8-dimensional hypercube.
    pub fn default_8d(seed: u64, jobs: usize) -> Self {
        Self {
            n: 8,
            d: 8,
            samples_per_n: 512,
            seed,
            method: SampleMethod::Sequential,
            jobs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McReport {
    pub n: usize,
    pub d: usize,
    pub method: SampleMethod,
    pub samples: u64,
    /// `(N, omega) -> count`.
    pub histogram: BTreeMap<(usize, i32), u64>,
    pub max_omega: i32,
    /// Samples with `omega > 1`.
    pub above_bound: u64,
    /// Samples at `N in {0, 1, 2^d - 1, 2^d}` with `omega != 1` (only
    /// checked when `d = n`).
    pub boundary_failures: u64,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.above_bound == 0 && self.boundary_failures == 0
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        crate::lemma::write_histogram_csv(&self.histogram, out)
    }
}

/// Stream seed for stratum (or chain block) `index`.
pub fn stratum_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

fn draw_block(
    params: &McParams,
    table: &CoverTable,
    probe: &TargetProbe<CellMask>,
    index: usize,
) -> Vec<SampleRecord> {
    let seed = stratum_seed(params.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = table.cells();
    let record = |mask: &CellMask| {
        assert!(
            is_down_closed(table.subdim(), mask),
            "sampler produced a configuration violating the melting rule"
        );
        SampleRecord {
            seed,
            boxes: mask.len(),
            omega: probe.omega(mask),
            method: params.method,
        }
    };
    match params.method {
        SampleMethod::Sequential => (0..params.samples_per_n)
            .map(|_| {
                let mask = grow_downset(table, index, &mut rng).expect("stratum in range");
                record(&mask)
            })
            .collect(),
        SampleMethod::Chain => {
            let mut chain = DownsetChain::new(table);
            for _ in 0..10 * cells {
                chain.step(&mut rng);
            }
            (0..params.samples_per_n)
                .map(|_| {
                    for _ in 0..cells {
                        chain.step(&mut rng);
                    }
                    record(chain.mask())
                })
                .collect()
        }
    }
}

/// Draws `samples_per_n` configurations for every stratum `N = 0..=2^d`
/// (sequential growth) or from `2^d + 1` independent chains (toggle chain),
/// scores `omega_0` at the top cell and checks the bound `omega <= 1`.
pub fn run_mc_experiment(params: &McParams) -> Result<McReport> {
    let table = CoverTable::new(params.d)?;
    let probe = TargetProbe::<CellMask>::new(params.n, params.d)?;
    let blocks: Vec<usize> = (0..=table.cells()).collect();
    let draw = |&i: &usize| draw_block(params, &table, &probe, i);
    let parts: Vec<Vec<SampleRecord>> = if params.jobs <= 1 {
        blocks.iter().map(draw).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(params.jobs)
            .build()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?
            .install(|| blocks.par_iter().map(draw).collect())
    };

    let cells = table.cells();
    let boundary = [0, 1, cells - 1, cells];
    let mut report = McReport {
        n: params.n,
        d: params.d,
        method: params.method,
        samples: 0,
        histogram: BTreeMap::new(),
        max_omega: i32::MIN,
        above_bound: 0,
        boundary_failures: 0,
    };
    for r in parts.into_iter().flatten() {
        report.samples += 1;
        report.max_omega = report.max_omega.max(r.omega);
        if r.omega > 1 {
            report.above_bound += 1;
        }
        if params.d == params.n && boundary.contains(&r.boxes) && r.omega != 1 {
            report.boundary_failures += 1;
        }
        *report.histogram.entry((r.boxes, r.omega)).or_default() += 1;
    }
    Ok(report)
}
