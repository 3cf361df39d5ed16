//! Scaling measurements: median wall time of each construction over seeded
//! generator instances, and growth ratios between consecutive sizes.

use std::fmt;
use std::time::{Duration, Instant};

use crate::copoints::pq_tree2;
use crate::dendrogram::build_dendrogram;
use crate::error::Result;
use crate::generate::{generate, Profile};
use crate::matrix::DissimilarityMatrix;
use crate::mmodtree::mmodule_tree;
use crate::translate::{mmodule_to_pq_tree, pq_to_mmodule_tree};

/// The measured operations, in table column order.
pub const OPERATIONS: [&str; 5] = [
    "dendrogram",
    "mmodule",
    "pq",
    "pq-to-mmodule",
    "mmodule-to-pq",
];

/// Median times at one size, indexed like [`OPERATIONS`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub medians: [Duration; 5],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    /// `t(n_{i+1}) / t(n_i)` per operation for consecutive rows.
    pub fn ratios(&self) -> Vec<(usize, usize, [f64; 5])> {
        self.rows
            .windows(2)
            .map(|w| {
                let mut r = [0.0; 5];
                for (k, slot) in r.iter_mut().enumerate() {
                    let a = w[0].medians[k].as_secs_f64();
                    let b = w[1].medians[k].as_secs_f64();
                    *slot = if a > 0.0 { b / a } else { f64::INFINITY };
                }
                (w[0].n, w[1].n, r)
            })
            .collect()
    }
}

impl fmt::Display for BenchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>8}", "n")?;
        for op in OPERATIONS {
            write!(f, " {op:>14}")?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{:>8}", row.n)?;
            for t in row.medians {
                write!(f, " {:>12.3}ms", t.as_secs_f64() * 1e3)?;
            }
            writeln!(f)?;
        }
        for (a, b, r) in self.ratios() {
            write!(f, "{:>8}", format!("{a}->{b}"))?;
            for x in r {
                write!(f, " {x:>14.2}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn median(mut ts: Vec<Duration>) -> Duration {
    ts.sort_unstable();
    ts[ts.len() / 2]
}

/// Runs per timing; the fastest is kept, which filters out preemption
/// spikes that would otherwise dominate millisecond-scale operations.
const INNER_RUNS: usize = 3;

fn time<T>(mut f: impl FnMut() -> Result<T>) -> Result<(Duration, T)> {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..INNER_RUNS {
        let start = Instant::now();
        let value = f()?;
        best = best.min(start.elapsed());
        out = Some(value);
    }
    Ok((best, out.expect("at least one run")))
}

/// One timed run of every operation on `m`, in [`OPERATIONS`] order.
fn measure(m: &DissimilarityMatrix) -> Result<[Duration; 5]> {
    let all = m.all();
    let (t0, _) = time(|| build_dendrogram(m, all.as_slice()))?;
    let (t1, mt) = time(|| mmodule_tree(m, &all))?;
    let (t2, pq) = time(|| pq_tree2(m, &all))?;
    let (t3, _) = time(|| Ok(pq_to_mmodule_tree(m, &pq)))?;
    let (t4, _) = time(|| mmodule_to_pq_tree(m, &mt))?;
    Ok([t0, t1, t2, t3, t4])
}

/// Time every operation `repetitions` times per size, each repetition on
/// its own instance (seed `seed + rep`). Zero repetitions give an empty
/// table.
///
/// Each size starts with one untimed pass over the first instance, so the
/// first timed repetition does not pay for growing the heap to the new
/// size.
pub fn run_bench(
    sizes: &[usize],
    repetitions: usize,
    seed: u64,
    profile: Profile,
) -> Result<BenchTable> {
    let mut table = BenchTable::default();
    if repetitions == 0 {
        return Ok(table);
    }
    for &n in sizes {
        let mut samples: [Vec<Duration>; 5] = Default::default();
        measure(&generate(n.max(1), seed, profile))?;
        for rep in 0..repetitions {
            let m = generate(n.max(1), seed.wrapping_add(rep as u64), profile);
            for (slot, t) in samples.iter_mut().zip(measure(&m)?) {
                slot.push(t);
            }
        }
        table.rows.push(BenchRow {
            n,
            medians: samples.map(median),
        });
    }
    Ok(table)
}
