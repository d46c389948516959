//! Barrier-separated data-parallel stages over preallocated slot buffers.
//!
//! Each stage maps every input item into its own fixed slice of slots, sized by
//! an exact per-item bound computed before the stage runs. Unused slots stay
//! `None`. After the map (the barrier) the buffer is compacted in input order,
//! so output order never depends on scheduling.

use rayon::prelude::*;

/// Occupancy record for one stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageStats {
    pub name: &'static str,
    /// Number of times the stage ran.
    pub runs: usize,
    /// Largest preallocated slot count in any run.
    pub peak_capacity: usize,
    /// Largest number of filled slots in any run.
    pub peak_filled: usize,
    pub total_filled: usize,
}

impl StageStats {
    pub fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Default::default()
        }
    }

    fn record(&mut self, capacity: usize, filled: usize) {
        self.runs += 1;
        self.peak_capacity = self.peak_capacity.max(capacity);
        self.peak_filled = self.peak_filled.max(filled);
        self.total_filled += filled;
    }
}

/// Runs `f(item, slots)` for every item in parallel, where `slots` has exactly
/// `bound(item)` entries, then compacts the filled slots in input order.
pub fn map_into_slots<I, O, E, B, F>(
    input: &[I],
    bound: B,
    f: F,
    stats: &mut StageStats,
) -> Result<Vec<O>, E>
where
    I: Sync,
    O: Send,
    E: Send,
    B: Fn(&I) -> usize + Sync,
    F: Fn(&I, &mut [Option<O>]) -> Result<(), E> + Sync,
{
    let bounds: Vec<usize> = input.par_iter().map(&bound).collect();
    let capacity: usize = bounds.iter().sum();
    let mut buffer: Vec<Option<O>> = Vec::with_capacity(capacity);
    buffer.resize_with(capacity, || None);

    let mut chunks: Vec<&mut [Option<O>]> = Vec::with_capacity(input.len());
    let mut rest = buffer.as_mut_slice();
    for &b in &bounds {
        let (head, tail) = rest.split_at_mut(b);
        chunks.push(head);
        rest = tail;
    }
    chunks
        .into_par_iter()
        .zip(input.par_iter())
        .try_for_each(|(slots, item)| f(item, slots))?;

    let out: Vec<O> = buffer.into_iter().flatten().collect();
    stats.record(capacity, out.len());
    Ok(out)
}

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); using the global pool");
            f()
        }
    }
}
