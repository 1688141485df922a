//! Multi-threaded simulation driver.
//!
//! Rows are split into contiguous bands, one per worker. Band results merge
//! through `combine_bands`, whose canonical sort makes the output
//! independent of the partitioning, so any thread count yields the same
//! stream byte for byte.

use std::num::NonZeroUsize;
use std::thread;

use adv2e_core::pixel::{combine_bands, simulate_rows, RowBand, SimResult};
use adv2e_core::{FrameSource, ValidatedConfig};

/// Runs the full pipeline across `threads` workers.
pub fn simulate_threaded(
    src: &FrameSource,
    cfg: &ValidatedConfig,
    threads: NonZeroUsize,
) -> SimResult {
    let height = src.height();
    let workers = threads.get().min(height as usize);

    if workers <= 1 {
        return combine_bands(src, vec![simulate_rows(src, cfg, 0..height)]);
    }

    // near-equal contiguous bands; the first `rem` bands get one extra row
    let base = height / workers as u32;
    let rem = height % workers as u32;
    let mut bounds = Vec::with_capacity(workers + 1);
    let mut row = 0u32;
    bounds.push(row);
    for i in 0..workers as u32 {
        row += base + u32::from(i < rem);
        bounds.push(row);
    }

    let bands: Vec<RowBand> = thread::scope(|scope| {
        let handles: Vec<_> = bounds
            .windows(2)
            .map(|span| {
                let rows = span[0]..span[1];
                scope.spawn(move || simulate_rows(src, cfg, rows))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation worker panicked")).collect()
    });

    combine_bands(src, bands)
}
