//! Per-thread operation counters.
//!
//! Kernels in this module record an approximate floating-point operation
//! count and the shape of every SVD they run. The online/offline cost
//! report and the complexity tests read these counters; they are not meant
//! to be exact, only to expose which sizes of work a code path touches.

use std::cell::RefCell;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpCounts {
    pub flops: u64,
    /// Shapes `(rows, cols)` of every SVD input, in call order.
    pub svd_shapes: Vec<(usize, usize)>,
}

impl OpCounts {
    pub fn svd_calls(&self) -> usize {
        self.svd_shapes.len()
    }

    /// Largest dimension among all recorded SVD inputs (0 when none ran).
    pub fn max_svd_dim(&self) -> usize {
        self.svd_shapes.iter().map(|&(r, c)| r.max(c)).max().unwrap_or(0)
    }
}

thread_local! {
    static COUNTS: RefCell<OpCounts> = RefCell::new(OpCounts::default());
}

pub(crate) fn add_flops(n: u64) {
    COUNTS.with(|c| c.borrow_mut().flops += n);
}

pub(crate) fn record_svd(rows: usize, cols: usize) {
    COUNTS.with(|c| c.borrow_mut().svd_shapes.push((rows, cols)));
}

/// Clears the counters of the calling thread.
pub fn reset() {
    COUNTS.with(|c| *c.borrow_mut() = OpCounts::default());
}

/// Returns and clears the counters of the calling thread.
pub fn take() -> OpCounts {
    COUNTS.with(|c| std::mem::take(&mut *c.borrow_mut()))
}

/// Runs `f` with fresh counters and returns its result with the counts it
/// accumulated. Counters that were live before the call are restored, with
/// the nested counts added on top.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, OpCounts) {
    let outer = take();
    let value = f();
    let inner = take();
    COUNTS.with(|c| {
        let mut c = c.borrow_mut();
        *c = outer;
        c.flops += inner.flops;
        c.svd_shapes.extend_from_slice(&inner.svd_shapes);
    });
    (value, inner)
}
