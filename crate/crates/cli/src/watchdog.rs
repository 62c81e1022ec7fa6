//! Wall clock and allocation accounting for the search.

use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use lcplan_core::search::Clock;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

/// System allocator that keeps a count of live bytes. Install it with
/// `#[global_allocator]`; without it the counters stay at zero.
pub struct CountingAlloc;

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc_zeroed(layout);
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        LIVE.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            LIVE.fetch_sub(layout.size(), Ordering::Relaxed);
            grow(new_size);
        }
        p
    }
}

fn grow(n: usize) {
    let now = LIVE.fetch_add(n, Ordering::Relaxed) + n;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

pub fn live_bytes() -> usize {
    LIVE.load(Ordering::Relaxed)
}

pub fn peak_bytes() -> usize {
    PEAK.load(Ordering::Relaxed)
}

/// Real time since construction; interrupts once live memory passes the
/// limit.
pub struct WallClock {
    start: Instant,
    memory_limit: Option<usize>,
    tripped: Cell<bool>,
}

impl WallClock {
    pub fn new(memory_limit: Option<usize>) -> Self {
        WallClock { start: Instant::now(), memory_limit, tripped: Cell::new(false) }
    }

    /// Whether the memory limit was ever hit.
    pub fn memory_exceeded(&self) -> bool {
        self.tripped.get()
    }
}

impl Clock for WallClock {
    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn interrupted(&self) -> bool {
        if self.memory_limit.is_some_and(|m| live_bytes() > m) {
            self.tripped.set(true);
        }
        self.tripped.get()
    }
}
