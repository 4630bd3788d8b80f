//! File formats, wall-clock timing, reports and the benchmark harness around
//! [`mapf_core`].

pub mod bench;
pub mod clock;
pub mod io;
pub mod report;

pub use clock::WallClock;
