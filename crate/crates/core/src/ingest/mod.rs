//! Time-tagged click records and coincidence windowing.
//!
//! Tag files are UTF-8 text with LF line endings:
//!
//! ```text
//! #clickkit-tags v1 channels=9 trigger=8
//! 0,8
//! 3000,2
//! 4000,7
//! ```
//!
//! The first line declares the channel count and, optionally, the herald
//! channel. Every other line is either a comment starting with `#` or a
//! `<timestamp_ps>,<channel>` record. Timestamps are non-decreasing
//! integer picoseconds.

mod format;
mod window;

pub use format::{parse_tag_stream, TagHeader, TagReader, TagRecord, TagStream, TagWriter};
pub use window::{ns_to_ps, window_continuous, window_triggered, Windowed};
