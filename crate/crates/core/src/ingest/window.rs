use super::format::TagRecord;
use crate::error::{Error, Result};
use crate::histogram::{ClickHistogram, WindowMode};

/// Histogram produced by windowing, with the non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Windowed {
    pub histogram: ClickHistogram,
    /// Continuous-wave tags in the incomplete window `[M·Δτ, T)`; not counted.
    pub partial_window_tags: u64,
    /// Triggers whose window contains the next trigger.
    pub overlapping_triggers: u64,
}

/// Exact nanosecond to picosecond conversion; rejects sub-picosecond values.
pub fn ns_to_ps(ns: f64) -> Result<u64> {
    let ps = ns * 1000.0;
    let rounded = ps.round();
    if !ps.is_finite() || ps < 0.0 || (ps - rounded).abs() > 1e-6 * rounded.max(1.0) || rounded > u64::MAX as f64 {
        return Err(Error::InvalidParameter(format!(
            "{ns} ns is not a whole number of picoseconds"
        )));
    }
    Ok(rounded as u64)
}

fn check_channels(n_channels: u32) -> Result<()> {
    if n_channels == 0 || n_channels > 64 {
        return Err(Error::InvalidParameter(format!(
            "channel count {n_channels} outside 1..=64"
        )));
    }
    Ok(())
}

fn check_order(tags: &[TagRecord]) -> Result<()> {
    if let Some(i) = tags.windows(2).position(|w| w[1].timestamp_ps < w[0].timestamp_ps) {
        return Err(Error::NonMonotonicTimestamp {
            line: i + 2,
            timestamp_ps: tags[i + 1].timestamp_ps,
            previous_ps: tags[i].timestamp_ps,
        });
    }
    Ok(())
}

fn unknown_channel(index: usize, tag: &TagRecord, channels: u32) -> Error {
    Error::UnknownChannel {
        line: index + 1,
        channel: tag.channel,
        channels,
    }
}

/// Bins tags into the fixed grid `[w·Δτ, (w+1)·Δτ)`, `w < ⌊T/Δτ⌋`.
///
/// `k` is the number of distinct channels with at least one tag in the
/// window; empty windows count toward `M_0`. Positions reported in errors
/// are 1-based indices into `tags`.
pub fn window_continuous(
    tags: &[TagRecord],
    delta_tau_ns: f64,
    total_time_ns: f64,
    n_channels: u32,
) -> Result<Windowed> {
    check_channels(n_channels)?;
    let window_ps = ns_to_ps(delta_tau_ns)?;
    let total_ps = ns_to_ps(total_time_ns)?;
    if window_ps == 0 {
        return Err(Error::InvalidParameter("window must be longer than 0 ps".into()));
    }
    if total_ps < window_ps {
        return Err(Error::InvalidParameter(format!(
            "total time {total_time_ns} ns is shorter than one window"
        )));
    }
    check_order(tags)?;

    let windows = total_ps / window_ps;
    let grid_end = windows * window_ps;
    let mut counts = vec![0u64; n_channels as usize + 1];
    let mut partial = 0u64;
    let mut occupied = 0u64;
    let mut current: Option<u64> = None;

    for (i, tag) in tags.iter().enumerate() {
        if tag.channel >= n_channels {
            return Err(unknown_channel(i, tag, n_channels));
        }
        if tag.timestamp_ps >= total_ps {
            return Err(Error::TagBeyondTotalTime {
                timestamp_ps: tag.timestamp_ps,
                total_ps,
            });
        }
        if tag.timestamp_ps >= grid_end {
            partial += 1;
            continue;
        }
        let w = tag.timestamp_ps / window_ps;
        if current != Some(w) {
            if current.is_some() {
                counts[occupied.count_ones() as usize] += 1;
            }
            current = Some(w);
            occupied = 0;
        }
        occupied |= 1 << tag.channel;
    }
    if current.is_some() {
        counts[occupied.count_ones() as usize] += 1;
    }
    let filled: u64 = counts.iter().sum();
    counts[0] += windows - filled;

    Ok(Windowed {
        histogram: ClickHistogram::new(counts, delta_tau_ns, WindowMode::ContinuousWave)?,
        partial_window_tags: partial,
        overlapping_triggers: 0,
    })
}

/// One window `[t, t + Δτ)` per tag on `trigger_channel`.
///
/// `n_channels` is the channel count declared by the tag file, herald
/// included, so the histogram covers `k = 0..=n_channels − 1`. Overlapping
/// trigger windows are processed independently and counted in
/// [`Windowed::overlapping_triggers`].
pub fn window_triggered(
    tags: &[TagRecord],
    trigger_channel: u32,
    delta_tau_ns: f64,
    n_channels: u32,
) -> Result<Windowed> {
    check_channels(n_channels)?;
    if n_channels < 2 || trigger_channel >= n_channels {
        return Err(Error::InvalidParameter(format!(
            "trigger channel {trigger_channel} needs to be one of at least 2 channels (got {n_channels})"
        )));
    }
    let window_ps = ns_to_ps(delta_tau_ns)?;
    if window_ps == 0 {
        return Err(Error::InvalidParameter("window must be longer than 0 ps".into()));
    }
    check_order(tags)?;
    if let Some((i, tag)) = tags.iter().enumerate().find(|(_, t)| t.channel >= n_channels) {
        return Err(unknown_channel(i, tag, n_channels));
    }

    let triggers: Vec<u64> = tags
        .iter()
        .filter(|t| t.channel == trigger_channel)
        .map(|t| t.timestamp_ps)
        .collect();
    if triggers.is_empty() {
        return Err(Error::NoTriggers(trigger_channel));
    }

    let mut counts = vec![0u64; n_channels as usize];
    let mut overlapping = 0u64;
    for (i, &start) in triggers.iter().enumerate() {
        let end = start.saturating_add(window_ps);
        if triggers.get(i + 1).is_some_and(|&next| next < end) {
            overlapping += 1;
        }
        let first = tags.partition_point(|t| t.timestamp_ps < start);
        let occupied = tags[first..]
            .iter()
            .take_while(|t| t.timestamp_ps < end)
            .filter(|t| t.channel != trigger_channel)
            .fold(0u64, |mask, t| mask | 1 << t.channel);
        counts[occupied.count_ones() as usize] += 1;
    }

    Ok(Windowed {
        histogram: ClickHistogram::new(counts, delta_tau_ns, WindowMode::Triggered)?,
        partial_window_tags: 0,
        overlapping_triggers: overlapping,
    })
}
