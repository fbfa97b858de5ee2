use std::io::{BufRead, BufWriter, Write};

use crate::error::{Error, Result};

const MAGIC: &str = "#clickkit-tags";
const VERSION: &str = "v1";

/// One detector click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TagRecord {
    pub timestamp_ps: u64,
    pub channel: u32,
}

impl TagRecord {
    pub fn new(timestamp_ps: u64, channel: u32) -> Self {
        Self {
            timestamp_ps,
            channel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagHeader {
    pub channels: u32,
    pub trigger: Option<u32>,
}

impl TagHeader {
    pub fn new(channels: u32, trigger: Option<u32>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidParameter("a tag file needs at least one channel".into()));
        }
        if let Some(t) = trigger.filter(|&t| t >= channels) {
            return Err(Error::InvalidParameter(format!(
                "trigger channel {t} not among {channels} channels"
            )));
        }
        Ok(Self { channels, trigger })
    }

    fn parse(line: &str) -> Result<Self> {
        let malformed = |reason: &str| Error::MalformedLine {
            line: 1,
            reason: reason.to_string(),
        };
        let mut tokens = line.split(' ');
        if tokens.next() != Some(MAGIC) {
            return Err(malformed("missing `#clickkit-tags` header"));
        }
        if tokens.next() != Some(VERSION) {
            return Err(malformed("unsupported format version"));
        }
        let channels = tokens
            .next()
            .and_then(|t| t.strip_prefix("channels="))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| malformed("expected `channels=<C>`"))?;
        let trigger = match tokens.next() {
            None => None,
            Some(t) => Some(
                t.strip_prefix("trigger=")
                    .and_then(|v| v.parse::<u32>().ok())
                    .ok_or_else(|| malformed("expected `trigger=<id>`"))?,
            ),
        };
        if tokens.next().is_some() {
            return Err(malformed("trailing header fields"));
        }
        Self::new(channels, trigger).map_err(|e| malformed(&e.to_string()))
    }
}

impl std::fmt::Display for TagHeader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{MAGIC} {VERSION} channels={}", self.channels)?;
        if let Some(t) = self.trigger {
            write!(f, " trigger={t}")?;
        }
        Ok(())
    }
}

/// Streaming, validating reader over the records of a tag file.
pub struct TagReader<R> {
    lines: std::io::Split<R>,
    header: TagHeader,
    line: usize,
    previous: Option<u64>,
}

impl<R: BufRead> TagReader<R> {
    /// Reads the header; fails if it declares a channel count other than
    /// `expected_channels` (when given).
    pub fn new(source: R, expected_channels: Option<u32>) -> Result<Self> {
        let mut lines = source.split(b'\n');
        let first = lines.next().transpose()?.ok_or_else(|| Error::MalformedLine {
            line: 1,
            reason: "empty file".into(),
        })?;
        let header = TagHeader::parse(&decode(first, 1)?)?;
        if let Some(expected) = expected_channels.filter(|&c| c != header.channels) {
            return Err(Error::MalformedLine {
                line: 1,
                reason: format!("header declares {} channels, expected {expected}", header.channels),
            });
        }
        Ok(Self {
            lines,
            header,
            line: 1,
            previous: None,
        })
    }

    pub fn header(&self) -> TagHeader {
        self.header
    }

    fn parse_record(&mut self, text: &str) -> Result<TagRecord> {
        let line = self.line;
        let malformed = |reason: &str| Error::MalformedLine {
            line,
            reason: reason.to_string(),
        };
        let (ts, ch) = text.split_once(',').ok_or_else(|| malformed("expected `<timestamp_ps>,<channel>`"))?;
        let timestamp_ps: u64 = ts.parse().map_err(|_| malformed("timestamp is not an unsigned integer"))?;
        let channel: u32 = ch.parse().map_err(|_| malformed("channel is not an unsigned integer"))?;
        if channel >= self.header.channels {
            return Err(Error::UnknownChannel {
                line,
                channel,
                channels: self.header.channels,
            });
        }
        if let Some(previous_ps) = self.previous.filter(|&p| timestamp_ps < p) {
            return Err(Error::NonMonotonicTimestamp {
                line,
                timestamp_ps,
                previous_ps,
            });
        }
        self.previous = Some(timestamp_ps);
        Ok(TagRecord::new(timestamp_ps, channel))
    }
}

impl<R: BufRead> Iterator for TagReader<R> {
    type Item = Result<TagRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let bytes = match self.lines.next()? {
                Ok(b) => b,
                Err(e) => return Some(Err(e.into())),
            };
            self.line += 1;
            let text = match decode(bytes, self.line) {
                Ok(t) => t,
                Err(e) => return Some(Err(e)),
            };
            if text.starts_with('#') {
                continue;
            }
            return Some(self.parse_record(&text));
        }
    }
}

fn decode(bytes: Vec<u8>, line: usize) -> Result<String> {
    String::from_utf8(bytes).map_err(|_| Error::MalformedLine {
        line,
        reason: "invalid UTF-8".into(),
    })
}

/// Header plus all records of a tag file.
#[derive(Debug, Clone, PartialEq)]
pub struct TagStream {
    pub header: TagHeader,
    pub records: Vec<TagRecord>,
}

pub fn parse_tag_stream<R: BufRead>(source: R, expected_channels: Option<u32>) -> Result<TagStream> {
    let reader = TagReader::new(source, expected_channels)?;
    let header = reader.header();
    let records = reader.collect::<Result<Vec<_>>>()?;
    Ok(TagStream { header, records })
}

/// Buffered writer producing the tag file format.
pub struct TagWriter<W: Write> {
    out: BufWriter<W>,
}

impl<W: Write> TagWriter<W> {
    pub fn new(out: W, header: &TagHeader) -> Result<Self> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{header}")?;
        Ok(Self { out })
    }

    pub fn comment(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "# {text}")?;
        Ok(())
    }

    pub fn write(&mut self, record: TagRecord) -> Result<()> {
        writeln!(self.out, "{},{}", record.timestamp_ps, record.channel)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
