//! Shard files: one layer's class list, or a slice of it, as text.
//!
//! ```text
//! HBL1 <group> <fingerprint> layer=<i> n=<count>
//! <record>
//! ...
//! ```
//!
//! Lines end in LF, including the last one.

use std::fs;
use std::path::Path;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::record::SubgroupRecord;

pub const MAGIC: &str = "HBL1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardHeader {
    pub group: String,
    pub fingerprint: String,
    pub layer: usize,
    pub count: usize,
}

impl ShardHeader {
    pub fn for_context(ctx: &Context, layer: usize, count: usize) -> Self {
        ShardHeader {
            group: ctx.descriptor(),
            fingerprint: ctx.fingerprint().to_string(),
            layer,
            count,
        }
    }

    pub fn parse(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad shard header {line:?}"));
        let parts: Vec<&str> = line.split(' ').collect();
        if parts.len() != 5 || parts[0] != MAGIC {
            return Err(bad());
        }
        let field = |s: &str, name: &str| -> Result<usize> {
            s.strip_prefix(name)
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)
        };
        Ok(ShardHeader {
            group: parts[1].to_string(),
            fingerprint: parts[2].to_string(),
            layer: field(parts[3], "layer=")?,
            count: field(parts[4], "n=")?,
        })
    }

    /// Errors unless the header belongs to `ctx`.
    pub fn check(&self, ctx: &Context) -> Result<()> {
        if self.group != ctx.descriptor() {
            return Err(Error::HeaderMismatch(format!(
                "shard is for group {}, context is {}",
                self.group,
                ctx.descriptor()
            )));
        }
        if self.fingerprint != ctx.fingerprint() {
            return Err(Error::FingerprintMismatch {
                expected: ctx.fingerprint().to_string(),
                found: self.fingerprint.clone(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for ShardHeader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{MAGIC} {} {} layer={} n={}",
            self.group, self.fingerprint, self.layer, self.count
        )
    }
}

/// A shard with its body kept as undecoded lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardFile {
    header: ShardHeader,
    lines: Vec<String>,
}

impl ShardFile {
    pub fn new(ctx: &Context, layer: usize, records: &[SubgroupRecord]) -> Self {
        ShardFile {
            header: ShardHeader::for_context(ctx, layer, records.len()),
            lines: records.iter().map(SubgroupRecord::encode).collect(),
        }
    }

    pub fn header(&self) -> &ShardHeader {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn parse(text: &str) -> Result<Self> {
        if !text.ends_with('\n') {
            return Err(Error::Parse("shard file must end with a newline".into()));
        }
        let mut lines = text[..text.len() - 1].split('\n');
        let header = ShardHeader::parse(lines.next().unwrap_or_default())?;
        let lines: Vec<String> = lines.map(str::to_string).collect();
        if lines.len() != header.count {
            return Err(Error::Parse(format!(
                "header declares {} records, body has {}",
                header.count,
                lines.len()
            )));
        }
        Ok(ShardFile { header, lines })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn render(&self) -> String {
        let mut out = self.header.to_string();
        out.push('\n');
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// Writes to a temporary sibling, then renames over `path`.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render())
    }

    /// Decodes the body after checking the header against `ctx`.
    pub fn records(&self, ctx: &Context) -> Result<Vec<SubgroupRecord>> {
        self.header.check(ctx)?;
        self.lines.iter().map(|l| SubgroupRecord::decode(l, ctx.pcgs())).collect()
    }

    /// `k` contiguous pieces whose sizes differ by at most one, larger first.
    pub fn split(&self, k: usize) -> Result<Vec<ShardFile>> {
        if k == 0 {
            return Err(Error::Parse("job count must be at least 1".into()));
        }
        let (q, r) = (self.lines.len() / k, self.lines.len() % k);
        let mut out = Vec::with_capacity(k);
        let mut at = 0;
        for j in 0..k {
            let size = q + usize::from(j < r);
            let lines = self.lines[at..at + size].to_vec();
            at += size;
            out.push(ShardFile {
                header: ShardHeader {
                    count: size,
                    ..self.header.clone()
                },
                lines,
            });
        }
        Ok(out)
    }

    /// Concatenation, sorted by record order, duplicates collapsed. All
    /// inputs must share group, fingerprint and layer.
    pub fn merge(shards: &[ShardFile]) -> Result<ShardFile> {
        let first = shards
            .first()
            .ok_or_else(|| Error::HeaderMismatch("nothing to merge".into()))?;
        let mut records = Vec::new();
        for s in shards {
            let (a, b) = (&s.header, &first.header);
            if a.group != b.group || a.fingerprint != b.fingerprint || a.layer != b.layer {
                return Err(Error::HeaderMismatch(format!("{a} does not match {b}")));
            }
            for line in &s.lines {
                records.push(SubgroupRecord::parse(line)?);
            }
        }
        records.sort();
        records.dedup();
        Ok(ShardFile {
            header: ShardHeader {
                count: records.len(),
                ..first.header.clone()
            },
            lines: records.iter().map(SubgroupRecord::encode).collect(),
        })
    }
}

/// Writes `contents` to a temporary sibling of `path`, then renames it into place.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let result = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(n: usize) -> ShardFile {
        ShardFile {
            header: ShardHeader {
                group: "4".into(),
                fingerprint: "00".into(),
                layer: 1,
                count: n,
            },
            lines: (0..n).map(|i| format!("1:{}", i + 1)).collect(),
        }
    }

    #[test]
    fn header_roundtrip() {
        let h = ShardHeader::parse("HBL1 2,2,4,4 0123abcd layer=3 n=17").unwrap();
        assert_eq!(h.layer, 3);
        assert_eq!(h.count, 17);
        assert_eq!(h.to_string(), "HBL1 2,2,4,4 0123abcd layer=3 n=17");
        assert!(ShardHeader::parse("HBL2 4 00 layer=1 n=0").is_err());
        assert!(ShardHeader::parse("HBL1 4 00 layer=x n=0").is_err());
    }

    #[test]
    fn split_sizes() {
        let sizes: Vec<usize> = synthetic(10).split(3).unwrap().iter().map(ShardFile::len).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(synthetic(10).split(1).unwrap(), vec![synthetic(10)]);
        let sizes: Vec<usize> = synthetic(2).split(5).unwrap().iter().map(ShardFile::len).collect();
        assert_eq!(sizes, vec![1, 1, 0, 0, 0]);
        assert!(synthetic(3).split(0).is_err());
    }

    #[test]
    fn parse_requires_trailing_newline_and_count() {
        let text = synthetic(3).render();
        assert_eq!(ShardFile::parse(&text).unwrap(), synthetic(3));
        assert!(ShardFile::parse(text.trim_end()).is_err());
        assert!(ShardFile::parse(&text.replace("n=3", "n=4")).is_err());
        assert_eq!(synthetic(0).render(), "HBL1 4 00 layer=1 n=0\n");
        assert!(ShardFile::parse("HBL1 4 00 layer=1 n=0\n").unwrap().is_empty());
    }

    #[test]
    fn fingerprint_checked_before_decoding() {
        let ctx = Context::from_descriptor("4").unwrap();
        let mut shard = synthetic(1);
        shard.header.fingerprint = "ffffffffffffffff".into();
        shard.lines = vec!["garbage".into()];
        assert!(matches!(shard.records(&ctx), Err(Error::FingerprintMismatch { .. })));
    }

    #[test]
    fn merge_rejects_mixed_layers() {
        let mut other = synthetic(2);
        other.header.layer = 2;
        assert!(matches!(ShardFile::merge(&[synthetic(2), other]), Err(Error::HeaderMismatch(_))));
    }

    proptest! {
        #[test]
        fn split_concatenation_is_identity(n in 0usize..60, k in 1usize..9) {
            let shard = synthetic(n);
            let parts = shard.split(k).unwrap();
            prop_assert_eq!(parts.len(), k);
            let joined: Vec<String> = parts.iter().flat_map(|p| p.lines().to_vec()).collect();
            prop_assert_eq!(&joined[..], shard.lines());
            let max = parts.iter().map(ShardFile::len).max().unwrap();
            let min = parts.iter().map(ShardFile::len).min().unwrap();
            prop_assert!(max - min <= 1);
        }

        #[test]
        fn merging_sorted_shards_stays_sorted(n in 0usize..40, k in 1usize..6) {
            let merged = ShardFile::merge(&synthetic(n).split(k).unwrap()).unwrap();
            let records: Vec<SubgroupRecord> =
                merged.lines().iter().map(|l| SubgroupRecord::parse(l).unwrap()).collect();
            prop_assert!(records.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(merged.len(), n);
        }
    }
}
