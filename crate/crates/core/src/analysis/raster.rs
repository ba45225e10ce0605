use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Recorded spikes as (step, neuron) pairs sorted by step, then neuron.
///
/// Text format: a header `# dt=<ms> N=<count>` followed by one
/// `step<TAB>neuron` line per spike.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpikeRaster {
    pub dt: f64,
    pub neurons: usize,
    records: Vec<(u64, u32)>,
}

impl SpikeRaster {
    pub fn new(dt: f64, neurons: usize) -> Self {
        SpikeRaster {
            dt,
            neurons,
            records: Vec::new(),
        }
    }

    /// Appends the spikes of step `t`. Frames arrive in step order; ids
    /// within a frame are sorted here if needed.
    pub fn push_frame(&mut self, t: u64, frame: &[u32]) {
        if let Some(&(last, _)) = self.records.last() {
            assert!(t > last, "frames must be recorded in step order ({t} after {last})");
        }
        let start = self.records.len();
        self.records.extend(frame.iter().map(|&id| (t, id)));
        self.records[start..].sort_unstable();
    }

    pub fn records(&self) -> &[(u64, u32)] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Neuron ids that fired at step `t`.
    pub fn frame(&self, t: u64) -> Vec<u32> {
        let lo = self.records.partition_point(|&(s, _)| s < t);
        let hi = self.records.partition_point(|&(s, _)| s <= t);
        self.records[lo..hi].iter().map(|&(_, id)| id).collect()
    }

    pub fn write_to<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(w, "# dt={} N={}", self.dt, self.neurons)?;
        for (t, id) in &self.records {
            writeln!(w, "{t}\t{id}")?;
        }
        w.flush()
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines().enumerate();
        let bad = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let header = match lines.next() {
            Some((_, l)) => l.map_err(|e| Error::Dump(e.to_string()))?,
            None => return Err(bad(0, "empty raster".into())),
        };
        let (dt, neurons) = parse_header(&header).ok_or_else(|| bad(0, format!("bad header {header:?}")))?;
        let mut raster = SpikeRaster::new(dt, neurons);
        for (i, line) in lines {
            let line = line.map_err(|e| Error::Dump(e.to_string()))?;
            let record = line
                .split_once('\t')
                .and_then(|(t, id)| Some((t.parse::<u64>().ok()?, id.parse::<u32>().ok()?)))
                .ok_or_else(|| bad(i, format!("bad record {line:?}")))?;
            if raster.records.last().is_some_and(|&last| last >= record) {
                return Err(bad(i, "records out of order".into()));
            }
            if record.1 as usize >= neurons {
                return Err(bad(i, format!("neuron {} out of range", record.1)));
            }
            raster.records.push(record);
        }
        Ok(raster)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        File::create(path)
            .and_then(|f| self.write_to(f))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(File::open(path).map_err(|e| Error::io(path, e))?)
    }
}

fn parse_header(line: &str) -> Option<(f64, usize)> {
    let rest = line.strip_prefix("# dt=")?;
    let (dt, n) = rest.split_once(" N=")?;
    Some((dt.parse().ok()?, n.trim().parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_format() {
        let mut r = SpikeRaster::new(0.1, 10);
        r.push_frame(0, &[3, 1]);
        r.push_frame(2, &[9]);
        let mut out = Vec::new();
        r.write_to(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "# dt=0.1 N=10\n0\t1\n0\t3\n2\t9\n");
        assert_eq!(r.frame(0), vec![1, 3]);
        assert!(r.frame(1).is_empty());
    }

    #[test]
    fn rejects_garbage() {
        assert!(SpikeRaster::read_from(&b""[..]).is_err());
        assert!(SpikeRaster::read_from(&b"# dt=1 N=2\n0 1\n"[..]).is_err());
        assert!(SpikeRaster::read_from(&b"# dt=1 N=2\n1\t1\n0\t1\n"[..]).is_err());
        assert!(SpikeRaster::read_from(&b"# dt=1 N=2\n0\t2\n"[..]).is_err());
    }

    proptest! {
        #[test]
        fn round_trips(dt in 1e-6f64..10.0, frames in proptest::collection::vec(proptest::collection::btree_set(0u32..50, 0..10), 0..20)) {
            let mut r = SpikeRaster::new(dt, 50);
            for (t, f) in frames.iter().enumerate() {
                r.push_frame(t as u64 * 3, &f.iter().copied().collect::<Vec<_>>());
            }
            let mut out = Vec::new();
            r.write_to(&mut out).unwrap();
            let back = SpikeRaster::read_from(&out[..]).unwrap();
            prop_assert_eq!(back.dt.to_bits(), dt.to_bits());
            prop_assert_eq!(back, r);
        }
    }
}
