//! `DGRID` text bitmaps over `[0,1]^d`.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// `2^{jd}` pixels in row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub d: usize,
    pub level: u32,
    pub bits: Vec<bool>,
}

impl Bitmap {
    pub fn new(d: usize, level: u32, bits: Vec<bool>) -> Result<Self> {
        if d == 0 || d > 4 || level > 16 || (level as usize) * d > 28 {
            return Err(Error::invalid(format!("unsupported bitmap size d={d}, j={level}")));
        }
        if bits.len() != 1usize << (level as usize * d) {
            return Err(Error::invalid("bitmap length does not match its header"));
        }
        Ok(Bitmap { d, level, bits })
    }

    pub fn side(&self) -> usize {
        1 << self.level
    }

    /// Pixel membership; points outside `[0,1]^d` are outside, the upper
    /// faces belong to the last pixel.
    pub fn contains(&self, x: &[f64]) -> bool {
        let n = self.side();
        let mut flat = 0usize;
        for &v in x {
            if !(0.0..=1.0).contains(&v) {
                return false;
            }
            let i = ((v * n as f64) as usize).min(n - 1);
            flat = flat * n + i;
        }
        self.bits[flat]
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::invalid("empty bitmap file"))??;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "DGRID" {
            return Err(Error::invalid(format!("bad bitmap header {header:?}")));
        }
        let d: usize = parts[1].parse().map_err(|_| Error::invalid("bad bitmap dimension"))?;
        let level: u32 = parts[2].parse().map_err(|_| Error::invalid("bad bitmap level"))?;
        let mut bits = Vec::new();
        for line in lines {
            for c in line?.chars() {
                match c {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    c if c.is_whitespace() => {}
                    c => return Err(Error::invalid(format!("bad bitmap character {c:?}"))),
                }
            }
        }
        Bitmap::new(d, level, bits)
    }

    pub fn read_path(p: &Path) -> Result<Self> {
        let f = std::fs::File::open(p)?;
        Bitmap::read(std::io::BufReader::new(f))
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "DGRID {} {}", self.d, self.level)?;
        for row in self.bits.chunks(self.side()) {
            let s: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(w, "{s}")?;
        }
        Ok(())
    }
}
