//! Text format for voxel regions.
//!
//! ```text
//! file   := line*
//! line   := comment | blank | header | row
//! header := "dims" X Y Z            first non-comment line
//! row    := run (ws run)*           exactly X·Y rows, x slowest then y
//! run    := [count] ("x" | "o")     count defaults to 1
//! ```
//!
//! Each row describes the `Z` sites along the `z` axis at fixed `(x, y)`;
//! `x` marks a site inside the region and `o` one outside. Run lengths in a
//! row must add up to `Z`. Text after `#` is ignored, as are blank lines.

use std::fmt::Write as _;

use super::{CubicLattice, RegionMask};
use crate::{Error, Result};

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::RegionFormat {
        line,
        message: message.into(),
    }
}

impl RegionMask {
    /// Serializes the mask, one row per `(x, y)` column.
    pub fn to_rle(&self) -> String {
        let [dx, dy, dz] = self.dims();
        let flags = self.flags();
        let mut out = format!("dims {dx} {dy} {dz}\n");
        for col in flags.chunks(dz) {
            let mut first = true;
            let mut i = 0;
            while i < col.len() {
                let v = col[i];
                let run = col[i..].iter().take_while(|&&b| b == v).count();
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{run}{}", if v { 'x' } else { 'o' });
                i += run;
            }
            out.push('\n');
        }
        out
    }

    /// Parses a mask written in the region text format. The lattice is
    /// checked against `max_sites`.
    pub fn from_rle(text: &str, max_sites: usize) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines
            .next()
            .ok_or_else(|| format_err(0, "missing `dims` header"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("dims") {
            return Err(format_err(hline, "expected `dims X Y Z`"));
        }
        let dims: Vec<usize> = parts
            .map(|p| p.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(hline, format!("bad dimension: {e}")))?;
        let dims: [usize; 3] = dims
            .try_into()
            .map_err(|_| format_err(hline, "expected three dimensions"))?;
        let lat = CubicLattice::with_limit(dims, max_sites)?;

        let columns = dims[0] * dims[1];
        let mut inside = Vec::with_capacity(lat.sites());
        let mut rows = 0;
        for (lno, line) in lines {
            if rows == columns {
                return Err(format_err(lno, format!("more than {columns} rows")));
            }
            let start = inside.len();
            for tok in line.split_whitespace() {
                let (count, sym) = tok.split_at(tok.char_indices().last().map_or(0, |(i, _)| i));
                let v = match sym {
                    "x" => true,
                    "o" => false,
                    _ => return Err(format_err(lno, format!("bad run `{tok}`"))),
                };
                let count = if count.is_empty() {
                    1
                } else {
                    count
                        .parse::<usize>()
                        .map_err(|_| format_err(lno, format!("bad run `{tok}`")))?
                };
                if inside.len() - start + count > dims[2] {
                    return Err(format_err(lno, format!("row longer than {}", dims[2])));
                }
                inside.extend(std::iter::repeat_n(v, count));
            }
            if inside.len() - start != dims[2] {
                return Err(format_err(
                    lno,
                    format!(
                        "row has {} sites, expected {}",
                        inside.len() - start,
                        dims[2]
                    ),
                ));
            }
            rows += 1;
        }
        if rows != columns {
            return Err(format_err(
                text.lines().count(),
                format!("found {rows} rows, expected {columns}"),
            ));
        }
        RegionMask::from_flags(&lat, inside)
    }
}
