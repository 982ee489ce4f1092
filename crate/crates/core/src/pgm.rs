//! Binary PGM (P5) raster I/O, 8- or 16-bit grayscale.
//!
//! Loaded images are scaled to `[0, 1]` by the file's maxval and must be
//! square. Written images clamp to `[0, 1]` and quantize to the requested
//! bit depth (16-bit big-endian for maxval 65535, per the PGM spec).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::ImageGrid;

pub fn read_pgm(path: &Path) -> Result<ImageGrid> {
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    let parse = |msg: &str| Error::parse(path, msg);

    if data.len() < 2 || &data[0..2] != b"P5" {
        return Err(parse("not a binary PGM (missing P5 magic)"));
    }
    // Header tokens: magic, width, height, maxval; '#' starts a comment.
    let mut pos = 2usize;
    let mut tokens: Vec<u64> = Vec::new();
    while tokens.len() < 3 {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < data.len() && data[pos] == b'#' {
            while pos < data.len() && data[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(parse("truncated header"));
        }
        let tok = std::str::from_utf8(&data[start..pos])
            .map_err(|_| parse("non-ASCII header"))?
            .parse::<u64>()
            .map_err(|_| parse("bad header integer"))?;
        tokens.push(tok);
    }
    // exactly one whitespace byte after maxval
    pos += 1;
    let (width, height, maxval) = (tokens[0] as usize, tokens[1] as usize, tokens[2]);
    if width != height {
        return Err(parse(&format!("image must be square, got {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(parse(&format!("unsupported maxval {maxval}")));
    }
    let n = width * height;
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    if data.len() < pos + n * bytes_per {
        return Err(parse("truncated pixel data"));
    }
    let scale = 1.0 / maxval as f64;
    let mut pixels = Vec::with_capacity(n);
    if bytes_per == 1 {
        pixels.extend(data[pos..pos + n].iter().map(|&b| b as f64 * scale));
    } else {
        for k in 0..n {
            let hi = data[pos + 2 * k] as u16;
            let lo = data[pos + 2 * k + 1] as u16;
            pixels.push(((hi << 8) | lo) as f64 * scale);
        }
    }
    ImageGrid::new(width, pixels, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmDepth {
    Eight,
    Sixteen,
}

pub fn write_pgm(path: &Path, image: &ImageGrid, depth: PgmDepth) -> Result<()> {
    let s = image.size();
    let maxval: u32 = match depth {
        PgmDepth::Eight => 255,
        PgmDepth::Sixteen => 65535,
    };
    let mut out = Vec::with_capacity(s * s * 2 + 32);
    write!(out, "P5\n{s} {s}\n{maxval}\n").expect("in-memory write");
    for &v in image.pixels() {
        let q = (v.clamp(0.0, 1.0) * maxval as f64).round() as u32;
        match depth {
            PgmDepth::Eight => out.push(q as u8),
            PgmDepth::Sixteen => {
                out.push((q >> 8) as u8);
                out.push((q & 0xff) as u8);
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
