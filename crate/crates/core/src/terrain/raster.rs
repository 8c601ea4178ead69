//! Binary PGM/PPM I/O. Class rasters store one byte per cell
//! (0 = Coast, 1 = Water, 2 = Uncertain) with maxval 2.

use super::{CellClass, ColorRaster, TerrainError, TerrainGrid};
use std::io::{Read, Write};

pub fn write_class_pgm<W: Write>(grid: &TerrainGrid, mut out: W) -> Result<(), TerrainError> {
    write!(out, "P5\n{} {}\n2\n", grid.cols(), grid.rows())?;
    let bytes: Vec<u8> = grid.cells().iter().map(|c| c.to_byte()).collect();
    out.write_all(&bytes)?;
    Ok(())
}

pub fn read_class_pgm<R: Read>(
    mut input: R,
    cell_size_m: f64,
    depth_m: f64,
) -> Result<TerrainGrid, TerrainError> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    let (magic, w, h, maxval, data) = parse_header(&buf)?;
    if magic != "P5" {
        return Err(TerrainError::Raster(format!("expected P5, found {magic}")));
    }
    if maxval > 255 {
        return Err(TerrainError::Raster("16-bit PGM not supported".into()));
    }
    if data.len() < w * h {
        return Err(TerrainError::Raster("truncated pixel data".into()));
    }
    let cells = data[..w * h]
        .iter()
        .map(|&b| {
            CellClass::from_byte(b).ok_or_else(|| TerrainError::Raster(format!("class byte {b}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    TerrainGrid::from_cells(w, h, cell_size_m, depth_m, cells)
}

pub fn write_ppm<W: Write>(raster: &ColorRaster, mut out: W) -> Result<(), TerrainError> {
    write!(out, "P6\n{} {}\n255\n", raster.width, raster.height)?;
    let bytes: Vec<u8> = raster.pixels.iter().flatten().copied().collect();
    out.write_all(&bytes)?;
    Ok(())
}

pub fn read_ppm<R: Read>(mut input: R) -> Result<ColorRaster, TerrainError> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    let (magic, w, h, maxval, data) = parse_header(&buf)?;
    if magic != "P6" {
        return Err(TerrainError::Raster(format!("expected P6, found {magic}")));
    }
    if maxval > 255 {
        return Err(TerrainError::Raster("16-bit PPM not supported".into()));
    }
    let n = w.checked_mul(h).and_then(|n| n.checked_mul(3)).ok_or_else(|| {
        TerrainError::Raster("raster dimensions overflow".into())
    })?;
    if data.len() < n {
        return Err(TerrainError::Raster("truncated pixel data".into()));
    }
    let pixels = data[..n].chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    ColorRaster::new(w, h, pixels)
}

fn parse_header(buf: &[u8]) -> Result<(String, usize, usize, usize, &[u8]), TerrainError> {
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < buf.len() && (buf[pos].is_ascii_whitespace() || buf[pos] == b'#') {
            if buf[pos] == b'#' {
                while pos < buf.len() && buf[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < buf.len() && !buf[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(TerrainError::Raster("truncated header".into()));
        }
        tokens.push(String::from_utf8_lossy(&buf[start..pos]).into_owned());
    }
    // exactly one whitespace byte separates the header from the data
    pos += 1;
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| TerrainError::Raster(format!("bad header field {s:?}")))
    };
    let (w, h, maxval) = (num(&tokens[1])?, num(&tokens[2])?, num(&tokens[3])?);
    if w == 0 || h == 0 {
        return Err(TerrainError::Raster("empty raster".into()));
    }
    let data = buf.get(pos..).unwrap_or(&[]);
    Ok((tokens[0].clone(), w, h, maxval, data))
}
