//! Portable float map reading and writing.
//!
//! `PF` (RGB) or `Pf` (grey) header, then `W H`, then a scale whose sign picks
//! the byte order (negative: little-endian). Rows are stored bottom-up.

use crate::color::Rgb;
use crate::envmap::LatLongMap;
use crate::error::{Error, Result};

const FORMAT: &str = "PFM";

fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::format(FORMAT, "truncated header"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .map_err(|_| Error::format(FORMAT, "header is not text"))
}

pub fn read_pfm(bytes: &[u8]) -> Result<LatLongMap> {
    let mut pos = 0;
    let channels = match token(bytes, &mut pos)? {
        "PF" => 3,
        "Pf" => 1,
        other => return Err(Error::format(FORMAT, format!("bad magic {other:?}"))),
    };
    let mut number = |what: &str| -> Result<String> {
        token(bytes, &mut pos)
            .map(str::to_owned)
            .map_err(|_| Error::format(FORMAT, format!("missing {what}")))
    };
    let width: usize = number("width")?
        .parse()
        .map_err(|_| Error::format(FORMAT, "bad width"))?;
    let height: usize = number("height")?
        .parse()
        .map_err(|_| Error::format(FORMAT, "bad height"))?;
    let scale: f64 = number("scale")?
        .parse()
        .map_err(|_| Error::format(FORMAT, "bad scale"))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::format(FORMAT, "scale must be nonzero"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;

    let little = scale < 0.0;
    let count = width * height * channels;
    let raster = bytes
        .get(pos..pos + count * 4)
        .ok_or_else(|| Error::format(FORMAT, format!("expected {} raster bytes", count * 4)))?;
    let floats: Vec<f32> = raster
        .chunks_exact(4)
        .map(|b| {
            let b = [b[0], b[1], b[2], b[3]];
            if little {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            }
        })
        .collect();

    let mut texels = vec![Rgb::BLACK; width * height];
    for (file_row, row) in floats.chunks_exact(width * channels).enumerate() {
        let v = height - 1 - file_row;
        for (u, px) in row.chunks_exact(channels).enumerate() {
            texels[v * width + u] = if channels == 3 {
                Rgb::new(px[0].into(), px[1].into(), px[2].into())
            } else {
                Rgb::splat(px[0].into())
            };
        }
    }
    LatLongMap::new(width, height, texels)
}

/// Little-endian RGB PFM.
pub fn write_pfm(map: &LatLongMap) -> Vec<u8> {
    write_pfm_rgb(map.width(), map.height(), map.texels())
}

pub(crate) fn write_pfm_rgb(width: usize, height: usize, texels: &[Rgb]) -> Vec<u8> {
    let mut out = format!("PF\n{width} {height}\n-1.0\n").into_bytes();
    for row in texels.chunks(width).rev() {
        for c in row {
            for x in c.to_array() {
                out.extend_from_slice(&(x as f32).to_le_bytes());
            }
        }
    }
    out
}
