//! Radiance RGBE (`.hdr`) reading and writing.

use crate::color::Rgb;
use crate::envmap::LatLongMap;
use crate::error::{Error, Result};

const FORMAT: &str = "Radiance HDR";

/// `(mantissa / 256) · 2^(exponent − 128)` per channel; exponent 0 is black.
pub fn decode_rgbe([r, g, b, e]: [u8; 4]) -> Rgb {
    if e == 0 {
        return Rgb::BLACK;
    }
    let scale = 2f64.powi(i32::from(e) - 136);
    Rgb::new(
        f64::from(r) * scale,
        f64::from(g) * scale,
        f64::from(b) * scale,
    )
}

fn encode_rgbe(c: Rgb) -> [u8; 4] {
    let v = c.max_component();
    if !(v >= 1e-32) {
        return [0; 4];
    }
    // v = m · 2^exp with m in [0.5, 1).
    let mut exp = v.log2().floor() as i32 + 1;
    let mut m = v / 2f64.powi(exp);
    if m >= 1.0 {
        m *= 0.5;
        exp += 1;
    } else if m < 0.5 {
        m *= 2.0;
        exp -= 1;
    }
    if exp + 128 > 255 {
        return [255, 255, 255, 255];
    }
    if exp + 128 < 1 {
        return [0; 4];
    }
    let scale = m * 256.0 / v;
    let q = |x: f64| (x.max(0.0) * scale).min(255.0) as u8;
    [q(c.r), q(c.g), q(c.b), (exp + 128) as u8]
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn line(&mut self) -> Result<&'a str> {
        let rest = &self.bytes[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::format(FORMAT, "unterminated header"))?;
        self.pos += end + 1;
        std::str::from_utf8(&rest[..end])
            .map(|s| s.trim_end_matches('\r'))
            .map_err(|_| Error::format(FORMAT, "header is not text"))
    }

    fn byte(&mut self) -> Result<u8> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| Error::format(FORMAT, "truncated pixel data"))?;
        self.pos += 1;
        Ok(b)
    }

    fn quad(&mut self) -> Result<[u8; 4]> {
        Ok([self.byte()?, self.byte()?, self.byte()?, self.byte()?])
    }
}

/// Decodes a Radiance file held in memory. Only the standard `-Y H +X W`
/// orientation is accepted.
pub fn read_hdr(bytes: &[u8]) -> Result<LatLongMap> {
    let mut cur = Cursor { bytes, pos: 0 };
    let first = cur.line()?;
    if !first.starts_with("#?") {
        return Err(Error::format(FORMAT, "missing #? signature"));
    }
    loop {
        let line = cur.line()?;
        if line.is_empty() {
            break;
        }
        if let Some(fmt) = line.strip_prefix("FORMAT=") {
            if fmt != "32-bit_rle_rgbe" {
                return Err(Error::format(
                    FORMAT,
                    format!("unsupported pixel format {fmt}"),
                ));
            }
        }
    }
    let res = cur.line()?;
    let (height, width) = match res.split_whitespace().collect::<Vec<_>>()[..] {
        ["-Y", h, "+X", w] => {
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::format(FORMAT, format!("bad resolution line {res:?}")))
            };
            (parse(h)?, parse(w)?)
        }
        _ => {
            return Err(Error::format(
                FORMAT,
                format!("unsupported resolution line {res:?}"),
            ));
        }
    };
    if width == 0 || height == 0 {
        return Err(Error::format(FORMAT, "zero-sized image"));
    }

    let mut texels = Vec::with_capacity(width * height);
    let mut scan = vec![[0u8; 4]; width];
    for _ in 0..height {
        read_scanline(&mut cur, &mut scan)?;
        texels.extend(scan.iter().map(|&q| decode_rgbe(q)));
    }
    LatLongMap::new(width, height, texels)
}

fn read_scanline(cur: &mut Cursor, scan: &mut [[u8; 4]]) -> Result<()> {
    let width = scan.len();
    let start = cur.pos;
    let head = cur.quad()?;
    let is_new_rle = (8..0x8000).contains(&width)
        && head[0] == 2
        && head[1] == 2
        && head[2] & 0x80 == 0
        && (usize::from(head[2]) << 8 | usize::from(head[3])) == width;
    if is_new_rle {
        for ch in 0..4 {
            let mut x = 0;
            while x < width {
                let count = cur.byte()?;
                if count > 128 {
                    let n = usize::from(count - 128);
                    let value = cur.byte()?;
                    if x + n > width {
                        return Err(Error::format(FORMAT, "run overflows scanline"));
                    }
                    scan[x..x + n].iter_mut().for_each(|p| p[ch] = value);
                    x += n;
                } else {
                    let n = usize::from(count);
                    if n == 0 || x + n > width {
                        return Err(Error::format(FORMAT, "bad literal run"));
                    }
                    for p in &mut scan[x..x + n] {
                        p[ch] = cur.byte()?;
                    }
                    x += n;
                }
            }
        }
        return Ok(());
    }

    // Flat pixels, possibly with old-style (1,1,1,n) repeat markers.
    cur.pos = start;
    let mut x = 0;
    let mut shift = 0;
    while x < width {
        let q = cur.quad()?;
        if q[0] == 1 && q[1] == 1 && q[2] == 1 {
            if x == 0 {
                return Err(Error::format(FORMAT, "repeat marker at scanline start"));
            }
            let n = usize::from(q[3]) << shift;
            if x + n > width {
                return Err(Error::format(FORMAT, "repeat overflows scanline"));
            }
            let prev = scan[x - 1];
            scan[x..x + n].iter_mut().for_each(|p| *p = prev);
            x += n;
            shift += 8;
        } else {
            scan[x] = q;
            x += 1;
            shift = 0;
        }
    }
    Ok(())
}

/// Encodes a map as a Radiance file. With `rle`, scanlines of width
/// 8..=32767 use per-channel run-length encoding; otherwise pixels are flat.
pub fn write_hdr(map: &LatLongMap, rle: bool) -> Vec<u8> {
    let (w, h) = (map.width(), map.height());
    let mut out = Vec::with_capacity(w * h * 4 + 64);
    out.extend_from_slice(b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n");
    out.extend_from_slice(format!("-Y {h} +X {w}\n").as_bytes());
    let use_rle = rle && (8..0x8000).contains(&w);
    for row in map.texels().chunks(w) {
        let quads: Vec<[u8; 4]> = row.iter().map(|&c| encode_rgbe(c)).collect();
        if !use_rle {
            quads.iter().for_each(|q| out.extend_from_slice(q));
            continue;
        }
        out.extend_from_slice(&[2, 2, (w >> 8) as u8, (w & 0xff) as u8]);
        for ch in 0..4 {
            let data: Vec<u8> = quads.iter().map(|q| q[ch]).collect();
            rle_channel(&data, &mut out);
        }
    }
    out
}

fn rle_channel(data: &[u8], out: &mut Vec<u8>) {
    const MIN_RUN: usize = 4;
    let mut i = 0;
    while i < data.len() {
        // Find the next run of at least MIN_RUN equal bytes.
        let mut run_start = i;
        let mut run_len = 0;
        while run_start < data.len() {
            run_len = data[run_start..]
                .iter()
                .take(127)
                .take_while(|&&b| b == data[run_start])
                .count();
            if run_len >= MIN_RUN {
                break;
            }
            run_start += run_len;
        }
        if run_len < MIN_RUN {
            run_start = data.len();
        }
        while i < run_start {
            let n = (run_start - i).min(128);
            out.push(n as u8);
            out.extend_from_slice(&data[i..i + n]);
            i += n;
        }
        if run_start < data.len() {
            out.push(128 + run_len as u8);
            out.push(data[run_start]);
            i = run_start + run_len;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_unit_rgbe() {
        assert_eq!(decode_rgbe([128, 128, 128, 129]), Rgb::splat(1.0));
        assert_eq!(decode_rgbe([255, 0, 7, 0]), Rgb::BLACK);
        assert_eq!(decode_rgbe([64, 32, 16, 130]), Rgb::new(1.0, 0.5, 0.25));
    }

    #[test]
    fn encodes_exact_powers() {
        assert_eq!(encode_rgbe(Rgb::splat(1.0)), [128, 128, 128, 129]);
        assert_eq!(
            decode_rgbe(encode_rgbe(Rgb::new(4.0, 2.0, 0.5))),
            Rgb::new(4.0, 2.0, 0.5)
        );
    }

    fn sample_map(w: usize, h: usize) -> LatLongMap {
        let texels = (0..w * h)
            .map(|i| {
                let x = (i % w) as f64;
                // Long constant stretches exercise RLE runs.
                if (i / w).is_multiple_of(2) {
                    Rgb::new(0.5, 0.25, 2.0)
                } else {
                    Rgb::new(x + 0.5, (x * 0.37).sin().abs() + 0.01, 3.0)
                }
            })
            .collect();
        LatLongMap::new(w, h, texels).unwrap()
    }

    #[test]
    fn flat_and_rle_agree() {
        let map = sample_map(40, 20);
        let flat = read_hdr(&write_hdr(&map, false)).unwrap();
        let rle_bytes = write_hdr(&map, true);
        let rle = read_hdr(&rle_bytes).unwrap();
        assert_eq!(flat, rle);
        assert!(rle_bytes.len() < 40 * 20 * 4);
        for (a, b) in map.texels().iter().zip(rle.texels()) {
            // 8-bit mantissa: relative error below 2^-7 of the largest channel.
            assert!((*a - *b).max_component().abs() <= a.max_component() / 128.0);
        }
    }

    #[test]
    fn old_style_repeat() {
        let mut bytes = b"#?RADIANCE\n\n-Y 1 +X 4\n".to_vec();
        bytes.extend_from_slice(&[128, 128, 128, 129, 1, 1, 1, 3]);
        let map = read_hdr(&bytes).unwrap();
        assert!(map.texels().iter().all(|&c| c == Rgb::splat(1.0)));
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(read_hdr(b"P6\n").is_err());
        assert!(read_hdr(b"#?RADIANCE\n\n+Y 1 +X 2\n").is_err());
        assert!(read_hdr(b"#?RADIANCE\nFORMAT=32-bit_rle_xyze\n\n-Y 1 +X 2\n").is_err());
        let truncated = b"#?RADIANCE\n\n-Y 1 +X 2\n\x80\x80\x80\x81";
        assert!(read_hdr(truncated).is_err());
    }
}
