//! Lightmap bundle: magic `LMAP`, `u32` version, `u32` width and height, the
//! diffuse grid as `f32` RGB, `u32` specular count, then per map a `u32`
//! exponent and its `f32` RGB grid. Little-endian throughout.

use std::path::Path;

use crate::baker::LightMapSet;
use crate::color::Rgb;
use crate::envmap::LatLongMap;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"LMAP";
const VERSION: u32 = 1;
const FORMAT: &str = "lightmap bundle";

fn put_grid(out: &mut Vec<u8>, map: &LatLongMap) {
    for c in map.texels() {
        for x in c.to_array() {
            out.extend_from_slice(&(x as f32).to_le_bytes());
        }
    }
}

pub fn write_bundle(set: &LightMapSet) -> Vec<u8> {
    let (w, h) = set.resolution();
    let mut out = Vec::with_capacity(20 + (1 + set.specular().len()) * (w * h * 12 + 4));
    out.extend_from_slice(MAGIC);
    for x in [VERSION, w as u32, h as u32] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    put_grid(&mut out, set.diffuse());
    out.extend_from_slice(&(set.specular().len() as u32).to_le_bytes());
    for (n, map) in set.specular() {
        out.extend_from_slice(&n.to_le_bytes());
        put_grid(&mut out, map);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let s = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or_else(|| Error::format(FORMAT, format!("truncated at byte {}", self.pos)))?;
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn grid(&mut self, w: usize, h: usize) -> Result<LatLongMap> {
        let raw = self.take(w * h * 12)?;
        let f = |b: &[u8]| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]]));
        let texels = raw
            .chunks_exact(12)
            .map(|px| Rgb::new(f(&px[0..4]), f(&px[4..8]), f(&px[8..12])))
            .collect();
        LatLongMap::new(w, h, texels)
    }
}

pub fn read_bundle(bytes: &[u8]) -> Result<LightMapSet> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::format(FORMAT, "bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::format(
            FORMAT,
            format!("unsupported version {version}"),
        ));
    }
    let (w, h) = (r.u32()? as usize, r.u32()? as usize);
    if w == 0 || h == 0 || w.saturating_mul(h) > bytes.len() {
        return Err(Error::format(
            FORMAT,
            format!("implausible resolution {w}×{h}"),
        ));
    }
    let diffuse = r.grid(w, h)?;
    let count = r.u32()? as usize;
    let mut specular = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let n = r.u32()?;
        specular.push((n, r.grid(w, h)?));
    }
    if r.pos != bytes.len() {
        return Err(Error::format(FORMAT, "trailing bytes"));
    }
    LightMapSet::new(diffuse, specular)
}

pub fn save_bundle(set: &LightMapSet, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_bundle(set))?;
    Ok(())
}

pub fn load_bundle(path: impl AsRef<Path>) -> Result<LightMapSet> {
    read_bundle(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baker::bake_all;
    use crate::envmap::EnvironmentMap;

    #[test]
    fn layout_and_round_trip() {
        let env = EnvironmentMap::from_fn(16, 8, |d| Rgb::new(1.0 + d.y(), 1.0, 0.5)).unwrap();
        let set = bake_all(&env, &[1, 16], (8, 4)).unwrap();
        let bytes = write_bundle(&set);
        assert_eq!(&bytes[..4], b"LMAP");
        assert_eq!(bytes.len(), 16 + 8 * 4 * 12 + 4 + 2 * (4 + 8 * 4 * 12));
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        let back = read_bundle(&bytes).unwrap();
        assert_eq!(back.exponents(), vec![1, 16]);
        for (a, b) in set.diffuse().texels().iter().zip(back.diffuse().texels()) {
            assert_eq!(a.r as f32, b.r as f32);
        }
        assert!(read_bundle(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_bundle(&bad).is_err());
    }
}
