use std::fs;
use std::path::Path;

use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::spectral::{Complex64, LayeredField3D, SlabGrid, SpectralField2D, TorusGrid};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"QGHS";
pub const SNAPSHOT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8 + 8;

/// Serializes a state.
///
/// Layout, all little-endian: magic `QGHS`, `u32` version, `u32 n`, `u32 nz`,
/// `f64 l`, `f64 h`, `f64 t`, then the `n * n` surface coefficients and the
/// `nz` interior layers of `n * n` coefficients each. Coefficients are stored
/// as `(re, im)` pairs of `f64` in row-major mode order `i1 * n + i2`.
pub fn encode_snapshot(s: &SimState) -> Vec<u8> {
    let slab = s.slab();
    let g = slab.torus();
    let len = HEADER_LEN + 16 * g.len() * (1 + slab.nz());
    let mut out = Vec::with_capacity(len);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&(slab.nz() as u32).to_le_bytes());
    for v in [g.l(), slab.h(), s.t()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut push = |f: &SpectralField2D| {
        for c in f.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    };
    push(s.theta());
    for layer in s.omega().layers() {
        push(layer);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let mut b = [0u8; N];
        b.copy_from_slice(&self.bytes[self.pos..self.pos + N]);
        self.pos += N;
        b
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }

    fn field(&mut self, g: TorusGrid) -> Result<SpectralField2D> {
        let coeffs = (0..g.len()).map(|_| Complex64::new(self.f64(), self.f64())).collect();
        SpectralField2D::from_coeffs(g, coeffs)
    }
}

/// Parses a state written by [`encode_snapshot`]; the state invariants are re-checked.
pub fn decode_snapshot(bytes: &[u8]) -> Result<SimState> {
    if bytes.len() < 4 {
        return Err(Error::Truncated { expected: HEADER_LEN, found: bytes.len() });
    }
    if &bytes[..4] != SNAPSHOT_MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated { expected: HEADER_LEN, found: bytes.len() });
    }
    let mut r = Reader { bytes, pos: 4 };
    let version = r.u32();
    if version != SNAPSHOT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = r.u32() as usize;
    let nz = r.u32() as usize;
    let (l, h, t) = (r.f64(), r.f64(), r.f64());
    let g = TorusGrid::new(n, l)?;
    let slab = SlabGrid::new(g, nz, h)?;
    let expected = HEADER_LEN + 16 * g.len() * (1 + nz);
    if bytes.len() < expected {
        return Err(Error::Truncated { expected, found: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(Error::DimensionMismatch(format!(
            "{} trailing bytes after n = {n}, nz = {nz} payload",
            bytes.len() - expected
        )));
    }
    let theta = r.field(g)?;
    let layers = (0..nz).map(|_| r.field(g)).collect::<Result<Vec<_>>>()?;
    SimState::new(t, theta, LayeredField3D::from_layers(slab, layers)?)
}

pub fn write_snapshot(s: &SimState, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_snapshot(s))?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<SimState> {
    decode_snapshot(&fs::read(path)?)
}
