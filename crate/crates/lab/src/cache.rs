//! On-disk cache of mesh spectra.
//!
//! Each entry is a `<key>.wlb` binary container and a `<key>.json` sidecar.
//! The binary layout is little-endian:
//!
//! ```text
//! "WLB1" | u32 version | u64 rows | u64 modes | u32 flags
//! modes x f64 eigenvalues | [modes x f64 residuals] | [rows*modes x f64 eigenvectors, column-major]
//! ```
//!
//! The mass matrix is not stored; it is reassembled from the mesh on load.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use weyl_core::linalg::DMat;
use weyl_core::{assemble_fem, BasisSource, MassScheme, SpectralBasis, SurfaceMesh};

use crate::report::write_atomic;
use crate::LabError;

pub const MAGIC: &[u8; 4] = b"WLB1";
pub const FORMAT_VERSION: u32 = 1;

const HAS_RESIDUALS: u32 = 1;
const HAS_VECTORS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey(pub String);

fn scheme_tag(s: MassScheme) -> u8 {
    match s {
        MassScheme::Lumped => 0,
        MassScheme::Consistent => 1,
        MassScheme::Mixed => 2,
    }
}

pub fn mesh_hash(mesh: &SurfaceMesh) -> String {
    let mut h = Sha256::new();
    h.update((mesh.vertices().len() as u64).to_le_bytes());
    for p in mesh.vertices() {
        for c in p {
            h.update(c.to_le_bytes());
        }
    }
    h.update((mesh.triangles().len() as u64).to_le_bytes());
    for t in mesh.triangles() {
        for i in t {
            h.update((*i as u64).to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

impl CacheKey {
    pub fn new(mesh: &SurfaceMesh, count: usize, tol: f64, scheme: MassScheme, seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(MAGIC);
        h.update(FORMAT_VERSION.to_le_bytes());
        h.update(mesh_hash(mesh).as_bytes());
        h.update((count as u64).to_le_bytes());
        h.update(tol.to_bits().to_le_bytes());
        h.update([scheme_tag(scheme)]);
        h.update(seed.to_le_bytes());
        CacheKey(hex::encode(h.finalize()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format_version: u32,
    pub key: String,
    pub mesh_sha256: String,
    pub count: usize,
    pub tolerance: f64,
    pub source: BasisSource,
    pub modes: usize,
    pub rows: usize,
    pub trusted_horizon: f64,
    pub top_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumCache {
    dir: PathBuf,
}

fn encode(basis: &SpectralBasis, rows: usize) -> Vec<u8> {
    let modes = basis.mode_count();
    let mut flags = 0;
    if basis.residuals().is_some() {
        flags |= HAS_RESIDUALS;
    }
    if basis.eigenvectors().is_some() {
        flags |= HAS_VECTORS;
    }
    let mut out = Vec::with_capacity(28 + 8 * modes * (rows + 2));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(modes as u64).to_le_bytes());
    out.extend_from_slice(&flags.to_le_bytes());
    let mut put = |xs: &[f64]| xs.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    put(basis.eigenvalues());
    if let Some(r) = basis.residuals() {
        put(r);
    }
    if let Some(v) = basis.eigenvectors() {
        put(v.as_slice());
    }
    out
}

struct Decoded {
    rows: usize,
    eigenvalues: Vec<f64>,
    residuals: Option<Vec<f64>>,
    vectors: Option<Vec<f64>>,
}

fn decode(bytes: &[u8]) -> Option<Decoded> {
    let mut at = 0usize;
    let mut take = |n: usize| -> Option<&[u8]> {
        let s = bytes.get(at..at.checked_add(n)?)?;
        at += n;
        Some(s)
    };
    if take(4)? != MAGIC {
        return None;
    }
    let version = u32::from_le_bytes(take(4)?.try_into().ok()?);
    if version != FORMAT_VERSION {
        return None;
    }
    let rows = u64::from_le_bytes(take(8)?.try_into().ok()?) as usize;
    let modes = u64::from_le_bytes(take(8)?.try_into().ok()?) as usize;
    let flags = u32::from_le_bytes(take(4)?.try_into().ok()?);
    let mut floats = |n: usize| -> Option<Vec<f64>> {
        let raw = take(n.checked_mul(8)?)?;
        Some(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    };
    let eigenvalues = floats(modes)?;
    let residuals = if flags & HAS_RESIDUALS != 0 { Some(floats(modes)?) } else { None };
    let vectors = if flags & HAS_VECTORS != 0 { Some(floats(rows.checked_mul(modes)?)?) } else { None };
    if at != bytes.len() {
        return None;
    }
    Some(Decoded { rows, eigenvalues, residuals, vectors })
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn paths(&self, key: &CacheKey) -> (PathBuf, PathBuf) {
        (self.dir.join(format!("{}.wlb", key.0)), self.dir.join(format!("{}.json", key.0)))
    }

    /// `Ok(None)` on a miss, including entries of another format version or
    /// that fail validation.
    pub fn load(&self, key: &CacheKey, mesh: &SurfaceMesh) -> Result<Option<SpectralBasis>, LabError> {
        let (bin, side) = self.paths(key);
        let sidecar = match fs::read_to_string(&side) {
            Ok(s) => s,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(LabError::io(side, e)),
        };
        let Ok(meta) = serde_json::from_str::<Sidecar>(&sidecar) else { return Ok(None) };
        if meta.format_version != FORMAT_VERSION || meta.key != key.0 || meta.mesh_sha256 != mesh_hash(mesh) {
            return Ok(None);
        }
        let BasisSource::MeshFem { mass: scheme } = meta.source else { return Ok(None) };
        let bytes = match fs::read(&bin) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(LabError::io(bin, e)),
        };
        let Some(d) = decode(&bytes) else { return Ok(None) };
        if d.rows != mesh.vertices().len() || d.eigenvalues.len() != meta.modes {
            return Ok(None);
        }
        let mass = assemble_fem(mesh, scheme)?.mass;
        let modes = d.eigenvalues.len();
        let vectors = d.vectors.map(|v| DMat::from_column_major(d.rows, modes, v));
        Ok(Some(SpectralBasis::from_mesh_parts(d.eigenvalues, vectors, mass, scheme, d.residuals)))
    }

    pub fn store(
        &self,
        key: &CacheKey,
        mesh: &SurfaceMesh,
        count: usize,
        tol: f64,
        basis: &SpectralBasis,
    ) -> Result<(), LabError> {
        let (bin, side) = self.paths(key);
        let rows = mesh.vertices().len();
        write_atomic(&bin, &encode(basis, rows))?;
        let meta = Sidecar {
            format_version: FORMAT_VERSION,
            key: key.0.clone(),
            mesh_sha256: mesh_hash(mesh),
            count,
            tolerance: tol,
            source: basis.source(),
            modes: basis.mode_count(),
            rows,
            trusted_horizon: basis.trusted_horizon(),
            top_eigenvalue: basis.top_eigenvalue(),
        };
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        write_atomic(&side, text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use weyl_core::surface::icosphere;
    use weyl_core::solve_lowest;

    fn solved() -> (SurfaceMesh, SpectralBasis) {
        let mesh = icosphere(2);
        let p = assemble_fem(&mesh, MassScheme::Mixed).unwrap();
        let b = solve_lowest(&p, 16, 1e-9).unwrap();
        (mesh, b)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let (mesh, basis) = solved();
        let dir = tempfile::tempdir().unwrap();
        let cache = SpectrumCache::new(dir.path());
        let key = CacheKey::new(&mesh, 16, 1e-9, MassScheme::Mixed, 7);
        assert!(cache.load(&key, &mesh).unwrap().is_none());
        cache.store(&key, &mesh, 16, 1e-9, &basis).unwrap();
        let back = cache.load(&key, &mesh).unwrap().unwrap();
        assert_eq!(back, basis);
        let bits = |b: &SpectralBasis| b.eigenvalues().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&basis));
    }

    #[test]
    fn key_depends_on_every_input() {
        let mesh = icosphere(1);
        let k = CacheKey::new(&mesh, 10, 1e-8, MassScheme::Mixed, 7);
        assert_ne!(k, CacheKey::new(&mesh, 11, 1e-8, MassScheme::Mixed, 7));
        assert_ne!(k, CacheKey::new(&mesh, 10, 1e-9, MassScheme::Mixed, 7));
        assert_ne!(k, CacheKey::new(&mesh, 10, 1e-8, MassScheme::Lumped, 7));
        let mut v = mesh.vertices().to_vec();
        v[3][0] += 1e-3;
        let moved = SurfaceMesh::new(v, mesh.triangles().to_vec()).unwrap();
        assert_ne!(k, CacheKey::new(&moved, 10, 1e-8, MassScheme::Mixed, 7));
        assert_ne!(k, CacheKey::new(&mesh, 10, 1e-8, MassScheme::Mixed, 8));
        assert_eq!(k, CacheKey::new(&icosphere(1), 10, 1e-8, MassScheme::Mixed, 7));
    }

    #[test]
    fn version_mismatch_and_corruption_are_misses() {
        let (mesh, basis) = solved();
        let dir = tempfile::tempdir().unwrap();
        let cache = SpectrumCache::new(dir.path());
        let key = CacheKey::new(&mesh, 16, 1e-9, MassScheme::Mixed, 7);
        cache.store(&key, &mesh, 16, 1e-9, &basis).unwrap();
        let (bin, side) = cache.paths(&key);

        let mut bytes = fs::read(&bin).unwrap();
        bytes[4] = 9;
        fs::write(&bin, &bytes).unwrap();
        assert!(cache.load(&key, &mesh).unwrap().is_none());

        cache.store(&key, &mesh, 16, 1e-9, &basis).unwrap();
        let bytes = fs::read(&bin).unwrap();
        fs::write(&bin, &bytes[..bytes.len() - 3]).unwrap();
        assert!(cache.load(&key, &mesh).unwrap().is_none());

        cache.store(&key, &mesh, 16, 1e-9, &basis).unwrap();
        let text = fs::read_to_string(&side).unwrap().replace("\"format_version\": 1", "\"format_version\": 2");
        fs::write(&side, text).unwrap();
        assert!(cache.load(&key, &mesh).unwrap().is_none());
    }

    #[test]
    fn header_layout() {
        let (mesh, basis) = solved();
        let bytes = encode(&basis, mesh.vertices().len());
        assert_eq!(&bytes[..4], b"WLB1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 162);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 16);
        assert_eq!(f64::from_le_bytes(bytes[28..36].try_into().unwrap()).to_bits(), basis.eigenvalues()[0].to_bits());
    }
}
