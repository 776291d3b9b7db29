//! Binary kernel-matrix cache and the dependency-free FNV-1a hash used for
//! config keys and provenance hashes.
//!
//! Layout: 8-byte magic, u64 config hash, u64 matrix size, u64 slice count,
//! then the per-iteration slices as little-endian f64, row-major. Anything
//! that fails validation is treated as a miss so the caller recomputes.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::kernel::KernelMatrix;
use crate::matrix::SquareMatrix;

const MAGIC: &[u8; 8] = b"GLODKM01";

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Stable cache path for a config key.
pub fn cache_path(dir: &Path, config_key: &str) -> PathBuf {
    dir.join(format!("kernel-{:016x}.bin", fnv1a(config_key.as_bytes())))
}

pub fn store(dir: &Path, config_key: &str, matrix: &KernelMatrix) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = cache_path(dir, config_key);
    let tmp = path.with_extension("bin.tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(MAGIC)?;
        f.write_all(&fnv1a(config_key.as_bytes()).to_le_bytes())?;
        f.write_all(&(matrix.size() as u64).to_le_bytes())?;
        f.write_all(&(matrix.max_iteration() as u64 + 1).to_le_bytes())?;
        for l in 0..=matrix.max_iteration() {
            for v in matrix.per_iteration(l).as_slice() {
                f.write_all(&v.to_le_bytes())?;
            }
        }
    }
    std::fs::rename(tmp, path)
}

/// Loads a cached kernel; `None` on miss or any corruption.
pub fn load(dir: &Path, config_key: &str) -> Option<KernelMatrix> {
    let path = cache_path(dir, config_key);
    let mut f = std::fs::File::open(path).ok()?;
    let mut header = [0u8; 8 + 8 + 8 + 8];
    f.read_exact(&mut header).ok()?;
    if &header[..8] != MAGIC {
        return None;
    }
    let read_u64 = |off: usize| u64::from_le_bytes(header[off..off + 8].try_into().unwrap());
    if read_u64(8) != fnv1a(config_key.as_bytes()) {
        return None;
    }
    let n = read_u64(16) as usize;
    let slices = read_u64(24) as usize;
    if slices == 0 {
        return None;
    }
    let mut body = Vec::new();
    f.read_to_end(&mut body).ok()?;
    if body.len() != slices * n * n * 8 {
        return None;
    }
    let mut per_iteration = Vec::with_capacity(slices);
    let mut offset = 0;
    for _ in 0..slices {
        let mut m = SquareMatrix::zeros(n);
        for v in m.as_mut_slice() {
            *v = f64::from_le_bytes(body[offset..offset + 8].try_into().unwrap());
            offset += 8;
        }
        per_iteration.push(m);
    }
    Some(KernelMatrix::from_slices(per_iteration))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_matches_known_vectors() {
        // reference values for the 64-bit FNV-1a test suite
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn round_trip_and_corruption() {
        let tmp = tempfile::tempdir().unwrap();
        let km = KernelMatrix::from_slices(vec![
            SquareMatrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]),
            SquareMatrix::from_rows(vec![vec![1.0, 0.5], vec![0.5, 1.0]]),
        ]);
        store(tmp.path(), "key-a", &km).unwrap();
        let loaded = load(tmp.path(), "key-a").expect("hit");
        assert_eq!(loaded.cumulative().as_slice(), km.cumulative().as_slice());
        assert!(load(tmp.path(), "key-b").is_none());

        // truncated file must be a miss, not an error
        let path = cache_path(tmp.path(), "key-a");
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(load(tmp.path(), "key-a").is_none());
    }
}
