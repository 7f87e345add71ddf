use std::fs;
use std::path::{Component, Path, PathBuf};

use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::error::{Error, IoContext, Result};

/// Mixes a label into a base seed so per-item RNG streams are independent of
/// processing order.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest over every file under `dir` (relative path + contents), skipping
/// names in `exclude`. Missing directories hash as empty.
pub fn dir_digest(dir: &Path, exclude: &[&str]) -> Result<String> {
    let mut h = Sha256::new();
    if dir.is_dir() {
        for item in WalkDir::new(dir).sort_by_file_name() {
            let item = item.map_err(|e| Error::UnreadableDirectory {
                path: dir.to_path_buf(),
                reason: e.to_string(),
            })?;
            if !item.file_type().is_file() {
                continue;
            }
            let name = item.file_name().to_string_lossy();
            if exclude.iter().any(|x| *x == name) {
                continue;
            }
            let rel = item.path().strip_prefix(dir).unwrap_or(item.path());
            h.update(rel.to_string_lossy().as_bytes());
            h.update([0]);
            h.update(fs::read(item.path()).at(item.path())?);
            h.update([0]);
        }
    }
    Ok(hex::encode(h.finalize()))
}

/// `target` expressed relative to directory `base`. Both must exist.
pub fn relative_path(base: &Path, target: &Path) -> Result<PathBuf> {
    let base = base.canonicalize().at(base)?;
    let target = target.canonicalize().at(target)?;
    let b: Vec<Component> = base.components().collect();
    let t: Vec<Component> = target.components().collect();
    let common = b.iter().zip(&t).take_while(|(x, y)| x == y).count();
    let mut out = PathBuf::new();
    for _ in common..b.len() {
        out.push("..");
    }
    for c in &t[common..] {
        out.push(c.as_os_str());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_by_label() {
        assert_eq!(derive_seed(1, "a"), derive_seed(1, "a"));
        assert_ne!(derive_seed(1, "a"), derive_seed(1, "b"));
        assert_ne!(derive_seed(1, "a"), derive_seed(2, "a"));
    }

    #[test]
    fn relative_paths() {
        let d = tempfile::tempdir().unwrap();
        fs::create_dir_all(d.path().join("x/y")).unwrap();
        fs::create_dir_all(d.path().join("z")).unwrap();
        fs::write(d.path().join("z/f.wav"), b"1").unwrap();
        let r = relative_path(&d.path().join("x/y"), &d.path().join("z/f.wav")).unwrap();
        assert_eq!(r, PathBuf::from("../../z/f.wav"));
        let r = relative_path(&d.path().join("z"), &d.path().join("z/f.wav")).unwrap();
        assert_eq!(r, PathBuf::from("f.wav"));
    }

    #[test]
    fn digest_tracks_content_and_exclusions() {
        let d = tempfile::tempdir().unwrap();
        fs::write(d.path().join("a"), b"1").unwrap();
        let first = dir_digest(d.path(), &[]).unwrap();
        fs::write(d.path().join("stage.json"), b"x").unwrap();
        assert_eq!(dir_digest(d.path(), &["stage.json"]).unwrap(), first);
        fs::write(d.path().join("a"), b"2").unwrap();
        assert_ne!(dir_digest(d.path(), &["stage.json"]).unwrap(), first);
    }
}
