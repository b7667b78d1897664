//! On-disk cache of polynomial artifacts in canonical text form.
//!
//! Layout: `{root}/m{m}/n{n}/{name}.txt`, e.g. `phi.txt`, `Delta_5_5.txt`,
//! `delta_nn_mod_31.txt`. Writes go to a temporary file in the same directory
//! followed by a rename, so readers never see a partial file.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{invalid, Error, Result};

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Cache { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, m: u64, n: u64, name: &str) -> Result<PathBuf> {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return invalid(format!("bad cache entry name {name:?}"));
        }
        Ok(self.root.join(format!("m{m}")).join(format!("n{n}")).join(format!("{name}.txt")))
    }

    /// The cached value, or `None` when absent.
    pub fn load<T>(&self, m: u64, n: u64, name: &str) -> Result<Option<T>>
    where
        T: FromStr<Err = Error>,
    {
        let path = self.path(m, n, name)?;
        match fs::read_to_string(&path) {
            Ok(text) => {
                let value = text.trim_end_matches('\n').parse().map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                Ok(Some(value))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn store<T: Display>(&self, m: u64, n: u64, name: &str, value: &T) -> Result<()> {
        let path = self.path(m, n, name)?;
        let dir = path.parent().expect("entry has a parent");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{name}.{}.{}.tmp", std::process::id(), TMP_COUNTER.fetch_add(1, Ordering::Relaxed)));
        let result = (|| {
            let mut f = fs::File::create(&tmp)?;
            writeln!(f, "{value}")?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        Ok(result?)
    }

    /// Load `name`, or compute and store it.
    pub fn get_or_compute<T, F>(&self, m: u64, n: u64, name: &str, compute: F) -> Result<T>
    where
        T: FromStr<Err = Error> + Display,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.load(m, n, name)? {
            log::debug!("cache hit {name} (m={m}, n={n})");
            return Ok(v);
        }
        let v = compute()?;
        self.store(m, n, name, &v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::intpoly::{IntPoly, Var};
    use crate::arith::roots::ModPoly;

    #[test]
    fn round_trip() {
        let dir = std::env::temp_dir().join(format!("dynatomic-cache-{}", std::process::id()));
        let cache = Cache::new(&dir).unwrap();
        let p = IntPoly::from_i64(Var::C, &[3, -4, 0, 12345678901]);
        assert!(cache.load::<IntPoly>(2, 4, "Delta_4_4").unwrap().is_none());
        cache.store(2, 4, "Delta_4_4", &p).unwrap();
        assert_eq!(cache.load::<IntPoly>(2, 4, "Delta_4_4").unwrap(), Some(p.clone()));
        let q = ModPoly::from_i64(31, Var::C, &[1, 0, 30]);
        let got = cache.get_or_compute(2, 5, "delta_nn_mod_31", || Ok(q.clone())).unwrap();
        assert_eq!(got, q);
        let again: ModPoly = cache.get_or_compute(2, 5, "delta_nn_mod_31", || panic!("recomputed")).unwrap();
        assert_eq!(again, q);
        assert!(cache.path(2, 5, "../x").is_err());
        fs::remove_dir_all(&dir).unwrap();
    }
}
