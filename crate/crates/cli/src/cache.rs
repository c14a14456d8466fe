use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use iitaka_core::baskets::Basket;
use iitaka_core::enumeration::{enumerate_baskets, verify_result, SearchResult, SearchWindow};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// On-disk store of search results, one JSON file per window.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    window: String,
    baskets: Vec<CachedBasket>,
}

#[derive(Serialize, Deserialize)]
struct CachedBasket {
    basket: String,
    chi: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// A file was present but failed the re-check and was replaced.
    Rejected,
}

impl Cache {
    pub fn open(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    pub fn key(window: &SearchWindow) -> String {
        hex::encode(Sha256::digest(window.describe().as_bytes()))
    }

    pub fn path(&self, window: &SearchWindow) -> PathBuf {
        self.dir.join(format!("{}.json", Self::key(window)))
    }

    /// Cached results for the window, re-verified one by one. `Err` carries
    /// the reason a present file was not trusted.
    pub fn load(&self, window: &SearchWindow) -> Option<Result<Vec<SearchResult>, String>> {
        let text = fs::read_to_string(self.path(window)).ok()?;
        Some(Self::decode(window, &text))
    }

    fn decode(window: &SearchWindow, text: &str) -> Result<Vec<SearchResult>, String> {
        let entry: Entry = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if entry.window != window.describe() {
            return Err(format!("window mismatch: {}", entry.window));
        }
        let mut results = Vec::with_capacity(entry.baskets.len());
        for cached in entry.baskets {
            let basket = Basket::parse(&cached.basket, cached.chi).map_err(|e| e.to_string())?;
            let result =
                SearchResult::from_basket(basket, window.chi_f()).map_err(|e| e.to_string())?;
            verify_result(window, &result).map_err(|e| e.to_string())?;
            results.push(result);
        }
        if !results.windows(2).all(|p| p[0].basket < p[1].basket) {
            return Err("entries not strictly sorted".into());
        }
        Ok(results)
    }

    pub fn store(&self, window: &SearchWindow, results: &[SearchResult]) -> io::Result<()> {
        let entry = Entry {
            window: window.describe(),
            baskets: results
                .iter()
                .map(|r| CachedBasket {
                    basket: r.basket.to_string(),
                    chi: r.basket.chi_x(),
                })
                .collect(),
        };
        let path = self.path(window);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(&entry)?)?;
        fs::rename(tmp, path)
    }

    /// Cached results when they pass the re-check, otherwise a fresh
    /// enumeration that is then stored.
    pub fn enumerate(
        &self,
        window: &SearchWindow,
    ) -> iitaka_core::Result<(Vec<SearchResult>, Lookup)> {
        let lookup = match self.load(window) {
            Some(Ok(results)) => return Ok((results, Lookup::Hit)),
            Some(Err(reason)) => {
                eprintln!(
                    "iitaka: ignoring cache entry {}: {reason}",
                    self.path(window).display()
                );
                Lookup::Rejected
            }
            None => Lookup::Miss,
        };
        let results = enumerate_baskets(window)?;
        if let Err(e) = self.store(window, &results) {
            eprintln!("iitaka: could not write cache: {e}");
        }
        Ok((results, lookup))
    }
}
