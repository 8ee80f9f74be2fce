//! Dataset download, verification, unpacking and caching.
//!
//! A dataset lives in `<cache>/<name>/`. The raw download is hashed, then
//! unpacked (zip, gzip'd tar, plain gzip, or kept as is) and deleted. A
//! `.complete` marker holding the digest ends a successful fetch; later
//! fetches with the marker present do no I/O beyond listing the directory.

use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::manifest::{DatasetEntry, DatasetManifest};

pub const CACHE_ENV: &str = "SPP_CACHE_DIR";
const MARKER: &str = ".complete";
const PARTIAL: &str = ".download.part";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unknown dataset `{name}`; available: {}", .available.join(", "))]
    UnknownName { name: String, available: Vec<String> },
    #[error("checksum mismatch for `{name}`: expected {expected}, got {actual}")]
    ChecksumMismatch { name: String, expected: String, actual: String },
    #[error("download of {url} failed: {message}")]
    Network { url: String, message: String },
    #[error("cannot unpack {path}: {message}")]
    Archive { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Copies the resource at `url` into `dest`.
pub trait Downloader {
    fn download(&self, url: &str, dest: &mut dyn Write) -> Result<(), FetchError>;
}

/// Handles `file://` URLs locally and everything else over HTTP(S).
pub struct DefaultDownloader;

impl Downloader for DefaultDownloader {
    fn download(&self, url: &str, dest: &mut dyn Write) -> Result<(), FetchError> {
        if let Some(path) = url.strip_prefix("file://") {
            io::copy(&mut File::open(path)?, dest)?;
            return Ok(());
        }
        let network = |message: String| FetchError::Network { url: url.to_string(), message };
        let client = reqwest::blocking::Client::builder()
            .timeout(None)
            .build()
            .map_err(|e| network(e.to_string()))?;
        let mut response = client.get(url).send().and_then(|r| r.error_for_status()).map_err(|e| network(e.to_string()))?;
        response.copy_to(dest).map_err(|e| network(e.to_string()))?;
        Ok(())
    }
}

/// Cache directory: the explicit choice, else `$SPP_CACHE_DIR`, else
/// `~/.cache/spp`.
pub fn cache_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    let home = std::env::var_os("HOME").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    home.join(".cache").join("spp")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fetched {
    pub files: Vec<PathBuf>,
    pub sha256: String,
    pub cached: bool,
}

pub fn fetch_dataset(
    manifest: &DatasetManifest,
    name: &str,
    cache: &Path,
    downloader: &dyn Downloader,
) -> Result<Fetched, FetchError> {
    let entry = manifest.get(name).ok_or_else(|| FetchError::UnknownName {
        name: name.to_string(),
        available: manifest.names().into_iter().map(String::from).collect(),
    })?;
    let dir = cache.join(&entry.name);
    let marker = dir.join(MARKER);
    if let Ok(recorded) = fs::read_to_string(&marker) {
        let recorded = recorded.trim().to_string();
        if entry.sha256.as_ref().is_none_or(|want| *want == recorded) {
            return Ok(Fetched { files: list_files(&dir)?, sha256: recorded, cached: true });
        }
        // The manifest now pins a different digest: fetch again.
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    let partial = dir.join(PARTIAL);
    let result = download_and_unpack(entry, &dir, &partial, downloader);
    let _ = fs::remove_file(&partial);
    let sha256 = result?;
    fs::write(&marker, format!("{sha256}\n"))?;
    Ok(Fetched { files: list_files(&dir)?, sha256, cached: false })
}

fn download_and_unpack(entry: &DatasetEntry, dir: &Path, partial: &Path, downloader: &dyn Downloader) -> Result<String, FetchError> {
    let mut hasher = HashingWriter { inner: File::create(partial)?, hasher: Sha256::new() };
    downloader.download(&entry.url, &mut hasher)?;
    hasher.inner.flush()?;
    let actual = hex::encode(hasher.hasher.finalize());
    if let Some(expected) = &entry.sha256 {
        if *expected != actual {
            return Err(FetchError::ChecksumMismatch { name: entry.name.clone(), expected: expected.clone(), actual });
        }
    }
    unpack(partial, dir, &file_name(&entry.url, &entry.name))?;
    Ok(actual)
}

struct HashingWriter {
    inner: File,
    hasher: Sha256,
}

impl Write for HashingWriter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Last path segment of the URL without query, or the dataset name.
fn file_name(url: &str, fallback: &str) -> String {
    let path = url.split(['?', '#']).next().unwrap_or("");
    let last = path.trim_end_matches('/').rsplit('/').next().unwrap_or("");
    if last.is_empty() || path.ends_with('/') || !last.contains('.') {
        fallback.to_string()
    } else {
        last.to_string()
    }
}

fn unpack(archive: &Path, dir: &Path, name: &str) -> Result<(), FetchError> {
    let mut magic = [0u8; 4];
    let n = File::open(archive)?.read(&mut magic)?;
    let bad = |message: String| FetchError::Archive { path: archive.to_path_buf(), message };
    match &magic[..n] {
        [b'P', b'K', 3, 4] => {
            let mut zip = zip::ZipArchive::new(File::open(archive)?).map_err(|e| bad(e.to_string()))?;
            for i in 0..zip.len() {
                let mut file = zip.by_index(i).map_err(|e| bad(e.to_string()))?;
                let Some(rel) = file.enclosed_name() else {
                    return Err(bad(format!("entry `{}` escapes the target directory", file.name())));
                };
                let out = dir.join(rel);
                if file.is_dir() {
                    fs::create_dir_all(&out)?;
                } else {
                    if let Some(parent) = out.parent() {
                        fs::create_dir_all(parent)?;
                    }
                    io::copy(&mut file, &mut File::create(&out)?)?;
                }
            }
        }
        [0x1f, 0x8b, ..] => {
            let decoded = dir.join(".gunzip.part");
            io::copy(&mut flate2::read::GzDecoder::new(BufReader::new(File::open(archive)?)), &mut File::create(&decoded)?)?;
            let is_tar = tar::Archive::new(File::open(&decoded)?).entries().is_ok_and(|mut e| e.next().is_some_and(|x| x.is_ok()));
            if is_tar {
                tar::Archive::new(File::open(&decoded)?).unpack(dir).map_err(|e| bad(e.to_string()))?;
                fs::remove_file(&decoded)?;
            } else {
                let plain = name.strip_suffix(".gz").unwrap_or(name);
                fs::rename(&decoded, dir.join(plain))?;
            }
        }
        _ => {
            fs::copy(archive, dir.join(name))?;
        }
    }
    Ok(())
}

/// Regular files below `dir`, sorted, skipping names that start with a dot.
pub fn list_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let entry = entry?;
            if entry.file_name().to_string_lossy().starts_with('.') {
                continue;
            }
            let kind = entry.file_type()?;
            if kind.is_dir() {
                stack.push(entry.path());
            } else if kind.is_file() {
                out.push(entry.path());
            }
        }
    }
    out.sort();
    Ok(out)
}
