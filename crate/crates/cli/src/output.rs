use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

/// The stage directories of an output tree.
pub const STAGES: [&str; 6] = ["graphs", "embeddings", "instances", "samples", "curves", "summary"];

pub fn create_layout(out: &Path) -> anyhow::Result<()> {
    for stage in STAGES {
        let dir = out.join(stage);
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut buf, &row)?;
        buf.push(b'\n');
    }
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

/// CSV with optional leading `#` comment lines.
pub fn write_csv<T: Serialize>(path: &Path, comments: &[&str], rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    for c in comments {
        writeln!(buf, "# {c}")?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let rows = r
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Output files relative to the output directory, with their SHA-256.
    pub files: BTreeMap<String, String>,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> anyhow::Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path != root.join(MANIFEST) {
            out.push(path);
        }
    }
    Ok(())
}

/// Hashes every file under `out` and writes `out/manifest.json`.
pub fn write_manifest(out: &Path, command: &str, config: &impl Serialize, started_unix: u64) -> anyhow::Result<RunManifest> {
    let mut paths = Vec::new();
    collect_files(out, out, &mut paths)?;
    let mut files = BTreeMap::new();
    for p in paths {
        let rel = p.strip_prefix(out)?.to_string_lossy().replace('\\', "/");
        files.insert(rel, hash_file(&p)?);
    }
    let manifest = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(config)?,
        started_unix,
        finished_unix: unix_now(),
        files,
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

pub fn read_manifest(out: &Path) -> anyhow::Result<RunManifest> {
    let path = out.join(MANIFEST);
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}
