//! Batch runs over a manifest of instances.
//!
//! A manifest has one instance per line with five comma-separated fields:
//! `path, format, kind, time-limit, target`. `kind` is `cover`, `partition`,
//! `mixed` or empty and must agree with the format; `target` may be empty.
//! Blank lines and lines starting with `#` are skipped. Relative paths are
//! resolved against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::formats::{write_solution, Format};
use crate::report::SolveReport;
use crate::solve::{solve, SolveOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    /// 1-based line number in the manifest.
    pub line: usize,
    pub path: PathBuf,
    pub format: Format,
    pub time_limit_secs: f64,
    pub target: Option<f64>,
}

/// A problem with one manifest line or with the instance it names.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for EntryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn parse_line(line: usize, text: &str, base: &Path) -> Result<ManifestEntry, EntryError> {
    let err = |message: String| EntryError { line, message };
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(err(format!("expected 5 comma-separated fields, found {}", fields.len())));
    }
    if fields[0].is_empty() {
        return Err(err("empty instance path".into()));
    }
    let format: Format = fields[1].parse().map_err(|e| err(format!("{e}")))?;
    let compatible = match fields[2] {
        "" => true,
        "cover" => matches!(format, Format::ScpRow | Format::ScpCol | Format::Bip),
        "partition" => matches!(format, Format::Spp | Format::Bip),
        "mixed" => format == Format::Bip,
        other => return Err(err(format!("unknown kind {other:?}"))),
    };
    if !compatible {
        return Err(err(format!("kind {:?} does not match format {format}", fields[2])));
    }
    let time_limit_secs: f64 = fields[3]
        .parse()
        .ok()
        .filter(|t: &f64| *t > 0.0 && t.is_finite())
        .ok_or_else(|| err(format!("bad time limit {:?}", fields[3])))?;
    let target = match fields[4] {
        "" | "-" => None,
        t => Some(
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("bad target {t:?}")))?,
        ),
    };
    Ok(ManifestEntry {
        line,
        path: base.join(fields[0]),
        format,
        time_limit_secs,
        target,
    })
}

/// Splits a manifest into entries and per-line errors.
pub fn parse_manifest(text: &str, base: &Path) -> (Vec<ManifestEntry>, Vec<EntryError>) {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_line(k + 1, trimmed, base) {
            Ok(e) => entries.push(e),
            Err(e) => errors.push(e),
        }
    }
    (entries, errors)
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Parses and solves one entry, writing `<name>.report` and, when feasible,
/// `<name>.sol` into `out_dir`.
pub fn run_entry(entry: &ManifestEntry, alpha: f64, out_dir: Option<&Path>) -> Result<SolveReport, EntryError> {
    let err = |message: String| EntryError {
        line: entry.line,
        message,
    };
    let text = fs::read(&entry.path).map_err(|e| err(format!("{}: {e}", entry.path.display())))?;
    let inst = entry
        .format
        .parse(&text)
        .map_err(|e| err(format!("{}: {e}", entry.path.display())))?;
    let name = instance_name(&entry.path);
    let opts = SolveOptions {
        time_limit_secs: entry.time_limit_secs,
        alpha,
        target: entry.target,
        verify: false,
    };
    let result = solve(&inst, &name, entry.format.name(), &opts, &mut ()).map_err(|e| err(format!("{name}: {e}")))?;
    if let Some(dir) = out_dir {
        let write = |file: String, body: String| {
            fs::write(dir.join(&file), body).map_err(|e| err(format!("{file}: {e}")))
        };
        write(format!("{name}.report"), result.report.to_key_value())?;
        if let Some(best) = &result.best {
            write(format!("{name}.sol"), write_solution(best.objective, &best.members))?;
        }
    }
    Ok(result.report)
}

/// Runs all entries on `jobs` worker threads. Reports come back in
/// manifest order; every solve owns its instance.
pub fn run_batch(
    entries: &[ManifestEntry],
    jobs: usize,
    alpha: f64,
    out_dir: Option<&Path>,
) -> Vec<Result<SolveReport, EntryError>> {
    let slots: Vec<Mutex<Option<Result<SolveReport, EntryError>>>> = entries.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, entries.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(entry) = entries.get(k) else { break };
                let r = run_entry(entry, alpha, out_dir);
                *slots[k].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every entry is processed"))
        .collect()
}
