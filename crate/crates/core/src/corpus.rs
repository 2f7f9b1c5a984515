//! The shipped corpus, embedded at compile time.

use std::path::Path;

use crate::dataset::{Algebra, AlgebraFile, ErrataMode};
use crate::error::{Error, Result};

/// The ten certified tables, in name order.
pub const TABLES: [&str; 10] = ["mu01", "mu02", "mu06", "mu08", "mu09", "mu10", "mu11", "mu13", "mu15", "mu17"];

/// Bracket-less files holding semisimple derivations as inert metadata.
pub const META: [&str; 10] = ["mu03", "mu04", "mu05", "mu07", "mu12", "mu14", "mu16", "mu18", "mu19", "mu20"];

const FILES: [(&str, &str); 20] = [
    ("mu01", include_str!("../../../data/mu01")),
    ("mu02", include_str!("../../../data/mu02")),
    ("mu03-meta", include_str!("../../../data/mu03-meta")),
    ("mu04-meta", include_str!("../../../data/mu04-meta")),
    ("mu05-meta", include_str!("../../../data/mu05-meta")),
    ("mu06", include_str!("../../../data/mu06")),
    ("mu07-meta", include_str!("../../../data/mu07-meta")),
    ("mu08", include_str!("../../../data/mu08")),
    ("mu09", include_str!("../../../data/mu09")),
    ("mu10", include_str!("../../../data/mu10")),
    ("mu11", include_str!("../../../data/mu11")),
    ("mu12-meta", include_str!("../../../data/mu12-meta")),
    ("mu13", include_str!("../../../data/mu13")),
    ("mu14-meta", include_str!("../../../data/mu14-meta")),
    ("mu15", include_str!("../../../data/mu15")),
    ("mu16-meta", include_str!("../../../data/mu16-meta")),
    ("mu17", include_str!("../../../data/mu17")),
    ("mu18-meta", include_str!("../../../data/mu18-meta")),
    ("mu19-meta", include_str!("../../../data/mu19-meta")),
    ("mu20-meta", include_str!("../../../data/mu20-meta")),
];

/// Embedded text of a corpus file (`mu08`, `mu03-meta`).
pub fn embedded(file: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == file).map(|(_, t)| *t)
}

/// File names of the whole corpus.
pub fn file_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

/// Parses an embedded corpus file.
pub fn file(name: &str) -> Result<AlgebraFile> {
    let text = embedded(name).ok_or_else(|| Error::UnknownAlgebra(name.to_string()))?;
    AlgebraFile::parse(text)
}

/// Loads one embedded table or metadata file.
pub fn load(name: &str, mode: ErrataMode) -> Result<Algebra> {
    file(name)?.elaborate(&format!("data/{name}"), mode)
}

/// Loads `name` from `dir` if given, else from the embedded corpus.
pub fn load_from(dir: Option<&Path>, name: &str, mode: ErrataMode) -> Result<Algebra> {
    match dir {
        None => load(name, mode),
        Some(d) => {
            let path = d.join(name);
            if !path.is_file() {
                return Err(Error::UnknownAlgebra(name.to_string()));
            }
            crate::dataset::load_algebra(&path, mode)
        }
    }
}

/// Every file in `dir` (skipping hidden files), sorted by name.
pub fn list_dir(dir: &Path) -> Result<Vec<String>> {
    let rd = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut names = Vec::new();
    for e in rd {
        let e = e.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let name = e.file_name().to_string_lossy().to_string();
        if !name.starts_with('.') && e.path().is_file() {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}
