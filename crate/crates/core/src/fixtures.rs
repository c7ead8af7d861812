//! Small edge-list graphs shipped with the crate.
//!
//! Files are named `<name>.<ic|lt>.txt` with given weights. The directory
//! defaults to the crate's `fixtures/` folder and can be moved with
//! `SKIS_FIXTURES_DIR`.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::error::{Result, SkisError};
use crate::graph::{load_edge_list, DiffusionModel, ProbabilisticGraph, WeightMode};

pub const FIXTURES_ENV: &str = "SKIS_FIXTURES_DIR";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    /// File stem including the model suffix, e.g. `star.ic`.
    pub name: String,
    pub model: DiffusionModel,
    pub path: PathBuf,
}

impl Fixture {
    pub fn load(&self) -> Result<ProbabilisticGraph> {
        let file = File::open(&self.path)?;
        load_edge_list(BufReader::new(file), self.model, WeightMode::Given, 0)
    }
}

pub fn fixtures_dir() -> PathBuf {
    match std::env::var_os(FIXTURES_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

/// Every fixture in `dir`, sorted by name.
pub fn list_in(dir: &Path) -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(file_name) = path.file_name().and_then(|f| f.to_str()) else {
            continue;
        };
        let Some(name) = file_name.strip_suffix(".txt") else {
            continue;
        };
        let model = match name.rsplit_once('.') {
            Some((_, "ic")) => DiffusionModel::IC,
            Some((_, "lt")) => DiffusionModel::LT,
            _ => continue,
        };
        out.push(Fixture {
            name: name.to_string(),
            model,
            path: path.clone(),
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

pub fn list() -> Result<Vec<Fixture>> {
    list_in(&fixtures_dir())
}

/// Look up a fixture by name, with or without the model suffix.
pub fn find(name: &str) -> Result<Fixture> {
    let all = list()?;
    let mut hits = all.into_iter().filter(|f| {
        f.name == name
            || f.name
                .rsplit_once('.')
                .is_some_and(|(stem, _)| stem == name)
    });
    match (hits.next(), hits.next()) {
        (Some(f), None) => Ok(f),
        (Some(_), Some(_)) => Err(SkisError::validation(format!(
            "fixture name '{name}' is ambiguous"
        ))),
        (None, _) => Err(SkisError::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no fixture named '{name}' in {}", fixtures_dir().display()),
        ))),
    }
}
