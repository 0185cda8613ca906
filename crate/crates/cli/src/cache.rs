//! Persisted class sets.
//!
//! A store holds only the representative ideals (basis rows and denominator
//! as base-q digit codes); orders, units, weights and the mass certificate
//! are re-derived on load, so a stale or hand-edited file can never pass
//! itself off as a valid class set. Loads that fail any of version check,
//! parse, re-validation, or byte-identical reserialization fall back to a
//! fresh enumeration that overwrites the store.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use ffquat::classes::ClassSet;
use ffquat::irred::{poly_code, poly_from_code};
use ffquat::lattice::QLattice;
use ffquat::quat::QuatAlgebra;

const STORE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StoreFile {
    version: u32,
    q: u64,
    delta: u64,
    p0: u64,
    ideals: Vec<IdealRecord>,
}

#[derive(Serialize, Deserialize, PartialEq)]
struct IdealRecord {
    den: u64,
    rows: Vec<Vec<u64>>,
}

pub fn store_path(dir: &Path, alg: &QuatAlgebra) -> PathBuf {
    dir.join(format!(
        "cls_q{}_d{}_p0_{}.json",
        alg.q(),
        alg.delta(),
        poly_code(alg.p0())
    ))
}

/// The class set of the algebra, from the store when a valid one exists.
pub fn load_or_build(alg: &Arc<QuatAlgebra>, dir: Option<&Path>) -> anyhow::Result<ClassSet> {
    let Some(dir) = dir else {
        return Ok(ClassSet::enumerate(alg)?);
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = store_path(dir, alg);
    if path.exists() {
        match try_load(alg, &path) {
            Ok(set) => {
                eprintln!("cache: hit {}", path.display());
                return Ok(set);
            }
            Err(reason) => eprintln!("cache: {reason}, rebuilding {}", path.display()),
        }
    }
    let set = ClassSet::enumerate(alg)?;
    fs::write(&path, render(&set)).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("cache: stored {}", path.display());
    Ok(set)
}

/// Distinguishes "ignore quietly" cases (version drift) from corruption only
/// in the message; both paths rebuild and overwrite.
fn try_load(alg: &Arc<QuatAlgebra>, path: &Path) -> Result<ClassSet, String> {
    let bytes = fs::read(path).map_err(|e| format!("unreadable store ({e})"))?;
    let file: StoreFile =
        serde_json::from_slice(&bytes).map_err(|_| "corrupted store".to_string())?;
    if file.version != STORE_VERSION {
        return Err(format!(
            "store version {} does not match {STORE_VERSION}",
            file.version
        ));
    }
    if file.q != alg.q() || file.delta != alg.delta() || file.p0 != poly_code(alg.p0()) {
        return Err("store describes a different algebra".to_string());
    }
    let mut ideals = Vec::with_capacity(file.ideals.len());
    for record in &file.ideals {
        ideals.push(decode_ideal(alg, record)?);
    }
    let set =
        ClassSet::from_ideals(alg, ideals).map_err(|e| format!("store failed validation ({e})"))?;
    // The canonical form must survive a round trip byte for byte; anything
    // else means the writer and this reader disagree about the format.
    if render(&set).as_bytes() != bytes {
        return Err("store is not in canonical form".to_string());
    }
    Ok(set)
}

fn decode_ideal(alg: &Arc<QuatAlgebra>, record: &IdealRecord) -> Result<QLattice, String> {
    if record.rows.len() != 4 || record.rows.iter().any(|r| r.len() != 4) {
        return Err("corrupted store".to_string());
    }
    let q = alg.q();
    let den = poly_from_code(q, record.den);
    let mut basis = Vec::with_capacity(4);
    for row in &record.rows {
        let nums = [
            poly_from_code(q, row[0]),
            poly_from_code(q, row[1]),
            poly_from_code(q, row[2]),
            poly_from_code(q, row[3]),
        ];
        basis.push(
            alg.quat(nums, den.clone())
                .map_err(|e| format!("store failed validation ({e})"))?,
        );
    }
    QLattice::from_generators(alg, &basis).map_err(|e| format!("store failed validation ({e})"))
}

fn render(set: &ClassSet) -> String {
    let alg = set.algebra();
    let ideals = set
        .classes
        .iter()
        .map(|class| IdealRecord {
            den: poly_code(class.ideal.den()),
            rows: class
                .ideal
                .rows()
                .iter()
                .map(|row| row.iter().map(poly_code).collect())
                .collect(),
        })
        .collect();
    let file = StoreFile {
        version: STORE_VERSION,
        q: alg.q(),
        delta: alg.delta(),
        p0: poly_code(alg.p0()),
        ideals,
    };
    let mut body = serde_json::to_string(&file).expect("store serialization cannot fail");
    body.push('\n');
    body
}
