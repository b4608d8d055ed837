//! File formats for interaction data.
//!
//! Interactions are UTF-8 CSV with header `user_id,item_id,rating` plus an
//! optional ignored `timestamp` column. A fold directory holds
//! `fold<k>/train.csv`, `fold<k>/warm_test.csv`, `fold<k>/cold_test.csv` and
//! `fold<k>/cold_items.txt` (one item id per line); id maps are persisted as
//! `users.csv` / `items.csv` with header `index,id`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::data::{FoldSplit, IdMap, InteractionMatrix, RatingRecord};
use crate::{Error, Result};

/// Reads raw rating records; the rating column must parse as a finite float.
pub fn read_rating_records(path: &Path) -> Result<Vec<RatingRecord>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() < 3 {
        return Err(Error::MalformedFile {
            what: "interactions CSV",
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header user_id,item_id,rating, got `{headers:?}`"),
        });
    }
    let mut records = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = idx as u64 + 2;
        if rec.len() < 3 {
            return Err(Error::MalformedFile {
                what: "interactions CSV",
                path: path.to_path_buf(),
                line,
                reason: format!("expected at least 3 fields, got {}", rec.len()),
            });
        }
        let rating: f64 = rec[2].parse().map_err(|e| Error::MalformedFile {
            what: "interactions CSV",
            path: path.to_path_buf(),
            line,
            reason: format!("bad rating `{}`: {e}", &rec[2]),
        })?;
        records.push(RatingRecord::new(&rec[0], &rec[1], rating));
    }
    Ok(records)
}

/// Writes the positives of a matrix as an interactions CSV. `rating_value`
/// is the literal written to the rating column (synthetic data uses `5` so
/// the conventional binarization threshold applies unchanged; fold files
/// use `1` because they are already binary).
pub fn write_matrix_csv(
    path: &Path,
    matrix: &InteractionMatrix,
    users: &IdMap,
    items: &IdMap,
    rating_value: &str,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["user_id", "item_id", "rating"])?;
    for (u, i) in matrix.pairs() {
        let user = users.id(u).ok_or(Error::IndexOutOfBounds {
            what: "users",
            index: u as usize,
            size: users.len(),
        })?;
        let item = items.id(i).ok_or(Error::IndexOutOfBounds {
            what: "items",
            index: i as usize,
            size: items.len(),
        })?;
        w.write_record([user, item, rating_value])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads an already-binarized matrix: every row is a positive regardless of
/// its rating value. Dimensions come from the id maps.
pub fn read_positives_csv(
    path: &Path,
    users: &IdMap,
    items: &IdMap,
) -> Result<InteractionMatrix> {
    let records = read_rating_records(path)?;
    let mut pairs = Vec::with_capacity(records.len());
    for rec in &records {
        pairs.push((users.require(&rec.user)?, items.require(&rec.item)?));
    }
    InteractionMatrix::from_pairs(users.len(), items.len(), pairs)
}

pub fn write_id_map(path: &Path, map: &IdMap) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "id"])?;
    for (i, id) in map.ids().iter().enumerate() {
        w.write_record([&i.to_string(), id])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_id_map(path: &Path) -> Result<IdMap> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut ids = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = idx as u64 + 2;
        if rec.len() != 2 {
            return Err(Error::MalformedFile {
                what: "id map CSV",
                path: path.to_path_buf(),
                line,
                reason: format!("expected 2 fields, got {}", rec.len()),
            });
        }
        let index: usize = rec[0].parse().map_err(|e| Error::MalformedFile {
            what: "id map CSV",
            path: path.to_path_buf(),
            line,
            reason: format!("bad index `{}`: {e}", &rec[0]),
        })?;
        if index != ids.len() {
            return Err(Error::MalformedFile {
                what: "id map CSV",
                path: path.to_path_buf(),
                line,
                reason: format!("indices must be contiguous from 0, got {index}"),
            });
        }
        ids.push(rec[1].to_owned());
    }
    IdMap::from_ids(ids)
}

fn fold_dir(base: &Path, fold_index: usize) -> PathBuf {
    base.join(format!("fold{fold_index}"))
}

/// Writes one fold into `base/fold<k>/`.
pub fn write_fold_dir(base: &Path, fold: &FoldSplit, users: &IdMap, items: &IdMap) -> Result<()> {
    let dir = fold_dir(base, fold.fold_index);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_matrix_csv(&dir.join("train.csv"), &fold.train, users, items, "1")?;
    write_matrix_csv(&dir.join("warm_test.csv"), &fold.warm_test, users, items, "1")?;
    write_matrix_csv(&dir.join("cold_test.csv"), &fold.cold_test, users, items, "1")?;
    let mut lines = String::new();
    for &i in &fold.cold_items {
        let id = items.id(i).ok_or(Error::IndexOutOfBounds {
            what: "items",
            index: i as usize,
            size: items.len(),
        })?;
        lines.push_str(id);
        lines.push('\n');
    }
    let cold_path = dir.join("cold_items.txt");
    fs::write(&cold_path, lines).map_err(|e| Error::io(&cold_path, e))
}

/// Reads `base/fold<k>/` back into a validated [`FoldSplit`].
pub fn read_fold_dir(
    base: &Path,
    fold_index: usize,
    users: &IdMap,
    items: &IdMap,
) -> Result<FoldSplit> {
    let dir = fold_dir(base, fold_index);
    if !dir.is_dir() {
        return Err(Error::MissingArtifact {
            what: format!("fold {fold_index} directory"),
            path: dir,
        });
    }
    let train = read_positives_csv(&dir.join("train.csv"), users, items)?;
    let warm_test = read_positives_csv(&dir.join("warm_test.csv"), users, items)?;
    let cold_test = read_positives_csv(&dir.join("cold_test.csv"), users, items)?;
    let cold_path = dir.join("cold_items.txt");
    let cold_text = fs::read_to_string(&cold_path).map_err(|e| Error::io(&cold_path, e))?;
    let mut cold_items = BTreeSet::new();
    for line in cold_text.lines() {
        let line = line.trim();
        if !line.is_empty() {
            cold_items.insert(items.require(line)?);
        }
    }
    let warm_items: BTreeSet<u32> = (0..items.len() as u32)
        .filter(|i| !cold_items.contains(i))
        .collect();
    let fold = FoldSplit {
        fold_index,
        train,
        warm_test,
        cold_test,
        warm_items,
        cold_items,
    };
    fold.validate()?;
    Ok(fold)
}

/// Counts `fold<k>` subdirectories with contiguous indices from 0.
pub fn count_folds(base: &Path) -> usize {
    let mut n = 0;
    while fold_dir(base, n).is_dir() {
        n += 1;
    }
    n
}

/// Writes a ground-truth or report JSON value with trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
