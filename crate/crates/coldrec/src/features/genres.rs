use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// The 19 genre labels of the MovieLens metadata, in their canonical order.
pub const PAPER_GENRES: [&str; 19] = [
    "adventure",
    "animation",
    "children",
    "comedy",
    "fantasy",
    "romance",
    "drama",
    "action",
    "crime",
    "thriller",
    "horror",
    "sci-fi",
    "mystery",
    "IMAX",
    "documentary",
    "war",
    "film-Noir",
    "musical",
    "western",
];

/// Binary item-by-genre indicator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GenreMatrix {
    item_ids: Vec<String>,
    vocabulary: Vec<String>,
    values: DMatrix<f64>,
}

impl GenreMatrix {
    pub fn n_items(&self) -> usize {
        self.values.nrows()
    }

    /// Vocabulary size, i.e. row width.
    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn row(&self, item: usize) -> Vec<f64> {
        self.values.row(item).iter().copied().collect()
    }

    /// Genre labels set for one item.
    pub fn labels(&self, item: usize) -> Vec<&str> {
        self.values
            .row(item)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1.0)
            .map(|(c, _)| self.vocabulary[c].as_str())
            .collect()
    }
}

/// Encodes per-item genre label sets as binary indicator rows over an
/// ordered vocabulary. Unknown labels are rejected by name.
pub fn encode_genres(
    per_item_genres: &[(String, BTreeSet<String>)],
    vocabulary: &[&str],
) -> Result<GenreMatrix> {
    let n = per_item_genres.len();
    let d = vocabulary.len();
    let mut values = DMatrix::zeros(n, d);
    let mut item_ids = Vec::with_capacity(n);
    for (r, (item_id, labels)) in per_item_genres.iter().enumerate() {
        item_ids.push(item_id.clone());
        for label in labels {
            let c = vocabulary
                .iter()
                .position(|v| v == label)
                .ok_or_else(|| Error::UnknownGenre(label.clone()))?;
            values[(r, c)] = 1.0;
        }
    }
    Ok(GenreMatrix {
        item_ids,
        vocabulary: vocabulary.iter().map(|s| (*s).to_owned()).collect(),
        values,
    })
}

/// Writes the genre CSV: header `item_id,genres` with `|`-separated labels.
pub fn write_genre_csv(path: &Path, per_item_genres: &[(String, BTreeSet<String>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["item_id", "genres"])?;
    for (item_id, labels) in per_item_genres {
        let joined = labels.iter().cloned().collect::<Vec<_>>().join("|");
        w.write_record([item_id, &joined])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_genre_csv(path: &Path) -> Result<Vec<(String, BTreeSet<String>)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::MalformedFile {
                what: "genre CSV",
                path: path.to_path_buf(),
                line: idx as u64 + 2,
                reason: format!("expected 2 fields, got {}", rec.len()),
            });
        }
        let labels = rec[1]
            .split('|')
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        out.push((rec[0].to_owned(), labels));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genres(entries: &[(&str, &[&str])]) -> Vec<(String, BTreeSet<String>)> {
        entries
            .iter()
            .map(|(id, labels)| {
                (
                    (*id).to_owned(),
                    labels.iter().map(|l| (*l).to_owned()).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn adventure_is_column_zero() {
        let g = encode_genres(&genres(&[("m1", &["adventure"])]), &PAPER_GENRES).unwrap();
        assert_eq!(g.dim(), 19);
        let row = g.row(0);
        assert_eq!(row[0], 1.0);
        assert_eq!(row.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn empty_set_gives_zero_row() {
        let g = encode_genres(&genres(&[("m1", &[])]), &PAPER_GENRES).unwrap();
        assert!(g.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn all_genres_gives_ones_row() {
        let all: Vec<&str> = PAPER_GENRES.to_vec();
        let g = encode_genres(&genres(&[("m1", &all)]), &PAPER_GENRES).unwrap();
        assert!(g.row(0).iter().all(|&v| v == 1.0));
        assert_eq!(g.row(0).len(), 19);
    }

    #[test]
    fn unknown_label_named_in_error() {
        let err = encode_genres(&genres(&[("m1", &["noir"])]), &PAPER_GENRES).unwrap_err();
        assert!(err.to_string().contains("noir"));
    }

    #[test]
    fn genre_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("genres.csv");
        let data = genres(&[("a", &["drama", "war"]), ("b", &[]), ("c", &["comedy"])]);
        write_genre_csv(&path, &data).unwrap();
        assert_eq!(read_genre_csv(&path).unwrap(), data);
    }

    #[test]
    fn row_ones_match_label_count() {
        let g = encode_genres(
            &genres(&[("a", &["drama", "war"]), ("b", &["comedy"])]),
            &PAPER_GENRES,
        )
        .unwrap();
        assert_eq!(g.row(0).iter().sum::<f64>(), 2.0);
        assert_eq!(g.row(1).iter().sum::<f64>(), 1.0);
        assert_eq!(g.labels(0), vec!["drama", "war"]);
        assert_eq!(g.labels(1), vec!["comedy"]);
    }
}
