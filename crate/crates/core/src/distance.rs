//! Positional word distances and co-occurrence factors over the relevant
//! vocabulary.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{Position, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceParams {
    /// Scale applied per sentence boundary inside a document.
    pub a: f64,
    /// Scale applied per document boundary.
    pub b: f64,
}

impl Default for DistanceParams {
    fn default() -> Self {
        Self { a: 10.0, b: 20.0 }
    }
}

impl DistanceParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let params = Self { a, b };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("a", self.a), ("b", self.b)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParam {
                    name,
                    reason: format!("must be a positive number, got {value}"),
                });
            }
        }
        Ok(())
    }
}

/// Distance between two word occurrences.
///
/// Same sentence: the word gap. Same document: word gap times the number of
/// sentence boundaries crossed times `a`. Otherwise: the number of document
/// boundaries crossed times `b`.
pub fn occurrence_distance(p: Position, q: Position, params: &DistanceParams) -> f64 {
    if p.doc_index != q.doc_index {
        p.doc_index.abs_diff(q.doc_index) as f64 * params.b
    } else {
        let words = p.word_index.abs_diff(q.word_index) as f64;
        if p.sentence_index == q.sentence_index {
            words
        } else {
            words * p.sentence_index.abs_diff(q.sentence_index) as f64 * params.a
        }
    }
}

/// Symmetric word-distance matrix `D`, indexed by vocabulary code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix(pub Array2<f64>);

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.0[[r, s]]
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix_csv(&self.0, writer)
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(File::create(path)?)
    }
}

/// Co-occurrence factor matrix `B`, indexed by vocabulary code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix(pub Array2<f64>);

impl CooccurrenceMatrix {
    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.0[[r, s]]
    }
}

/// `D(r,s)` is the smallest occurrence distance over all pairs of
/// occurrences of `r` and `s`; the diagonal is zero.
pub fn build_distance_matrix(vocab: &Vocabulary, params: &DistanceParams) -> DistanceMatrix {
    let n = vocab.len();
    let entries = vocab.entries();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|r| {
            ((r + 1)..n)
                .map(|s| {
                    let mut best = f64::INFINITY;
                    for &p in &entries[r].occurrences {
                        for &q in &entries[s].occurrences {
                            best = best.min(occurrence_distance(p, q, params));
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();

    let mut d = Array2::zeros((n, n));
    for (r, row) in upper.into_iter().enumerate() {
        for (offset, value) in row.into_iter().enumerate() {
            let s = r + 1 + offset;
            d[[r, s]] = value;
            d[[s, r]] = value;
        }
    }
    DistanceMatrix(d)
}

/// `B(r,s) = 1 + shared sentences + shared documents`; `B(r,r) = 1`.
pub fn build_cooccurrence_matrix(vocab: &Vocabulary) -> CooccurrenceMatrix {
    let n = vocab.len();
    let mut sentences: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
    let mut documents: Vec<Vec<usize>> = Vec::with_capacity(n);
    for entry in vocab.entries() {
        let mut sent: Vec<(usize, usize)> = entry
            .occurrences
            .iter()
            .map(|p| (p.doc_index, p.sentence_index))
            .collect();
        sent.sort_unstable();
        sent.dedup();
        let mut docs: Vec<usize> = sent.iter().map(|&(d, _)| d).collect();
        docs.dedup();
        sentences.push(sent);
        documents.push(docs);
    }

    let mut b = Array2::ones((n, n));
    for r in 0..n {
        for s in (r + 1)..n {
            let shared = sorted_intersection_len(&sentences[r], &sentences[s])
                + sorted_intersection_len(&documents[r], &documents[s]);
            let value = 1.0 + shared as f64;
            b[[r, s]] = value;
            b[[s, r]] = value;
        }
    }
    CooccurrenceMatrix(b)
}

fn sorted_intersection_len<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Triples `(r, s, t)` with `D(r,t) > D(r,s) + D(s,t) + tol`.
///
/// The three-case distance is not guaranteed to be a metric; this is an
/// audit helper, cubic in the vocabulary size.
pub fn triangle_violations(d: &DistanceMatrix, tol: f64) -> Vec<(usize, usize, usize)> {
    let n = d.len();
    let mut out = Vec::new();
    for r in 0..n {
        for t in (r + 1)..n {
            for s in 0..n {
                if s != r && s != t && d.get(r, t) > d.get(r, s) + d.get(s, t) + tol {
                    out.push((r, s, t));
                }
            }
        }
    }
    out
}

pub(crate) fn write_matrix_csv<W: Write>(m: &Array2<f64>, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for row in m.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
