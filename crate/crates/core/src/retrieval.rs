//! Cluster-profile retrieval: a question and every paragraph are summarised
//! by the memberships of their relevant words, and paragraphs are ranked by
//! cosine similarity to the question profile.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::text::{preprocess_query, Vocabulary};

/// Per-cluster weights, L2-normalised unless all zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterProfile(pub Vec<f64>);

impl ClusterProfile {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0.0)
    }

    pub fn cosine(&self, other: &ClusterProfile) -> f64 {
        let (na, nb) = (self.norm(), other.norm());
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        let dot: f64 = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        dot / (na * nb)
    }
}

/// Sums the membership rows of the given words and normalises.
fn aggregate(codes: impl IntoIterator<Item = usize>, u: &Array2<f64>) -> ClusterProfile {
    let mut weights = vec![0.0; u.ncols()];
    for code in codes {
        for (w, m) in weights.iter_mut().zip(u.row(code)) {
            *w += m;
        }
    }
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        weights.iter_mut().for_each(|w| *w /= norm);
    }
    ClusterProfile(weights)
}

pub fn profile_document(doc_index: usize, vocab: &Vocabulary, u: &Array2<f64>) -> ClusterProfile {
    aggregate(vocab.codes_in_document(doc_index), u)
}

/// Duplicate codes are counted once.
pub fn profile_query(codes: &[usize], u: &Array2<f64>) -> Result<ClusterProfile> {
    if codes.is_empty() {
        return Err(Error::NoKnownWords);
    }
    let mut distinct = codes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(aggregate(distinct, u))
}

/// A candidate answer paragraph with its precomputed profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paragraph {
    pub doc_index: usize,
    pub text: String,
    pub profile: ClusterProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedAnswer {
    pub text: String,
    #[serde(rename = "relevance")]
    pub relative_relevance: f64,
    pub doc_index: usize,
}

/// Ranks paragraphs by cosine similarity to the query profile and returns
/// the best `top_k`, with scores relative to the best one.
pub fn rank_answers(
    query: &ClusterProfile,
    paragraphs: &[Paragraph],
    top_k: usize,
) -> Result<Vec<RankedAnswer>> {
    let mut scored: Vec<(f64, &Paragraph)> = paragraphs
        .iter()
        .map(|p| (query.cosine(&p.profile), p))
        .filter(|(score, _)| *score > 0.0)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.doc_index.cmp(&b.1.doc_index)));

    let Some(&(best, _)) = scored.first() else {
        return Err(Error::NoAnswer);
    };
    Ok(scored
        .into_iter()
        .take(top_k)
        .map(|(score, p)| RankedAnswer {
            text: p.text.clone(),
            relative_relevance: score / best,
            doc_index: p.doc_index,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reply {
    Answers { answers: Vec<RankedAnswer> },
    Fallback { fallback: String },
}

/// Question in, ranked paragraphs (or the configured fallback text) out.
pub fn answer(question: &str, model: &Model, top_k: usize) -> Reply {
    let ranked = preprocess_query(question, &model.vocabulary, &model.stoplist)
        .and_then(|codes| profile_query(&codes, &model.clusters.memberships))
        .and_then(|profile| rank_answers(&profile, &model.paragraphs, top_k));
    match ranked {
        Ok(answers) => Reply::Answers { answers },
        Err(err) => {
            log::debug!("falling back for {question:?}: {err}");
            Reply::Fallback {
                fallback: model.config.fallback_text.clone(),
            }
        }
    }
}
