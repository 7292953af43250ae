//! Building, persisting and summarising a question-answering model.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::distance::{build_cooccurrence_matrix, build_distance_matrix, DistanceMatrix};
use crate::error::{Error, Result};
use crate::retrieval::{profile_document, Paragraph};
use crate::smc::{run_smc, ClusterModel};
use crate::text::{
    self, build_vocabulary, remove_stopwords, segment, RawText, Stoplist, Vocabulary,
};

pub const FORMAT_VERSION: u32 = 1;

/// Corpus statistics reported after ingest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub documents: usize,
    /// Distinct word stems plus distinct sentence terminators.
    pub tokens: usize,
    pub relevant_terms: usize,
    pub relevant_fraction: f64,
    pub clusters: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "documents:         {}", self.documents)?;
        writeln!(f, "tokens:            {}", self.tokens)?;
        writeln!(
            f,
            "relevant terms:    {} ({:.2}%)",
            self.relevant_terms,
            self.relevant_fraction * 100.0
        )?;
        writeln!(f, "relevant fraction: {:.2}", self.relevant_fraction)?;
        write!(f, "clusters:          {}", self.clusters)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub stem: String,
    pub membership: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub index: usize,
    pub center_stem: String,
    pub potential: f64,
    pub members: Vec<Member>,
}

/// Everything needed to answer questions, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    pub source_id: String,
    pub config: ModelConfig,
    pub summary: Summary,
    pub stoplist: Stoplist,
    pub term_frequencies: Vec<(String, usize)>,
    pub vocabulary: Vocabulary,
    pub clusters: ClusterModel,
    pub paragraphs: Vec<Paragraph>,
}

impl Model {
    /// Runs the full pipeline with the stoplist named by the configuration.
    pub fn build(raw: &RawText, config: &ModelConfig) -> Result<Self> {
        let stoplist = config.stoplist()?;
        Self::build_with_stoplist(raw, config, stoplist)
    }

    pub fn build_with_stoplist(
        raw: &RawText,
        config: &ModelConfig,
        stoplist: Stoplist,
    ) -> Result<Self> {
        config.validate()?;
        let corpus = segment(raw)?;
        let filtered = remove_stopwords(&corpus, &stoplist);
        let vocabulary = build_vocabulary(&filtered)?;

        let d = build_distance_matrix(&vocabulary, &config.distance_params());
        let b = build_cooccurrence_matrix(&vocabulary);
        let clusters = run_smc(&d, &b, &config.smc_params())?;

        let paragraphs: Vec<Paragraph> = corpus
            .documents
            .iter()
            .map(|doc| Paragraph {
                doc_index: doc.index,
                text: doc.text.clone(),
                profile: profile_document(doc.index, &vocabulary, &clusters.memberships),
            })
            .collect();

        let term_frequencies = text::term_frequencies(&filtered);
        let tokens = term_frequencies.len() + corpus.terminators().len();
        let summary = Summary {
            documents: corpus.documents.len(),
            tokens,
            relevant_terms: vocabulary.len(),
            relevant_fraction: vocabulary.len() as f64 / tokens as f64,
            clusters: clusters.cluster_count(),
        };

        Ok(Self {
            format_version: FORMAT_VERSION,
            source_id: raw.source_id.clone(),
            config: config.clone(),
            summary,
            stoplist,
            term_frequencies,
            vocabulary,
            clusters,
            paragraphs,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.format_version != FORMAT_VERSION {
            return Err(Error::Version {
                found: header.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let model: Self = serde_json::from_str(text)?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn check(&self) -> Result<()> {
        let n = self.vocabulary.len();
        let c = self.clusters.centers.len();
        let u = &self.clusters.memberships;
        let consistent = n > 0
            && c > 0
            && u.nrows() == n
            && u.ncols() == c
            && self.clusters.center_potentials.len() == c
            && self.clusters.centers.iter().all(|&k| k < n)
            && self.paragraphs.iter().all(|p| p.profile.0.len() == c);
        if consistent {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: n,
                rows: u.nrows(),
                cols: u.ncols(),
            })
        }
    }

    /// Recomputes the distance matrix from the stored occurrences.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        build_distance_matrix(&self.vocabulary, &self.config.distance_params())
    }

    /// Clusters with their members of membership above `threshold`, most
    /// strongly attached first.
    pub fn cluster_reports(&self, threshold: f64) -> Vec<ClusterReport> {
        let u = &self.clusters.memberships;
        self.clusters
            .centers
            .iter()
            .zip(&self.clusters.center_potentials)
            .enumerate()
            .map(|(index, (&center, &potential))| {
                let mut members: Vec<(usize, f64)> = u
                    .column(index)
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > threshold)
                    .map(|(code, &m)| (code, m))
                    .collect();
                members.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                ClusterReport {
                    index,
                    center_stem: self.vocabulary.stem_of(center).to_string(),
                    potential,
                    members: members
                        .into_iter()
                        .map(|(code, membership)| Member {
                            stem: self.vocabulary.stem_of(code).to_string(),
                            membership,
                        })
                        .collect(),
                }
            })
            .collect()
    }
}
