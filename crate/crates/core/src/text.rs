//! Text pipeline: paragraph and sentence segmentation, stopword removal,
//! stemming and the coded vocabulary of relevant stems.
//!
//! Positions are assigned once, at segmentation time. `word_index` counts
//! every word of a document, continuously across its sentences, and is never
//! renumbered afterwards, so the gaps left by removed stopwords still count
//! towards positional distances.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::BufRead;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentence-terminal punctuation marks.
pub const TERMINATORS: [char; 3] = ['.', '?', '!'];

/// A word is relevant when it occurs at least this many times...
pub const MIN_RELEVANT_FREQUENCY: usize = 3;
/// ...and its stem has at least this many characters.
pub const MIN_RELEVANT_LENGTH: usize = 3;

const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawText {
    pub content: String,
    pub source_id: String,
}

impl RawText {
    pub fn new(content: impl Into<String>, source_id: impl Into<String>) -> Self {
        Self {
            content: content.into(),
            source_id: source_id.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub doc_index: usize,
    pub sentence_index: usize,
    pub word_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub stem: String,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
    /// The punctuation mark closing the sentence, if any.
    pub terminator: Option<char>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub index: usize,
    /// The paragraph as it appeared in the source, trimmed.
    pub text: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.documents.iter().flat_map(Document::tokens)
    }

    pub fn word_count(&self) -> usize {
        self.tokens().count()
    }

    /// Distinct sentence terminators used in the corpus.
    pub fn terminators(&self) -> BTreeSet<char> {
        self.documents
            .iter()
            .flat_map(|d| d.sentences.iter().filter_map(|s| s.terminator))
            .collect()
    }
}

/// Splits raw text into paragraphs, sentences and positioned word tokens.
pub fn segment(raw: &RawText) -> Result<Corpus> {
    if raw.content.trim().is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut documents = Vec::new();
    for paragraph in paragraphs(&raw.content) {
        let sentences = split_sentences(&paragraph, documents.len());
        if sentences.is_empty() {
            continue;
        }
        documents.push(Document {
            index: documents.len(),
            text: paragraph,
            sentences,
        });
    }

    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(Corpus { documents })
}

fn paragraphs(content: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in content.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(current.join("\n"));
                current.clear();
            }
        } else {
            current.push(line.trim_end());
        }
    }
    if !current.is_empty() {
        out.push(current.join("\n"));
    }
    out.into_iter().map(|p| p.trim().to_string()).collect()
}

fn split_sentences(paragraph: &str, doc_index: usize) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut word_index = 0;

    let mut flush_word = |word: &mut String, tokens: &mut Vec<Token>, sentence_index: usize| {
        if word.is_empty() {
            return;
        }
        let surface = std::mem::take(word);
        tokens.push(Token {
            stem: stem(&surface.to_lowercase()),
            surface,
            position: Position {
                doc_index,
                sentence_index,
                word_index,
            },
        });
        word_index += 1;
    };

    let mut chars = paragraph.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphanumeric() {
            word.push(c);
            continue;
        }
        flush_word(&mut word, &mut tokens, sentences.len());
        let at_boundary = chars.peek().is_none_or(|n| n.is_whitespace());
        if TERMINATORS.contains(&c) && at_boundary && !tokens.is_empty() {
            sentences.push(Sentence {
                index: sentences.len(),
                tokens: std::mem::take(&mut tokens),
                terminator: Some(c),
            });
        }
    }
    flush_word(&mut word, &mut tokens, sentences.len());
    if !tokens.is_empty() {
        sentences.push(Sentence {
            index: sentences.len(),
            tokens,
            terminator: None,
        });
    }
    sentences
}

/// Lowercased word surfaces of a free-text string, in order.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// A set of lowercase words to drop before stemming.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Stoplist(BTreeSet<String>);

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled English stoplist.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect()
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut words = BTreeSet::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                words.insert(line.to_lowercase());
            }
        }
        Ok(Self(words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<String> for Stoplist {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for Stoplist {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        Self(iter.into_iter().map(str::to_string).collect())
    }
}

/// Drops tokens whose lowercased surface is a stopword. Sentences and
/// documents left without tokens are dropped; positions are kept as they are.
pub fn remove_stopwords(corpus: &Corpus, stoplist: &Stoplist) -> Corpus {
    let documents = corpus
        .documents
        .iter()
        .filter_map(|doc| {
            let sentences: Vec<Sentence> = doc
                .sentences
                .iter()
                .filter_map(|s| {
                    let tokens: Vec<Token> = s
                        .tokens
                        .iter()
                        .filter(|t| !stoplist.contains(&t.surface.to_lowercase()))
                        .cloned()
                        .collect();
                    (!tokens.is_empty()).then_some(Sentence {
                        index: s.index,
                        tokens,
                        terminator: s.terminator,
                    })
                })
                .collect();
            (!sentences.is_empty()).then(|| Document {
                index: doc.index,
                text: doc.text.clone(),
                sentences,
            })
        })
        .collect();
    Corpus { documents }
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// English suffix-stripping stem of a word, lowercased.
///
/// The snowball rules are reapplied until the result stops changing, which
/// makes the function idempotent.
pub fn stem(word: &str) -> String {
    let mut current = word.to_lowercase();
    // every productive pass removes at least one character
    for _ in 0..word.len() {
        let next = stemmer().stem(&current);
        if next.is_empty() || next == current {
            break;
        }
        current = next.into_owned();
    }
    current
}

pub fn is_relevant(stem: &str, frequency: usize) -> bool {
    frequency >= MIN_RELEVANT_FREQUENCY && stem.chars().count() >= MIN_RELEVANT_LENGTH
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub stem: String,
    pub frequency: usize,
    pub occurrences: Vec<Position>,
}

/// Relevant stems, coded `0..len()` in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<VocabEntry>", into = "Vec<VocabEntry>")]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    codes: HashMap<String, usize>,
}

impl From<Vec<VocabEntry>> for Vocabulary {
    fn from(entries: Vec<VocabEntry>) -> Self {
        let codes = entries
            .iter()
            .enumerate()
            .map(|(code, e)| (e.stem.clone(), code))
            .collect();
        Self { entries, codes }
    }
}

impl From<Vocabulary> for Vec<VocabEntry> {
    fn from(vocab: Vocabulary) -> Self {
        vocab.entries
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn code(&self, stem: &str) -> Option<usize> {
        self.codes.get(stem).copied()
    }

    pub fn entry(&self, code: usize) -> &VocabEntry {
        &self.entries[code]
    }

    pub fn stem_of(&self, code: usize) -> &str {
        &self.entries[code].stem
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    /// Distinct codes of the relevant words occurring in document `doc_index`,
    /// in code order.
    pub fn codes_in_document(&self, doc_index: usize) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.occurrences.iter().any(|p| p.doc_index == doc_index))
            .map(|(code, _)| code)
            .collect()
    }
}

/// Builds the vocabulary of relevant stems from a stemmed, stopword-filtered
/// corpus.
pub fn build_vocabulary(corpus: &Corpus) -> Result<Vocabulary> {
    let mut order: Vec<&str> = Vec::new();
    let mut occurrences: HashMap<&str, Vec<Position>> = HashMap::new();
    for token in corpus.tokens() {
        occurrences
            .entry(token.stem.as_str())
            .or_insert_with(|| {
                order.push(token.stem.as_str());
                Vec::new()
            })
            .push(token.position);
    }

    let entries: Vec<VocabEntry> = order
        .into_iter()
        .filter_map(|stem| {
            let occ = occurrences.remove(stem)?;
            is_relevant(stem, occ.len()).then(|| VocabEntry {
                stem: stem.to_string(),
                frequency: occ.len(),
                occurrences: occ,
            })
        })
        .collect();

    if entries.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok(Vocabulary::from(entries))
}

/// Frequency of every stem in the corpus, most frequent first; ties keep
/// first-occurrence order.
pub fn term_frequencies(corpus: &Corpus) -> Vec<(String, usize)> {
    let mut order: Vec<String> = Vec::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for token in corpus.tokens() {
        let count = counts.entry(token.stem.as_str()).or_insert(0);
        if *count == 0 {
            order.push(token.stem.clone());
        }
        *count += 1;
    }
    let mut out: Vec<(String, usize)> = order
        .into_iter()
        .map(|stem| {
            let n = counts[stem.as_str()];
            (stem, n)
        })
        .collect();
    out.sort_by_key(|e| std::cmp::Reverse(e.1));
    out
}

/// Maps a question onto vocabulary codes: tokenize, drop stopwords, stem,
/// keep known stems once each in order of appearance.
pub fn preprocess_query(
    question: &str,
    vocab: &Vocabulary,
    stoplist: &Stoplist,
) -> Result<Vec<usize>> {
    let mut seen = HashSet::new();
    let codes: Vec<usize> = words(question)
        .into_iter()
        .filter(|w| !stoplist.contains(w))
        .filter_map(|w| vocab.code(&stem(&w)))
        .filter(|code| seen.insert(*code))
        .collect();
    if codes.is_empty() {
        return Err(Error::NoKnownWords);
    }
    Ok(codes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(text: &str) -> Corpus {
        segment(&RawText::new(text, "test")).unwrap()
    }

    #[test]
    fn segments_paragraphs_and_sentences() {
        let c = corpus("A b.\n\nC d.");
        assert_eq!(c.documents.len(), 2);
        assert_eq!(
            c.documents.iter().map(|d| d.sentences.len()).sum::<usize>(),
            2
        );
        assert_eq!(c.word_count(), 4);
    }

    #[test]
    fn blank_paragraphs_are_dropped() {
        let c = corpus("A b.\n\n\n\nC.");
        assert_eq!(c.documents.len(), 2);
        assert_eq!(c.documents[1].index, 1);

        let c = corpus("A b.\n\n  \t\n---\n\nC.");
        assert_eq!(c.documents.len(), 2);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(
            segment(&RawText::new("  \n\t\n", "x")),
            Err(Error::EmptyCorpus)
        ));
        assert!(matches!(
            segment(&RawText::new(". ? !", "x")),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn word_index_runs_across_sentences() {
        let c = corpus("One two. Three four? Five");
        let positions: Vec<(usize, usize)> = c
            .tokens()
            .map(|t| (t.position.sentence_index, t.position.word_index))
            .collect();
        assert_eq!(positions, vec![(0, 0), (0, 1), (1, 2), (1, 3), (2, 4)]);
        let terms: Vec<Option<char>> = c.documents[0]
            .sentences
            .iter()
            .map(|s| s.terminator)
            .collect();
        assert_eq!(terms, vec![Some('.'), Some('?'), None]);
    }

    #[test]
    fn decimal_point_is_not_a_boundary() {
        let c = corpus("Take 2.5 mg daily. Then stop.");
        assert_eq!(c.documents[0].sentences.len(), 2);
    }

    #[test]
    fn stopwords_are_removed_without_renumbering() {
        let c = corpus("the drug and dose");
        let stop: Stoplist = ["the", "and"].into_iter().collect();
        let filtered = remove_stopwords(&c, &stop);
        let kept: Vec<(&str, usize)> = filtered
            .tokens()
            .map(|t| (t.surface.as_str(), t.position.word_index))
            .collect();
        assert_eq!(kept, vec![("drug", 1), ("dose", 3)]);
    }

    #[test]
    fn empty_stoplist_is_identity() {
        let c = corpus("The drug. And the dose.\n\nMore text here.");
        assert_eq!(remove_stopwords(&c, &Stoplist::empty()), c);
    }

    #[test]
    fn fully_stopped_document_is_dropped() {
        let c = corpus("the and of.\n\ndrug dose.");
        let filtered = remove_stopwords(&c, &Stoplist::english());
        assert_eq!(filtered.documents.len(), 1);
        assert_eq!(filtered.documents[0].index, 1);
    }

    #[test]
    fn stemmer_conflates_inflections() {
        assert_eq!(stem("ends"), "end");
        assert_eq!(stem("ending"), "end");
        assert_eq!(stem("end"), "end");
        assert_eq!(stem("bleeding"), stem("bleeds"));
        assert_eq!(stem("Risks"), "risk");
    }

    #[test]
    fn relevance_boundaries() {
        assert!(!is_relevant("ab", 10));
        assert!(!is_relevant("dose", 2));
        assert!(is_relevant("dose", 3));
        assert!(is_relevant("abc", 3));
    }

    #[test]
    fn vocabulary_codes_follow_first_occurrence() {
        let c = corpus("dose ab drug. drug dose ab. ab dose drug. rare");
        let v = build_vocabulary(&c).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.stem_of(0), "dose");
        assert_eq!(v.stem_of(1), "drug");
        assert_eq!(v.code("drug"), Some(1));
        assert_eq!(v.code("ab"), None);
        assert_eq!(v.entry(0).frequency, 3);
        assert_eq!(v.entry(0).occurrences.len(), 3);
    }

    #[test]
    fn vocabulary_without_relevant_words_is_an_error() {
        let c = corpus("one two three.");
        assert!(matches!(build_vocabulary(&c), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn query_maps_to_known_codes() {
        let text = "Risk of foetal bleeding. The risk of bleeding is foetal. \
                    Bleeding risk and foetal harm. Foetal risk bleeds.";
        let stop = Stoplist::english();
        let c = remove_stopwords(&corpus(text), &stop);
        let v = build_vocabulary(&c).unwrap();
        let codes = preprocess_query("risks of foetal bleeding?", &v, &stop).unwrap();
        let stems: BTreeSet<&str> = codes.iter().map(|&c| v.stem_of(c)).collect();
        assert_eq!(stems, ["bleed", "foetal", "risk"].into_iter().collect());

        let codes = preprocess_query("risk risk RISK", &v, &stop).unwrap();
        assert_eq!(codes.len(), 1);

        assert!(matches!(
            preprocess_query("", &v, &stop),
            Err(Error::NoKnownWords)
        ));
        assert!(matches!(
            preprocess_query("the and of", &v, &stop),
            Err(Error::NoKnownWords)
        ));
        assert!(matches!(
            preprocess_query("unrelated zebra", &v, &stop),
            Err(Error::NoKnownWords)
        ));
    }

    #[test]
    fn stoplist_parsing() {
        let s = Stoplist::parse("# comment\nThe\n\n and \n");
        assert_eq!(s.len(), 2);
        assert!(s.contains("the"));
        assert!(s.contains("and"));
        assert!(Stoplist::english().contains("of"));
    }

    #[test]
    fn term_frequencies_sorted() {
        let c = corpus("b a b c a b");
        let tf = term_frequencies(&c);
        assert_eq!(tf, vec![("b".into(), 3), ("a".into(), 2), ("c".into(), 1)]);
    }
}
