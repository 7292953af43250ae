//! Test support: random toy corpora and a straight-line brute-force
//! reimplementation of the distance, potential, centre-selection and
//! membership equations, used as an oracle against the library.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use smcqa::text::{Corpus, Token};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap()
}

const SYLLABLES: [&str; 12] = [
    "ka", "lo", "mi", "ru", "ze", "ta", "no", "vi", "su", "pe", "do", "ga",
];

/// A random toy insert; at most `max_words` distinct content words, plus
/// stopwords and two-letter fillers that never become relevant. Words are
/// split into up to four topics and each paragraph mostly sticks to one.
pub fn random_text(rng: &mut StdRng, max_words: usize) -> String {
    let pool_size = rng.random_range(3..=max_words);
    let mut pool = BTreeSet::new();
    while pool.len() < pool_size {
        let n = rng.random_range(2..=3);
        let w: String = (0..n)
            .map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len())])
            .collect();
        pool.insert(w + "x");
    }
    let pool: Vec<String> = pool.into_iter().collect();
    let topics = rng.random_range(1..=4).min(pool.len());
    let fillers = ["the", "of", "and", "ab", "zo"];

    let docs = rng.random_range(1..=12);
    let mut out = Vec::new();
    for _ in 0..docs {
        let topic = rng.random_range(0..topics);
        let own: Vec<&str> = pool
            .iter()
            .enumerate()
            .filter(|(i, _)| i % topics == topic)
            .map(|(_, w)| w.as_str())
            .collect();
        let sentences = rng.random_range(1..=5);
        let mut para = Vec::new();
        for _ in 0..sentences {
            let len = rng.random_range(1..=12);
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    let roll: f64 = rng.random();
                    if roll < 0.15 {
                        fillers[rng.random_range(0..fillers.len())]
                    } else if roll < 0.25 {
                        pool[rng.random_range(0..pool.len())].as_str()
                    } else {
                        own[rng.random_range(0..own.len())]
                    }
                })
                .collect();
            let end = if rng.random_bool(0.3) { "?" } else { "." };
            para.push(format!("{}{}", words.join(" "), end));
        }
        out.push(para.join(" "));
    }
    out.join("\n\n")
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub struct OracleParams {
    pub a: f64,
    pub b: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub epsilon: f64,
    pub m: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            a: 10.0,
            b: 20.0,
            r_a: 12.0,
            r_b: 14.0,
            epsilon: 0.1,
            m: 2.0,
        }
    }
}

pub struct OracleRun {
    pub stems: Vec<String>,
    pub d: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub centers: Vec<usize>,
    pub center_potentials: Vec<f64>,
    pub u: Vec<Vec<f64>>,
}

fn token_distance(x: &Token, y: &Token, params: &OracleParams) -> f64 {
    let (px, py) = (x.position, y.position);
    if px.doc_index == py.doc_index && px.sentence_index == py.sentence_index {
        (py.word_index as f64 - px.word_index as f64).abs()
    } else if px.doc_index == py.doc_index {
        (py.word_index as f64 - px.word_index as f64).abs()
            * (py.sentence_index as f64 - px.sentence_index as f64).abs()
            * params.a
    } else {
        (py.doc_index as f64 - px.doc_index as f64).abs() * params.b
    }
}

/// Works from the filtered corpus tokens directly, without the library's
/// vocabulary or matrices.
pub fn oracle(corpus: &Corpus, params: &OracleParams) -> OracleRun {
    let tokens: Vec<&Token> = corpus.tokens().collect();

    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut first_seen: Vec<&str> = Vec::new();
    for t in &tokens {
        let c = counts.entry(t.stem.as_str()).or_insert(0);
        if *c == 0 {
            first_seen.push(t.stem.as_str());
        }
        *c += 1;
    }
    let stems: Vec<String> = first_seen
        .into_iter()
        .filter(|s| counts[s] > 2 && s.chars().count() > 2)
        .map(String::from)
        .collect();
    let n = stems.len();
    let code = |s: &str| stems.iter().position(|x| x == s);

    let mut d = vec![vec![f64::INFINITY; n]; n];
    for x in &tokens {
        for y in &tokens {
            if let (Some(r), Some(s)) = (code(&x.stem), code(&y.stem)) {
                if r != s {
                    d[r][s] = d[r][s].min(token_distance(x, y, params));
                }
            }
        }
    }
    for (r, row) in d.iter_mut().enumerate() {
        row[r] = 0.0;
    }

    let mut b = vec![vec![1.0; n]; n];
    let mut sentence_sets: HashMap<(usize, usize), BTreeSet<usize>> = HashMap::new();
    let mut doc_sets: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for t in &tokens {
        if let Some(r) = code(&t.stem) {
            sentence_sets
                .entry((t.position.doc_index, t.position.sentence_index))
                .or_default()
                .insert(r);
            doc_sets.entry(t.position.doc_index).or_default().insert(r);
        }
    }
    for set in sentence_sets.values().chain(doc_sets.values()) {
        for &r in set {
            for &s in set {
                if r != s {
                    b[r][s] += 1.0;
                }
            }
        }
    }

    let alpha = 4.0 / params.r_a.powi(2);
    let beta = 4.0 / params.r_b.powi(2);
    let mut p = vec![vec![0.0; n]; n];
    for r in 0..n {
        for s in 0..n {
            if r != s {
                p[r][s] = b[r][s] * (-alpha * d[r][s].powi(2)).exp();
            }
        }
    }
    let initial = p.clone();

    let mut retired = vec![false; n];
    let potential = |p: &Vec<Vec<f64>>, retired: &Vec<bool>, r: usize| -> f64 {
        if retired[r] {
            0.0
        } else {
            p[r].iter().sum()
        }
    };
    let mut centers: Vec<usize> = Vec::new();
    let mut center_potentials: Vec<f64> = Vec::new();
    loop {
        let mut best = 0;
        for r in 1..n {
            if potential(&p, &retired, r) > potential(&p, &retired, best) {
                best = r;
            }
        }
        let pk = potential(&p, &retired, best);
        let accepted = match center_potentials.first() {
            None => true,
            Some(&p1) => {
                if pk <= 0.0 || pk < params.epsilon * p1 {
                    break;
                }
                let d_min = centers
                    .iter()
                    .map(|&c| d[best][c])
                    .fold(f64::INFINITY, f64::min);
                d_min / params.r_a + pk / p1 >= 1.0
            }
        };
        if accepted {
            centers.push(best);
            center_potentials.push(pk);
            for r in 0..n {
                for s in 0..n {
                    let cut = pk * b[r][s] * (-beta * d[best][s].powi(2)).exp();
                    p[r][s] = (p[r][s] - cut).max(0.0);
                }
            }
        }
        retired[best] = true;
        if retired.iter().all(|&x| x) {
            break;
        }
    }

    // inverse-power form of the membership ratio
    let power = 2.0 / (params.m - 1.0);
    let u: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            if let Some(j) = centers.iter().position(|&c| c == i) {
                let mut row = vec![0.0; centers.len()];
                row[j] = 1.0;
                return row;
            }
            let weights: Vec<f64> = centers.iter().map(|&c| d[i][c].powf(-power)).collect();
            let total: f64 = weights.iter().sum();
            weights.iter().map(|w| w / total).collect()
        })
        .collect();

    OracleRun {
        stems,
        d,
        b,
        p: initial,
        centers,
        center_potentials,
        u,
    }
}

/// Largest absolute entrywise difference between the two.
pub fn max_abs_diff(expected: &[Vec<f64>], actual: &ndarray::Array2<f64>) -> f64 {
    assert_eq!(expected.len(), actual.nrows());
    let mut worst: f64 = 0.0;
    for (r, row) in expected.iter().enumerate() {
        assert_eq!(row.len(), actual.ncols());
        for (s, &x) in row.iter().enumerate() {
            worst = worst.max((x - actual[[r, s]]).abs());
        }
    }
    worst
}
