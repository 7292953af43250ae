//! Subtractive mountain clustering over a word-distance matrix.
//!
//! Every relevant word starts as a candidate centre. Pairwise potentials
//! `P(r,s) = B(r,s) exp(-alpha D(r,s)^2)` are summed per word; the word with
//! the largest remaining potential becomes the next centre if it is far
//! enough from the existing ones, and potential is then subtracted around it.
//! Selection stops once the best remaining potential drops below
//! `epsilon * P1`, where `P1` is the potential of the first centre.
//! Finally each word gets a fuzzy membership degree in every cluster.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::distance::{CooccurrenceMatrix, DistanceMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmcParams {
    /// Neighbourhood radius of the potential.
    pub r_a: f64,
    /// Radius of the potential reduction around a centre.
    pub r_b: f64,
    /// Stop once the best potential falls below this fraction of the first.
    pub epsilon: f64,
    /// Membership fuzzifier, `m > 1`.
    pub m: f64,
}

impl Default for SmcParams {
    fn default() -> Self {
        Self {
            r_a: 12.0,
            r_b: 14.0,
            epsilon: 0.1,
            m: 2.0,
        }
    }
}

impl SmcParams {
    pub fn alpha(&self) -> f64 {
        4.0 / (self.r_a * self.r_a)
    }

    pub fn beta(&self) -> f64 {
        4.0 / (self.r_b * self.r_b)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("r_a", self.r_a), ("r_b", self.r_b)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParam {
                    name,
                    reason: format!("must be a positive number, got {value}"),
                });
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParam {
                name: "epsilon",
                reason: format!("must lie in (0, 1), got {}", self.epsilon),
            });
        }
        if !(self.m.is_finite() && self.m > 1.0) {
            return Err(Error::InvalidParam {
                name: "m",
                reason: format!("must be greater than 1, got {}", self.m),
            });
        }
        if self.r_b < self.r_a {
            log::warn!(
                "r_b ({}) is smaller than r_a ({}); centres may end up close together",
                self.r_b,
                self.r_a
            );
        }
        Ok(())
    }
}

/// Current pairwise potentials and their row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialState {
    pub pairwise: Array2<f64>,
    pub word: Vec<f64>,
}

impl PotentialState {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    fn refresh(&mut self) {
        for (r, row) in self.pairwise.rows().into_iter().enumerate() {
            self.word[r] = row.sum();
        }
    }

    /// Removes a word from further selection by zeroing its row.
    pub fn retire(&mut self, code: usize) {
        self.pairwise.row_mut(code).fill(0.0);
        self.word[code] = 0.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub code: usize,
    pub potential: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected,
}

/// Result of a clustering run: centres in selection order and the
/// `N x C` membership matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub centers: Vec<usize>,
    pub center_potentials: Vec<f64>,
    pub memberships: Array2<f64>,
}

impl ClusterModel {
    pub fn cluster_count(&self) -> usize {
        self.centers.len()
    }
}

fn check_shape(d: &DistanceMatrix, b: &CooccurrenceMatrix) -> Result<()> {
    let n = d.0.nrows();
    for m in [&d.0, &b.0] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Shape {
                expected: n,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
    }
    Ok(())
}

pub fn initial_potentials(
    d: &DistanceMatrix,
    b: &CooccurrenceMatrix,
    params: &SmcParams,
) -> Result<PotentialState> {
    check_shape(d, b)?;
    let n = d.len();
    let alpha = params.alpha();
    let pairwise = Array2::from_shape_fn((n, n), |(r, s)| {
        if r == s {
            0.0
        } else {
            let dist = d.get(r, s);
            b.get(r, s) * (-alpha * dist * dist).exp()
        }
    });
    let mut state = PotentialState {
        pairwise,
        word: vec![0.0; n],
    };
    state.refresh();
    Ok(state)
}

/// The word with the largest potential; ties go to the lowest code.
pub fn select_center(state: &PotentialState) -> (usize, f64) {
    let mut best = (0, state.word.first().copied().unwrap_or(0.0));
    for (code, &p) in state.word.iter().enumerate().skip(1) {
        if p > best.1 {
            best = (code, p);
        }
    }
    best
}

/// Subtracts `P_k* B(r,s) exp(-beta D(c,s)^2)` from every pair, clamping at
/// zero, then recomputes the word potentials.
pub fn subtract_potential(
    state: &mut PotentialState,
    center: usize,
    center_potential: f64,
    b: &CooccurrenceMatrix,
    d: &DistanceMatrix,
    params: &SmcParams,
) {
    let beta = params.beta();
    let n = state.len();
    let falloff: Vec<f64> = (0..n)
        .map(|s| {
            let dist = d.get(center, s);
            (-beta * dist * dist).exp()
        })
        .collect();
    for ((r, s), p) in state.pairwise.indexed_iter_mut() {
        *p = (*p - center_potential * b.get(r, s) * falloff[s]).max(0.0);
    }
    state.refresh();
}

/// Accepts a candidate when `d_min / r_a + P_k / P_1 >= 1`, `d_min` being the
/// distance to the nearest accepted centre. The first centre is always
/// accepted.
pub fn accept_center(
    candidate: usize,
    candidate_potential: f64,
    centers: &[Center],
    d: &DistanceMatrix,
    params: &SmcParams,
) -> Verdict {
    let Some(first) = centers.first() else {
        return Verdict::Accepted;
    };
    let d_min = centers
        .iter()
        .map(|c| d.get(candidate, c.code))
        .fold(f64::INFINITY, f64::min);
    let ratio = if first.potential > 0.0 {
        candidate_potential / first.potential
    } else {
        0.0
    };
    if d_min / params.r_a + ratio >= 1.0 {
        Verdict::Accepted
    } else {
        Verdict::Rejected
    }
}

/// Runs centre selection to completion and computes memberships.
pub fn run_smc(
    d: &DistanceMatrix,
    b: &CooccurrenceMatrix,
    params: &SmcParams,
) -> Result<ClusterModel> {
    if d.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut state = initial_potentials(d, b, params)?;
    let n = state.len();

    let (code, potential) = select_center(&state);
    let mut centers = vec![Center { code, potential }];
    subtract_potential(&mut state, code, potential, b, d, params);
    state.retire(code);
    let threshold = params.epsilon * potential;

    // each pass retires one word, so at most n passes in total
    for _ in 1..n {
        let (code, potential) = select_center(&state);
        if potential <= 0.0 || potential < threshold {
            break;
        }
        match accept_center(code, potential, &centers, d, params) {
            Verdict::Accepted => {
                centers.push(Center { code, potential });
                subtract_potential(&mut state, code, potential, b, d, params);
            }
            Verdict::Rejected => {
                log::debug!("rejected candidate centre {code} (potential {potential})");
            }
        }
        state.retire(code);
    }

    let codes: Vec<usize> = centers.iter().map(|c| c.code).collect();
    let memberships = memberships(&codes, d, params);
    Ok(ClusterModel {
        center_potentials: centers.iter().map(|c| c.potential).collect(),
        centers: codes,
        memberships,
    })
}

/// Fuzzy membership of every word in every cluster:
/// `U(i,j) = 1 / sum_k (D(i,c_j) / D(i,c_k))^(2/(m-1))`.
///
/// A word at distance zero from a centre (the centre itself) belongs to that
/// cluster only.
pub fn memberships(centers: &[usize], d: &DistanceMatrix, params: &SmcParams) -> Array2<f64> {
    let n = d.len();
    let c = centers.len();
    let exponent = 2.0 / (params.m - 1.0);
    let mut u = Array2::zeros((n, c));
    for i in 0..n {
        let dists: Vec<f64> = centers.iter().map(|&k| d.get(i, k)).collect();
        if let Some(hit) = dists.iter().position(|&x| x == 0.0) {
            u[[i, hit]] = 1.0;
            continue;
        }
        for j in 0..c {
            let denom: f64 = dists.iter().map(|&dk| (dists[j] / dk).powf(exponent)).sum();
            u[[i, j]] = 1.0 / denom;
        }
    }
    u
}
