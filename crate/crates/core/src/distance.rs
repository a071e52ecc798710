//! Minimum distance of CSS codes.
//!
//! Both methods work on one side at a time. For the X side the search space is
//! `ker(Hz)`, and a codeword is a nontrivial logical exactly when its
//! "logical syndrome" against a Z-logical basis is nonzero; that replaces a
//! row-space membership test per candidate by a few word operations.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::code::{Certainty, CodeParams, CssCode, Pauli};
use crate::f2::{popcount, BitVec};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum DistanceSide {
    X,
    Z,
    Both,
}

impl From<Pauli> for DistanceSide {
    fn from(p: Pauli) -> Self {
        match p {
            Pauli::X => DistanceSide::X,
            Pauli::Z => DistanceSide::Z,
        }
    }
}

/// A low-weight logical operator of one Pauli type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub side: Pauli,
    pub support: BitVec,
}

impl Certificate {
    pub fn weight(&self) -> usize {
        self.support.weight()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceResult {
    pub side: DistanceSide,
    /// `None` when only a lower bound is known.
    pub value: Option<usize>,
    pub certainty: Certainty,
    pub certificate: Option<Certificate>,
    /// No nontrivial logical of weight ≤ this exists.
    pub verified_floor: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceError {
    NoLogicals,
    /// The exact search would exceed its combination budget.
    Budget { side: Pauli, verified_floor: usize, best: Option<Certificate> },
    /// A certificate failed independent re-verification (a bug, never expected).
    CertificateRejected { side: Pauli },
}

impl fmt::Display for DistanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceError::NoLogicals => f.write_str("no logical operators"),
            DistanceError::Budget { side, verified_floor, best } => {
                write!(f, "exact {side}-distance search exceeded its budget; verified d > {verified_floor}")?;
                if let Some(b) = best {
                    write!(f, ", best found {}", b.weight())?;
                }
                Ok(())
            }
            DistanceError::CertificateRejected { side } => {
                write!(f, "{side}-side certificate failed re-verification")
            }
        }
    }
}

impl core::error::Error for DistanceError {}

/// Generator of `ker(H_other)` with each row extended by its logical syndrome.
#[derive(Clone, Debug)]
pub struct SideProblem {
    pub side: Pauli,
    n: usize,
    /// words holding qubit bits
    nw: usize,
    stride: usize,
    rows: Vec<u64>,
    k_rows: usize,
}

impl SideProblem {
    pub fn new(code: &CssCode, side: Pauli) -> Result<Self, DistanceError> {
        let n = code.n();
        let basis = code.logical_basis();
        if basis.is_empty() {
            return Err(DistanceError::NoLogicals);
        }
        let duals: Vec<BitVec> = basis
            .into_iter()
            .map(|(x, z)| match side {
                Pauli::X => z,
                Pauli::Z => x,
            })
            .collect();
        let gen = code.checks(side.other()).nullspace();
        let nw = n.div_ceil(64);
        let sw = duals.len().div_ceil(64);
        let stride = nw + sw;
        let mut rows = vec![0u64; gen.rows() * stride];
        for r in 0..gen.rows() {
            let v = gen.row(r);
            let dst = &mut rows[r * stride..(r + 1) * stride];
            dst[..nw].copy_from_slice(v.words());
            for (i, d) in duals.iter().enumerate() {
                if v.dot(d) {
                    dst[nw + i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(SideProblem { side, n, nw, stride, rows, k_rows: gen.rows() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the searched space (`n − rank(H_other)`).
    pub fn dim(&self) -> usize {
        self.k_rows
    }

    fn to_bitvec(&self, row: &[u64]) -> BitVec {
        BitVec::from_indices(self.n, ones_of(&row[..self.nw]))
    }

    /// One ISD trial: random column order, full elimination, keep the lightest
    /// row with nonzero logical syndrome.
    pub fn isd_trial(&self, seed: u64, trial: u64) -> Option<Candidate> {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial, self.side));
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.shuffle(&mut rng);
        let mut m = self.rows.clone();
        let (k, s) = (self.k_rows, self.stride);
        let mut rank = 0;
        for &c in &perm {
            if rank == k {
                break;
            }
            let (w, b) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..k).find(|&r| m[r * s + w] & b != 0) else { continue };
            if p != rank {
                for t in 0..s {
                    m.swap(p * s + t, rank * s + t);
                }
            }
            let (head, tail) = m.split_at_mut(rank * s);
            let (pivot, rest) = tail.split_at_mut(s);
            for chunk in head.chunks_exact_mut(s).chain(rest.chunks_exact_mut(s)) {
                if chunk[w] & b != 0 {
                    for t in 0..s {
                        chunk[t] ^= pivot[t];
                    }
                }
            }
            rank += 1;
        }
        let mut best: Option<(usize, &[u64])> = None;
        for row in m.chunks_exact(s) {
            if row[self.nw..].iter().all(|&x| x == 0) {
                continue;
            }
            let wt = popcount(&row[..self.nw]);
            let better = match best {
                None => true,
                Some((bw, brow)) => wt < bw || (wt == bw && cmp_support(&row[..self.nw], &brow[..self.nw]) == Ordering::Less),
            };
            if better {
                best = Some((wt, row));
            }
        }
        best.map(|(weight, row)| Candidate { weight, support: self.to_bitvec(row) })
    }

    /// Best candidate over trials `range`.
    pub fn isd_range(&self, seed: u64, range: core::ops::Range<u64>) -> Option<Candidate> {
        range.filter_map(|t| self.isd_trial(seed, t)).min()
    }

    /// First trial (in order) producing a logical lighter than `target`.
    pub fn isd_find_below(&self, seed: u64, trials: u64, target: usize) -> Option<Candidate> {
        (0..trials).filter_map(|t| self.isd_trial(seed, t)).find(|c| c.weight < target)
    }

    /// Brouwer–Zimmermann style exact search; see [`distance_exact`].
    pub fn exact(&self, dmax: usize, budget: u64) -> Result<ExactOutcome, DistanceError> {
        let (k, s, nw) = (self.k_rows, self.stride, self.nw);
        // Systematic forms on disjoint information sets.
        let mut avail = vec![true; self.n];
        let mut gens: Vec<(usize, Vec<u64>)> = Vec::new();
        loop {
            let mut m = self.rows.clone();
            let mut rank = 0;
            let mut used = Vec::new();
            for c in 0..self.n {
                if rank == k {
                    break;
                }
                if !avail[c] {
                    continue;
                }
                let (w, b) = (c / 64, 1u64 << (c % 64));
                let Some(p) = (rank..k).find(|&r| m[r * s + w] & b != 0) else { continue };
                for t in 0..s {
                    m.swap(p * s + t, rank * s + t);
                }
                let pivot: Vec<u64> = m[rank * s..(rank + 1) * s].to_vec();
                for (r, chunk) in m.chunks_exact_mut(s).enumerate() {
                    if r != rank && chunk[w] & b != 0 {
                        for t in 0..s {
                            chunk[t] ^= pivot[t];
                        }
                    }
                }
                used.push(c);
                rank += 1;
            }
            if rank == 0 {
                break;
            }
            for c in used {
                avail[c] = false;
            }
            gens.push((rank, m));
        }
        let lower_bound = |w: usize| -> usize { gens.iter().map(|(r, _)| (w + 1).saturating_sub(k - r)).sum() };

        let mut best: Option<Candidate> = None;
        let mut spent: u64 = 0;
        let mut w = 0;
        loop {
            let floor_now = lower_bound(w);
            let best_w = best.as_ref().map_or(usize::MAX, |c| c.weight);
            if floor_now >= best_w {
                let c = best.unwrap();
                return Ok(ExactOutcome::Found { verified_floor: c.weight - 1, certificate: c });
            }
            if floor_now > dmax {
                return Ok(ExactOutcome::AboveMax { verified_floor: floor_now.min(best_w) - 1 });
            }
            w += 1;
            if w > k {
                // Every codeword has been enumerated.
                return Ok(match best {
                    Some(c) => ExactOutcome::Found { verified_floor: c.weight - 1, certificate: c },
                    None => unreachable!("k ≥ 1 guarantees a nontrivial logical"),
                });
            }
            let contributing: Vec<&Vec<u64>> =
                gens.iter().filter(|(r, _)| w + 1 > k - r).map(|(_, m)| m).collect();
            let cost = binomial(k, w).saturating_mul(contributing.len() as u64);
            if spent.saturating_add(cost) > budget {
                return Err(DistanceError::Budget {
                    side: self.side,
                    verified_floor: floor_now.min(best_w) - 1,
                    best: best.map(|c| Certificate { side: self.side, support: c.support }),
                });
            }
            spent += cost;
            for m in contributing {
                let mut sums = vec![0u64; (w + 1) * s];
                let mut found: Option<(usize, Vec<u64>)> = best.as_ref().map(|c| (c.weight, words_of(&c.support, nw)));
                enumerate(m, k, s, nw, w, 0, 0, &mut sums, &mut found);
                if let Some((wt, words)) = found {
                    if best.as_ref().is_none_or(|b| wt < b.weight || (wt == b.weight && cmp_support(&words, b.support.words()) == Ordering::Less)) {
                        best = Some(Candidate { weight: wt, support: self.to_bitvec(&words) });
                    }
                }
            }
        }
    }
}

fn words_of(v: &BitVec, nw: usize) -> Vec<u64> {
    let mut w = v.words().to_vec();
    w.resize(nw, 0);
    w
}

/// Depth-first walk over all `w`-subsets of the `k` rows, tracking partial sums.
#[allow(clippy::too_many_arguments)]
fn enumerate(
    m: &[u64],
    k: usize,
    s: usize,
    nw: usize,
    w: usize,
    depth: usize,
    start: usize,
    sums: &mut [u64],
    best: &mut Option<(usize, Vec<u64>)>,
) {
    let last = k + depth + 1 - w;
    for i in start..last {
        {
            let (prev, next) = sums.split_at_mut((depth + 1) * s);
            let prev = &prev[depth * s..];
            let row = &m[i * s..(i + 1) * s];
            for t in 0..s {
                next[t] = prev[t] ^ row[t];
            }
        }
        if depth + 1 == w {
            let cur = &sums[w * s..(w + 1) * s];
            if cur[nw..].iter().any(|&x| x != 0) {
                let wt = popcount(&cur[..nw]);
                let better = match best {
                    None => true,
                    Some((bw, bwords)) => wt < *bw || (wt == *bw && cmp_support(&cur[..nw], bwords) == Ordering::Less),
                };
                if better {
                    *best = Some((wt, cur[..nw].to_vec()));
                }
            }
        } else {
            enumerate(m, k, s, nw, w, depth + 1, i + 1, sums, best);
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn ones_of(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut x = w;
        core::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i * 64 + b)
        })
    })
}

/// Lexicographic order on supports as ascending index lists.
fn cmp_support(a: &[u64], b: &[u64]) -> Ordering {
    ones_of(a).cmp(ones_of(b))
}

/// Per-trial seed derived from `(seed, trial, side)` with a SplitMix64 finalizer,
/// so any partition of trials across workers yields the same results.
pub fn trial_seed(seed: u64, trial: u64, side: Pauli) -> u64 {
    let mut z = seed
        .wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(match side {
            Pauli::X => 0,
            Pauli::Z => 0xD1B5_4A32_D192_ED03,
        });
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A logical operator found by a search, ordered by (weight, support).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub weight: usize,
    pub support: BitVec,
}

impl Ord for Candidate {
    fn cmp(&self, o: &Self) -> Ordering {
        self.weight.cmp(&o.weight).then_with(|| self.support.cmp_support(&o.support))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactOutcome {
    Found { certificate: Candidate, verified_floor: usize },
    AboveMax { verified_floor: usize },
}

/// Check a certificate independently of how it was found.
pub fn verify_certificate(code: &CssCode, cert: &Certificate) -> bool {
    code.classify_pure(cert.side, &cert.support).is_ok_and(|c| c.is_nontrivial_logical())
}

fn certified(code: &CssCode, side: Pauli, c: Candidate) -> Result<Certificate, DistanceError> {
    let cert = Certificate { side, support: c.support };
    if cert.weight() != c.weight || !verify_certificate(code, &cert) {
        return Err(DistanceError::CertificateRejected { side });
    }
    Ok(cert)
}

/// Exact minimum weight of a nontrivial `side` logical, if it is at most `dmax`.
///
/// `budget` caps the number of enumerated row combinations.
pub fn distance_exact(code: &CssCode, side: Pauli, dmax: usize, budget: u64) -> Result<DistanceResult, DistanceError> {
    assert!(dmax >= 1);
    let problem = SideProblem::new(code, side)?;
    match problem.exact(dmax, budget)? {
        ExactOutcome::Found { certificate, verified_floor } => {
            let w = certificate.weight;
            let cert = certified(code, side, certificate)?;
            if w > dmax {
                return Ok(DistanceResult {
                    side: side.into(),
                    value: None,
                    certainty: Certainty::BoundedBelow,
                    certificate: Some(cert),
                    verified_floor: dmax.max(verified_floor),
                });
            }
            Ok(DistanceResult { side: side.into(), value: Some(w), certainty: Certainty::Exact, certificate: Some(cert), verified_floor })
        }
        ExactOutcome::AboveMax { verified_floor } => Ok(DistanceResult {
            side: side.into(),
            value: None,
            certainty: Certainty::BoundedBelow,
            certificate: None,
            verified_floor,
        }),
    }
}

/// Randomized upper bound from `trials` ISD trials.
pub fn distance_isd(code: &CssCode, side: Pauli, trials: u64, seed: u64) -> Result<DistanceResult, DistanceError> {
    assert!(trials >= 1);
    let problem = SideProblem::new(code, side)?;
    let best = problem.isd_range(seed, 0..trials).expect("some basis row carries a logical");
    isd_result(code, side, best)
}

pub fn isd_result(code: &CssCode, side: Pauli, best: Candidate) -> Result<DistanceResult, DistanceError> {
    let w = best.weight;
    let cert = certified(code, side, best)?;
    Ok(DistanceResult { side: side.into(), value: Some(w), certainty: Certainty::UpperBound, certificate: Some(cert), verified_floor: 0 })
}

pub fn default_isd_trials(n: usize) -> u64 {
    if n <= 300 {
        2000
    } else {
        10000
    }
}

#[derive(Clone, Debug)]
pub struct DistancePolicy {
    /// Try the exact search when `n` is at most this.
    pub exact_max_n: usize,
    pub dmax: usize,
    pub exact_budget: u64,
    /// `None` uses [`default_isd_trials`].
    pub isd_trials: Option<u64>,
    pub seed: u64,
}

impl Default for DistancePolicy {
    fn default() -> Self {
        DistancePolicy { exact_max_n: 0, dmax: 64, exact_budget: 2_000_000_000, isd_trials: None, seed: 0 }
    }
}

impl DistancePolicy {
    pub fn isd_only(trials: u64, seed: u64) -> Self {
        DistancePolicy { isd_trials: Some(trials), seed, ..Default::default() }
    }

    pub fn exact(dmax: usize) -> Self {
        DistancePolicy { exact_max_n: usize::MAX, dmax, ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct DistanceReport {
    pub params: CodeParams,
    pub x: DistanceResult,
    pub z: DistanceResult,
}

impl DistanceReport {
    /// Certificate achieving the reported distance.
    pub fn certificate(&self) -> Option<&Certificate> {
        let (a, b) = (&self.x, &self.z);
        let pick = match (a.value, b.value) {
            (Some(x), Some(z)) if z < x => b,
            (None, Some(_)) => b,
            _ => a,
        };
        pick.certificate.as_ref()
    }
}

/// One side under `policy`: exact when allowed and within budget, else ISD.
pub fn side_distance(code: &CssCode, side: Pauli, policy: &DistancePolicy) -> Result<DistanceResult, DistanceError> {
    if code.n() <= policy.exact_max_n {
        match distance_exact(code, side, policy.dmax, policy.exact_budget) {
            Ok(r) => return Ok(r),
            Err(DistanceError::Budget { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let trials = policy.isd_trials.unwrap_or_else(|| default_isd_trials(code.n()));
    distance_isd(code, side, trials, policy.seed)
}

/// Combine both sides: `d` is the smaller value, certainty the weaker one.
pub fn combine(n: usize, k: usize, x: DistanceResult, z: DistanceResult) -> DistanceReport {
    let (d, certainty) = match (x.value, z.value) {
        (Some(a), Some(b)) => (a.min(b), x.certainty.weaker(z.certainty)),
        (Some(a), None) => (a, if a <= z.verified_floor { x.certainty } else { Certainty::UpperBound }),
        (None, Some(b)) => (b, if b <= x.verified_floor { z.certainty } else { Certainty::UpperBound }),
        (None, None) => (x.verified_floor.min(z.verified_floor), Certainty::BoundedBelow),
    };
    DistanceReport { params: CodeParams { n, k, d, certainty }, x, z }
}

pub fn distance(code: &CssCode, policy: &DistancePolicy) -> Result<DistanceReport, DistanceError> {
    let x = side_distance(code, Pauli::X, policy)?;
    let z = side_distance(code, Pauli::Z, policy)?;
    Ok(combine(code.n(), code.logical_dim(), x, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::BitMatrix;

    fn steane() -> CssCode {
        let h = BitMatrix::from_dense(&[&[1, 0, 1, 0, 1, 0, 1], &[0, 1, 1, 0, 0, 1, 1], &[0, 0, 0, 1, 1, 1, 1]]);
        CssCode::with_index_labels(h.clone(), h, "steane").unwrap()
    }

    #[test]
    fn steane_distance() {
        let c = steane();
        for side in [Pauli::X, Pauli::Z] {
            let e = distance_exact(&c, side, 10, 1 << 20).unwrap();
            assert_eq!(e.value, Some(3));
            assert_eq!(e.certainty, Certainty::Exact);
            let i = distance_isd(&c, side, 50, 1).unwrap();
            assert_eq!(i.value, Some(3));
        }
    }

    #[test]
    fn dmax_gives_floor() {
        let c = steane();
        let e = distance_exact(&c, Pauli::X, 2, 1 << 20).unwrap();
        assert_eq!(e.value, None);
        assert_eq!(e.certainty, Certainty::BoundedBelow);
        assert!(e.verified_floor >= 2);
    }

    #[test]
    fn budget_is_explicit() {
        let c = steane();
        assert!(matches!(distance_exact(&c, Pauli::X, 10, 1), Err(DistanceError::Budget { .. })));
    }

    #[test]
    fn no_logicals() {
        let hx = BitMatrix::from_dense(&[&[1, 1]]);
        let hz = BitMatrix::from_dense(&[&[1, 1]]);
        let c = CssCode::with_index_labels(hx, hz, "").unwrap();
        assert_eq!(distance_isd(&c, Pauli::X, 1, 0).unwrap_err(), DistanceError::NoLogicals);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(47, 5), 1_533_939);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(binomial(1000, 500), u64::MAX);
    }
}
