//! Boundary grafting: greedily remove boundary qubits while `k` and the
//! distance are preserved.
//!
//! A step picks a boundary qubit `q` and a label `O` with `r ≥ 1` checks of
//! type `O` on `q`. Those `r` checks are replaced by the `r − 1` chain
//! products `S₁S₂, S₂S₃, …` (none touch `q`), and checks of the other type
//! simply lose column `q`. Commutation is automatic and the `O`-distance
//! cannot drop: a new `O`-logical extended by zero on `q` is an old one. Only
//! the other side needs a distance check.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{CodeError, CssCode, Pauli, QubitLabel};
use crate::distance::{distance, trial_seed, DistanceError, DistancePolicy, DistanceReport, SideProblem};
use crate::f2::{BitMatrix, BitVec};

#[derive(Clone, Debug)]
pub struct GraftConfig {
    pub trials: u64,
    pub seed: u64,
    /// Only qubits carried by exactly one check of the removed label.
    pub restrict_r1: bool,
    /// Weight cap for every check; `None` keeps the input's maximum.
    pub max_weight: Option<usize>,
    pub allow_weight_growth: bool,
    /// ISD trials per step on the side that can lose distance; `None` picks
    /// by size (see [`step_isd_trials`]).
    pub step_isd_trials: Option<u64>,
    /// Used for the input distance (unless `target_distance` is set) and for
    /// re-verifying the result.
    pub final_policy: DistancePolicy,
    pub target_distance: Option<usize>,
    /// Re-check the step invariants after every accepted step.
    pub check_invariants: bool,
}

/// Per-step budget. Small codes are re-verified exactly at the end, so a
/// missed loss only wastes that trial; larger ones need a stronger check,
/// since a weight d−1 logical created by one removal can be rare.
pub fn step_isd_trials(n: usize) -> u64 {
    if n <= 150 {
        500
    } else {
        5000
    }
}

impl Default for GraftConfig {
    fn default() -> Self {
        GraftConfig {
            trials: 500,
            seed: 0,
            restrict_r1: true,
            max_weight: None,
            allow_weight_growth: false,
            step_isd_trials: None,
            final_policy: DistancePolicy { exact_max_n: 150, dmax: 32, isd_trials: Some(10_000), ..Default::default() },
            target_distance: None,
            check_invariants: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemovalRecord {
    pub qubit: QubitLabel,
    pub label: Pauli,
    /// Checks of `label` (indices before the step) that were replaced.
    pub removed_rows: Vec<usize>,
    /// Their replacements (indices after the step; appended at the end).
    pub added_rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    EmptyCheck,
    WeightCap,
    LogicalDim { got: usize },
    Distance { found: usize },
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Accepted { code: CssCode, record: RemovalRecord },
    Rejected { qubit: usize, reason: RejectReason },
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraftError {
    Code(CodeError),
    Distance(DistanceError),
    /// A step broke an invariant (a bug, never expected).
    Invariant(String),
}

impl fmt::Display for GraftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraftError::Code(e) => write!(f, "{e}"),
            GraftError::Distance(e) => write!(f, "{e}"),
            GraftError::Invariant(s) => write!(f, "graft invariant violated: {s}"),
        }
    }
}

impl core::error::Error for GraftError {}

impl From<CodeError> for GraftError {
    fn from(e: CodeError) -> Self {
        GraftError::Code(e)
    }
}

impl From<DistanceError> for GraftError {
    fn from(e: DistanceError) -> Self {
        GraftError::Distance(e)
    }
}

/// Number of X and Z checks on each qubit.
pub fn memberships(code: &CssCode) -> Vec<(usize, usize)> {
    let mut c = vec![(0, 0); code.n()];
    for r in 0..code.hx().rows() {
        code.hx().row_ones(r).for_each(|q| c[q].0 += 1);
    }
    for r in 0..code.hz().rows() {
        code.hz().row_ones(r).for_each(|q| c[q].1 += 1);
    }
    c
}

/// Qubits with fewer check memberships than the code's maximum.
pub fn boundary_qubits(code: &CssCode) -> Vec<usize> {
    let m = memberships(code);
    let bulk = m.iter().map(|&(a, b)| a + b).max().unwrap_or(0);
    (0..code.n()).filter(|&q| m[q].0 + m[q].1 < bulk).collect()
}

/// Remove qubit `q` using label `label`. Returns `None` if a check of the
/// other label would become empty.
pub fn remove_qubit(code: &CssCode, q: usize, label: Pauli) -> Result<Option<(CssCode, RemovalRecord)>, CodeError> {
    let same = code.checks(label).sparse_rows();
    let other = code.checks(label.other()).sparse_rows();
    let on_q: Vec<usize> = (0..same.len()).filter(|&r| same[r].contains(&q)).collect();
    let reindex = |v: &[usize]| -> Vec<usize> { v.iter().filter(|&&c| c != q).map(|&c| if c > q { c - 1 } else { c }).collect() };
    let mut new_same: Vec<Vec<usize>> = (0..same.len()).filter(|r| !on_q.contains(r)).map(|r| reindex(&same[r])).collect();
    let first_added = new_same.len();
    for w in on_q.windows(2) {
        let a: BTreeSet<usize> = same[w[0]].iter().copied().collect();
        let b: BTreeSet<usize> = same[w[1]].iter().copied().collect();
        let prod: Vec<usize> = a.symmetric_difference(&b).copied().collect();
        new_same.push(reindex(&prod));
    }
    let new_other: Vec<Vec<usize>> = other.iter().map(|v| reindex(v)).collect();
    if new_other.iter().chain(&new_same).any(|v| v.is_empty()) {
        return Ok(None);
    }
    let n = code.n() - 1;
    let (a, b) = (BitMatrix::from_sparse_rows(n, &new_same), BitMatrix::from_sparse_rows(n, &new_other));
    let (hx, hz) = match label {
        Pauli::X => (a, b),
        Pauli::Z => (b, a),
    };
    let mut labels = code.labels().to_vec();
    let qubit = labels.remove(q);
    let out = CssCode::new_unchecked_columns(hx, hz, labels, code.provenance.clone())?;
    let record = RemovalRecord {
        qubit,
        label,
        added_rows: (first_added..first_added + on_q.len().saturating_sub(1)).collect(),
        removed_rows: on_q,
    };
    Ok(Some((out, record)))
}

/// Check what every accepted step must satisfy: one qubit and one check
/// fewer, same `k`, commuting checks, weight cap respected, and the new
/// `label` checks spanning exactly the old ones that avoid qubit `q`.
pub fn check_step_invariants(before: &CssCode, after: &CssCode, q: usize, label: Pauli, cap: usize) -> Result<(), String> {
    if after.n() + 1 != before.n() {
        return Err(alloc::format!("n went {} -> {}", before.n(), after.n()));
    }
    let checks = |c: &CssCode| c.hx().rows() + c.hz().rows();
    if checks(after) + 1 != checks(before) {
        return Err(alloc::format!("checks went {} -> {}", checks(before), checks(after)));
    }
    if after.logical_dim() != before.logical_dim() {
        return Err(alloc::format!("k went {} -> {}", before.logical_dim(), after.logical_dim()));
    }
    if !after.commutes() {
        return Err("checks anticommute".into());
    }
    if after.max_check_weight() > cap {
        return Err(alloc::format!("check weight {} exceeds {}", after.max_check_weight(), cap));
    }
    let old = before.checks(label);
    let new = after.checks(label);
    let old_basis = crate::f2::RowBasis::from_matrix(old);
    for r in 0..new.rows() {
        let lifted = BitVec::from_indices(before.n(), new.row_ones(r).map(|c| if c >= q { c + 1 } else { c }));
        if !old_basis.contains(&lifted) {
            return Err(alloc::format!("new {label} check {r} is outside the old span"));
        }
    }
    // The old span meets {u_q = 0} in codimension one.
    if new.rank() + 1 != old.rank() {
        return Err(alloc::format!("{label} span lost more than the removed qubit's constraint"));
    }
    Ok(())
}

/// Per-trial state shared by consecutive steps.
pub struct StepContext<'a> {
    pub cfg: &'a GraftConfig,
    pub k: usize,
    pub d: usize,
    pub cap: usize,
    /// Seed for the per-step ISD runs.
    pub isd_seed: u64,
}

/// Try the first eligible candidate not in `rejected`.
pub fn graft_step(code: &CssCode, ctx: &StepContext<'_>, rng: &mut ChaCha8Rng, rejected: &BTreeSet<usize>) -> Result<StepOutcome, GraftError> {
    let m = memberships(code);
    let bulk = m.iter().map(|&(a, b)| a + b).max().unwrap_or(0);
    let mut cands: Vec<(usize, u64, usize, Pauli)> = Vec::new();
    for q in 0..code.n() {
        let (cx, cz) = m[q];
        if cx + cz >= bulk || rejected.contains(&q) {
            continue;
        }
        let ok = |c: usize| if ctx.cfg.restrict_r1 { c == 1 } else { c >= 1 };
        let labels: Vec<Pauli> = [(Pauli::X, cx), (Pauli::Z, cz)].into_iter().filter(|&(_, c)| ok(c)).map(|(p, _)| p).collect();
        // Draw both values unconditionally so the stream does not depend on eligibility.
        let key: u64 = rng.gen();
        let pick = *labels.choose(rng).unwrap_or(&Pauli::X);
        if !labels.is_empty() {
            cands.push((cx + cz, key, q, pick));
        }
    }
    let Some(&(_, _, q, label)) = cands.iter().min() else { return Ok(StepOutcome::Exhausted) };
    let reject = |reason| Ok(StepOutcome::Rejected { qubit: q, reason });
    let Some((next, record)) = remove_qubit(code, q, label)? else { return reject(RejectReason::EmptyCheck) };
    if next.max_check_weight() > ctx.cap {
        return reject(RejectReason::WeightCap);
    }
    let k = next.logical_dim();
    if k != ctx.k {
        return reject(RejectReason::LogicalDim { got: k });
    }
    let side = SideProblem::new(&next, label.other())?;
    if let Some(c) = side.isd_find_below(ctx.isd_seed, ctx.cfg.step_isd_trials.unwrap_or_else(|| step_isd_trials(code.n())), ctx.d) {
        return reject(RejectReason::Distance { found: c.weight });
    }
    if ctx.cfg.check_invariants {
        check_step_invariants(code, &next, q, label, ctx.cap).map_err(GraftError::Invariant)?;
    }
    Ok(StepOutcome::Accepted { code: next, record })
}

#[derive(Clone, Debug)]
pub struct TrialResult {
    pub trial: u64,
    pub code: CssCode,
    pub log: Vec<RemovalRecord>,
    pub rejections: usize,
}

/// One greedy pass: steps until every candidate is rejected.
pub fn graft_trial(code: &CssCode, cfg: &GraftConfig, d: usize, trial: u64) -> Result<TrialResult, GraftError> {
    let cap = if cfg.allow_weight_growth { usize::MAX } else { cfg.max_weight.unwrap_or_else(|| code.max_check_weight()) };
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial, Pauli::X));
    let mut cur = code.clone();
    let mut log = Vec::new();
    let mut rejected: BTreeSet<usize> = BTreeSet::new();
    let mut rejections = 0;
    let k = code.logical_dim();
    loop {
        let ctx = StepContext { cfg, k, d, cap, isd_seed: trial_seed(cfg.seed ^ 0x5eed, trial, Pauli::Z).wrapping_add(log.len() as u64) };
        match graft_step(&cur, &ctx, &mut rng, &rejected)? {
            StepOutcome::Exhausted => break,
            StepOutcome::Rejected { qubit, .. } => {
                rejections += 1;
                rejected.insert(qubit);
            }
            StepOutcome::Accepted { code: next, record } => {
                let q = cur.labels().iter().position(|l| *l == record.qubit).expect("removed qubit");
                // Only qubits that shared a check with `q` can have become
                // acceptable; everyone else stays rejected.
                let mut near: BTreeSet<usize> = BTreeSet::new();
                for m in [cur.hx(), cur.hz()] {
                    for r in 0..m.rows() {
                        let row: Vec<usize> = m.row_ones(r).collect();
                        if row.contains(&q) {
                            near.extend(row);
                        }
                    }
                }
                rejected = rejected.into_iter().filter(|x| !near.contains(x)).map(|x| if x > q { x - 1 } else { x }).collect();
                cur = next;
                log.push(record);
            }
        }
    }
    Ok(TrialResult { trial, code: cur, log, rejections })
}

#[derive(Clone, Debug)]
pub struct GraftResult {
    pub input_distance: usize,
    pub best: TrialResult,
    pub report: DistanceReport,
    /// Final `n` of every trial, in trial order.
    pub trial_sizes: Vec<usize>,
    /// Best trials whose re-verification failed, if any.
    pub discarded: Vec<u64>,
}

/// Run `cfg.trials` trials and return the smallest code that re-verifies
/// with `d ≥` the input distance (the input itself if none does).
pub fn graft_search(code: &CssCode, cfg: &GraftConfig) -> Result<GraftResult, GraftError> {
    let d = match cfg.target_distance {
        Some(d) => d,
        None => distance(code, &cfg.final_policy)?.params.d,
    };
    let trials = (0..cfg.trials).map(|t| graft_trial(code, cfg, d, t)).collect::<Result<Vec<_>, _>>()?;
    finish(code, cfg, d, trials)
}

/// Pick and re-verify the best of already-run trials.
pub fn finish(code: &CssCode, cfg: &GraftConfig, d: usize, mut trials: Vec<TrialResult>) -> Result<GraftResult, GraftError> {
    trials.sort_by_key(|t| t.trial);
    let trial_sizes = trials.iter().map(|t| t.code.n()).collect();
    let mut order: Vec<usize> = (0..trials.len()).collect();
    order.sort_by_key(|&i| (trials[i].code.n(), trials[i].trial));
    let mut discarded = Vec::new();
    let mut seen: Vec<&CssCode> = Vec::new();
    for i in order {
        let t = &trials[i];
        if t.log.is_empty() || seen.iter().any(|c| **c == t.code) {
            continue;
        }
        seen.push(&t.code);
        let report = distance(&t.code, &cfg.final_policy)?;
        if report.params.d >= d && report.params.k == code.logical_dim() {
            return Ok(GraftResult { input_distance: d, best: t.clone(), report, trial_sizes, discarded });
        }
        discarded.push(t.trial);
    }
    let report = distance(code, &cfg.final_policy)?;
    let best = TrialResult { trial: 0, code: code.clone(), log: Vec::new(), rejections: 0 };
    Ok(GraftResult { input_distance: d, best, report, trial_sizes, discarded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_from_polys, BuildOptions, LatticeSpec, MaskRule};
    use crate::poly::FamilyPoly;

    fn surface(l: usize) -> CssCode {
        let polys = FamilyPoly::parse("toric", "1+x", "1+y").unwrap();
        let spec = LatticeSpec::new(l, l, MaskRule::full()).unwrap();
        build_from_polys(&polys, spec, &BuildOptions::default()).unwrap().code
    }

    #[test]
    fn removal_keeps_commutation_and_counts() {
        let c = surface(4);
        for q in boundary_qubits(&c) {
            let (cx, cz) = memberships(&c)[q];
            for (label, r) in [(Pauli::X, cx), (Pauli::Z, cz)] {
                if r == 0 {
                    continue;
                }
                if let Some((next, rec)) = remove_qubit(&c, q, label).unwrap() {
                    assert!(next.commutes());
                    assert_eq!(next.n(), c.n() - 1);
                    assert_eq!(rec.removed_rows.len(), r);
                    assert_eq!(rec.added_rows.len(), r - 1);
                    let rows = |c: &CssCode| c.hx().rows() + c.hz().rows();
                    assert_eq!(rows(&next) + 1, rows(&c));
                }
            }
        }
    }

    #[test]
    fn surface_code_grafts_without_losing_distance() {
        let c = surface(4);
        let cfg = GraftConfig { trials: 4, step_isd_trials: Some(200), final_policy: DistancePolicy::exact(10), ..Default::default() };
        let r = graft_search(&c, &cfg).unwrap();
        assert_eq!(r.input_distance, 4);
        assert!(r.report.params.d >= 4);
        assert_eq!(r.report.params.k, 1);
        assert!(r.best.code.n() <= c.n());
    }

    #[test]
    fn chain_products_avoid_the_removed_qubit() {
        let c = surface(4);
        let m = memberships(&c);
        let q = (0..c.n()).find(|&q| m[q].0 == 2).unwrap();
        let rows: Vec<usize> = (0..c.hx().rows()).filter(|&r| c.hx().get(r, q)).collect();
        let mut prod = c.hx().row(rows[0]);
        prod.xor_assign(&c.hx().row(rows[1]));
        assert!(!prod.get(q));
        let (next, rec) = remove_qubit(&c, q, Pauli::X).unwrap().unwrap();
        assert_eq!(rec.added_rows.len(), 1);
        let added: Vec<usize> = next.hx().row_ones(rec.added_rows[0]).map(|x| if x >= q { x + 1 } else { x }).collect();
        assert_eq!(added, prod.ones().collect::<Vec<_>>());
        assert!(next.commutes());
        check_step_invariants(&c, &next, q, Pauli::X, usize::MAX).unwrap();
    }

    #[test]
    fn nothing_to_remove_is_exhausted() {
        // Every qubit carries the same number of checks: no boundary.
        let h = BitMatrix::from_dense(&[&[1, 1, 1, 1]]);
        let c = CssCode::with_index_labels(h.clone(), h, "").unwrap();
        let cfg = GraftConfig::default();
        let ctx = StepContext { cfg: &cfg, k: 2, d: 2, cap: 4, isd_seed: 0 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(graft_step(&c, &ctx, &mut rng, &BTreeSet::new()).unwrap(), StepOutcome::Exhausted));
    }

    #[test]
    fn single_trial_is_deterministic() {
        let c = surface(4);
        let cfg = GraftConfig { trials: 1, seed: 9, step_isd_trials: Some(100), ..Default::default() };
        let a = graft_trial(&c, &cfg, 4, 0).unwrap();
        let b = graft_trial(&c, &cfg, 4, 0).unwrap();
        assert_eq!(a.code, b.code);
        assert_eq!(a.log, b.log);
    }
}
