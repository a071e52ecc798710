//! Rayon drivers around the sequential core. Results are independent of the
//! thread count: ISD trials carry their own seeds and every reduction uses a
//! total order.

use std::sync::Mutex;

use rayon::prelude::*;

use planar_qldpc::distance::{
    combine, default_isd_trials, distance_exact, isd_result, Candidate, DistanceError, DistancePolicy, DistanceReport, DistanceResult, SideProblem,
};
use planar_qldpc::graft::{self, GraftConfig, GraftError, GraftResult};
use planar_qldpc::search::{enumerate_families, sweep_family, EnumeratedFamily, OptimalTable, SearchRange, SweepRow};
use planar_qldpc::{CssCode, Pauli};

const CHUNK: u64 = 64;

/// Best ISD candidate over trials `0..trials`, split across threads.
pub fn isd_best(sp: &SideProblem, trials: u64, seed: u64) -> Option<Candidate> {
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks).into_par_iter().filter_map(|c| sp.isd_range(seed, c * CHUNK..((c + 1) * CHUNK).min(trials))).min()
}

pub fn distance_isd(code: &CssCode, side: Pauli, trials: u64, seed: u64) -> Result<DistanceResult, DistanceError> {
    let sp = SideProblem::new(code, side)?;
    let best = isd_best(&sp, trials, seed).ok_or(DistanceError::NoLogicals)?;
    isd_result(code, side, best)
}

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

/// Parallel counterpart of `planar_qldpc::distance::distance`.
pub fn distance(code: &CssCode, policy: &DistancePolicy) -> Result<DistanceReport, DistanceError> {
    let (x, z) = rayon::join(|| side_distance(code, Pauli::X, policy), || side_distance(code, Pauli::Z, policy));
    Ok(combine(code.n(), code.logical_dim(), x?, z?))
}

/// Graft trials in parallel, then the sequential pick-and-reverify.
pub fn graft_search(code: &CssCode, cfg: &GraftConfig) -> Result<GraftResult, GraftError> {
    let d = match cfg.target_distance {
        Some(d) => d,
        None => distance(code, &cfg.final_policy)?.params.d,
    };
    let trials = (0..cfg.trials).into_par_iter().map(|t| graft::graft_trial(code, cfg, d, t)).collect::<Result<Vec<_>, _>>()?;
    graft::finish(code, cfg, d, trials)
}

/// Parallel table search. Each family prunes against a snapshot of the
/// shared table; pruning keeps ties, so the cells do not depend on timing.
/// `done` families are skipped (their rows are expected in `seed_rows`).
pub fn optimal_table(
    range: &SearchRange,
    ks: &[usize],
    ds: &[usize],
    policy: &DistancePolicy,
    seed_rows: &[SweepRow],
    on_family: &(dyn Fn(&EnumeratedFamily, &[SweepRow]) + Sync),
) -> OptimalTable {
    let families: Vec<EnumeratedFamily> = enumerate_families(range).into_iter().filter(|f| ks.contains(&f.k)).collect();
    let mut ds = ds.to_vec();
    ds.sort_unstable();
    let mut init = OptimalTable { ks: ks.to_vec(), ds, ..Default::default() };
    let done: std::collections::BTreeSet<&str> = seed_rows.iter().map(|r| r.family.as_str()).collect();
    for row in seed_rows {
        if let Some(f) = families.iter().find(|f| f.id == row.family) {
            init.offer(f, row);
            init.rows.push(row.clone());
        }
    }
    let shared = Mutex::new(init);
    families.par_iter().filter(|f| !done.contains(f.id.as_str())).for_each(|fam| {
        let mut local = {
            let g = shared.lock().unwrap();
            OptimalTable { ks: g.ks.clone(), ds: g.ds.clone(), cells: g.cells.clone(), rows: Vec::new() }
        };
        sweep_family(fam, range, policy, &mut local);
        on_family(fam, &local.rows);
        let mut g = shared.lock().unwrap();
        for row in &local.rows {
            g.offer(fam, row);
        }
        g.rows.extend(local.rows);
    });
    let mut table = shared.into_inner().unwrap();
    table.rows.sort_by(|a, b| (&a.family, a.lx, a.ly).cmp(&(&b.family, b.lx, b.ly)));
    table
}

/// Install the global pool. `0` lets rayon decide.
pub fn init_threads(n: usize) {
    if n > 0 {
        // A second call (tests) finds the pool built; that is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use planar_qldpc::lattice::find_family;

    #[test]
    fn parallel_isd_matches_sequential() {
        let fam = find_family("k8-288").unwrap();
        let lc = planar_qldpc::build_open_code(&fam, 6, 6, &Default::default()).unwrap();
        let sp = SideProblem::new(&lc.code, Pauli::X).unwrap();
        assert_eq!(isd_best(&sp, 300, 5), sp.isd_range(5, 0..300));
    }
}
