//! Enumeration of `f ∝ 1+x+x^a y^b`, `g ∝ 1+y+x^c y^d` families, size
//! sweeps, and the minimal-`n` table over `(k, d)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::code::{metric, Certainty, CssCode, Pauli};
use crate::distance::{distance, DistanceError, DistancePolicy, SideProblem};
use crate::lattice::{build_from_polys, derive_mask, BuildOptions, LatticeSpec, MaskRule};
use crate::poly::{quotient_dimension, FamilyPoly, LaurentPoly2, Monomial};

#[derive(Clone, Debug)]
pub struct SearchRange {
    pub a: RangeInclusive<i32>,
    pub b: RangeInclusive<i32>,
    pub c: RangeInclusive<i32>,
    pub d: RangeInclusive<i32>,
    pub lx: RangeInclusive<usize>,
    pub ly: RangeInclusive<usize>,
    /// Sizes whose code exceeds this are not reported.
    pub max_n: usize,
    pub dedup: bool,
}

impl Default for SearchRange {
    fn default() -> Self {
        SearchRange { a: -2..=3, b: -2..=3, c: -2..=3, d: -2..=3, lx: 3..=20, ly: 3..=20, max_n: 300, dedup: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedFamily {
    pub id: String,
    pub exps: [i32; 4],
    /// Normalized polynomials.
    pub polys: FamilyPoly,
    pub k: usize,
    /// Every enumerated exponent tuple folded into this one by dedup.
    pub merged: Vec<[i32; 4]>,
}

pub fn family_id(e: [i32; 4]) -> String {
    format!("a{}b{}c{}d{}", e[0], e[1], e[2], e[3])
}

/// `(1+x+x^a y^b, 1+y+x^c y^d)`, un-normalized.
pub fn family_polys(e: [i32; 4]) -> (LaurentPoly2, LaurentPoly2) {
    let mut f = LaurentPoly2::from_terms([(0, 0), (1, 0)]);
    f.toggle(Monomial::new(e[0], e[1]));
    let mut g = LaurentPoly2::from_terms([(0, 0), (0, 1)]);
    g.toggle(Monomial::new(e[2], e[3]));
    (f, g)
}

type Key = (Vec<Monomial>, Vec<Monomial>);

fn norm_key(f: &LaurentPoly2, g: &LaurentPoly2) -> Key {
    let n = |p: &LaurentPoly2| -> Vec<Monomial> {
        match p.normalize() {
            Ok((q, _)) => q.terms().collect(),
            Err(_) => Vec::new(),
        }
    };
    (n(f), n(g))
}

/// Smallest key over the symmetry group generated by monomial multiplication
/// of each polynomial, `x ↔ y` together with `f ↔ g`, and inversion.
pub fn canonical_key(f: &LaurentPoly2, g: &LaurentPoly2) -> Key {
    let (fi, gi) = (f.antipode(), g.antipode());
    [
        norm_key(f, g),
        norm_key(&fi, &gi),
        norm_key(&g.swap_xy(), &f.swap_xy()),
        norm_key(&gi.swap_xy(), &fi.swap_xy()),
    ]
    .into_iter()
    .min()
    .unwrap()
}

/// Families with a finite quotient, in lexicographic `(a,b,c,d)` order; with
/// dedup the first tuple of each symmetry class represents it.
pub fn enumerate_families(range: &SearchRange) -> Vec<EnumeratedFamily> {
    let mut out: Vec<EnumeratedFamily> = Vec::new();
    let mut by_key: BTreeMap<Key, usize> = BTreeMap::new();
    for a in range.a.clone() {
        for b in range.b.clone() {
            for c in range.c.clone() {
                for d in range.d.clone() {
                    let e = [a, b, c, d];
                    let (f, g) = family_polys(e);
                    if f.is_zero() || g.is_zero() {
                        continue;
                    }
                    let key = canonical_key(&f, &g);
                    if range.dedup {
                        if let Some(&i) = by_key.get(&key) {
                            out[i].merged.push(e);
                            continue;
                        }
                    }
                    let Some(k) = quotient_dimension(&f, &g).ok().and_then(|q| q.finite()) else { continue };
                    let polys = FamilyPoly { f, g, name: family_id(e) }.normalized();
                    by_key.insert(key, out.len());
                    out.push(EnumeratedFamily { id: family_id(e), exps: e, polys, k, merged: Vec::new() });
                }
            }
        }
    }
    out
}

/// Mask derived on a lattice wide enough for the family's bulk to show.
pub fn family_mask(polys: &FamilyPoly) -> MaskRule {
    let terms: Vec<Monomial> = polys.f.terms().chain(polys.g.terms()).collect();
    let w = |s: fn(&Monomial) -> i32| terms.iter().map(s).max().unwrap_or(0) - terms.iter().map(s).min().unwrap_or(0);
    let side = (2 * (w(|m| m.x).max(w(|m| m.y)) + 2) + 6) as usize;
    derive_mask(polys, side, side, &BuildOptions::default()).unwrap_or_else(|_| MaskRule::full())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub family: String,
    pub exps: Option<[i32; 4]>,
    pub lx: usize,
    pub ly: usize,
    pub n: usize,
    pub k: usize,
    pub d: Option<usize>,
    pub certainty: Certainty,
    pub metric: f64,
    /// Set when the size could not be built or measured.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(family: &str, exps: Option<[i32; 4]>, lx: usize, ly: usize, e: String) -> Self {
        SweepRow { family: family.into(), exps, lx, ly, n: 0, k: 0, d: None, certainty: Certainty::BoundedBelow, metric: 0.0, error: Some(e) }
    }
}

/// Distance for sweeping. Exact when `policy` allows it; otherwise ISD that
/// stops as soon as a logical lighter than `need` shows up (the reported
/// value is then still a valid upper bound, just not refined).
pub fn sweep_distance(code: &CssCode, need: usize, policy: &DistancePolicy) -> Result<(usize, Certainty), DistanceError> {
    if code.n() <= policy.exact_max_n {
        let r = distance(code, policy)?;
        return Ok((r.params.d, r.params.certainty));
    }
    let trials = policy.isd_trials.unwrap_or_else(|| crate::distance::default_isd_trials(code.n()));
    let mut best = usize::MAX;
    for side in [Pauli::X, Pauli::Z] {
        let sp = SideProblem::new(code, side)?;
        for t in 0..trials {
            if let Some(c) = sp.isd_trial(policy.seed, t) {
                best = best.min(c.weight);
                if best < need {
                    return Ok((best, Certainty::UpperBound));
                }
            }
        }
    }
    Ok((best, Certainty::UpperBound))
}

/// Build and measure one size. `expected_k` guards against corner trouble.
pub fn sweep_one(polys: &FamilyPoly, mask: &MaskRule, lx: usize, ly: usize, need: usize, policy: &DistancePolicy) -> SweepRow {
    let exps = None;
    let spec = match LatticeSpec::new(lx, ly, mask.clone()) {
        Ok(s) => s,
        Err(e) => return SweepRow::failed(&polys.name, exps, lx, ly, format!("{e}")),
    };
    let lc = match build_from_polys(polys, spec, &BuildOptions::default()) {
        Ok(c) => c,
        Err(e) => return SweepRow::failed(&polys.name, exps, lx, ly, format!("{e}")),
    };
    let (n, k) = (lc.code.n(), lc.code.logical_dim());
    match sweep_distance(&lc.code, need, policy) {
        Ok((d, certainty)) => SweepRow { family: polys.name.clone(), exps, lx, ly, n, k, d: Some(d), certainty, metric: metric(n, k, d), error: None },
        Err(e) => SweepRow { n, k, ..SweepRow::failed(&polys.name, exps, lx, ly, format!("{e}")) },
    }
}

/// One row per size, in the given order; failures are flagged, not fatal.
pub fn sweep_sizes(polys: &FamilyPoly, mask: &MaskRule, sizes: &[(usize, usize)], policy: &DistancePolicy) -> Vec<SweepRow> {
    sizes.iter().map(|&(lx, ly)| sweep_one(polys, mask, lx, ly, 0, policy)).collect()
}

/// Sizes in the range ordered by the bulk qubit estimate `2·Lx·Ly`, then `(Lx, Ly)`.
pub fn sizes_by_area(range: &SearchRange) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = range
        .lx
        .clone()
        .flat_map(|lx| range.ly.clone().map(move |ly| (lx, ly)))
        .filter(|&(lx, ly)| 2 * lx * ly <= 2 * range.max_n)
        .collect();
    v.sort_by_key(|&(lx, ly)| (lx * ly, lx, ly));
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableCell {
    pub n: usize,
    pub d: usize,
    pub family: String,
    pub exps: [i32; 4],
    pub lx: usize,
    pub ly: usize,
    pub certainty: Certainty,
}

#[derive(Clone, Debug, Default)]
pub struct OptimalTable {
    pub ks: Vec<usize>,
    pub ds: Vec<usize>,
    /// Best code with `k` logicals and distance at least `d`.
    pub cells: BTreeMap<(usize, usize), TableCell>,
    /// Every measured size, for the CSV.
    pub rows: Vec<SweepRow>,
}

impl OptimalTable {
    /// Empty cells are budget-limited: nothing within `max_n` reached them.
    pub fn budget_limited(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for &k in &self.ks {
            for &d in &self.ds {
                if !self.cells.contains_key(&(k, d)) {
                    v.push((k, d));
                }
            }
        }
        v
    }

    pub fn get(&self, k: usize, d: usize) -> Option<&TableCell> {
        self.cells.get(&(k, d))
    }

    /// Fold one measured row in; ties on `n` go to the smaller family id,
    /// then the smaller `(Lx, Ly)`, so the result is order independent.
    pub fn offer(&mut self, fam: &EnumeratedFamily, row: &SweepRow) {
        let Some(dv) = row.d else { return };
        if row.error.is_some() || row.n > 0 && !self.ks.contains(&row.k) {
            return;
        }
        for &d in &self.ds {
            if dv < d {
                continue;
            }
            let cand = TableCell { n: row.n, d: dv, family: fam.id.clone(), exps: fam.exps, lx: row.lx, ly: row.ly, certainty: row.certainty };
            let better = match self.cells.get(&(row.k, d)) {
                None => true,
                Some(c) => (cand.n, &cand.exps, cand.lx, cand.ly) < (c.n, &c.exps, c.lx, c.ly),
            };
            if better {
                self.cells.insert((row.k, d), cand);
            }
        }
    }

    /// Smallest target distance a code of size `n` and dimension `k` could
    /// still improve; `None` if it cannot improve any cell.
    pub fn needed(&self, k: usize, n: usize) -> Option<usize> {
        self.ds.iter().copied().find(|&d| self.cells.get(&(k, d)).is_none_or(|c| n <= c.n))
    }
}

/// Sweep one family over the range, pruning sizes that cannot improve `table`.
pub fn sweep_family(fam: &EnumeratedFamily, range: &SearchRange, policy: &DistancePolicy, table: &mut OptimalTable) {
    let mask = family_mask(&fam.polys);
    for (lx, ly) in sizes_by_area(range) {
        // n ≥ 2·Lx·Ly − Lx − Ly + 1 − (corner losses); a cheap, loose prefilter.
        let lower = (2 * lx * ly).saturating_sub(2 * (lx + ly) + 8);
        if lower > range.max_n || table.needed(fam.k, lower).is_none() {
            continue;
        }
        let spec = match LatticeSpec::new(lx, ly, mask.clone()) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let lc = match build_from_polys(&fam.polys, spec, &BuildOptions::default()) {
            Ok(c) => c,
            Err(e) => {
                table.rows.push(SweepRow::failed(&fam.id, Some(fam.exps), lx, ly, format!("{e}")));
                continue;
            }
        };
        let n = lc.code.n();
        if n > range.max_n {
            continue;
        }
        let Some(need) = table.needed(fam.k, n) else { continue };
        let row = match sweep_distance(&lc.code, need, policy) {
            Ok((d, certainty)) => SweepRow {
                family: fam.id.clone(),
                exps: Some(fam.exps),
                lx,
                ly,
                n,
                k: lc.code.logical_dim(),
                d: Some(d),
                certainty,
                metric: metric(n, fam.k, d),
                error: None,
            },
            Err(e) => SweepRow::failed(&fam.id, Some(fam.exps), lx, ly, format!("{e}")),
        };
        table.offer(fam, &row);
        table.rows.push(row);
    }
}

/// Minimal `n` for each `(k, d)` cell over the enumerated families.
pub fn optimal_table(range: &SearchRange, ks: &[usize], ds: &[usize], policy: &DistancePolicy) -> OptimalTable {
    let ks_set: BTreeSet<usize> = ks.iter().copied().collect();
    let mut table = OptimalTable { ks: ks_set.iter().copied().collect(), ds: ds.to_vec(), ..Default::default() };
    table.ds.sort_unstable();
    for fam in enumerate_families(range).iter().filter(|f| ks_set.contains(&f.k)) {
        sweep_family(fam, range, policy, &mut table);
    }
    table
}

/// Distance policy used by default for sweeps: exact on tiny codes, ISD above.
pub fn default_sweep_policy() -> DistancePolicy {
    DistancePolicy { exact_max_n: 40, dmax: 16, exact_budget: 50_000_000, isd_trials: None, seed: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_f_is_enumerated() {
        let range = SearchRange { a: 1..=1, b: 0..=0, c: 1..=1, d: 2..=2, ..Default::default() };
        let fams = enumerate_families(&range);
        // f = 1: a unit, so the quotient is zero-dimensional.
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].k, 0);
    }

    #[test]
    fn symmetric_tuples_share_a_key() {
        let (f, g) = family_polys([-1, 2, 1, 3]);
        let k0 = canonical_key(&f, &g);
        let (fs, gs) = (g.swap_xy(), f.swap_xy());
        assert_eq!(canonical_key(&fs, &gs), k0);
        assert_eq!(canonical_key(&f.antipode(), &g.antipode()), k0);
        assert_eq!(canonical_key(&f.shift(Monomial::new(3, -1)), &g), k0);
    }

    #[test]
    fn table_offer_is_monotone_in_d() {
        let fam = EnumeratedFamily { id: "t".into(), exps: [0; 4], polys: FamilyPoly::parse("t", "1+x", "1+y").unwrap(), k: 1, merged: Vec::new() };
        let mut t = OptimalTable { ks: alloc::vec![1], ds: alloc::vec![2, 3, 4], ..Default::default() };
        let row = SweepRow { family: "t".into(), exps: None, lx: 3, ly: 3, n: 13, k: 1, d: Some(3), certainty: Certainty::Exact, metric: 0.0, error: None };
        t.offer(&fam, &row);
        assert_eq!(t.get(1, 2).unwrap().n, 13);
        assert_eq!(t.get(1, 3).unwrap().n, 13);
        assert!(t.get(1, 4).is_none());
        assert_eq!(t.budget_limited(), alloc::vec![(1, 4)]);
        assert_eq!(t.needed(1, 14), Some(4));
        assert_eq!(t.needed(1, 12), Some(2));
    }
}
