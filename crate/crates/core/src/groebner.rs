//! Buchberger's algorithm in GF(2)[x, y, t].
//!
//! The order eliminates t first (block order), then grevlex on (x, y) with
//! x > y. Only what the quotient-dimension computations need.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::poly::{LaurentPoly2, QuotientDim};

/// Exponents `[x, y, t]`.
pub type Exp = [u32; 3];

pub fn cmp_exp(a: &Exp, b: &Exp) -> Ordering {
    a[2].cmp(&b[2])
        .then((a[0] + a[1]).cmp(&(b[0] + b[1])))
        .then(b[1].cmp(&a[1]))
}

fn divides(a: &Exp, b: &Exp) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && a[2] <= b[2]
}

fn lcm(a: &Exp, b: &Exp) -> Exp {
    [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]
}

fn sub(a: &Exp, b: &Exp) -> Exp {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Terms sorted strictly descending under [`cmp_exp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    terms: Vec<Exp>,
}

impl Poly {
    pub fn from_terms<I: IntoIterator<Item = Exp>>(terms: I) -> Poly {
        let mut set: Vec<Exp> = Vec::new();
        for t in terms {
            if let Some(pos) = set.iter().position(|s| *s == t) {
                set.swap_remove(pos);
            } else {
                set.push(t);
            }
        }
        set.sort_by(|a, b| cmp_exp(b, a));
        Poly { terms: set }
    }

    /// Requires nonnegative exponents.
    pub fn from_laurent(p: &LaurentPoly2) -> Poly {
        Poly::from_terms(p.terms().map(|m| {
            assert!(m.x >= 0 && m.y >= 0, "polynomial must be normalized");
            [m.x as u32, m.y as u32, 0]
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&Exp> {
        self.terms.first()
    }

    pub fn terms(&self) -> &[Exp] {
        &self.terms
    }

    fn add_shifted(&self, other: &Poly, shift: &Exp) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let bj = b.get(j).map(|t| [t[0] + shift[0], t[1] + shift[1], t[2] + shift[2]]);
            match (a.get(i), bj) {
                (Some(x), Some(y)) => match cmp_exp(x, &y) {
                    Ordering::Greater => {
                        out.push(*x);
                        i += 1;
                    }
                    Ordering::Less => {
                        out.push(y);
                        j += 1;
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                },
                (Some(x), None) => {
                    out.push(*x);
                    i += 1;
                }
                (None, Some(y)) => {
                    out.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Poly { terms: out }
    }
}

/// Full reduction of `p` modulo `basis`.
fn reduce(p: &Poly, basis: &[Poly]) -> Poly {
    let mut rem: Vec<Exp> = Vec::new();
    let mut cur = p.clone();
    while let Some(lt) = cur.lead().copied() {
        match basis.iter().find(|g| divides(g.lead().unwrap(), &lt)) {
            Some(g) => cur = cur.add_shifted(g, &sub(&lt, g.lead().unwrap())),
            None => {
                rem.push(lt);
                cur.terms.remove(0);
            }
        }
    }
    Poly { terms: rem }
}

fn spoly(a: &Poly, b: &Poly) -> Poly {
    let (la, lb) = (a.lead().unwrap(), b.lead().unwrap());
    let l = lcm(la, lb);
    a.add_shifted(&Poly { terms: Vec::new() }, &sub(&l, la)).add_shifted(b, &sub(&l, lb))
}

/// Reduced Gröbner basis, sorted by leading term ascending.
pub fn groebner_basis(gens: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = Vec::new();
    for g in gens {
        let r = reduce(g, &basis);
        if !r.is_zero() {
            basis.push(r);
        }
    }
    // Pending pairs ordered by lcm (normal selection strategy).
    let mut pairs: BTreeSet<(LcmKey, usize, usize)> = BTreeSet::new();
    let push_pairs = |pairs: &mut BTreeSet<(LcmKey, usize, usize)>, basis: &[Poly], j: usize| {
        for i in 0..j {
            let (li, lj) = (basis[i].lead().unwrap(), basis[j].lead().unwrap());
            let l = lcm(li, lj);
            // Product criterion: coprime leading terms reduce to zero.
            if l == [li[0] + lj[0], li[1] + lj[1], li[2] + lj[2]] {
                continue;
            }
            pairs.insert((LcmKey(l), i, j));
        }
    };
    for j in 0..basis.len() {
        push_pairs(&mut pairs, &basis, j);
    }
    while let Some((_, i, j)) = pairs.pop_first() {
        let l = lcm(basis[i].lead().unwrap(), basis[j].lead().unwrap());
        // Chain criterion: skip when some third leading term divides the lcm
        // and both companion pairs were already handled.
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(basis[k].lead().unwrap(), &l)
                && !pairs.iter().any(|&(_, a, b)| (a, b) == (i.min(k), i.max(k)) || (a, b) == (j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let r = reduce(&spoly(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            basis.push(r);
            push_pairs(&mut pairs, &basis, basis.len() - 1);
        }
    }
    interreduce(basis)
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct LcmKey(Exp);

impl Ord for LcmKey {
    fn cmp(&self, o: &Self) -> Ordering {
        cmp_exp(&self.0, &o.0).then(self.0.cmp(&o.0))
    }
}

impl PartialOrd for LcmKey {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn interreduce(mut basis: Vec<Poly>) -> Vec<Poly> {
    basis.sort_by(|a, b| cmp_exp(a.lead().unwrap(), b.lead().unwrap()));
    // Drop elements whose leading term is divisible by another's.
    let mut minimal: Vec<Poly> = Vec::new();
    for p in basis {
        if !minimal.iter().any(|q| divides(q.lead().unwrap(), p.lead().unwrap())) {
            minimal.push(p);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
        let lt = *minimal[i].lead().unwrap();
        let tail = Poly { terms: minimal[i].terms[1..].to_vec() };
        let mut r = reduce(&tail, &others);
        r.terms.insert(0, lt);
        out.push(r);
    }
    out
}

/// Gröbner basis of `⟨gens⟩ : (xy)^∞` in GF(2)[x, y].
pub fn saturate_xy(gens: &[Poly]) -> Vec<Poly> {
    let mut all: Vec<Poly> = gens.to_vec();
    all.push(Poly::from_terms([[1, 1, 1], [0, 0, 0]]));
    groebner_basis(&all).into_iter().filter(|p| p.terms.iter().all(|t| t[2] == 0)).collect()
}

/// Number of monomials in x, y not divisible by any leading term of `basis`.
pub fn count_standard_monomials(basis: &[Poly]) -> QuotientDim {
    let leads: Vec<Exp> = basis.iter().filter_map(|p| p.lead().copied()).collect();
    if leads.iter().any(|l| l[0] == 0 && l[1] == 0) {
        return QuotientDim::Finite(0);
    }
    let ax = leads.iter().filter(|l| l[1] == 0).map(|l| l[0]).min();
    let by = leads.iter().filter(|l| l[0] == 0).map(|l| l[1]).min();
    let (Some(ax), Some(by)) = (ax, by) else { return QuotientDim::Infinite };
    // Per column i, the staircase height is the smallest b over leads with a ≤ i.
    let mut count = 0usize;
    for i in 0..ax {
        let h = leads.iter().filter(|l| l[0] <= i).map(|l| l[1]).min().unwrap_or(by);
        count += h.min(by) as usize;
    }
    QuotientDim::Finite(count)
}
