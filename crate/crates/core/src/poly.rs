//! Bivariate Laurent polynomials over GF(2).

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::f2::{BitVec, RowBasis};
use crate::groebner;

/// Exponent pair `x^x y^y`. Ordered by `(y, x)`, which is also the display order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: i32,
    pub y: i32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Monomial { x, y }
    }

    pub fn mul(self, o: Monomial) -> Monomial {
        Monomial { x: self.x + o.x, y: self.y + o.y }
    }

    pub fn inv(self) -> Monomial {
        Monomial { x: -self.x, y: -self.y }
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> core::cmp::Ordering {
        (self.y, self.x).cmp(&(o.y, o.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |f: &mut fmt::Formatter<'_>, v: &str, e: i32| match e {
            1 => f.write_str(v),
            e => write!(f, "{v}^{e}"),
        };
        match (self.x, self.y) {
            (0, 0) => f.write_str("1"),
            (x, 0) => part(f, "x", x),
            (0, y) => part(f, "y", y),
            (x, y) => {
                part(f, "x", x)?;
                f.write_str("*")?;
                part(f, "y", y)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    Zero,
    Parse { input: String, reason: &'static str },
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::Zero => f.write_str("zero polynomial"),
            PolyError::Parse { input, reason } => write!(f, "cannot parse polynomial {input:?}: {reason}"),
        }
    }
}

impl core::error::Error for PolyError {}

/// Finite set of monomials; coefficients are implicitly 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentPoly2 {
    terms: BTreeSet<Monomial>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn monomial(x: i32, y: i32) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(Monomial::new(x, y));
        LaurentPoly2 { terms }
    }

    /// Repeated exponent pairs cancel in pairs.
    pub fn from_terms<I: IntoIterator<Item = (i32, i32)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (x, y) in terms {
            p.toggle(Monomial::new(x, y));
        }
        p
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: Monomial) -> bool {
        self.terms.contains(&m)
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = Monomial> + '_ {
        self.terms.iter().copied()
    }

    pub fn add(&self, q: &LaurentPoly2) -> LaurentPoly2 {
        LaurentPoly2 { terms: self.terms.symmetric_difference(&q.terms).copied().collect() }
    }

    pub fn mul(&self, q: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = Self::zero();
        for a in &self.terms {
            for b in &q.terms {
                out.toggle(a.mul(*b));
            }
        }
        out
    }

    pub fn shift(&self, m: Monomial) -> LaurentPoly2 {
        LaurentPoly2 { terms: self.terms.iter().map(|t| t.mul(m)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> LaurentPoly2 {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `p^(2^m)`, which over GF(2) just scales every exponent by `2^m`.
    pub fn frobenius_pow(&self, m: u32) -> LaurentPoly2 {
        let s = 1i32 << m;
        LaurentPoly2 { terms: self.terms.iter().map(|t| Monomial::new(t.x * s, t.y * s)).collect() }
    }

    /// `x → x⁻¹, y → y⁻¹`.
    pub fn antipode(&self) -> LaurentPoly2 {
        LaurentPoly2 { terms: self.terms.iter().map(|t| t.inv()).collect() }
    }

    /// `x ↔ y`.
    pub fn swap_xy(&self) -> LaurentPoly2 {
        LaurentPoly2 { terms: self.terms.iter().map(|t| Monomial::new(t.y, t.x)).collect() }
    }

    /// Minimum x and y exponents (not necessarily a term).
    pub fn min_corner(&self) -> Option<Monomial> {
        let mx = self.terms.iter().map(|t| t.x).min()?;
        let my = self.terms.iter().map(|t| t.y).min()?;
        Some(Monomial::new(mx, my))
    }

    pub fn max_corner(&self) -> Option<Monomial> {
        let mx = self.terms.iter().map(|t| t.x).max()?;
        let my = self.terms.iter().map(|t| t.y).max()?;
        Some(Monomial::new(mx, my))
    }

    /// Multiply by the monomial that brings both minimum exponents to zero.
    /// Returns the normalized polynomial and that monomial.
    pub fn normalize(&self) -> Result<(LaurentPoly2, Monomial), PolyError> {
        let c = self.min_corner().ok_or(PolyError::Zero)?;
        let s = c.inv();
        Ok((self.shift(s), s))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

impl fmt::Debug for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly2 {
    type Err = PolyError;

    /// Syntax: terms joined by `+`, each term `1` or factors `x`, `x^i`, `y`, `y^j`
    /// joined by `*`. `0` is the zero polynomial.
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason| PolyError::Parse { input: s.to_string(), reason };
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        if compact == "0" {
            return Ok(Self::zero());
        }
        let mut p = Self::zero();
        for term in compact.split('+') {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let mut m = Monomial::ONE;
            if term != "1" {
                for factor in term.split('*') {
                    let (var, exp) = match factor.split_once('^') {
                        Some((v, e)) => {
                            let e = e.trim_start_matches('(').trim_end_matches(')');
                            (v, e.parse::<i32>().map_err(|_| err("bad exponent"))?)
                        }
                        None => (factor, 1),
                    };
                    match var {
                        "x" => m.x += exp,
                        "y" => m.y += exp,
                        "1" if exp == 1 => {}
                        _ => return Err(err("unknown factor")),
                    }
                }
            }
            p.toggle(m);
        }
        Ok(p)
    }
}

/// A named pair of bulk-stabilizer polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyPoly {
    pub f: LaurentPoly2,
    pub g: LaurentPoly2,
    pub name: String,
}

impl FamilyPoly {
    pub fn new(name: impl Into<String>, f: LaurentPoly2, g: LaurentPoly2) -> Result<Self, PolyError> {
        if f.is_zero() || g.is_zero() {
            return Err(PolyError::Zero);
        }
        Ok(FamilyPoly { f, g, name: name.into() })
    }

    pub fn parse(name: impl Into<String>, f: &str, g: &str) -> Result<Self, PolyError> {
        Self::new(name, f.parse()?, g.parse()?)
    }

    /// Both polynomials normalized to the first quadrant.
    pub fn normalized(&self) -> FamilyPoly {
        FamilyPoly {
            f: self.f.normalize().expect("nonzero").0,
            g: self.g.normalize().expect("nonzero").0,
            name: self.name.clone(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuotientDim {
    Finite(usize),
    Infinite,
}

impl QuotientDim {
    pub fn finite(self) -> Option<usize> {
        match self {
            QuotientDim::Finite(k) => Some(k),
            QuotientDim::Infinite => None,
        }
    }
}

impl fmt::Display for QuotientDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientDim::Finite(k) => write!(f, "{k}"),
            QuotientDim::Infinite => f.write_str("infinite"),
        }
    }
}

/// Dimension of `GF(2)[x^±1, y^±1] / ⟨f, g⟩`.
///
/// Computed as the number of standard monomials of the saturation
/// `⟨f', g'⟩ : (xy)^∞` in `GF(2)[x, y]`, where f', g' are the normalized
/// polynomials.
pub fn quotient_dimension(f: &LaurentPoly2, g: &LaurentPoly2) -> Result<QuotientDim, PolyError> {
    let (f, _) = f.normalize()?;
    let (g, _) = g.normalize()?;
    if f.is_monomial() || g.is_monomial() {
        return Ok(QuotientDim::Finite(0));
    }
    let gens = [groebner::Poly::from_laurent(&f), groebner::Poly::from_laurent(&g)];
    let basis = groebner::saturate_xy(&gens);
    Ok(groebner::count_standard_monomials(&basis))
}

/// Logical dimension on an `lx × ly` torus: `2·(lx·ly − rank)` where the rank is
/// taken over all cyclic shifts of f and g in the `lx·ly` monomial basis.
pub fn torus_dimension(f: &LaurentPoly2, g: &LaurentPoly2, lx: usize, ly: usize) -> Result<usize, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::Zero);
    }
    assert!(lx >= 1 && ly >= 1);
    let n = lx * ly;
    let embed = |p: &LaurentPoly2, sx: usize, sy: usize| {
        let mut idx = Vec::with_capacity(p.len());
        for t in p.terms() {
            let i = (t.x + sx as i32).rem_euclid(lx as i32) as usize;
            let j = (t.y + sy as i32).rem_euclid(ly as i32) as usize;
            idx.push(j * lx + i);
        }
        idx
    };
    let mut basis = RowBasis::new(n);
    for sy in 0..ly {
        for sx in 0..lx {
            for p in [f, g] {
                basis.insert(&BitVec::from_indices(n, embed(p, sx, sy)));
            }
            if basis.rank() == n {
                return Ok(0);
            }
        }
    }
    Ok(2 * (n - basis.rank()))
}

/// Same quantity as [`torus_dimension`], via a Gröbner basis of
/// `⟨f', g', x^lx − 1, y^ly − 1⟩`. Much cheaper for large tori.
pub fn torus_dimension_groebner(f: &LaurentPoly2, g: &LaurentPoly2, lx: usize, ly: usize) -> Result<usize, PolyError> {
    let (f, _) = f.normalize()?;
    let (g, _) = g.normalize()?;
    assert!(lx >= 1 && ly >= 1);
    let gens = [
        groebner::Poly::from_laurent(&f),
        groebner::Poly::from_laurent(&g),
        groebner::Poly::from_terms([[lx as u32, 0, 0], [0, 0, 0]]),
        groebner::Poly::from_terms([[0, ly as u32, 0], [0, 0, 0]]),
    ];
    let basis = groebner::groebner_basis(&gens);
    match groebner::count_standard_monomials(&basis) {
        QuotientDim::Finite(d) => Ok(2 * d),
        QuotientDim::Infinite => unreachable!("x^lx - 1 and y^ly - 1 bound the staircase"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly2 {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic() {
        assert!(p("1+x").add(&p("1+x")).is_zero());
        assert_eq!(p("1+x").mul(&p("1+x")), p("1+x^2"));
        let f = p("x+x^2+y^2");
        assert_eq!(f.mul(&f), p("x^2+x^4+y^4"));
        assert_eq!(f.frobenius_pow(2), p("x^4+x^8+y^8"));
        assert_eq!(f.frobenius_pow(0), f);
        assert_eq!(p("1+x").frobenius_pow(1), p("1+x^2"));
    }

    #[test]
    fn normalize_examples() {
        let (q, s) = p("1+x+x^-1*y^2").normalize().unwrap();
        assert_eq!(q, p("x+x^2+y^2"));
        assert_eq!(s, Monomial::new(1, 0));
        let (q, s) = p("1+y+x^-2*y^-1").normalize().unwrap();
        assert_eq!(q, p("x^2*y+x^2*y^2+1"));
        assert_eq!(s, Monomial::new(2, 1));
        let (q, s) = p("x^5").normalize().unwrap();
        assert_eq!(q, LaurentPoly2::one());
        assert_eq!(s, Monomial::new(-5, 0));
        assert_eq!(LaurentPoly2::zero().normalize(), Err(PolyError::Zero));
    }

    #[test]
    fn antipode_examples() {
        assert_eq!(p("1+x").antipode(), p("1+x^-1"));
        assert_eq!(p("x+y^2").antipode(), p("x^-1+y^-2"));
        let f = p("x^3*y^-1+y+1");
        assert_eq!(f.antipode().antipode(), f);
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["1+x+x^-1*y^2", "0", "x*y^3+y+1", "x^-2*y^-1", "x^2+x^3+y^2"] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q);
        }
        assert_eq!(p("1+x+x^-1*y^2").to_string(), "1+x+x^-1*y^2");
        assert_eq!(p("x + x"), LaurentPoly2::zero());
        assert_eq!(p("x^(-1)"), LaurentPoly2::monomial(-1, 0));
        assert!("x+".parse::<LaurentPoly2>().is_err());
        assert!("z".parse::<LaurentPoly2>().is_err());
        assert!("x^a".parse::<LaurentPoly2>().is_err());
    }

    #[test]
    fn quotient_examples() {
        let q = |f: &str, g: &str| quotient_dimension(&p(f), &p(g)).unwrap();
        assert_eq!(q("1+x", "1+y"), QuotientDim::Finite(1));
        assert_eq!(q("x+x^2+y^2", "1+x^2*y+x^2*y^2"), QuotientDim::Finite(8));
        assert_eq!(q("1+x+x^-1*y^2", "1+y+x^-2*y^-1"), QuotientDim::Finite(8));
        assert_eq!(q("x*y^2+x^2*y^2+1", "x+x*y+y^2"), QuotientDim::Finite(6));
        assert_eq!(q("x+x^2+y^3", "1+y+x*y^3"), QuotientDim::Finite(9));
        // shared factor (1+x)
        assert_eq!(q("1+x", "1+x^2"), QuotientDim::Infinite);
        assert_eq!(q("x^3", "1+y"), QuotientDim::Finite(0));
    }

    #[test]
    fn torus_examples() {
        let (f, g) = (p("1+x"), p("1+y"));
        for l in 2..6 {
            assert_eq!(torus_dimension(&f, &g, l, l + 1).unwrap(), 2);
        }
        let (f, g) = (p("x+x^2+y^2"), p("1+x^2*y+x^2*y^2"));
        assert_eq!(torus_dimension(&f, &g, 7, 7).unwrap(), 6);
        assert_eq!(torus_dimension_groebner(&f, &g, 7, 7).unwrap(), 6);
    }
}
