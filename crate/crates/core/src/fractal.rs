//! Sierpinski-type logical operators and the distance bounds they give.
//!
//! An X pattern with V-edge support `P` and H-edge support `Q` violates the
//! Z checks at `P·f + Q·g`. Taking `P = f^(2^m − 1)` leaves `f^(2^m)`, whose
//! three terms sit `2^m` apart; a shifted `g`-triangle can cancel one of them.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::code::{LogicalClass, Pauli, QubitLabel};
use crate::f2::BitVec;
use crate::lattice::{build_open_code, BuildError, BuildOptions, EdgeId, EdgeKind, FamilySpec, LatticeCode, PauliOp};
use crate::poly::{LaurentPoly2, Monomial};

/// `f^(2^m − 1)` as the product `∏_{i<m} f^(2^i)`.
pub fn sierpinski_support(f: &LaurentPoly2, m: u32) -> LaurentPoly2 {
    assert!(m >= 1);
    (0..m).fold(LaurentPoly2::one(), |acc, i| acc.mul(&f.frobenius_pow(i)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractalOperator {
    pub level: u32,
    /// X on V-edges.
    pub vertical_part: LaurentPoly2,
    /// X on H-edges.
    pub horizontal_part: LaurentPoly2,
    /// `vertical_part·f + horizontal_part·g`.
    pub residual_violations: LaurentPoly2,
    /// Whether the combination has fewer violations than its two triangles
    /// would have on their own.
    pub reduced: bool,
}

impl FractalOperator {
    fn new(f: &LaurentPoly2, g: &LaurentPoly2, level: u32, vertical: LaurentPoly2, horizontal: LaurentPoly2) -> Self {
        let residual = vertical.mul(f).add(&horizontal.mul(g));
        let separate = vertical.mul(f).len() + horizontal.mul(g).len();
        let reduced = residual.len() < separate;
        FractalOperator { level, vertical_part: vertical, horizontal_part: horizontal, residual_violations: residual, reduced }
    }

    /// The f-triangle alone on V-edges.
    pub fn f_triangle(f: &LaurentPoly2, g: &LaurentPoly2, m: u32) -> Self {
        Self::new(f, g, m, sierpinski_support(f, m), LaurentPoly2::zero())
    }

    /// The g-triangle alone on H-edges.
    pub fn g_triangle(f: &LaurentPoly2, g: &LaurentPoly2, m: u32) -> Self {
        Self::new(f, g, m, LaurentPoly2::zero(), sierpinski_support(g, m))
    }

    /// Plane operator translated by `(di, dj)`.
    pub fn place(&self, di: i32, dj: i32) -> PauliOp {
        let mut xsupp = BTreeSet::new();
        for (p, kind) in [(&self.vertical_part, EdgeKind::V), (&self.horizontal_part, EdgeKind::H)] {
            for t in p.terms() {
                xsupp.insert(EdgeId { kind, i: t.x + di, j: t.y + dj });
            }
        }
        PauliOp { xsupp, zsupp: BTreeSet::new() }
    }
}

/// f-triangle on V-edges plus the g-triangle shifted by `shift` on H-edges.
pub fn combined_fractal(f: &LaurentPoly2, g: &LaurentPoly2, m: u32, shift: Monomial) -> FractalOperator {
    FractalOperator::new(f, g, m, sierpinski_support(f, m), sierpinski_support(g, m).shift(shift))
}

/// Shifts that line up a term of `f^(2^m)` with a term of `g^(2^m)`.
pub fn apex_shifts(f: &LaurentPoly2, g: &LaurentPoly2, m: u32) -> Vec<Monomial> {
    let (fm, gm) = (f.frobenius_pow(m), g.frobenius_pow(m));
    let set: BTreeSet<Monomial> = fm.terms().flat_map(|a| gm.terms().map(move |b| a.mul(b.inv()))).collect();
    set.into_iter().collect()
}

/// The apex-cancelling combination with the fewest residual violations
/// (ties go to the smallest shift). `reduced` is false when no shift helps.
pub fn best_combined_fractal(f: &LaurentPoly2, g: &LaurentPoly2, m: u32) -> FractalOperator {
    apex_shifts(f, g, m)
        .into_iter()
        .map(|s| combined_fractal(f, g, m, s))
        .min_by_key(|op| op.residual_violations.len())
        .expect("nonzero polynomials have apex shifts")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FractalError {
    NoneFound { max_level: u32 },
    Build(BuildError),
}

impl fmt::Display for FractalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FractalError::NoneFound { max_level } => {
                write!(f, "no truncated fractal operator up to level {max_level} is a logical")
            }
            FractalError::Build(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FractalError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractalBound {
    pub weight: usize,
    pub operator: FractalOperator,
    /// Translation applied to the operator before truncation.
    pub offset: (i32, i32),
    /// Truncated support on the code's qubits.
    pub support: BitVec,
    pub op: PauliOp,
}

/// Every operator shape tried at `level`: both lone triangles and each
/// apex-cancelling combination.
pub fn candidate_operators(f: &LaurentPoly2, g: &LaurentPoly2, level: u32) -> Vec<FractalOperator> {
    let mut out = vec![FractalOperator::f_triangle(f, g, level), FractalOperator::g_triangle(f, g, level)];
    out.extend(apex_shifts(f, g, level).into_iter().map(|s| combined_fractal(f, g, level, s)));
    out
}

/// Lightest truncation of a fractal operator (levels `1..=max_level`, every
/// translation meeting the lattice) that the code certifies as an X logical.
pub fn fractal_upper_bound(lc: &LatticeCode, max_level: u32) -> Result<FractalBound, FractalError> {
    let code = &lc.code;
    let spec = &lc.spec;
    let (f, g) = (&lc.polys.f, &lc.polys.g);
    let n = code.n();
    // slot → qubit
    let mut qubit_of = vec![usize::MAX; 2 * spec.lx * spec.ly];
    for (q, l) in code.labels().iter().enumerate() {
        if let QubitLabel::Edge(e) = l {
            qubit_of[spec.slot(*e).expect("lattice edge")] = q;
        }
    }
    // Z-check incidence per qubit, and the Z-logical duals.
    let hz = code.hz();
    let zw = hz.rows().div_ceil(64).max(1);
    let mut col = vec![0u64; n * zw];
    for r in 0..hz.rows() {
        for q in hz.row_ones(r) {
            col[q * zw + r / 64] |= 1 << (r % 64);
        }
    }
    let duals: Vec<BitVec> = code.logical_basis().into_iter().map(|(_, z)| z).collect();

    let mut best: Option<(usize, Vec<usize>, FractalOperator, (i32, i32))> = None;
    let mut syn = vec![0u64; zw];
    for level in 1..=max_level {
        for op in candidate_operators(f, g, level) {
            let pts: Vec<(EdgeKind, Monomial)> = op
                .vertical_part
                .terms()
                .map(|t| (EdgeKind::V, t))
                .chain(op.horizontal_part.terms().map(|t| (EdgeKind::H, t)))
                .collect();
            let (Some(lo), Some(hi)) = (
                pts.iter().map(|p| p.1).reduce(|a, b| Monomial::new(a.x.min(b.x), a.y.min(b.y))),
                pts.iter().map(|p| p.1).reduce(|a, b| Monomial::new(a.x.max(b.x), a.y.max(b.y))),
            ) else {
                continue;
            };
            for di in -hi.x..spec.lx as i32 - lo.x {
                for dj in -hi.y..spec.ly as i32 - lo.y {
                    let mut supp: Vec<usize> = Vec::new();
                    for &(kind, t) in &pts {
                        let e = EdgeId { kind, i: t.x + di, j: t.y + dj };
                        if let Some(s) = spec.slot(e) {
                            let q = qubit_of[s];
                            if q != usize::MAX {
                                supp.push(q);
                            }
                        }
                    }
                    let w = supp.len();
                    if w == 0 || best.as_ref().is_some_and(|b| w > b.0) {
                        continue;
                    }
                    syn.iter_mut().for_each(|x| *x = 0);
                    for &q in &supp {
                        for t in 0..zw {
                            syn[t] ^= col[q * zw + t];
                        }
                    }
                    if syn.iter().any(|&x| x != 0) {
                        continue;
                    }
                    let v = BitVec::from_indices(n, supp.iter().copied());
                    if !duals.iter().any(|z| v.dot(z)) {
                        continue;
                    }
                    supp.sort_unstable();
                    let better = match &best {
                        None => true,
                        Some((bw, bs, _, _)) => w < *bw || (w == *bw && supp < *bs),
                    };
                    if better {
                        best = Some((w, supp, op.clone(), (di, dj)));
                    }
                }
            }
        }
    }
    let (weight, supp, operator, offset) = best.ok_or(FractalError::NoneFound { max_level })?;
    let support = BitVec::from_indices(n, supp);
    // Never trust the construction: re-classify through the code.
    let class = code.classify_pure(Pauli::X, &support).map_err(|e| FractalError::Build(BuildError::Code(e)))?;
    if class != LogicalClass::LogicalX {
        return Err(FractalError::NoneFound { max_level });
    }
    let op = PauliOp::from_vec(Pauli::X, &support, code.labels());
    Ok(FractalBound { weight, operator, offset, support, op })
}

/// Build the family's code on `lx × ly` and bound its X-distance.
pub fn fractal_upper_bound_family(family: &FamilySpec, lx: usize, ly: usize, max_level: u32) -> Result<FractalBound, FractalError> {
    let lc = build_open_code(family, lx, ly, &BuildOptions::default()).map_err(FractalError::Build)?;
    fractal_upper_bound(&lc, max_level)
}

pub const DEFAULT_MAX_LEVEL: u32 = 5;

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly2 {
        s.parse().unwrap()
    }

    #[test]
    fn sierpinski_examples() {
        let f = p("1+x+y");
        assert_eq!(sierpinski_support(&f, 1), f);
        let naive = f.mul(&f).mul(&f);
        assert_eq!(sierpinski_support(&f, 2), naive);
        assert_eq!(naive, f.mul(&p("1+x^2+y^2")));
    }

    #[test]
    fn triangle_leaves_frobenius_violations() {
        let (f, g) = (p("x+x^2+y^2"), p("1+x^2*y+x^2*y^2"));
        let op = FractalOperator::f_triangle(&f, &g, 1);
        assert_eq!(op.residual_violations, f.frobenius_pow(1));
    }

    #[test]
    fn toric_triangle_is_a_line() {
        let (f, g) = (p("1+x"), p("1+y"));
        let op = FractalOperator::f_triangle(&f, &g, 3);
        assert_eq!(op.vertical_part, LaurentPoly2::from_terms((0..8).map(|i| (i, 0))));
        assert_eq!(op.residual_violations, p("1+x^8"));
    }

    #[test]
    fn combination_cancels_an_apex() {
        let (f, g) = (p("x+x^2+y^2"), p("1+x^2*y+x^2*y^2"));
        for m in 1..=4 {
            let op = best_combined_fractal(&f, &g, m);
            assert!(op.reduced);
            assert_eq!(op.residual_violations.len(), 4);
            let check = op.vertical_part.mul(&f).add(&op.horizontal_part.mul(&g));
            assert_eq!(check, op.residual_violations);
        }
    }
}
