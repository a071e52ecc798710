//! Open rectangular lattices with qubits on edges, and the open-boundary
//! construction of codes from a polynomial pair.
//!
//! Coordinates: vertex `(i, j)` with `0 ≤ i < Lx` (left to right) and
//! `0 ≤ j < Ly` (bottom to top). `H(i, j)` is the edge from `(i, j)` to
//! `(i+1, j)`, `V(i, j)` the edge from `(i, j)` to `(i, j+1)`; every vertex
//! owns one of each, giving `2·Lx·Ly` edge slots before masking.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::code::{CodeError, CssCode, Pauli, QubitLabel};
use crate::f2::{BitMatrix, BitVec, RowBasis};
use crate::poly::{quotient_dimension, FamilyPoly, LaurentPoly2, Monomial, PolyError, QuotientDim};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    H,
    V,
}

/// Field order gives the canonical edge order: kind, then row, then column.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub kind: EdgeKind,
    pub j: i32,
    pub i: i32,
}

impl EdgeId {
    pub const fn h(i: i32, j: i32) -> Self {
        EdgeId { kind: EdgeKind::H, i, j }
    }

    pub const fn v(i: i32, j: i32) -> Self {
        EdgeId { kind: EdgeKind::V, i, j }
    }

    pub fn translate(self, di: i32, dj: i32) -> Self {
        EdgeId { kind: self.kind, i: self.i + di, j: self.j + dj }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            EdgeKind::H => 'H',
            EdgeKind::V => 'V',
        };
        write!(f, "{k}:{}:{}", self.i, self.j)
    }
}

impl FromStr for EdgeId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut it = s.split(':');
        let kind = match it.next() {
            Some("H") => EdgeKind::H,
            Some("V") => EdgeKind::V,
            _ => return Err(format!("bad edge label {s:?}")),
        };
        let i = it.next().and_then(|v| v.parse().ok()).ok_or_else(|| format!("bad edge label {s:?}"))?;
        let j = it.next().and_then(|v| v.parse().ok()).ok_or_else(|| format!("bad edge label {s:?}"))?;
        if it.next().is_some() {
            return Err(format!("bad edge label {s:?}"));
        }
        Ok(EdgeId { kind, i, j })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    fn bit(self) -> u8 {
        1 << self as u8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SideSet(u8);

impl SideSet {
    pub const EMPTY: SideSet = SideSet(0);
    pub const LEFT_RIGHT: SideSet = SideSet(1 | 2);
    pub const BOTTOM_TOP: SideSet = SideSet(4 | 8);

    pub fn insert(&mut self, s: Side) {
        self.0 |= s.bit();
    }

    pub fn union(self, o: SideSet) -> SideSet {
        SideSet(self.0 | o.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, o: SideSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn contains(self, s: Side) -> bool {
        self.0 & s.bit() != 0
    }
}

/// Removes every edge of `kind` on the line `offset` steps in from `side`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MaskLine {
    pub kind: EdgeKind,
    pub side: Side,
    pub offset: u32,
}

impl MaskLine {
    fn covers(&self, e: EdgeId, lx: usize, ly: usize) -> bool {
        if e.kind != self.kind {
            return false;
        }
        let o = self.offset as i32;
        match self.side {
            Side::Left => e.i == o,
            Side::Right => e.i == lx as i32 - 1 - o,
            Side::Bottom => e.j == o,
            Side::Top => e.j == ly as i32 - 1 - o,
        }
    }
}

impl fmt::Display for MaskLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            EdgeKind::H => "H",
            EdgeKind::V => "V",
        };
        write!(f, "{k}:{}:{}", self.side.as_str(), self.offset)
    }
}

/// A set of removed edge lines. Text form: `full`, or comma-separated
/// `KIND:SIDE:OFFSET` items such as `V:right:0,V:bottom:0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MaskRule {
    lines: BTreeSet<MaskLine>,
}

impl MaskRule {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn from_lines<I: IntoIterator<Item = MaskLine>>(lines: I) -> Self {
        MaskRule { lines: lines.into_iter().collect() }
    }

    pub fn lines(&self) -> impl Iterator<Item = &MaskLine> {
        self.lines.iter()
    }

    pub fn is_full(&self) -> bool {
        self.lines.is_empty()
    }

    /// Mirror image under the swap `x ↔ y`.
    pub fn swap_xy(&self) -> MaskRule {
        MaskRule::from_lines(self.lines.iter().map(|l| MaskLine {
            kind: match l.kind {
                EdgeKind::H => EdgeKind::V,
                EdgeKind::V => EdgeKind::H,
            },
            side: match l.side {
                Side::Left => Side::Bottom,
                Side::Right => Side::Top,
                Side::Bottom => Side::Left,
                Side::Top => Side::Right,
            },
            offset: l.offset,
        }))
    }
}

impl fmt::Display for MaskRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lines.is_empty() {
            return f.write_str("full");
        }
        for (n, l) in self.lines.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for MaskRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "full" || s.is_empty() {
            return Ok(MaskRule::full());
        }
        let mut lines = BTreeSet::new();
        for item in s.split(',') {
            let parts: Vec<&str> = item.trim().split(':').collect();
            let [k, side, off] = parts[..] else { return Err(format!("bad mask item {item:?}")) };
            let kind = match k {
                "H" => EdgeKind::H,
                "V" => EdgeKind::V,
                _ => return Err(format!("bad edge kind in mask item {item:?}")),
            };
            let side = match side {
                "left" => Side::Left,
                "right" => Side::Right,
                "bottom" => Side::Bottom,
                "top" => Side::Top,
                _ => return Err(format!("bad side in mask item {item:?}")),
            };
            let offset = off.parse().map_err(|_| format!("bad offset in mask item {item:?}"))?;
            lines.insert(MaskLine { kind, side, offset });
        }
        Ok(MaskRule { lines })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildError {
    LatticeTooSmall { lx: usize, ly: usize },
    Poly(PolyError),
    InfiniteQuotient,
    LogicalDimMismatch { expected: usize, got: usize, n: usize, corner_promotions: usize },
    Code(CodeError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::LatticeTooSmall { lx, ly } => {
                write!(f, "{lx}x{ly} lattice holds no complete bulk stabilizer of some type")
            }
            BuildError::Poly(e) => write!(f, "{e}"),
            BuildError::InfiniteQuotient => f.write_str("quotient ring is infinite-dimensional"),
            BuildError::LogicalDimMismatch { expected, got, n, corner_promotions } => write!(
                f,
                "built code has k={got} but the polynomials give k={expected} (n={n}, {corner_promotions} corner promotions); \
                 check the mask"
            ),
            BuildError::Code(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BuildError {}

impl From<PolyError> for BuildError {
    fn from(e: PolyError) -> Self {
        BuildError::Poly(e)
    }
}

impl From<CodeError> for BuildError {
    fn from(e: CodeError) -> Self {
        BuildError::Code(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    pub mask: MaskRule,
}

impl LatticeSpec {
    pub fn new(lx: usize, ly: usize, mask: MaskRule) -> Result<Self, BuildError> {
        if lx < 2 || ly < 2 {
            return Err(BuildError::LatticeTooSmall { lx, ly });
        }
        Ok(LatticeSpec { lx, ly, mask })
    }

    pub fn in_range(&self, e: EdgeId) -> bool {
        e.i >= 0 && e.j >= 0 && (e.i as usize) < self.lx && (e.j as usize) < self.ly
    }

    fn masked_sides(&self, e: EdgeId) -> SideSet {
        let mut s = SideSet::EMPTY;
        for l in self.mask.lines() {
            if l.covers(e, self.lx, self.ly) {
                s.insert(l.side);
            }
        }
        s
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_range(e) && self.masked_sides(e).is_empty()
    }

    /// Sides through which `e` is missing; empty when `e` is a lattice edge.
    pub fn lost_sides(&self, e: EdgeId) -> SideSet {
        let mut s = SideSet::EMPTY;
        if e.i < 0 {
            s.insert(Side::Left);
        }
        if e.i >= self.lx as i32 {
            s.insert(Side::Right);
        }
        if e.j < 0 {
            s.insert(Side::Bottom);
        }
        if e.j >= self.ly as i32 {
            s.insert(Side::Top);
        }
        if s.is_empty() {
            s = self.masked_sides(e);
        }
        s
    }

    /// Lattice edges in canonical order.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::with_capacity(2 * self.lx * self.ly);
        for kind in [EdgeKind::H, EdgeKind::V] {
            for j in 0..self.ly as i32 {
                for i in 0..self.lx as i32 {
                    let e = EdgeId { kind, i, j };
                    if self.masked_sides(e).is_empty() {
                        out.push(e);
                    }
                }
            }
        }
        out
    }

    /// Dense slot index for in-range edges.
    pub fn slot(&self, e: EdgeId) -> Option<usize> {
        if !self.in_range(e) {
            return None;
        }
        let k = match e.kind {
            EdgeKind::H => 0,
            EdgeKind::V => 1,
        };
        Some((k * self.ly + e.j as usize) * self.lx + e.i as usize)
    }
}

/// A Pauli operator on (possibly out-of-lattice) edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PauliOp {
    pub xsupp: BTreeSet<EdgeId>,
    pub zsupp: BTreeSet<EdgeId>,
}

impl PauliOp {
    pub fn weight(&self) -> usize {
        self.xsupp.union(&self.zsupp).count()
    }

    pub fn is_empty(&self) -> bool {
        self.xsupp.is_empty() && self.zsupp.is_empty()
    }

    /// Support of the given Pauli type as a vector over the code's qubits.
    /// Edges that are not qubits of the code are ignored.
    pub fn to_vec(&self, p: Pauli, labels: &[QubitLabel]) -> BitVec {
        let set = match p {
            Pauli::X => &self.xsupp,
            Pauli::Z => &self.zsupp,
        };
        BitVec::from_indices(
            labels.len(),
            labels.iter().enumerate().filter(|(_, l)| matches!(l, QubitLabel::Edge(e) if set.contains(e))).map(|(q, _)| q),
        )
    }

    pub fn from_vec(p: Pauli, v: &BitVec, labels: &[QubitLabel]) -> PauliOp {
        let edges: BTreeSet<EdgeId> = v
            .ones()
            .filter_map(|q| match labels[q] {
                QubitLabel::Edge(e) => Some(e),
                QubitLabel::Index(_) => None,
            })
            .collect();
        match p {
            Pauli::X => PauliOp { xsupp: edges, zsupp: BTreeSet::new() },
            Pauli::Z => PauliOp { xsupp: BTreeSet::new(), zsupp: edges },
        }
    }
}

/// Untruncated bulk stabilizer centred at `center` on the infinite plane.
///
/// X at s: H-edges at s + supp f, V-edges at s + supp g.
/// Z at s: H-edges at s − supp g, V-edges at s − supp f.
pub fn stabilizer_pattern(f: &LaurentPoly2, g: &LaurentPoly2, side: Pauli, center: (i32, i32)) -> PauliOp {
    let (ci, cj) = center;
    let place = |p: &LaurentPoly2, kind: EdgeKind, sign: i32| -> Vec<EdgeId> {
        p.terms().map(|m| EdgeId { kind, i: ci + sign * m.x, j: cj + sign * m.y }).collect()
    };
    let edges: BTreeSet<EdgeId> = match side {
        Pauli::X => place(f, EdgeKind::H, 1).into_iter().chain(place(g, EdgeKind::V, 1)).collect(),
        Pauli::Z => place(g, EdgeKind::H, -1).into_iter().chain(place(f, EdgeKind::V, -1)).collect(),
    };
    match side {
        Pauli::X => PauliOp { xsupp: edges, zsupp: BTreeSet::new() },
        Pauli::Z => PauliOp { xsupp: BTreeSet::new(), zsupp: edges },
    }
}

pub fn truncate(op: &PauliOp, spec: &LatticeSpec) -> PauliOp {
    PauliOp {
        xsupp: op.xsupp.iter().copied().filter(|e| spec.contains(*e)).collect(),
        zsupp: op.zsupp.iter().copied().filter(|e| spec.contains(*e)).collect(),
    }
}

/// `n = a·Lx·Ly + b·Lx + c·Ly + d`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct NFormula {
    pub lxly: i64,
    pub lx: i64,
    pub ly: i64,
    pub constant: i64,
}

impl NFormula {
    pub const fn new(lxly: i64, lx: i64, ly: i64, constant: i64) -> Self {
        NFormula { lxly, lx, ly, constant }
    }

    pub fn eval(&self, lx: usize, ly: usize) -> i64 {
        let (x, y) = (lx as i64, ly as i64);
        self.lxly * x * y + self.lx * x + self.ly * y + self.constant
    }
}

impl fmt::Display for NFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, name) in [(self.lxly, "Lx*Ly"), (self.lx, "Lx"), (self.ly, "Ly"), (self.constant, "")] {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (a, name) {
                (_, "") => write!(f, "{a}")?,
                (1, _) => f.write_str(name)?,
                _ => write!(f, "{a}*{name}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl FromStr for NFormula {
    type Err = String;
    /// Accepts the [`Display`](fmt::Display) form, e.g. `2*Lx*Ly - Lx - Ly + 1`.
    fn from_str(s: &str) -> Result<Self, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = NFormula::new(0, 0, 0, 0);
        let mut rest = compact.as_str();
        let bad = || format!("bad n-formula {s:?}");
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let (coef, var) = match term.split_once('*') {
                Some((c, v)) if c.chars().all(|ch| ch.is_ascii_digit()) => (c.parse::<i64>().map_err(|_| bad())?, v),
                _ if term.chars().all(|ch| ch.is_ascii_digit()) => (term.parse::<i64>().map_err(|_| bad())?, ""),
                _ => (1, term),
            };
            let slot = match var {
                "Lx*Ly" | "Ly*Lx" => &mut out.lxly,
                "Lx" => &mut out.lx,
                "Ly" => &mut out.ly,
                "" => &mut out.constant,
                _ => return Err(bad()),
            };
            *slot += sign * coef;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub polys: FamilyPoly,
    pub mask: MaskRule,
    pub n_formula: NFormula,
    pub expected_k: usize,
}

impl FamilySpec {
    pub fn name(&self) -> &str {
        &self.polys.name
    }
}

/// The nine flagship families, k = 6..13 plus a second k = 8 family.
pub fn family_registry() -> Vec<FamilySpec> {
    let entry = |name: &str, f: &str, g: &str, mask: &str, n: NFormula, k: usize| FamilySpec {
        polys: FamilyPoly::parse(name, f, g).expect("registry polynomials parse"),
        mask: mask.parse().expect("registry masks parse"),
        n_formula: n,
        expected_k: k,
    };
    let full = NFormula::new(2, 0, 0, 0);
    vec![
        entry("k6-88", "x*y^2+x^2*y^2+1", "x+x*y+y^2", "V:right:0", NFormula::new(2, 0, -1, 0), 6),
        entry(
            "k7-131",
            "x+x^2+y",
            "1+y+x*y^3",
            "V:right:0,V:bottom:0,V:bottom:1",
            NFormula::new(2, -2, -1, 2),
            7,
        ),
        entry("k8-188", "x+x^2+y^2", "1+y+x*y^3", "V:right:0,V:bottom:0", NFormula::new(2, -1, -1, 1), 8),
        entry("k8-288", "x+x^2+y^2", "1+x^2*y+x^2*y^2", "full", full, 8),
        entry("k9-441", "x+x^2+y^3", "1+y+x*y^3", "V:right:0", NFormula::new(2, 0, -1, 0), 9),
        entry("k10-403", "1+x^2*y^2+x^3*y^2", "x^2+x^2*y+y^2", "V:right:0", NFormula::new(2, 0, -1, 0), 10),
        entry(
            "k11-435",
            "x^2+x^3+y^2",
            "1+y+x*y^3",
            "V:right:0,V:right:1,V:bottom:0",
            NFormula::new(2, -1, -2, 2),
            11,
        ),
        entry("k12-432", "x+x^2+y^3", "1+y+x^2*y^3", "full", full, 12),
        entry("k13-392", "x^2+x^3+y^2", "1+y+x^2*y^3", "V:right:0,V:bottom:0", NFormula::new(2, -1, -1, 1), 13),
    ]
}

pub fn find_family(name: &str) -> Option<FamilySpec> {
    family_registry().into_iter().find(|f| f.name() == name)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Promotion {
    /// Promote the heavier member of an anticommuting local pair.
    #[default]
    LargerWeight,
    SmallerWeight,
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Corner box radius; default is the pattern diameter + 2.
    pub corner_radius: Option<usize>,
    pub promotion: Promotion,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Bulk,
    Boundary,
    Corner,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabInfo {
    pub origin: Origin,
    /// Pattern centre; `None` for corner stabilizers.
    pub center: Option<(i32, i32)>,
}

/// A code built on a lattice, with per-check provenance.
#[derive(Clone, Debug)]
pub struct LatticeCode {
    pub code: CssCode,
    pub spec: LatticeSpec,
    pub polys: FamilyPoly,
    pub x_info: Vec<StabInfo>,
    pub z_info: Vec<StabInfo>,
    pub corner_promotions: usize,
}

impl LatticeCode {
    pub fn info(&self, p: Pauli) -> &[StabInfo] {
        match p {
            Pauli::X => &self.x_info,
            Pauli::Z => &self.z_info,
        }
    }
}

/// Build the open-boundary code of a registered family.
pub fn build_open_code(family: &FamilySpec, lx: usize, ly: usize, opts: &BuildOptions) -> Result<LatticeCode, BuildError> {
    let spec = LatticeSpec::new(lx, ly, family.mask.clone())?;
    build_with_expected(&family.polys, spec, family.expected_k, opts)
}

/// Build from bare polynomials; the expected k comes from the quotient ring.
pub fn build_from_polys(polys: &FamilyPoly, spec: LatticeSpec, opts: &BuildOptions) -> Result<LatticeCode, BuildError> {
    let k = match quotient_dimension(&polys.f, &polys.g)? {
        QuotientDim::Finite(k) => k,
        QuotientDim::Infinite => return Err(BuildError::InfiniteQuotient),
    };
    build_with_expected(polys, spec, k, opts)
}

struct Row {
    v: BitVec,
    info: StabInfo,
}

fn build_with_expected(polys: &FamilyPoly, spec: LatticeSpec, expected_k: usize, opts: &BuildOptions) -> Result<LatticeCode, BuildError> {
    let (f, g) = (&polys.f, &polys.g);
    let edges = spec.edges();
    let n = edges.len();
    let index: BTreeMap<EdgeId, usize> = edges.iter().enumerate().map(|(q, e)| (*e, q)).collect();

    let terms: Vec<Monomial> = f.terms().chain(g.terms()).collect();
    let (mi, ma) = (terms.iter().map(|m| m.x).min().unwrap(), terms.iter().map(|m| m.x).max().unwrap());
    let (mj, mb) = (terms.iter().map(|m| m.y).min().unwrap(), terms.iter().map(|m| m.y).max().unwrap());
    let reach = (ma - mi).max(mb - mj) + 1;

    // Steps 1–2: bulk patterns and admissible truncations.
    let mut cand: [Vec<(Row, bool)>; 2] = [Vec::new(), Vec::new()];
    for (t, side) in [Pauli::X, Pauli::Z].into_iter().enumerate() {
        let admissible = match side {
            Pauli::X => SideSet::BOTTOM_TOP,
            Pauli::Z => SideSet::LEFT_RIGHT,
        };
        // X patterns sit at s + (offsets), Z patterns at s − (offsets).
        let (lo_i, hi_i) = ((-ma).min(mi) - 1, spec.lx as i32 + ma.max(-mi) + 1);
        let (lo_j, hi_j) = ((-mb).min(mj) - 1, spec.ly as i32 + mb.max(-mj) + 1);
        for cj in lo_j..hi_j {
            for ci in lo_i..hi_i {
                let pat = stabilizer_pattern(f, g, side, (ci, cj));
                let supp = match side {
                    Pauli::X => &pat.xsupp,
                    Pauli::Z => &pat.zsupp,
                };
                let mut kept = Vec::new();
                let mut lost = SideSet::EMPTY;
                for e in supp {
                    match index.get(e) {
                        Some(&q) => kept.push(q),
                        None => lost = lost.union(spec.lost_sides(*e)),
                    }
                }
                if kept.is_empty() || !lost.is_subset(admissible) {
                    continue;
                }
                let bulk = lost.is_empty();
                let origin = if bulk { Origin::Bulk } else { Origin::Boundary };
                cand[t].push((Row { v: BitVec::from_indices(n, kept), info: StabInfo { origin, center: Some((ci, cj)) } }, bulk));
            }
        }
    }
    let [xc, zc] = cand;
    if !xc.iter().any(|(_, b)| *b) || !zc.iter().any(|(_, b)| *b) {
        return Err(BuildError::LatticeTooSmall { lx: spec.lx, ly: spec.ly });
    }

    // Step 3: truncated checks that anticommute are dropped in pairs. A
    // truncated check clashing with a bulk one is dropped alone.
    let mut drop_x = vec![false; xc.len()];
    let mut drop_z = vec![false; zc.len()];
    for (a, (rx, bx)) in xc.iter().enumerate() {
        for (b, (rz, bz)) in zc.iter().enumerate() {
            if (*bx && *bz) || !rx.v.dot(&rz.v) {
                continue;
            }
            match (bx, bz) {
                (false, false) => {
                    drop_x[a] = true;
                    drop_z[b] = true;
                }
                (true, false) => drop_z[b] = true,
                (false, true) => drop_x[a] = true,
                (true, true) => unreachable!(),
            }
        }
    }
    let keep = |c: Vec<(Row, bool)>, d: &[bool]| -> Vec<Row> {
        c.into_iter().zip(d).filter(|(_, dropped)| !**dropped).map(|((r, _), _)| r).collect()
    };
    let mut hx = keep(xc, &drop_x);
    let mut hz = keep(zc, &drop_z);

    // Step 4: corner completion.
    let radius = opts
        .corner_radius
        .unwrap_or(reach as usize + 1)
        .min(spec.lx - 1)
        .min(spec.ly - 1) as i32;
    let corners = [(0, 0), (spec.lx as i32 - 1, 0), (0, spec.ly as i32 - 1), (spec.lx as i32 - 1, spec.ly as i32 - 1)];
    let mut promotions = 0;
    let current_k = |hx: &[Row], hz: &[Row]| n - rank_of(hx, n) - rank_of(hz, n);
    'outer: loop {
        for &(ci, cj) in &corners {
            if current_k(&hx, &hz) <= expected_k {
                break 'outer;
            }
            let cols: Vec<usize> = edges
                .iter()
                .enumerate()
                .filter(|(_, e)| (e.i - ci).abs() < radius && (e.j - cj).abs() < radius)
                .map(|(q, _)| q)
                .collect();
            let lx_ops = local_logicals(&hx, &hz, &cols, n);
            let lz_ops = local_logicals(&hz, &hx, &cols, n);
            let pair = lx_ops.iter().find_map(|a| lz_ops.iter().find(|b| a.dot(b)).map(|b| (a, b)));
            let (v, side) = match pair {
                Some((a, b)) => {
                    let x_wins = match opts.promotion {
                        Promotion::LargerWeight => a.weight() >= b.weight(),
                        Promotion::SmallerWeight => a.weight() <= b.weight(),
                    };
                    if x_wins {
                        (a.clone(), Pauli::X)
                    } else {
                        (b.clone(), Pauli::Z)
                    }
                }
                None => match (lx_ops.first(), lz_ops.first()) {
                    (Some(a), _) => (a.clone(), Pauli::X),
                    (None, Some(b)) => (b.clone(), Pauli::Z),
                    (None, None) => continue,
                },
            };
            let row = Row { v, info: StabInfo { origin: Origin::Corner, center: None } };
            match side {
                Pauli::X => hx.push(row),
                Pauli::Z => hz.push(row),
            }
            promotions += 1;
            continue 'outer;
        }
        break;
    }

    // Step 5: weight-1 checks take their qubit with them; then unused qubits go.
    let mut alive = vec![true; n];
    loop {
        let mut hit = None;
        for (t, rows) in [&hx, &hz].into_iter().enumerate() {
            if let Some(r) = rows.iter().position(|r| r.v.weight() == 1) {
                hit = Some((t, r));
                break;
            }
        }
        let Some((t, r)) = hit else { break };
        let q = if t == 0 { hx.remove(r) } else { hz.remove(r) }.v.first_one().unwrap();
        alive[q] = false;
        for row in hx.iter_mut().chain(hz.iter_mut()) {
            row.v.set(q, false);
        }
        hx.retain(|r| !r.v.is_zero());
        hz.retain(|r| !r.v.is_zero());
    }
    let mut used = vec![false; n];
    for row in hx.iter().chain(hz.iter()) {
        for q in row.v.ones() {
            used[q] = true;
        }
    }
    let kept_cols: Vec<usize> = (0..n).filter(|&q| alive[q] && used[q]).collect();
    let to_matrix = |rows: &[Row]| {
        let m = BitMatrix::from_rows(n, &rows.iter().map(|r| r.v.clone()).collect::<Vec<_>>()).expect("width");
        m.select_columns(&kept_cols)
    };
    let labels: Vec<QubitLabel> = kept_cols.iter().map(|&q| QubitLabel::Edge(edges[q])).collect();
    let provenance = format!("open build of {} (f={}, g={}) on {}x{} mask {}", polys.name, f, g, spec.lx, spec.ly, spec.mask);
    let code = CssCode::new(to_matrix(&hx), to_matrix(&hz), labels, provenance)?;
    let k = code.logical_dim();
    if k != expected_k {
        return Err(BuildError::LogicalDimMismatch { expected: expected_k, got: k, n: code.n(), corner_promotions: promotions });
    }
    Ok(LatticeCode {
        code,
        spec,
        polys: polys.clone(),
        x_info: hx.iter().map(|r| r.info).collect(),
        z_info: hz.iter().map(|r| r.info).collect(),
        corner_promotions: promotions,
    })
}

fn rank_of(rows: &[Row], n: usize) -> usize {
    let mut b = RowBasis::new(n);
    for r in rows {
        b.insert(&r.v);
    }
    b.rank()
}

/// Operators supported on `cols` that commute with every `other` check and are
/// independent of the `same` checks, reduced to an independent list.
fn local_logicals(same: &[Row], other: &[Row], cols: &[usize], n: usize) -> Vec<BitVec> {
    let local: Vec<Vec<usize>> = other
        .iter()
        .map(|r| cols.iter().enumerate().filter(|(_, &q)| r.v.get(q)).map(|(t, _)| t).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    let ns = BitMatrix::from_sparse_rows(cols.len(), &local).nullspace();
    let mut basis = RowBasis::new(n);
    for r in same {
        basis.insert(&r.v);
    }
    let mut out = Vec::new();
    for r in 0..ns.rows() {
        let w = BitVec::from_indices(n, ns.row_ones(r).map(|t| cols[t]));
        if basis.insert(&w) {
            out.push(w);
        }
    }
    out
}

/// Infer a mask from the boundary lines that the unmasked construction leaves
/// empty away from the corners, on an `lx × ly` reference lattice.
pub fn derive_mask(polys: &FamilyPoly, lx: usize, ly: usize, opts: &BuildOptions) -> Result<MaskRule, BuildError> {
    let spec = LatticeSpec::new(lx, ly, MaskRule::full())?;
    let built = build_from_polys(polys, spec, opts)?;
    let present: BTreeSet<EdgeId> = built
        .code
        .labels()
        .iter()
        .filter_map(|l| match l {
            QubitLabel::Edge(e) => Some(*e),
            QubitLabel::Index(_) => None,
        })
        .collect();
    let terms: Vec<Monomial> = polys.f.terms().chain(polys.g.terms()).collect();
    let wx = terms.iter().map(|m| m.x).max().unwrap() - terms.iter().map(|m| m.x).min().unwrap();
    let wy = terms.iter().map(|m| m.y).max().unwrap() - terms.iter().map(|m| m.y).min().unwrap();
    let margin = wx.max(wy) + 2;
    let mut lines = Vec::new();
    for kind in [EdgeKind::H, EdgeKind::V] {
        for side in Side::ALL {
            for offset in 0..3u32 {
                let line = MaskLine { kind, side, offset };
                let (along, across) = match side {
                    Side::Left | Side::Right => (ly as i32, lx as i32),
                    Side::Bottom | Side::Top => (lx as i32, ly as i32),
                };
                if offset as i32 >= across / 2 || along <= 2 * margin {
                    break;
                }
                let empty = (margin..along - margin).all(|t| {
                    let (i, j) = match side {
                        Side::Left => (offset as i32, t),
                        Side::Right => (lx as i32 - 1 - offset as i32, t),
                        Side::Bottom => (t, offset as i32),
                        Side::Top => (t, ly as i32 - 1 - offset as i32),
                    };
                    !present.contains(&EdgeId { kind, i, j })
                });
                if !empty {
                    break;
                }
                lines.push(line);
            }
        }
    }
    Ok(MaskRule::from_lines(lines))
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} ({})", self.lx, self.ly, self.mask)
    }
}
