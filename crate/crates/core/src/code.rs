//! CSS codes: parameters, logical basis, membership predicates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::f2::{invert, BitMatrix, BitVec, F2Error, RowBasis};
use crate::lattice::EdgeId;

/// What a column of the check matrices stands for.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QubitLabel {
    Edge(EdgeId),
    Index(usize),
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitLabel::Edge(e) => write!(f, "{e}"),
            QubitLabel::Index(i) => write!(f, "q{i}"),
        }
    }
}

impl core::str::FromStr for QubitLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(i) = s.strip_prefix('q') {
            return i.parse().map(QubitLabel::Index).map_err(|_| format!("bad qubit label '{s}'"));
        }
        s.parse().map(QubitLabel::Edge).map_err(|_| format!("bad qubit label '{s}'"))
    }
}

/// Pauli type of a stabilizer or logical operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    pub fn other(self) -> Pauli {
        match self {
            Pauli::X => Pauli::Z,
            Pauli::Z => Pauli::X,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::X => "X",
            Pauli::Z => "Z",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    ColumnMismatch { hx: usize, hz: usize },
    LabelCount { labels: usize, n: usize },
    NonCommuting { x_row: usize, z_row: usize },
    EmptyColumn { qubit: usize },
    NoLogicals,
    Dimension(F2Error),
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::ColumnMismatch { hx, hz } => write!(f, "Hx has {hx} columns but Hz has {hz}"),
            CodeError::LabelCount { labels, n } => write!(f, "{labels} qubit labels for {n} qubits"),
            CodeError::NonCommuting { x_row, z_row } => {
                write!(f, "X check {x_row} anticommutes with Z check {z_row}")
            }
            CodeError::EmptyColumn { qubit } => write!(f, "qubit {qubit} is in no stabilizer"),
            CodeError::NoLogicals => f.write_str("no logical operators (k = 0)"),
            CodeError::Dimension(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CodeError {}

impl From<F2Error> for CodeError {
    fn from(e: F2Error) -> Self {
        CodeError::Dimension(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    hx: BitMatrix,
    hz: BitMatrix,
    labels: Vec<QubitLabel>,
    pub provenance: String,
}

impl CssCode {
    /// Validates column counts, labels, commutation and that every qubit is
    /// touched by some check.
    pub fn new(hx: BitMatrix, hz: BitMatrix, labels: Vec<QubitLabel>, provenance: impl Into<String>) -> Result<Self, CodeError> {
        let code = Self::new_unchecked_columns(hx, hz, labels, provenance)?;
        if let Some(q) = code.first_empty_column() {
            return Err(CodeError::EmptyColumn { qubit: q });
        }
        Ok(code)
    }

    /// Like [`CssCode::new`] but tolerates qubits outside every check.
    pub fn new_unchecked_columns(
        hx: BitMatrix,
        hz: BitMatrix,
        labels: Vec<QubitLabel>,
        provenance: impl Into<String>,
    ) -> Result<Self, CodeError> {
        if hx.cols() != hz.cols() {
            return Err(CodeError::ColumnMismatch { hx: hx.cols(), hz: hz.cols() });
        }
        if labels.len() != hx.cols() {
            return Err(CodeError::LabelCount { labels: labels.len(), n: hx.cols() });
        }
        let code = CssCode { hx, hz, labels, provenance: provenance.into() };
        if let Some((x_row, z_row)) = code.first_anticommuting_pair() {
            return Err(CodeError::NonCommuting { x_row, z_row });
        }
        Ok(code)
    }

    pub fn with_index_labels(hx: BitMatrix, hz: BitMatrix, provenance: impl Into<String>) -> Result<Self, CodeError> {
        let labels = (0..hx.cols()).map(QubitLabel::Index).collect();
        Self::new(hx, hz, labels, provenance)
    }

    fn first_anticommuting_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.hx.rows() {
            for j in 0..self.hz.rows() {
                if crate::f2::parity_and(self.hx.row_words(i), self.hz.row_words(j)) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn first_empty_column(&self) -> Option<usize> {
        let mut used = BitVec::zeros(self.n());
        for m in [&self.hx, &self.hz] {
            for r in 0..m.rows() {
                for c in m.row_ones(r) {
                    used.set(c, true);
                }
            }
        }
        (0..self.n()).find(|&q| !used.get(q))
    }

    pub fn n(&self) -> usize {
        self.hx.cols()
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    pub fn checks(&self, p: Pauli) -> &BitMatrix {
        match p {
            Pauli::X => &self.hx,
            Pauli::Z => &self.hz,
        }
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn commutes(&self) -> bool {
        self.first_anticommuting_pair().is_none()
    }

    pub fn max_check_weight(&self) -> usize {
        let w = |m: &BitMatrix| (0..m.rows()).map(|r| m.row_weight(r)).max().unwrap_or(0);
        w(&self.hx).max(w(&self.hz))
    }

    pub fn logical_dim(&self) -> usize {
        self.n() - self.hx.rank() - self.hz.rank()
    }

    /// Representatives of ker(H_other) modulo rowspace(H_p), independent.
    fn coset_representatives(&self, p: Pauli) -> Vec<BitVec> {
        let same = self.checks(p);
        let other = self.checks(p.other());
        let kernel = other.nullspace();
        let mut basis = RowBasis::from_matrix(same);
        let mut reps = Vec::new();
        for r in 0..kernel.rows() {
            let v = kernel.row(r);
            if basis.insert(&v) {
                reps.push(v);
            }
        }
        reps
    }

    /// k symplectic pairs `(X̄_i, Z̄_i)` with `X̄_i · Z̄_j = δ_ij`.
    pub fn logical_basis(&self) -> Vec<(BitVec, BitVec)> {
        let xs = self.coset_representatives(Pauli::X);
        let zs = self.coset_representatives(Pauli::Z);
        let k = xs.len();
        debug_assert_eq!(k, zs.len());
        if k == 0 {
            return Vec::new();
        }
        let mut pairing = BitMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                if xs[i].dot(&zs[j]) {
                    pairing.set(i, j, true);
                }
            }
        }
        // Z̄'_j = Σ_l (P⁻¹)_{l j} Z̄_l gives X̄_i · Z̄'_j = (P P⁻¹)_{ij}.
        let inv = invert(&pairing).expect("pairing of logical cosets is nondegenerate");
        let mut out = Vec::with_capacity(k);
        for (j, x) in xs.into_iter().enumerate() {
            let mut z = BitVec::zeros(self.n());
            for (l, zl) in zs.iter().enumerate() {
                if inv.get(l, j) {
                    z.xor_assign(zl);
                }
            }
            out.push((x, z));
        }
        out
    }

    /// Classify an operator given by its X- and Z-parts.
    pub fn classify(&self, x: &BitVec, z: &BitVec) -> Result<LogicalClass, CodeError> {
        if !self.hz.mul_vec(x)?.is_zero() || !self.hx.mul_vec(z)?.is_zero() {
            return Ok(LogicalClass::NotInNormalizer);
        }
        let x_trivial = self.hx.in_row_space(x)?;
        let z_trivial = self.hz.in_row_space(z)?;
        Ok(match (x_trivial, z_trivial) {
            (true, true) => LogicalClass::Trivial,
            (false, true) => LogicalClass::LogicalX,
            (true, false) => LogicalClass::LogicalZ,
            (false, false) => LogicalClass::LogicalMixed,
        })
    }

    /// Classify a pure X-type (`p = X`) or Z-type operator.
    pub fn classify_pure(&self, p: Pauli, v: &BitVec) -> Result<LogicalClass, CodeError> {
        let zero = BitVec::zeros(self.n());
        match p {
            Pauli::X => self.classify(v, &zero),
            Pauli::Z => self.classify(&zero, v),
        }
    }

    /// Drop the given qubits (columns) and any check left empty.
    pub fn puncture(&self, remove: &[usize]) -> Result<CssCode, CodeError> {
        let mut keep = alloc::vec![true; self.n()];
        for &q in remove {
            keep[q] = false;
        }
        let strip = |m: &BitMatrix| {
            let m = m.retain_columns(&keep);
            let rows: Vec<usize> = (0..m.rows()).filter(|&r| m.row_weight(r) > 0).collect();
            m.select_rows(&rows)
        };
        let labels = self.labels.iter().zip(&keep).filter(|(_, k)| **k).map(|(l, _)| *l).collect();
        CssCode::new_unchecked_columns(strip(&self.hx), strip(&self.hz), labels, self.provenance.clone())
    }

    pub fn summary(&self) -> String {
        format!("[[{},{},?]]", self.n(), self.logical_dim())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LogicalClass {
    Trivial,
    LogicalX,
    LogicalZ,
    /// Both parts nontrivial.
    LogicalMixed,
    NotInNormalizer,
}

impl LogicalClass {
    pub fn is_nontrivial_logical(self) -> bool {
        matches!(self, LogicalClass::LogicalX | LogicalClass::LogicalZ | LogicalClass::LogicalMixed)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Certainty {
    Exact,
    UpperBound,
    /// Only a lower bound is known: d > verified floor.
    BoundedBelow,
}

impl Certainty {
    /// The less informative of two certainties.
    pub fn weaker(self, o: Certainty) -> Certainty {
        self.max(o)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Certainty::Exact => "exact",
            Certainty::UpperBound => "upper_bound",
            Certainty::BoundedBelow => "bounded_below",
        }
    }

    pub fn parse(s: &str) -> Option<Certainty> {
        match s {
            "exact" => Some(Certainty::Exact),
            "upper_bound" => Some(Certainty::UpperBound),
            "bounded_below" => Some(Certainty::BoundedBelow),
            _ => None,
        }
    }
}

impl fmt::Display for Certainty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub certainty: Certainty,
}

impl CodeParams {
    pub fn metric(&self) -> f64 {
        metric(self.n, self.k, self.d)
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.certainty {
            Certainty::Exact => write!(f, "[[{},{},{}]]", self.n, self.k, self.d),
            Certainty::UpperBound => write!(f, "[[{},{},≤{}]]", self.n, self.k, self.d),
            Certainty::BoundedBelow => write!(f, "[[{},{},>{}]]", self.n, self.k, self.d),
        }
    }
}

/// `k·d²/n`.
pub fn metric(n: usize, k: usize, d: usize) -> f64 {
    assert!(n > 0);
    (k * d * d) as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Steane code as a small fixture.
    fn steane() -> CssCode {
        let h = BitMatrix::from_dense(&[&[1, 0, 1, 0, 1, 0, 1], &[0, 1, 1, 0, 0, 1, 1], &[0, 0, 0, 1, 1, 1, 1]]);
        CssCode::with_index_labels(h.clone(), h, "steane").unwrap()
    }

    #[test]
    fn steane_parameters() {
        let c = steane();
        assert_eq!(c.logical_dim(), 1);
        let basis = c.logical_basis();
        assert_eq!(basis.len(), 1);
        let (x, z) = &basis[0];
        assert!(x.dot(z));
        assert_eq!(c.classify_pure(Pauli::X, x).unwrap(), LogicalClass::LogicalX);
        assert_eq!(c.classify_pure(Pauli::Z, z).unwrap(), LogicalClass::LogicalZ);
        assert_eq!(c.classify(x, z).unwrap(), LogicalClass::LogicalMixed);
        assert_eq!(c.classify_pure(Pauli::X, &c.hx().row(0)).unwrap(), LogicalClass::Trivial);
        let single = BitVec::from_indices(7, [0]);
        assert_eq!(c.classify_pure(Pauli::X, &single).unwrap(), LogicalClass::NotInNormalizer);
    }

    #[test]
    fn rejects_bad_codes() {
        let hx = BitMatrix::from_dense(&[&[1, 0]]);
        let hz = BitMatrix::from_dense(&[&[1, 1]]);
        assert_eq!(CssCode::with_index_labels(hx, hz, "").unwrap_err(), CodeError::NonCommuting { x_row: 0, z_row: 0 });
        let hx = BitMatrix::from_dense(&[&[1, 1, 0]]);
        let hz = BitMatrix::from_dense(&[&[1, 1, 0]]);
        assert_eq!(CssCode::with_index_labels(hx, hz, "").unwrap_err(), CodeError::EmptyColumn { qubit: 2 });
        let hz = BitMatrix::zeros(0, 2);
        assert!(matches!(
            CssCode::new(BitMatrix::zeros(0, 3), hz, vec![], ""),
            Err(CodeError::ColumnMismatch { .. })
        ));
    }

    #[test]
    fn metric_examples() {
        assert_eq!(metric(288, 8, 12), 4.0);
        assert!((metric(188, 8, 9) - 3.45).abs() < 0.01);
        assert_eq!(metric(1, 1, 1), 1.0);
    }

    #[test]
    fn certainty_order() {
        assert_eq!(Certainty::Exact.weaker(Certainty::UpperBound), Certainty::UpperBound);
        assert_eq!(Certainty::parse("bounded_below"), Some(Certainty::BoundedBelow));
    }
}
