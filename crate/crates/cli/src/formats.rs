//! alist and MatrixMarket (coordinate) text formats for binary matrices.

use std::fmt::Write as _;

use anyhow::{bail, ensure, Context, Result};

use planar_qldpc::BitMatrix;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Alist,
    MatrixMarket,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Alist => "alist",
            Format::MatrixMarket => "mtx",
        }
    }

    pub fn write(self, m: &BitMatrix) -> String {
        match self {
            Format::Alist => write_alist(m),
            Format::MatrixMarket => write_mtx(m),
        }
    }

    pub fn read(self, text: &str) -> Result<BitMatrix> {
        match self {
            Format::Alist => read_alist(text),
            Format::MatrixMarket => read_mtx(text),
        }
    }
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alist" => Ok(Format::Alist),
            "mtx" | "mm" | "matrixmarket" => Ok(Format::MatrixMarket),
            _ => bail!("unknown matrix format '{s}' (alist, mtx)"),
        }
    }
}

/// MacKay's alist: columns are variable nodes, rows are checks, indices 1-based
/// and zero-padded to the maximum degree.
pub fn write_alist(m: &BitMatrix) -> String {
    let rows = m.sparse_rows();
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); m.cols()];
    for (r, row) in rows.iter().enumerate() {
        for &c in row {
            cols[c].push(r);
        }
    }
    let maxc = cols.iter().map(Vec::len).max().unwrap_or(0);
    let maxr = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(s, "{} {}", m.cols(), m.rows()).unwrap();
    writeln!(s, "{maxc} {maxr}").unwrap();
    writeln!(s, "{}", join(&mut cols.iter().map(Vec::len))).unwrap();
    writeln!(s, "{}", join(&mut rows.iter().map(Vec::len))).unwrap();
    for (list, width) in [(&cols, maxc), (&rows, maxr)] {
        for l in list.iter() {
            writeln!(s, "{}", join(&mut l.iter().map(|x| x + 1).chain(std::iter::repeat(0)).take(width))).unwrap();
        }
    }
    s
}

pub fn read_alist(text: &str) -> Result<BitMatrix> {
    let mut nums = text.split_whitespace().map(|t| t.parse::<usize>().with_context(|| format!("bad alist token '{t}'")));
    let mut next = || nums.next().unwrap_or_else(|| bail!("alist ended early"));
    let (n, m) = (next()?, next()?);
    let (maxc, maxr) = (next()?, next()?);
    let colw: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
    let roww: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
    let mut from_cols = vec![Vec::new(); m];
    for (c, &w) in colw.iter().enumerate() {
        let entries: Vec<usize> = (0..maxc).map(|_| next()).collect::<Result<_>>()?;
        ensure!(entries[w..].iter().all(|&x| x == 0), "column {c}: padding is not zero");
        for &r in &entries[..w] {
            ensure!((1..=m).contains(&r), "column {c}: row index {r} out of range");
            from_cols[r - 1].push(c);
        }
    }
    let mut rows = Vec::with_capacity(m);
    for (r, &w) in roww.iter().enumerate() {
        let entries: Vec<usize> = (0..maxr).map(|_| next()).collect::<Result<_>>()?;
        ensure!(entries[w..].iter().all(|&x| x == 0), "row {r}: padding is not zero");
        let mut row: Vec<usize> = entries[..w].iter().map(|&c| c.checked_sub(1).filter(|&c| c < n)).collect::<Option<_>>().with_context(|| format!("row {r}: bad column index"))?;
        row.sort_unstable();
        let mut byc = from_cols[r].clone();
        byc.sort_unstable();
        ensure!(row == byc, "row {r} disagrees with the column lists");
        rows.push(row);
    }
    Ok(BitMatrix::from_sparse_rows(n, &rows))
}

pub fn write_mtx(m: &BitMatrix) -> String {
    let rows = m.sparse_rows();
    let nnz: usize = rows.iter().map(Vec::len).sum();
    let mut s = String::from("%%MatrixMarket matrix coordinate integer general\n");
    writeln!(s, "{} {} {}", m.rows(), m.cols(), nnz).unwrap();
    for (r, row) in rows.iter().enumerate() {
        for &c in row {
            writeln!(s, "{} {} 1", r + 1, c + 1).unwrap();
        }
    }
    s
}

pub fn read_mtx(text: &str) -> Result<BitMatrix> {
    let mut lines = text.lines();
    let header = lines.next().context("empty MatrixMarket file")?;
    let h = header.to_ascii_lowercase();
    ensure!(h.starts_with("%%matrixmarket matrix coordinate"), "not a coordinate MatrixMarket file");
    ensure!(h.contains("general"), "only general (unsymmetric) matrices are supported");
    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let dims: Vec<usize> = body.next().context("missing size line")?.split_whitespace().map(str::parse).collect::<Result<_, _>>()?;
    ensure!(dims.len() == 3, "size line needs rows, cols, nnz");
    let (nr, nc, nnz) = (dims[0], dims[1], dims[2]);
    let mut m = BitMatrix::zeros(nr, nc);
    let mut count = 0;
    for line in body {
        let t: Vec<&str> = line.split_whitespace().collect();
        ensure!(t.len() >= 2, "bad entry line '{line}'");
        let (r, c): (usize, usize) = (t[0].parse()?, t[1].parse()?);
        ensure!((1..=nr).contains(&r) && (1..=nc).contains(&c), "entry ({r}, {c}) out of range");
        // Values are taken mod 2; repeated entries add.
        let v: i64 = t.get(2).map(|s| s.parse()).transpose()?.unwrap_or(1);
        if v.rem_euclid(2) == 1 {
            m.flip(r - 1, c - 1);
        }
        count += 1;
    }
    ensure!(count == nnz, "expected {nnz} entries, found {count}");
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BitMatrix {
        BitMatrix::from_dense(&[&[1, 0, 1, 0, 1, 0, 1], &[0, 1, 1, 0, 0, 1, 1], &[0, 0, 0, 1, 1, 1, 1], &[0, 0, 0, 0, 0, 0, 0]])
    }

    #[test]
    fn alist_round_trip() {
        let m = sample();
        let text = write_alist(&m);
        assert!(text.starts_with("7 4\n"));
        assert_eq!(read_alist(&text).unwrap(), m);
    }

    #[test]
    fn mtx_round_trip() {
        let m = sample();
        assert_eq!(read_mtx(&write_mtx(&m)).unwrap(), m);
    }

    #[test]
    fn inconsistent_alist_is_rejected() {
        let bad = "2 1\n1 2\n1 0\n2\n1\n0\n1 2\n";
        assert!(read_alist(bad).is_err());
    }
}
