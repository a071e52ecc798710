//! CSV rows for sweeps and searches, plus the resumable checkpoint.
//!
//! The header repeats `d` (exponent, then distance), so records are handled
//! by position rather than by name.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{ensure, Context, Result};

use planar_qldpc::search::{OptimalTable, SweepRow};
use planar_qldpc::Certainty;

pub const HEADER: [&str; 12] = ["family", "a", "b", "c", "d", "Lx", "Ly", "n", "k", "d", "certainty", "metric"];

pub fn record(r: &SweepRow) -> Vec<String> {
    let e = |i: usize| r.exps.map(|x| x[i].to_string()).unwrap_or_default();
    let (d, cert, metric) = match (&r.error, r.d) {
        (Some(_), _) | (None, None) => (String::new(), "failed".to_string(), String::new()),
        (None, Some(d)) => (d.to_string(), r.certainty.to_string(), format!("{:.4}", r.metric)),
    };
    vec![r.family.clone(), e(0), e(1), e(2), e(3), r.lx.to_string(), r.ly.to_string(), r.n.to_string(), r.k.to_string(), d, cert, metric]
}

pub fn parse_record(rec: &csv::StringRecord) -> Result<SweepRow> {
    ensure!(rec.len() == HEADER.len(), "expected {} fields, got {}", HEADER.len(), rec.len());
    let num = |i: usize| -> Result<usize> { rec[i].parse().with_context(|| format!("field {} = '{}'", HEADER[i], &rec[i])) };
    let exps = if rec[1].is_empty() {
        None
    } else {
        let mut e = [0i32; 4];
        for (i, x) in e.iter_mut().enumerate() {
            *x = rec[1 + i].parse()?;
        }
        Some(e)
    };
    let failed = &rec[10] == "failed";
    Ok(SweepRow {
        family: rec[0].to_string(),
        exps,
        lx: num(5)?,
        ly: num(6)?,
        n: num(7)?,
        k: num(8)?,
        d: if failed { None } else { Some(num(9)?) },
        certainty: if failed { Certainty::BoundedBelow } else { Certainty::parse(&rec[10]).context("bad certainty")? },
        metric: if failed { 0.0 } else { rec[11].parse()? },
        error: failed.then(|| "failed".to_string()),
    })
}

pub fn write_rows(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_path(path).with_context(|| format!("reading {}", path.display()))?;
    rd.records().map(|r| parse_record(&r?)).collect()
}

/// Append-only checkpoint: completed family ids, and their rows in a CSV
/// beside it (`<path>.rows.csv`).
pub struct Checkpoint {
    ids: File,
    rows: csv::Writer<File>,
}

impl Checkpoint {
    /// Open (or create) and return the rows already recorded.
    pub fn open(path: &Path) -> Result<(Self, Vec<SweepRow>)> {
        let rows_path = path.with_extension("rows.csv");
        let done: BTreeSet<String> = if path.exists() {
            BufReader::new(File::open(path)?).lines().collect::<std::io::Result<_>>()?
        } else {
            BTreeSet::new()
        };
        let mut rows = Vec::new();
        if rows_path.exists() {
            // Rows of a family that never completed are dropped and redone.
            rows = read_rows(&rows_path)?.into_iter().filter(|r| done.contains(&r.family)).collect();
        }
        write_rows(&rows_path, &rows)?;
        let ids = OpenOptions::new().create(true).append(true).open(path)?;
        let rows_file = OpenOptions::new().append(true).open(&rows_path)?;
        let rows_w = csv::WriterBuilder::new().has_headers(false).from_writer(rows_file);
        Ok((Checkpoint { ids, rows: rows_w }, rows))
    }

    pub fn record_family(&mut self, id: &str, rows: &[SweepRow]) -> Result<()> {
        for r in rows {
            self.rows.write_record(record(r))?;
        }
        self.rows.flush()?;
        writeln!(self.ids, "{id}")?;
        self.ids.flush()?;
        Ok(())
    }
}

/// Human-readable grid; empty cells are marked budget-limited.
pub fn format_table(t: &OptimalTable) -> String {
    let mut s = String::new();
    s.push_str("k\\d");
    for d in &t.ds {
        s.push_str(&format!("\t{d}"));
    }
    s.push('\n');
    for &k in &t.ks {
        s.push_str(&k.to_string());
        for &d in &t.ds {
            match t.get(k, d) {
                Some(c) => s.push_str(&format!("\t{} ({} {}x{})", c.n, c.family, c.lx, c.ly)),
                None => s.push_str("\tbudget-limited"),
            }
        }
        s.push('\n');
    }
    s
}
