//! Versioned TOML code manifests: sparse check rows, labels, parameters,
//! certificate and provenance.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use planar_qldpc::distance::DistanceReport;
use planar_qldpc::graft::RemovalRecord;
use planar_qldpc::lattice::LatticeCode;
use planar_qldpc::{BitMatrix, BitVec, Certainty, CssCode, Pauli, QubitLabel};

pub const FORMAT: &str = "pqldpc-code";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    pub code: CodeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graft: Option<GraftSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Source {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub f: String,
    pub g: String,
    pub lx: usize,
    pub ly: usize,
    pub mask: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CodeSection {
    pub n: usize,
    pub k: usize,
    pub labels: Vec<String>,
    pub hx: Vec<Vec<usize>>,
    pub hz: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Params {
    pub d: usize,
    pub certainty: String,
    pub metric: f64,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_z: Option<usize>,
    /// No logical of weight ≤ this exists on the weaker side.
    pub verified_floor: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateRecord {
    pub side: String,
    pub weight: usize,
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraftSection {
    pub input_n: usize,
    pub input_d: usize,
    pub trials: u64,
    pub seed: u64,
    pub best_trial: u64,
    pub log: Vec<RemovalEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RemovalEntry {
    pub qubit: String,
    pub label: String,
    pub removed_rows: Vec<usize>,
    pub added_rows: Vec<usize>,
}

impl From<&RemovalRecord> for RemovalEntry {
    fn from(r: &RemovalRecord) -> Self {
        RemovalEntry { qubit: r.qubit.to_string(), label: r.label.to_string(), removed_rows: r.removed_rows.clone(), added_rows: r.added_rows.clone() }
    }
}

pub fn parse_pauli(s: &str) -> Result<Pauli> {
    match s {
        "X" | "x" => Ok(Pauli::X),
        "Z" | "z" => Ok(Pauli::Z),
        _ => bail!("bad Pauli label '{s}'"),
    }
}

impl Manifest {
    pub fn from_code(code: &CssCode) -> Self {
        Manifest {
            format: FORMAT.into(),
            version: VERSION,
            provenance: code.provenance.clone(),
            source: None,
            code: CodeSection {
                n: code.n(),
                k: code.logical_dim(),
                labels: code.labels().iter().map(|l| l.to_string()).collect(),
                hx: code.hx().sparse_rows(),
                hz: code.hz().sparse_rows(),
            },
            params: None,
            certificate: None,
            graft: None,
        }
    }

    pub fn from_lattice(lc: &LatticeCode, family: Option<&str>) -> Self {
        let mut m = Self::from_code(&lc.code);
        m.source = Some(Source {
            family: family.map(str::to_string),
            f: lc.polys.f.to_string(),
            g: lc.polys.g.to_string(),
            lx: lc.spec.lx,
            ly: lc.spec.ly,
            mask: lc.spec.mask.to_string(),
        });
        m
    }

    /// Rebuild the code, re-checking shape, labels and commutation.
    pub fn to_code(&self) -> Result<CssCode> {
        if self.format != FORMAT {
            bail!("not a code manifest (format '{}')", self.format);
        }
        if self.version != VERSION {
            bail!("unsupported manifest version {}", self.version);
        }
        let n = self.code.n;
        for row in self.code.hx.iter().chain(&self.code.hz) {
            if let Some(&c) = row.iter().find(|&&c| c >= n) {
                bail!("column {c} out of range for n = {n}");
            }
        }
        let labels = self
            .code
            .labels
            .iter()
            .map(|s| s.parse::<QubitLabel>().map_err(anyhow::Error::msg))
            .collect::<Result<Vec<_>>>()?;
        let hx = BitMatrix::from_sparse_rows(n, &self.code.hx);
        let hz = BitMatrix::from_sparse_rows(n, &self.code.hz);
        let code = CssCode::new_unchecked_columns(hx, hz, labels, self.provenance.clone()).map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(code)
    }

    pub fn set_report(&mut self, r: &DistanceReport, method: &str) {
        let floor = r.x.verified_floor.min(r.z.verified_floor);
        self.params = Some(Params {
            d: r.params.d,
            certainty: r.params.certainty.to_string(),
            metric: r.params.metric(),
            method: method.into(),
            d_x: r.x.value,
            d_z: r.z.value,
            verified_floor: floor,
        });
        self.certificate = r.certificate().map(|c| CertificateRecord { side: c.side.to_string(), weight: c.weight(), support: c.support.ones().collect() });
    }

    pub fn certainty(&self) -> Option<Certainty> {
        self.params.as_ref().and_then(|p| Certainty::parse(&p.certainty))
    }

    pub fn certificate_vec(&self) -> Result<Option<(Pauli, BitVec)>> {
        let Some(c) = &self.certificate else { return Ok(None) };
        if let Some(&q) = c.support.iter().find(|&&q| q >= self.code.n) {
            bail!("certificate qubit {q} out of range");
        }
        Ok(Some((parse_pauli(&c.side)?, BitVec::from_indices(self.code.n, c.support.iter().copied()))))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self)?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Problems found by [`verify`], empty when the manifest checks out.
pub fn verify(m: &Manifest) -> Result<Vec<String>> {
    let code = m.to_code()?;
    let mut problems = Vec::new();
    if !code.commutes() {
        problems.push("checks do not commute".to_string());
    }
    let k = code.logical_dim();
    if k != m.code.k {
        problems.push(format!("k is {k}, manifest says {}", m.code.k));
    }
    if let (Some(p), Some((side, v))) = (&m.params, m.certificate_vec()?) {
        let class = code.classify_pure(side, &v).map_err(|e| anyhow::anyhow!("{e}"))?;
        if !class.is_nontrivial_logical() {
            problems.push(format!("certificate is not a logical ({class:?})"));
        }
        if v.weight() != p.d && m.certainty() != Some(Certainty::BoundedBelow) {
            problems.push(format!("certificate weight {} differs from d = {}", v.weight(), p.d));
        }
    }
    Ok(problems)
}
