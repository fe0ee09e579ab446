//! JSON and CSV formats. Complex numbers are `[re, im]` pairs and floats are
//! written in shortest round-trip form, so a save/load cycle is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use mubforge_core::classes::{CommutingClass, Partition, ValidationReport};
use mubforge_core::entropy::{BoundSet, SweepResult};
use mubforge_core::mub::{Basis, CycleReport, MubSet};
use mubforge_core::pauli::{GammaSet, PauliTerm};
use mubforge_core::transform::{CycleSpec, DenseUnitary};
use mubforge_core::wigner::PhaseSpaceRow;
use mubforge_core::{CMatrix, C64};
use serde::{Deserialize, Serialize};

pub type Complex = [f64; 2];

fn pack(z: &C64) -> Complex {
    [z.re, z.im]
}

fn unpack(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub spec: Vec<Vec<usize>>,
    pub classes: Vec<Vec<String>>,
}

impl PartitionFile {
    pub fn from_partition(p: &Partition) -> Self {
        Self {
            n: p.n,
            l: p.l,
            spec: p.spec.groups().to_vec(),
            classes: p.classes.iter().map(|c| c.members.iter().map(|m| m.to_string()).collect()).collect(),
        }
    }

    pub fn to_partition(&self, gs: &GammaSet) -> Result<Partition> {
        let spec = CycleSpec::new(self.n, self.spec.clone())?;
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let members = c
                    .iter()
                    .map(|t| t.parse::<PauliTerm>().with_context(|| format!("term {t:?}")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CommutingClass::new(gs, members)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition { n: self.n, l: self.l, spec, classes })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub label: usize,
    pub vectors: Vec<Vec<Complex>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub signs: Vec<Vec<i8>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleReportFile {
    pub worst_residual: f64,
    pub worst_overlap: f64,
    pub permutations: Vec<Vec<usize>>,
    pub closure: Vec<usize>,
}

impl From<&CycleReport> for CycleReportFile {
    fn from(r: &CycleReport) -> Self {
        Self {
            worst_residual: r.worst_residual,
            worst_overlap: r.worst_overlap,
            permutations: r.permutations.clone(),
            closure: r.closure.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MubSetFile {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub bases: Vec<BasisFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias_deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleReportFile>,
}

impl MubSetFile {
    pub fn from_set(ms: &MubSet, cycle: Option<&CycleReport>) -> Self {
        Self {
            d: ms.dim(),
            l: ms.len(),
            bases: ms
                .bases
                .iter()
                .map(|b| BasisFile {
                    label: b.label,
                    vectors: b.vectors().iter().map(|v| v.iter().map(pack).collect()).collect(),
                    signs: b.signs.clone(),
                })
                .collect(),
            partition: ms.partition.as_ref().map(PartitionFile::from_partition),
            bias_deviation: Some(ms.bias_deviation()),
            cycle: cycle.map(CycleReportFile::from),
        }
    }

    /// Rebuilds the set, checking orthonormality and unbiasedness again.
    pub fn to_set(&self, unitary: Option<DenseUnitary>) -> Result<MubSet> {
        let bases = self
            .bases
            .iter()
            .map(|b| {
                let vectors = b.vectors.iter().map(|v| v.iter().map(unpack).collect()).collect();
                let mut basis = Basis::new(vectors, b.label)?;
                basis.signs = b.signs.clone();
                Ok(basis)
            })
            .collect::<Result<Vec<_>>>()?;
        let partition = match &self.partition {
            Some(p) => Some(p.to_partition(&mubforge_core::pauli::build_gamma_generators(p.n)?)?),
            None => None,
        };
        Ok(MubSet::new(bases, unitary, partition)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<Complex>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: m.data().iter().map(pack).collect() }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        Ok(CMatrix::from_row_major(self.rows, self.cols, self.data.iter().map(unpack).collect())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationFile {
    pub ok: bool,
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub sizes_ok: bool,
    pub hermitian: bool,
    pub singletons_ok: bool,
    pub worst_commutator: Option<f64>,
    pub negative_images: usize,
    pub p3_failures: Vec<(usize, usize)>,
    pub error: Option<String>,
    pub bias_deviation: Option<f64>,
    pub cycle_residual: Option<f64>,
}

impl ValidationFile {
    pub fn new(r: &ValidationReport, bias: Option<f64>, cycle: Option<f64>) -> Self {
        Self {
            ok: r.ok(),
            p1: r.p1,
            p2: r.p2,
            p3: r.p3,
            sizes_ok: r.sizes_ok,
            hermitian: r.hermitian,
            singletons_ok: r.singletons_ok,
            worst_commutator: r.worst_commutator,
            negative_images: r.negative_images,
            p3_failures: r.p3_failures.clone(),
            error: r.error.as_ref().map(|e| e.to_string()),
            bias_deviation: bias,
            cycle_residual: cycle,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub const BASES_FILE: &str = "bases.json";
pub const PARTITION_FILE: &str = "partition.json";
pub const UNITARY_FILE: &str = "unitary.json";
pub const REPORT_FILE: &str = "report.json";

/// Loads `bases.json` from a directory (with `unitary.json` when present),
/// or a single bases file.
pub fn load_set(path: &Path) -> Result<MubSet> {
    let (bases, unitary) = if path.is_dir() {
        (path.join(BASES_FILE), Some(path.join(UNITARY_FILE)).filter(|p| p.exists()))
    } else {
        (path.to_path_buf(), None)
    };
    let file: MubSetFile = read_json(&bases)?;
    let u = match unitary {
        Some(p) => Some(DenseUnitary::new(read_json::<MatrixFile>(&p)?.to_matrix()?)?),
        None => None,
    };
    file.to_set(u)
}

pub fn sweep_csv_header() -> &'static str {
    "b,lambda_max,minus_log2\n"
}

/// One sweep row; `lambda` is reported in the requested normalization while
/// `minus_log2` always refers to the mean form.
pub fn sweep_csv_row(out: &mut String, b: &[usize], lambda_mean: f64, scale: f64) {
    let s: Vec<String> = b.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "{},{},{}", s.join("-"), lambda_mean * scale, -lambda_mean.log2());
}

pub fn sweep_summary_csv(r: &SweepResult, scale: f64) -> String {
    let mut out = String::from(sweep_csv_header());
    sweep_csv_row(&mut out, &r.best, r.lambda, scale);
    out
}

pub fn bounds_csv(rows: &[(usize, usize, BoundSet)]) -> String {
    let mut out = String::from("L,d,small_L,large_L,best\n");
    for (l, d, b) in rows {
        let _ = writeln!(out, "{l},{d},{},{},{}", b.small_l, b.large_l, b.best);
    }
    out
}

pub fn phase_space_csv(rows: &[PhaseSpaceRow]) -> String {
    let mut out = String::from("alpha_x,alpha_y,lambda_max,W_max\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.point.0, r.point.1, r.lambda_max, r.w_max);
    }
    out
}
