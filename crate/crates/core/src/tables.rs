//! Regeneration of the eight PMEPR comparison tables and diffing against the
//! published four-decimal values.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{zc_baseline, MSequenceParams};
use crate::dsa::{dsa_report_with, DsaPmeprReport, CONTIGUOUS, NON_CONTIGUOUS};
use crate::envelope::Sampling;
use crate::error::{Error, Result};
use crate::families::build_family;
use crate::seqcore::{ComplexSequence, FamilyDescriptor, FamilyKind};

const PUBLISHED: &str = include_str!("../data/published_tables.csv");

/// Printed precision of the published tables.
pub const PUBLISHED_DECIMALS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl TableId {
    pub const ALL: [TableId; 8] = [
        TableId::I,
        TableId::II,
        TableId::III,
        TableId::IV,
        TableId::V,
        TableId::VI,
        TableId::VII,
        TableId::VIII,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn roman(self) -> &'static str {
        ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"][self as usize]
    }

    pub fn title(self) -> &'static str {
        match self {
            TableId::I => "length-512 GDJ sequence, contiguous masks",
            TableId::II => "length-512 GDJ sequence, non-contiguous masks",
            TableId::III => "Family X, contiguous masks",
            TableId::IV => "Family Y, contiguous masks",
            TableId::V => "Family X, non-contiguous masks",
            TableId::VI => "Family Y, non-contiguous masks",
            TableId::VII => "baseline comparison, L = 32",
            TableId::VIII => "baseline comparison, L = 64",
        }
    }

    pub fn needs_baselines(self) -> bool {
        matches!(self, TableId::VII | TableId::VIII)
    }

    fn comparison_length(self) -> Option<usize> {
        match self {
            TableId::VII => Some(32),
            TableId::VIII => Some(64),
            _ => None,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

impl FromStr for TableId {
    type Err = Error;

    /// Accepts roman (`IV`) or arabic (`4`) numerals.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        TableId::ALL
            .into_iter()
            .find(|id| id.roman().eq_ignore_ascii_case(t) || id.number().to_string() == t)
            .ok_or_else(|| Error::Parse(format!("unknown table {s:?}, expected I..VIII or 1..8")))
    }
}

/// Parameters of the comparison sequences in tables VII and VIII.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub zc_root: Option<u64>,
    /// ZC base length; defaults to `L − 1`.
    pub zc_length: Option<u64>,
    pub mseq: Option<MSequenceParams>,
}

impl BaselineConfig {
    /// ZC root 25 and the pinned m-sequence registers for length `len`.
    pub fn table_default(len: usize) -> Self {
        Self {
            zc_root: Some(25),
            zc_length: None,
            mseq: MSequenceParams::table_default(len.trailing_zeros() as usize),
        }
    }

    fn zc(&self, len: usize) -> Result<ComplexSequence> {
        let root = self.zc_root.ok_or(Error::MissingBaseline("ZC root"))?;
        let base = self.zc_length.unwrap_or(len as u64 - 1);
        if base + 1 != len as u64 {
            return Err(Error::Precondition(format!(
                "ZC base length {base} does not extend to {len}"
            )));
        }
        zc_baseline(len, root)
    }

    fn m_sequence(&self, len: usize) -> Result<ComplexSequence> {
        let params = self
            .mseq
            .as_ref()
            .ok_or(Error::MissingBaseline("m-sequence register"))?;
        if 1usize << params.degree() != len {
            return Err(Error::Precondition(format!(
                "m-sequence of degree {} does not extend to {len}",
                params.degree()
            )));
        }
        params.baseline()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableMetadata {
    pub title: String,
    pub sampling: Sampling,
    pub tool_version: String,
    /// How the rows were generated, one entry per row.
    pub sources: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baselines: Option<BaselineConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableArtifact {
    pub table_id: TableId,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
    pub metadata: TableMetadata,
}

/// Column selector for a table.
#[derive(Clone, Copy)]
enum Column {
    Mask(u8),
    Contiguous,
    NonContiguous,
    All,
}

impl Column {
    fn name(self) -> String {
        match self {
            Column::Mask(s) => format!("A_{s}"),
            Column::Contiguous => "PMEPR_C".into(),
            Column::NonContiguous => "PMEPR_NC".into(),
            Column::All => "PMEPR_A".into(),
        }
    }

    fn read(self, r: &DsaPmeprReport) -> f64 {
        match self {
            Column::Mask(s) => r.value(s),
            Column::Contiguous => r.pmepr_c,
            Column::NonContiguous => r.pmepr_nc,
            Column::All => r.pmepr_a,
        }
    }
}

fn columns_for(id: TableId) -> Vec<Column> {
    match id {
        TableId::I | TableId::III | TableId::IV => CONTIGUOUS.map(Column::Mask).to_vec(),
        TableId::II | TableId::V | TableId::VI => NON_CONTIGUOUS.map(Column::Mask).to_vec(),
        TableId::VII | TableId::VIII => vec![
            Column::Mask(2),
            Column::Mask(9),
            Column::Mask(14),
            Column::Mask(15),
            Column::Contiguous,
            Column::NonContiguous,
            Column::All,
        ],
    }
}

/// The binary length-512 GDJ sequence with
/// `π = (7, 9, 6, 3, 1, 5, 4, 8, 2)` and zero linear part.
pub fn example_descriptor() -> FamilyDescriptor {
    FamilyDescriptor::new(
        FamilyKind::PlainGdj,
        2,
        vec![7, 9, 6, 3, 1, 5, 4, 8, 2],
        vec![0; 9],
        0,
    )
    .expect("valid descriptor")
}

/// First member `a` of the binary family with identity-like permutation.
pub fn family_sequence(kind: FamilyKind, m: usize) -> Result<ComplexSequence> {
    let desc = FamilyDescriptor::standard(kind, m, 2)?;
    Ok(build_family(&desc)?.a.sequence)
}

fn family_label(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::FamilyX => "Family X",
        FamilyKind::FamilyY => "Family Y",
        FamilyKind::PlainGdj => "GDJ",
    }
}

/// Rows of a table as `(label, source, sequence)` without evaluating PMEPR.
pub fn table_sequences(
    id: TableId,
    baselines: &BaselineConfig,
) -> Result<Vec<(String, String, ComplexSequence)>> {
    let family_rows = |kind: FamilyKind| {
        (3..=6)
            .map(|m| {
                Ok((
                    (1usize << m).to_string(),
                    format!("{}, m = {m}, q = 2", family_label(kind)),
                    family_sequence(kind, m)?,
                ))
            })
            .collect::<Result<Vec<_>>>()
    };
    match id {
        TableId::I | TableId::II => {
            let desc = example_descriptor();
            Ok(vec![(
                "a".into(),
                "GDJ, m = 9, q = 2, pi = (7,9,6,3,1,5,4,8,2)".into(),
                build_family(&desc)?.a.sequence,
            )])
        }
        TableId::III | TableId::V => family_rows(FamilyKind::FamilyX),
        TableId::IV | TableId::VI => family_rows(FamilyKind::FamilyY),
        TableId::VII | TableId::VIII => {
            let len = id.comparison_length().expect("comparison table");
            let m = len.trailing_zeros() as usize;
            let zc_root = baselines.zc_root.unwrap_or_default();
            let mseq = baselines.mseq.clone().unwrap_or(MSequenceParams {
                taps: vec![],
                init: vec![],
                mapping: Default::default(),
            });
            Ok(vec![
                (
                    "ZC".into(),
                    format!(
                        "Zadoff-Chu, root {zc_root}, length {}, extended by -1",
                        len - 1
                    ),
                    baselines.zc(len)?,
                ),
                (
                    "m-sequence".into(),
                    format!(
                        "m-sequence, taps {:?}, state {:?}, {:?}, extended by -1",
                        mseq.taps, mseq.init, mseq.mapping
                    ),
                    baselines.m_sequence(len)?,
                ),
                (
                    "Family X".into(),
                    format!("Family X, m = {m}, q = 2"),
                    family_sequence(FamilyKind::FamilyX, m)?,
                ),
                (
                    "Family Y".into(),
                    format!("Family Y, m = {m}, q = 2"),
                    family_sequence(FamilyKind::FamilyY, m)?,
                ),
            ])
        }
    }
}

/// Recomputes a table from scratch. Baseline parameters are only consulted
/// for tables VII and VIII, where missing ones are an error.
pub fn reproduce_table(
    id: TableId,
    sampling: Sampling,
    baselines: &BaselineConfig,
) -> Result<TableArtifact> {
    let columns = columns_for(id);
    let mut rows = Vec::new();
    let mut sources = Vec::new();
    for (label, source, seq) in table_sequences(id, baselines)? {
        let report = dsa_report_with(&seq, sampling)?;
        rows.push(TableRow {
            label,
            values: columns.iter().map(|c| c.read(&report)).collect(),
        });
        sources.push(source);
    }
    Ok(TableArtifact {
        table_id: id,
        columns: columns.iter().map(|c| c.name()).collect(),
        rows,
        metadata: TableMetadata {
            title: id.title().into(),
            sampling,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            sources,
            baselines: id.needs_baselines().then(|| baselines.clone()),
        },
    })
}

impl TableArtifact {
    pub fn value(&self, row: &str, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|n| n == column)?;
        let r = self.rows.iter().find(|r| r.label == row)?;
        r.values.get(c).copied()
    }

    /// Full precision CSV with a `label` column.
    pub fn to_csv(&self) -> String {
        let mut out = format!("label,{}\n", self.columns.join(","));
        for r in &self.rows {
            out.push_str(&r.label);
            for v in &r.values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Aligned text table at four decimals.
    pub fn to_pretty(&self) -> String {
        let mut cells = vec![std::iter::once("".to_string())
            .chain(self.columns.iter().cloned())
            .collect::<Vec<_>>()];
        for r in &self.rows {
            cells.push(
                std::iter::once(r.label.clone())
                    .chain(r.values.iter().map(|v| format!("{v:.PUBLISHED_DECIMALS$}")))
                    .collect(),
            );
        }
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|c| {
                cells
                    .iter()
                    .map(|row| row[c].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = format!("Table {}: {}\n", self.table_id, self.metadata.title);
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    if i == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// One published cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PublishedCell {
    pub table_id: TableId,
    pub row: String,
    pub column: String,
    pub value: f64,
}

/// Published values of one table in row-major order.
pub fn published_values(id: TableId) -> Vec<PublishedCell> {
    PUBLISHED
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .filter_map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let table_id: TableId = f[0].parse().expect("bundled table id");
            (table_id == id).then(|| PublishedCell {
                table_id,
                row: f[1].to_string(),
                column: f[2].to_string(),
                value: f[3].parse().expect("bundled value"),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellDiff {
    pub row: String,
    pub column: String,
    pub computed: f64,
    pub published: f64,
    /// `computed − published`.
    pub delta: f64,
    pub within_tolerance: bool,
}

/// Compares every published cell of the artifact's table. Cells missing from
/// the artifact are reported with `computed = NaN`.
pub fn diff_against_published(artifact: &TableArtifact, tolerance: f64) -> Vec<CellDiff> {
    published_values(artifact.table_id)
        .into_iter()
        .map(|cell| {
            let computed = artifact.value(&cell.row, &cell.column).unwrap_or(f64::NAN);
            let delta = computed - cell.value;
            CellDiff {
                row: cell.row,
                column: cell.column,
                computed,
                published: cell.value,
                delta,
                within_tolerance: delta.abs() <= tolerance,
            }
        })
        .collect()
}
