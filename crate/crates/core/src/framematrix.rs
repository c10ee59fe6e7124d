//! The 0/1 selection matrix of a frame in the flat, and the structural
//! properties it has for every irreducible space other than `SL(3,R)`.
//!
//! Rows are frame vectors `v_i`; columns are the root-space basis vectors `b_j`
//! of the orthocomplement of the flat, one per (positive root, multiplicity
//! slot). Entry `(i, j)` is 1 iff `b_j ∈ Q_i`, i.e. iff the root of column `j`
//! does not vanish on `v_i`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{is_zero_vec, parse_q, rank, RatVec};
use crate::rootdata::{KType, SpaceDescriptor};

/// A list of vectors in the flat of `space`, with exact rational entries.
#[derive(Debug, Clone)]
pub struct FrameSpec<'a> {
    pub space: &'a SpaceDescriptor,
    pub vectors: Vec<RatVec>,
}

impl<'a> FrameSpec<'a> {
    pub fn new(space: &'a SpaceDescriptor, vectors: Vec<RatVec>) -> Result<Self> {
        for v in &vectors {
            space.rootsys.check_flat_vector(v)?;
            if is_zero_vec(v) {
                return Err(Error::ZeroVector);
            }
        }
        Ok(FrameSpec { space, vectors })
    }

    /// Parses the frame file format: a JSON array of arrays of rational strings,
    /// e.g. `[["1","1","1","-3"], ...]`. Bare JSON integers are accepted too.
    pub fn from_json(space: &'a SpaceDescriptor, text: &str) -> Result<Self> {
        let raw: Vec<Vec<serde_json::Value>> = serde_json::from_str(text)?;
        let vectors = raw
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| match x {
                        serde_json::Value::String(s) => parse_q(s),
                        serde_json::Value::Number(n) if n.is_i64() => Ok(crate::rational::q(n.as_i64().unwrap())),
                        other => Err(Error::Parse(format!("frame entry {other} is not a rational string"))),
                    })
                    .collect::<Result<RatVec>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FrameSpec::new(space, vectors)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Exact rank of the frame equals `min(k, rank)`.
    pub fn spans(&self) -> bool {
        rank(&self.vectors) == self.vectors.len().min(self.space.rank)
    }
}

/// A plain 0/1 matrix; also the input format of the matcher.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u8>>,
}

impl BinaryMatrix {
    pub fn new(entries: Vec<Vec<u8>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let m = BinaryMatrix { rows, cols, entries };
        m.check()?;
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: BinaryMatrix = serde_json::from_str(text).map_err(|e| Error::MalformedMatrix(e.to_string()))?;
        m.check()?;
        Ok(m)
    }

    pub fn check(&self) -> Result<()> {
        if self.entries.len() != self.rows {
            return Err(Error::MalformedMatrix(format!(
                "declared {} rows, found {}",
                self.rows,
                self.entries.len()
            )));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(Error::MalformedMatrix(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    self.cols
                )));
            }
            if let Some(x) = row.iter().find(|&&x| x > 1) {
                return Err(Error::MalformedMatrix(format!("entry {x} in row {} is not 0/1", i + 1)));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i][j] == 1
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.entries[i].iter().filter(|&&x| x == 1).count()
    }

    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j)).collect()
    }

    pub fn column_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> BinaryMatrix {
        let mut entries = vec![vec![0u8; self.cols]; self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries[row_perm[i]][col_perm[j]] = self.entries[i][j];
            }
        }
        BinaryMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnLabel {
    pub root: String,
    /// Index into `rootsys.positives`.
    pub root_index: usize,
    /// 1-based multiplicity slot.
    pub slot: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMatrix {
    pub grid: BinaryMatrix,
    pub col_labels: Vec<ColumnLabel>,
    /// Frame index of each row.
    pub row_labels: Vec<usize>,
}

#[derive(Serialize)]
struct SelectionMatrixJson<'a> {
    rows: usize,
    cols: usize,
    entries: &'a [Vec<u8>],
    col_labels: Vec<String>,
}

impl SelectionMatrix {
    pub fn rows(&self) -> usize {
        self.grid.rows
    }

    pub fn cols(&self) -> usize {
        self.grid.cols
    }

    pub fn label(&self, j: usize) -> String {
        let l = &self.col_labels[j];
        format!("{}#{}", l.root, l.slot)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SelectionMatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            entries: &self.grid.entries,
            col_labels: (0..self.cols()).map(|j| self.label(j)).collect(),
        })
        .expect("plain data serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} x {}\n", self.rows(), self.cols()));
        out.push_str("# columns: ");
        out.push_str(&(0..self.cols()).map(|j| self.label(j)).collect::<Vec<_>>().join(" "));
        out.push('\n');
        for row in &self.grid.entries {
            out.push_str(&row.iter().map(u8::to_string).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
        out
    }
}

/// Column order: roots sorted lexicographically by their sparse
/// `(index, coefficient)` support, then slots ascending.
pub fn column_order(space: &SpaceDescriptor) -> Vec<ColumnLabel> {
    let positives = &space.rootsys.positives;
    let mut idx: Vec<usize> = (0..positives.len()).collect();
    idx.sort_by(|&a, &b| positives[a].support().cmp(positives[b].support()));
    idx.into_iter()
        .flat_map(|r| {
            (1..=positives[r].multiplicity).map(move |slot| ColumnLabel {
                root: positives[r].label(),
                root_index: r,
                slot,
            })
        })
        .collect()
}

pub fn build_matrix(frame: &FrameSpec<'_>) -> Result<SelectionMatrix> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let sys = &frame.space.rootsys;
    for v in &frame.vectors {
        sys.check_flat_vector(v)?;
    }
    let col_labels = column_order(frame.space);
    let entries = frame
        .vectors
        .iter()
        .map(|v| {
            let per_root: Vec<u8> = sys
                .positives
                .iter()
                .map(|r| u8::from(!r.eval_unchecked(v).is_zero()))
                .collect();
            col_labels.iter().map(|l| per_root[l.root_index]).collect()
        })
        .collect::<Vec<Vec<u8>>>();
    Ok(SelectionMatrix {
        grid: BinaryMatrix {
            rows: entries.len(),
            cols: col_labels.len(),
            entries,
        },
        col_labels,
        row_labels: (0..frame.len()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub id: u8,
    pub statement: &'static str,
    pub holds: bool,
    /// Offending column (property 1), row (2, 3) or row pair (4, 5), 0-based.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub rank: usize,
    pub row_weights: Vec<usize>,
    pub verdicts: Vec<PropertyVerdict>,
    /// Pairs of distinct rows with identical support (property 4's hypothesis).
    pub equal_row_pairs: Vec<(usize, usize)>,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn verdict(&self, id: u8) -> &PropertyVerdict {
        &self.verdicts[usize::from(id) - 1]
    }
}

fn verdict(id: u8, statement: &'static str, witness: Option<Vec<usize>>) -> PropertyVerdict {
    PropertyVerdict {
        id,
        statement,
        holds: witness.is_none(),
        witness,
    }
}

/// Checks the five structural properties of `a` with `n = space.rank`.
pub fn verify_properties(a: &BinaryMatrix, space: &SpaceDescriptor) -> Result<PropertyReport> {
    space.ensure_allowed()?;
    a.check()?;
    let n = space.rank;
    let weights: Vec<usize> = (0..a.rows).map(|i| a.row_weight(i)).collect();
    let pairs = || (0..a.rows).flat_map(|i| (i + 1..a.rows).map(move |j| (i, j)));

    let p1 = (0..a.cols).find(|&j| a.column_weight(j) == 0).map(|j| vec![j]);
    let p2 = (0..a.rows).find(|&i| weights[i] < n).map(|i| vec![i]);
    let p3 = if space.ktype == KType::SoNPlus1 {
        None
    } else {
        (0..a.rows).find(|&i| weights[i] + 2 < 2 * n).map(|i| vec![i])
    };
    let equal_row_pairs: Vec<(usize, usize)> = pairs().filter(|&(i, j)| a.entries[i] == a.entries[j]).collect();
    let p4 = equal_row_pairs
        .iter()
        .find(|&&(i, _)| weights[i] + 1 < 2 * n)
        .map(|&(i, j)| vec![i, j]);
    let p5 = pairs()
        .filter(|&(i, j)| weights[i] + 2 < 2 * n && weights[j] + 2 < 2 * n)
        .find(|&(i, j)| (0..a.cols).filter(|&k| a.get(i, k) && a.get(j, k)).count() > 1)
        .map(|(i, j)| vec![i, j]);

    Ok(PropertyReport {
        rank: n,
        row_weights: weights,
        verdicts: vec![
            verdict(1, "every column has a 1", p1),
            verdict(2, "|u_i| >= n", p2),
            verdict(3, "|u_i| >= 2n-2 unless K = SO(n+1)", p3),
            verdict(4, "u_i = u_j implies |u_i| >= 2n-1", p4),
            verdict(5, "rows with |u| < 2n-2 share at most one column", p5),
        ],
        equal_row_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qv;
    use crate::rootdata::lookup;

    fn sl4() -> SpaceDescriptor {
        lookup("SL(4,R)").unwrap()
    }

    fn grid(space: &SpaceDescriptor, rows: &[&[i64]]) -> SelectionMatrix {
        let frame = FrameSpec::new(space, rows.iter().map(|r| qv(r)).collect()).unwrap();
        build_matrix(&frame).unwrap()
    }

    #[test]
    fn sl4_columns_are_ordered_by_pair() {
        let labels: Vec<String> = column_order(&sl4()).into_iter().map(|l| l.root).collect();
        assert_eq!(labels, ["e1-e2", "e1-e3", "e1-e4", "e2-e3", "e2-e4", "e3-e4"]);
    }

    #[test]
    fn generic_frame_gives_all_ones() {
        let s = sl4();
        let m = grid(&s, &[&[1, 2, 3, -6], &[1, -1, 2, -2], &[5, 1, -2, -4]]);
        assert!(m.grid.entries.iter().all(|r| r.iter().all(|&x| x == 1)));
        assert!(verify_properties(&m.grid, &s).unwrap().all_pass());
    }

    #[test]
    fn hadamard_frame() {
        let m = grid(&sl4(), &[&[1, 1, -1, -1], &[1, -1, 1, -1], &[1, -1, -1, 1]]);
        assert_eq!(
            m.grid.entries,
            vec![vec![0, 1, 1, 1, 1, 0], vec![1, 0, 1, 1, 0, 1], vec![1, 1, 0, 0, 1, 1]]
        );
    }

    #[test]
    fn wall_frame_and_properties() {
        let s = sl4();
        let m = grid(&s, &[&[1, 1, 1, -3], &[-3, 1, 1, 1], &[1, -1, 1, -1]]);
        assert_eq!(
            m.grid.entries,
            vec![vec![0, 0, 1, 0, 1, 1], vec![1, 1, 1, 0, 0, 0], vec![1, 0, 1, 1, 0, 1]]
        );
        let report = verify_properties(&m.grid, &s).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.row_weights, vec![3, 3, 4]);
    }

    #[test]
    fn zero_column_is_reported() {
        let s = sl4();
        let a = BinaryMatrix::new(vec![vec![0, 1, 1, 1, 1, 1]; 3]).unwrap();
        let r = verify_properties(&a, &s).unwrap();
        assert!(!r.verdict(1).holds);
        assert_eq!(r.verdict(1).witness, Some(vec![0]));
    }

    #[test]
    fn property_failures_have_witnesses() {
        let s = lookup("Sp(6,R)").unwrap();
        // n = 3: weights below 2n-2 = 4 violate (3); equal light rows violate (4) and (5).
        let a = BinaryMatrix::new(vec![
            vec![1, 1, 1, 0, 0, 0, 0, 0, 0],
            vec![1, 1, 1, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 1, 1, 1, 1, 1],
        ])
        .unwrap();
        let r = verify_properties(&a, &s).unwrap();
        assert!(r.verdict(1).holds && r.verdict(2).holds);
        assert_eq!(r.verdict(3).witness, Some(vec![0]));
        assert_eq!(r.verdict(4).witness, Some(vec![0, 1]));
        assert_eq!(r.verdict(5).witness, Some(vec![0, 1]));
    }

    #[test]
    fn frame_errors() {
        let s = sl4();
        assert!(matches!(
            build_matrix(&FrameSpec {
                space: &s,
                vectors: vec![]
            }),
            Err(Error::EmptyFrame)
        ));
        assert!(matches!(
            FrameSpec::new(&s, vec![qv(&[1, -1, 0])]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            FrameSpec::new(&s, vec![qv(&[0, 0, 0, 0])]),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            verify_properties(
                &BinaryMatrix::new(vec![vec![1, 1, 1]]).unwrap(),
                &lookup("SL(3,R)").unwrap()
            ),
            Err(Error::ExcludedSpace(_))
        ));
    }

    #[test]
    fn frame_file_parsing() {
        let s = sl4();
        let f = FrameSpec::from_json(&s, r#"[["1","1","1","-3"],["1/2","-1/2","0","0"]]"#).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.spans());
        assert!(FrameSpec::from_json(&s, r#"[["1","x","0","-1"]]"#).is_err());
        assert!(FrameSpec::from_json(&s, r#"[["1","1","1","1"]]"#).is_err());
    }

    #[test]
    fn malformed_matrices() {
        assert!(BinaryMatrix::from_json(r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#).is_err());
        assert!(BinaryMatrix::from_json(r#"{"rows":1,"cols":2,"entries":[[1,2]]}"#).is_err());
        assert!(BinaryMatrix::from_json(r#"{"rows":1,"cols":2,"entries":[[1,0,1]]}"#).is_err());
        assert!(BinaryMatrix::from_json(r#"{"rows":1,"cols":2,"entries":[[1,0]]}"#).is_ok());
    }
}
