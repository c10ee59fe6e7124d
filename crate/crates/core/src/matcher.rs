//! Two distinct 1-entries per row, all in different columns.
//!
//! [`greedy_match`] is the staged elimination algorithm: light rows (`|u_i| <= n`)
//! first, then the rest without resetting the stage counter. Each stage sorts
//! the surviving rows of the current phase by remaining weight, takes two
//! 1-entries of the top row and deletes that row and those two columns. A
//! failing top row triggers at most one repair per phase:
//!
//! * light phase, `LastRowSwap`: the stage-1 row trades the column it shares
//!   with the failing row for one of its columns no other row uses;
//! * heavy phase, `PutBack`: two never-removed columns `c1, c2` carrying a 1 in
//!   already processed rows are taken by those rows, each giving back one of
//!   its removed columns to the failing row.
//!
//! [`oracle_match`] decides the same question exactly by bipartite matching
//! (two copies of every row against the columns) with augmenting paths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::framematrix::BinaryMatrix;

/// Per row `i`, the pair `(j_i, k_i)` with `j_i < k_i` (0-based columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub pairs: Vec<(usize, usize)>,
}

impl MatchResult {
    /// 1-based `[[j1, k1], ...]`.
    pub fn one_based(&self) -> Vec<[usize; 2]> {
        self.pairs.iter().map(|&(j, k)| [j + 1, k + 1]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RepairKind {
    LastRowSwap,
    PutBack,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnSwap {
    /// The processed row whose choice changes.
    pub row: usize,
    /// Column returned to the pool.
    pub put_back: usize,
    /// Column taken instead.
    pub taken: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Repair {
    pub kind: RepairKind,
    pub stage: usize,
    pub failing_row: usize,
    pub swaps: Vec<ColumnSwap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    /// 1-based stage counter.
    pub t: usize,
    /// 1 for rows with `|u_i| <= n`, 2 for the rest.
    pub phase: u8,
    /// Phase rows after the Step 1 sort.
    pub order: Vec<usize>,
    pub top: usize,
    pub chosen: (usize, usize),
    /// `(row, N(row, t))` for every surviving row at the start of the stage.
    pub remaining: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AlgoTrace {
    pub stages: Vec<Stage>,
    pub repairs: Vec<Repair>,
}

impl AlgoTrace {
    fn remaining_of(stage: &Stage, row: usize) -> Option<usize> {
        stage.remaining.iter().find(|(r, _)| *r == row).map(|&(_, n)| n)
    }

    /// Violations of `N(i,t) >= N(i,t-1) - 1` between consecutive light-phase
    /// stages, for light rows that survive both. Stages right after a repair are
    /// compared against the repaired state, so they are skipped.
    pub fn weight_drop_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for w in self.stages.windows(2) {
            let (prev, cur) = (&w[0], &w[1]);
            if prev.phase != 1 || cur.phase != 1 {
                continue;
            }
            if self.repairs.iter().any(|r| r.stage == prev.t) {
                continue;
            }
            for &row in &cur.order {
                if let (Some(a), Some(b)) = (Self::remaining_of(prev, row), Self::remaining_of(cur, row)) {
                    if b + 1 < a {
                        out.push((cur.t, row));
                    }
                }
            }
        }
        out
    }
}

struct State<'a> {
    a: &'a BinaryMatrix,
    removed: Vec<bool>,
    ever_removed: Vec<bool>,
    assigned: Vec<Option<(usize, usize)>>,
    alive: Vec<bool>,
}

impl State<'_> {
    fn available(&self, row: usize) -> Vec<usize> {
        (0..self.a.cols)
            .filter(|&c| self.a.get(row, c) && !self.removed[c])
            .collect()
    }

    fn remaining(&self, row: usize) -> usize {
        (0..self.a.cols)
            .filter(|&c| self.a.get(row, c) && !self.removed[c])
            .count()
    }

    fn take(&mut self, c: usize) {
        self.removed[c] = true;
        self.ever_removed[c] = true;
    }

    fn swap(&mut self, row: usize, put_back: usize, taken: usize) -> ColumnSwap {
        let (j, k) = self.assigned[row].expect("only processed rows swap");
        let (x, y) = if j == put_back { (taken, k) } else { (j, taken) };
        self.assigned[row] = Some((x.min(y), x.max(y)));
        self.removed[put_back] = false;
        self.take(taken);
        ColumnSwap { row, put_back, taken }
    }

    /// Light-phase repair: the stage-1 top row swaps the column it shares with
    /// `failing` for one of its own columns that no other row has.
    fn last_row_swap(&mut self, first: &Stage, failing: usize) -> Option<Vec<ColumnSwap>> {
        let r1 = first.top;
        let (j, k) = self.assigned[r1]?;
        let shared = [j, k].into_iter().find(|&c| self.a.get(failing, c))?;
        let free = (0..self.a.cols).find(|&c| {
            self.a.get(r1, c) && !self.removed[c] && (0..self.a.rows).all(|i| i == r1 || !self.a.get(i, c))
        })?;
        Some(vec![self.swap(r1, shared, free)])
    }

    /// Heavy-phase repair around the failing row.
    fn put_back(&mut self, failing: usize) -> Option<Vec<ColumnSwap>> {
        let processed = |s: &Self, c: usize| -> Vec<usize> {
            (0..s.a.rows)
                .filter(|&p| p != failing && s.assigned[p].is_some() && s.a.get(p, c))
                .collect()
        };
        let candidates: Vec<usize> = (0..self.a.cols)
            .filter(|&c| !self.ever_removed[c] && !self.a.get(failing, c) && !processed(self, c).is_empty())
            .take(2)
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let mut swaps = Vec::new();
        let mut fresh: Vec<usize> = Vec::new();
        for c in candidates {
            let rows = processed(self, c);
            // Columns a row may give back: its original removed choices.
            let givable = |s: &Self, p: usize| -> Vec<usize> {
                let (j, k) = s.assigned[p].unwrap();
                [j, k].into_iter().filter(|x| !fresh.contains(x)).collect()
            };
            let pick = rows
                .iter()
                .find_map(|&p| {
                    givable(self, p)
                        .into_iter()
                        .filter(|&x| self.a.get(failing, x))
                        .max()
                        .map(|x| (p, x))
                })
                .or_else(|| {
                    rows.iter()
                        .find_map(|&p| givable(self, p).into_iter().max().map(|x| (p, x)))
                });
            let Some((p, x)) = pick else { continue };
            swaps.push(self.swap(p, x, c));
            fresh.push(c);
        }
        (!swaps.is_empty()).then_some(swaps)
    }
}

/// Staged greedy matching with the two repairs. `n` is the number of rows.
pub fn greedy_match(a: &BinaryMatrix) -> Result<(MatchResult, AlgoTrace)> {
    a.check()?;
    if a.rows == 0 {
        return Err(Error::MalformedMatrix("matrix has no rows".into()));
    }
    let n = a.rows;
    let weights: Vec<usize> = (0..n).map(|i| a.row_weight(i)).collect();
    let phases: [Vec<usize>; 2] = [
        (0..n).filter(|&i| weights[i] <= n).collect(),
        (0..n).filter(|&i| weights[i] > n).collect(),
    ];

    let mut st = State {
        a,
        removed: vec![false; a.cols],
        ever_removed: vec![false; a.cols],
        assigned: vec![None; n],
        alive: vec![true; n],
    };
    let mut trace = AlgoTrace::default();
    let mut t = 1;

    for (phase_idx, phase_rows) in phases.iter().enumerate() {
        let phase = phase_idx as u8 + 1;
        let first_stage = trace.stages.len();
        let mut repaired = false;
        loop {
            let mut order: Vec<usize> = phase_rows.iter().copied().filter(|&i| st.alive[i]).collect();
            if order.is_empty() {
                break;
            }
            let remaining: Vec<(usize, usize)> =
                (0..n).filter(|&i| st.alive[i]).map(|i| (i, st.remaining(i))).collect();
            order.sort_by_key(|&i| (st.remaining(i), i));
            let top = order[0];

            let mut avail = st.available(top);
            if avail.len() < 2 {
                let fail = |why: &str| Error::NoMatching(format!("stage {t}, row {}: {why}", top + 1));
                if repaired {
                    return Err(fail("repair already used in this phase"));
                }
                repaired = true;
                let swaps = if phase == 1 {
                    let first = trace.stages.get(first_stage).cloned();
                    first.and_then(|s| st.last_row_swap(&s, top))
                } else {
                    st.put_back(top)
                };
                let Some(swaps) = swaps else {
                    return Err(fail("no repair applies"));
                };
                trace.repairs.push(Repair {
                    kind: if phase == 1 {
                        RepairKind::LastRowSwap
                    } else {
                        RepairKind::PutBack
                    },
                    stage: t,
                    failing_row: top,
                    swaps,
                });
                avail = st.available(top);
                if avail.len() < 2 {
                    return Err(fail("fewer than two entries left after repair"));
                }
            }

            let chosen = (avail[0], avail[1]);
            st.take(chosen.0);
            st.take(chosen.1);
            st.assigned[top] = Some(chosen);
            st.alive[top] = false;
            trace.stages.push(Stage {
                t,
                phase,
                order,
                top,
                chosen,
                remaining,
            });
            t += 1;
        }
    }

    let pairs = st
        .assigned
        .into_iter()
        .map(|p| p.expect("every row is processed"))
        .collect();
    Ok((MatchResult { pairs }, trace))
}

/// Exact existence check by maximum bipartite matching (two copies per row).
pub fn oracle_match(a: &BinaryMatrix) -> Option<MatchResult> {
    let left = 2 * a.rows;
    let adj: Vec<Vec<usize>> = (0..left).map(|u| a.row_support(u / 2)).collect();
    let mut owner: Vec<Option<usize>> = vec![None; a.cols];

    fn augment(u: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &c in &adj[u] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            if owner[c].is_none_or(|w| augment(w, adj, owner, seen)) {
                owner[c] = Some(u);
                return true;
            }
        }
        false
    }

    for u in 0..left {
        let mut seen = vec![false; a.cols];
        if !augment(u, &adj, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); a.rows];
    for (c, o) in owner.iter().enumerate() {
        if let Some(u) = o {
            cols[u / 2].push(c);
        }
    }
    Some(MatchResult {
        pairs: cols.into_iter().map(|v| (v[0].min(v[1]), v[0].max(v[1]))).collect(),
    })
}

/// Both result invariants against `a`: distinct in-row 1-entries, `2n` distinct columns.
pub fn validate(a: &BinaryMatrix, result: &MatchResult) -> bool {
    if result.pairs.len() != a.rows {
        return false;
    }
    let mut used = vec![false; a.cols];
    for (i, &(j, k)) in result.pairs.iter().enumerate() {
        if j == k || j >= a.cols || k >= a.cols || !a.get(i, j) || !a.get(i, k) {
            return false;
        }
        for c in [j, k] {
            if std::mem::replace(&mut used[c], true) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> BinaryMatrix {
        BinaryMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn all_ones_is_canonical() {
        let a = m(&[&[1; 6], &[1; 6], &[1; 6]]);
        let (res, trace) = greedy_match(&a).unwrap();
        assert_eq!(res.one_based(), vec![[1, 2], [3, 4], [5, 6]]);
        assert!(trace.repairs.is_empty());
        assert!(validate(&a, &res));
        assert!(validate(&a, &oracle_match(&a).unwrap()));
    }

    #[test]
    fn sl4_wall_matrix_trace() {
        let a = m(&[&[0, 0, 1, 0, 1, 1], &[1, 1, 1, 0, 0, 0], &[1, 0, 1, 1, 0, 1]]);
        let (res, trace) = greedy_match(&a).unwrap();
        let tops: Vec<usize> = trace.stages.iter().map(|s| s.top).collect();
        let chosen: Vec<(usize, usize)> = trace.stages.iter().map(|s| s.chosen).collect();
        assert_eq!(tops, vec![0, 1, 2]);
        assert_eq!(chosen, vec![(2, 4), (0, 1), (3, 5)]);
        assert_eq!(trace.stages.iter().map(|s| s.phase).collect::<Vec<_>>(), vec![1, 1, 2]);
        assert!(trace.repairs.is_empty());
        assert!(validate(&a, &res));
    }

    #[test]
    fn pigeonhole_has_no_matching() {
        let a = m(&[&[1, 1, 0], &[1, 1, 0]]);
        assert!(matches!(greedy_match(&a), Err(Error::NoMatching(_))));
        assert!(oracle_match(&a).is_none());
    }

    #[test]
    fn validate_rejects_reuse() {
        let a = m(&[&[1; 6], &[1; 6], &[1; 6]]);
        let bad = MatchResult {
            pairs: vec![(0, 1), (0, 3), (4, 5)],
        };
        assert!(!validate(&a, &bad));
        let same = MatchResult {
            pairs: vec![(0, 0), (2, 3), (4, 5)],
        };
        assert!(!validate(&a, &same));
        assert!(!validate(&a, &MatchResult { pairs: vec![(0, 1)] }));
    }

    #[test]
    fn empty_matrix_is_malformed() {
        let a = BinaryMatrix {
            rows: 0,
            cols: 0,
            entries: vec![],
        };
        assert!(matches!(greedy_match(&a), Err(Error::MalformedMatrix(_))));
    }

    #[test]
    fn last_row_swap_fires() {
        // Three light rows (|u| = n = 3). Leftmost choices leave row 2 with one
        // entry; the stage-1 row gives back column 0 and takes its private column 2.
        let a = m(&[&[1, 1, 1, 0, 0, 0, 0], &[0, 1, 0, 1, 1, 0, 0], &[1, 0, 0, 1, 0, 0, 1]]);
        let (res, trace) = greedy_match(&a).unwrap();
        assert!(validate(&a, &res));
        assert_eq!(trace.repairs.len(), 1);
        assert_eq!(trace.repairs[0].kind, RepairKind::LastRowSwap);
        assert_eq!(
            trace.repairs[0].swaps,
            vec![ColumnSwap {
                row: 0,
                put_back: 0,
                taken: 2
            }]
        );
    }

    #[test]
    fn put_back_fires() {
        // n = 2, heavy rows of weight 3. Row 0 takes {0,1}, row 1 is left with
        // nothing usable except column 0; column 2 (owned by row 0 only) is swapped in.
        let a = m(&[&[1, 1, 1, 0], &[1, 1, 0, 1]]);
        let (res, trace) = greedy_match(&a).unwrap();
        assert!(validate(&a, &res));
        assert_eq!(trace.repairs.len(), 1);
        assert_eq!(trace.repairs[0].kind, RepairKind::PutBack);
    }

    #[test]
    fn deterministic() {
        let a = m(&[&[1, 0, 1, 1, 0, 1], &[0, 1, 1, 1, 1, 0], &[1, 1, 0, 0, 1, 1]]);
        assert_eq!(greedy_match(&a).unwrap(), greedy_match(&a).unwrap());
    }
}
