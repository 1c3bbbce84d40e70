//! Constructive completion: from an admissibility witness to a verified
//! square.
//!
//! The pipeline first fixes how many copies of each symbol go to every new
//! row and column (two f-factor problems over row/symbol and column/symbol
//! multigraphs), giving a small bordered array whose last row and column are
//! "heavy": they stand for all remaining rows and columns at once. Heavy
//! lines are then split off one weight-1 line at a time; each split selects a
//! balanced sub-multiset of the heavy line via laminar rounding, which keeps
//! every counting invariant intact. When all weights reach 1 the array is the
//! completed square.

use crate::admissibility::{check_admissible, NotAdmissible, Witness};
use crate::factors::{f_factor, laminar_round, BipartiteMultigraph, DegreeSpec, LaminarInstance};
use crate::model::{verify_square, Count, Instance, Square};

/// Intermediate array with uniform weight-1 rows/columns except for the last
/// of each, whose weight says how many final lines it still represents.
/// `(rows - 1) + last_row_weight == n` holds throughout, and a weight of 1
/// simply means the line is already final.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaggedSquare {
    pub n: usize,
    pub k: usize,
    pub lambda: Count,
    pub rho: Vec<Count>,
    pub cells: Vec<Vec<Vec<Count>>>,
    pub last_row_weight: Count,
    pub last_col_weight: Count,
}

impl RaggedSquare {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, |row| row.len())
    }

    pub fn row_weight(&self, i: usize) -> Count {
        if i + 1 == self.rows() {
            self.last_row_weight
        } else {
            1
        }
    }

    pub fn col_weight(&self, j: usize) -> Count {
        if j + 1 == self.cols() {
            self.last_col_weight
        } else {
            1
        }
    }

    pub fn symbol_total(&self, l: usize) -> Count {
        self.cells
            .iter()
            .map(|row| row.iter().map(|c| c[l]).sum::<Count>())
            .sum()
    }

    /// Checks every counting invariant of the intermediate state; the simple
    /// variant additionally caps each cell count by the product of its line
    /// weights.
    pub fn check_invariants(&self, simple_mode: bool) -> Result<(), String> {
        let rows = self.rows();
        let cols = self.cols();
        if rows == 0 || cols == 0 {
            return Err("array must have at least one row and column".into());
        }
        if (rows as Count - 1) + self.last_row_weight != self.n as Count {
            return Err(format!(
                "{} rows at tail weight {} do not cover order {}",
                rows, self.last_row_weight, self.n
            ));
        }
        if (cols as Count - 1) + self.last_col_weight != self.n as Count {
            return Err(format!(
                "{} columns at tail weight {} do not cover order {}",
                cols, self.last_col_weight, self.n
            ));
        }
        for l in 0..self.k {
            let total = self.symbol_total(l);
            if total != self.rho[l] {
                return Err(format!(
                    "symbol {} has {} copies, expected rho = {}",
                    l + 1,
                    total,
                    self.rho[l]
                ));
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                let want = self.lambda * self.row_weight(i) * self.col_weight(j);
                let got: Count = self.cells[i][j].iter().sum();
                if got != want {
                    return Err(format!(
                        "cell ({}, {}) holds {} symbols, expected {}",
                        i + 1,
                        j + 1,
                        got,
                        want
                    ));
                }
                if simple_mode {
                    let cap = self.row_weight(i) * self.col_weight(j);
                    for l in 0..self.k {
                        if self.cells[i][j][l] > cap {
                            return Err(format!(
                                "cell ({}, {}) holds {} copies of symbol {}, cap {}",
                                i + 1,
                                j + 1,
                                self.cells[i][j][l],
                                l + 1,
                                cap
                            ));
                        }
                    }
                }
            }
        }
        for l in 0..self.k {
            for i in 0..rows {
                let line: Count = self.cells[i].iter().map(|c| c[l]).sum();
                if line > self.lambda * self.row_weight(i) {
                    return Err(format!(
                        "symbol {} exceeds the cap of row {}",
                        l + 1,
                        i + 1
                    ));
                }
            }
            for j in 0..cols {
                let line: Count = self.cells.iter().map(|row| row[j][l]).sum();
                if line > self.lambda * self.col_weight(j) {
                    return Err(format!(
                        "symbol {} exceeds the cap of column {}",
                        l + 1,
                        j + 1
                    ));
                }
            }
        }
        Ok(())
    }

    /// Finishes the pipeline once every line has weight 1.
    pub fn into_square(self) -> Square {
        assert_eq!(self.last_row_weight, 1);
        assert_eq!(self.last_col_weight, 1);
        assert_eq!(self.rows(), self.n);
        assert_eq!(self.cols(), self.n);
        Square::new(self.n, self.k, self.lambda, self.rho, self.cells)
            .expect("ragged square invariants imply square shape")
    }
}

/// Builds the bordered array: the given rectangle, one heavy column holding
/// each row's share of the new columns, one heavy row for the new rows, and
/// the corner with everything that remains. The shares come from f-factors
/// whose degree specs are read off the witness; admissibility guarantees both
/// factors exist, so a miss is an internal defect.
pub fn build_step1(inst: &Instance, w: &Witness, simple_mode: bool) -> RaggedSquare {
    let (r, s, n, k) = (inst.r, inst.s, inst.n, inst.k);
    let ctx = crate::admissibility::Context::new(inst);

    // The row/symbol factor fixes how many copies of each symbol every given
    // row sends into the new columns, so it exists exactly when a heavy
    // column does (s < n); the column/symbol factor mirrors this for rows.
    let row_factor = if s < n {
        let mult: Vec<Vec<Count>> = (0..r)
            .map(|i| (0..k).map(|l| ctx.row_mult(i, l, simple_mode)).collect())
            .collect();
        let graph = BipartiteMultigraph::new(mult, k);
        let spec = DegreeSpec::new(vec![ctx.row_supply(); r], w.block_a.clone());
        Some(f_factor(&graph, &spec).unwrap_or_else(|| {
            panic!(
                "witnessed instance must admit a row factor; instance {:?} witness {:?}",
                inst, w
            )
        }))
    } else {
        None
    };
    let col_factor = if r < n {
        let mult: Vec<Vec<Count>> = (0..s)
            .map(|j| (0..k).map(|l| ctx.col_mult(j, l, simple_mode)).collect())
            .collect();
        let graph = BipartiteMultigraph::new(mult, k);
        let spec = DegreeSpec::new(vec![ctx.col_supply(); s], w.block_b.clone());
        Some(f_factor(&graph, &spec).unwrap_or_else(|| {
            panic!(
                "witnessed instance must admit a column factor; instance {:?} witness {:?}",
                inst, w
            )
        }))
    } else {
        None
    };

    let rows = r + usize::from(r < n);
    let cols = s + usize::from(s < n);
    let mut cells = vec![vec![vec![0; k]; cols]; rows];
    for i in 0..r {
        for j in 0..s {
            cells[i][j].clone_from(&inst.cells[i][j]);
        }
    }
    if let Some(factor) = &row_factor {
        for i in 0..r {
            cells[i][s].clone_from(&factor.mult[i]);
        }
    }
    if let Some(factor) = &col_factor {
        for j in 0..s {
            cells[r][j].clone_from(&factor.mult[j]);
        }
    }
    if r < n && s < n {
        for l in 0..k {
            cells[r][s][l] = w.block_c[l];
        }
    }

    let q = RaggedSquare {
        n,
        k,
        lambda: inst.lambda,
        rho: inst.rho.clone(),
        cells,
        last_row_weight: if r < n { (n - r) as Count } else { 1 },
        last_col_weight: if s < n { (n - s) as Count } else { 1 },
    };
    debug_assert_eq!(q.check_invariants(simple_mode), Ok(()));
    q
}

fn round_heavy_line(line: &[Vec<Count>], k: usize, weight: Count) -> Vec<Vec<Count>> {
    let li = LaminarInstance::new(line.to_vec(), k, weight);
    laminar_round(&li).z
}

/// Splits one weight-1 row off the heavy last row.
pub fn split_last_row(q: RaggedSquare, simple_mode: bool) -> RaggedSquare {
    let m = q.last_row_weight;
    assert!(m >= 2, "last row weight {} admits no split", m);
    let last = q.rows() - 1;
    let selected = round_heavy_line(&q.cells[last], q.k, m);
    let mut cells = q.cells;
    let remainder: Vec<Vec<Count>> = cells[last]
        .iter()
        .zip(&selected)
        .map(|(old, z)| (0..q.k).map(|l| old[l] - z[l]).collect())
        .collect();
    cells[last] = selected;
    cells.push(remainder);
    let split = RaggedSquare {
        last_row_weight: m - 1,
        cells,
        ..q
    };
    debug_assert_eq!(split.check_invariants(simple_mode), Ok(()));
    split
}

/// Mirror of [`split_last_row`] acting on the heavy last column.
pub fn split_last_col(q: RaggedSquare, simple_mode: bool) -> RaggedSquare {
    let m = q.last_col_weight;
    assert!(m >= 2, "last column weight {} admits no split", m);
    let last = q.cols() - 1;
    let column: Vec<Vec<Count>> = q.cells.iter().map(|row| row[last].clone()).collect();
    let selected = round_heavy_line(&column, q.k, m);
    let mut cells = q.cells;
    for (i, row) in cells.iter_mut().enumerate() {
        let remainder: Vec<Count> = (0..q.k).map(|l| row[last][l] - selected[i][l]).collect();
        row[last] = selected[i].clone();
        row.push(remainder);
    }
    let split = RaggedSquare {
        last_col_weight: m - 1,
        cells,
        ..q
    };
    debug_assert_eq!(split.check_invariants(simple_mode), Ok(()));
    split
}

/// Decides admissibility and, when it holds, completes the rectangle to a
/// full square containing it. Rows are split before columns; any valid split
/// order produces a correct square, this one is fixed for reproducibility.
pub fn complete(inst: &Instance, simple_mode: bool) -> Result<Square, NotAdmissible> {
    assert!(
        inst.validate(simple_mode).is_valid(),
        "complete requires an instance passing validation"
    );
    let witness = check_admissible(inst, simple_mode)?;
    let mut q = build_step1(inst, &witness, simple_mode);
    while q.last_row_weight >= 2 {
        q = split_last_row(q, simple_mode);
    }
    while q.last_col_weight >= 2 {
        q = split_last_col(q, simple_mode);
    }
    let square = q.into_square();
    debug_assert!(
        verify_square(&square, Some(inst), simple_mode).is_valid(),
        "completed square failed verification"
    );
    Ok(square)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(
        r: usize,
        s: usize,
        n: usize,
        k: usize,
        lambda: Count,
        rho: &[Count],
        cells: Vec<Vec<Vec<Count>>>,
    ) -> Instance {
        Instance::new(r, s, n, k, lambda, rho.to_vec(), cells).unwrap()
    }

    #[test]
    fn empty_rectangle_gives_single_heavy_cell() {
        let i = inst(0, 0, 2, 2, 1, &[2, 2], vec![]);
        let w = check_admissible(&i, false).unwrap();
        let q = build_step1(&i, &w, false);
        assert_eq!(q.rows(), 1);
        assert_eq!(q.cols(), 1);
        assert_eq!(q.cells[0][0], vec![2, 2]);
        assert_eq!(q.last_row_weight, 2);
        assert_eq!(q.last_col_weight, 2);
    }

    #[test]
    fn forced_simple_border_is_uniform() {
        let i = inst(1, 1, 2, 2, 2, &[4, 4], vec![vec![vec![1, 1]]]);
        let w = check_admissible(&i, true).unwrap();
        let q = build_step1(&i, &w, true);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(q.cells[i][j], vec![1, 1], "cell ({}, {})", i, j);
            }
        }
        let corner_total: Count = q.cells[1][1].iter().sum();
        assert_eq!(corner_total, 2);
    }

    #[test]
    fn full_width_rectangle_gets_no_heavy_column() {
        // Classic 2 x 3 Latin rectangle inside order 3; only rows remain.
        let cells = vec![
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]],
        ];
        let i = inst(2, 3, 3, 3, 1, &[3, 3, 3], cells);
        let w = check_admissible(&i, false).unwrap();
        assert!(w.a.iter().all(|&v| v == 0));
        let q = build_step1(&i, &w, false);
        assert_eq!(q.cols(), 3);
        assert_eq!(q.rows(), 3);
        assert_eq!(q.last_col_weight, 1);
        let sq = complete(&i, false).unwrap();
        assert!(verify_square(&sq, Some(&i), false).is_valid());
        // The missing row of a 2 x 3 Latin rectangle is unique.
        assert_eq!(sq.cells[2][0], vec![0, 0, 1]);
        assert_eq!(sq.cells[2][1], vec![1, 0, 0]);
        assert_eq!(sq.cells[2][2], vec![0, 1, 0]);
    }

    #[test]
    fn manual_splits_preserve_invariants() {
        let q = RaggedSquare {
            n: 2,
            k: 2,
            lambda: 1,
            rho: vec![2, 2],
            cells: vec![vec![vec![2, 2]]],
            last_row_weight: 2,
            last_col_weight: 2,
        };
        assert_eq!(q.check_invariants(true), Ok(()));
        let q = split_last_row(q, true);
        assert_eq!(q.rows(), 2);
        assert_eq!(q.cells[0][0], vec![1, 1]);
        assert_eq!(q.cells[1][0], vec![1, 1]);
        let q = split_last_col(q, true);
        let sq = q.into_square();
        assert!(verify_square(&sq, None, true).is_valid());
    }

    #[test]
    fn unique_plain_completion_is_reproduced() {
        let i = inst(1, 1, 2, 2, 2, &[4, 4], vec![vec![vec![2, 0]]]);
        let sq = complete(&i, false).unwrap();
        assert_eq!(sq.cells[0][0], vec![2, 0]);
        assert_eq!(sq.cells[0][1], vec![0, 2]);
        assert_eq!(sq.cells[1][0], vec![0, 2]);
        assert_eq!(sq.cells[1][1], vec![2, 0]);
    }

    #[test]
    fn unique_latin_completion_is_reproduced() {
        let i = inst(1, 1, 2, 2, 1, &[2, 2], vec![vec![vec![1, 0]]]);
        let sq = complete(&i, false).unwrap();
        assert_eq!(sq.cells[0][1], vec![0, 1]);
        assert_eq!(sq.cells[1][0], vec![0, 1]);
        assert_eq!(sq.cells[1][1], vec![1, 0]);
        assert!(verify_square(&sq, Some(&i), true).is_valid());
    }

    #[test]
    fn empty_order_three_completes_to_latin_square() {
        let i = inst(0, 0, 3, 3, 1, &[3, 3, 3], vec![]);
        let sq = complete(&i, true).unwrap();
        assert!(verify_square(&sq, None, true).is_valid());
    }

    #[test]
    fn not_admissible_passes_through() {
        let cells = vec![
            vec![vec![1, 0, 0], vec![0, 1, 0]],
            vec![vec![0, 1, 0], vec![1, 0, 0]],
        ];
        let i = inst(2, 2, 3, 3, 1, &[3, 3, 3], cells);
        assert!(complete(&i, false).is_err());
    }

    #[test]
    fn full_square_input_is_returned_as_is() {
        let cells = vec![
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, 1], vec![1, 0]],
        ];
        let i = inst(2, 2, 2, 2, 1, &[2, 2], cells.clone());
        let sq = complete(&i, true).unwrap();
        assert_eq!(sq.cells, cells);
    }
}
