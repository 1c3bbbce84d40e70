//! Core data types for multi-Latin rectangles and squares.
//!
//! A rectangle instance carries the target parameters `(n, k, lambda, rho)`
//! together with an `r x s` grid of cells, each cell a length-`k` vector of
//! symbol counts. Constructors only enforce *structural* soundness (shapes,
//! non-negativity, overflow guards); the combinatorial invariants are checked
//! by [`Instance::validate`] and [`verify_square`], which report violations
//! as data rather than failing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Symbol counts are signed so that intermediate arithmetic in the condition
/// systems (which subtracts freely before applying monus) cannot wrap.
pub type Count = i64;

/// Inputs with `lambda * n^2` beyond this bound are rejected at construction;
/// every quantity computed downstream is a sum or product of at most a few
/// such totals and therefore fits comfortably in an `i64`.
pub const MAX_TOTAL_SYMBOLS: Count = 1 << 40;

/// Cap on `r * s * k` grid entries, so hostile inputs cannot balloon memory.
pub const MAX_GRID_ENTRIES: usize = 1 << 22;

/// max{0, x - y}, written `x .- y` in the condition systems.
#[inline]
pub fn monus(x: Count, y: Count) -> Count {
    (x - y).max(0)
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("grid shape mismatch: {0}")]
    Shape(String),
    #[error("count out of range: {0}")]
    CountRange(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

/// An `r x s` rectangle over symbols `1..=k` with target square order `n`,
/// cell size `lambda` and prescribed totals `rho`.
///
/// Cells are stored as dense per-symbol count vectors; `cells[i][j][l]` is the
/// multiplicity of symbol `l + 1` in cell `(i + 1, j + 1)`. Symbols are
/// 1-based in all I/O and diagnostics, 0-based in code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub k: usize,
    pub lambda: Count,
    pub rho: Vec<Count>,
    pub cells: Vec<Vec<Vec<Count>>>,
}

/// Wire shape of an instance; converted through [`Instance::new`] so that a
/// parsed value always passed the structural checks.
#[derive(Debug, Clone, Deserialize)]
pub struct RawInstance {
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub k: usize,
    pub lambda: Count,
    pub rho: Vec<Count>,
    pub cells: Vec<Vec<Vec<Count>>>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = ModelError;

    fn try_from(raw: RawInstance) -> Result<Self, ModelError> {
        Instance::new(raw.r, raw.s, raw.n, raw.k, raw.lambda, raw.rho, raw.cells)
    }
}

impl Instance {
    pub fn new(
        r: usize,
        s: usize,
        n: usize,
        k: usize,
        lambda: Count,
        rho: Vec<Count>,
        cells: Vec<Vec<Vec<Count>>>,
    ) -> Result<Self, ModelError> {
        check_parameters(n, k, lambda)?;
        if rho.len() != k {
            return Err(ModelError::Shape(format!(
                "rho has {} entries, expected k = {}",
                rho.len(),
                k
            )));
        }
        for (l, &v) in rho.iter().enumerate() {
            if !(0..=MAX_TOTAL_SYMBOLS).contains(&v) {
                return Err(ModelError::CountRange(format!("rho[{}] = {}", l + 1, v)));
            }
        }
        check_grid(&cells, r, s, k)?;
        Ok(Instance {
            r,
            s,
            n,
            k,
            lambda,
            rho,
            cells,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    /// Multiplicity of symbol `l` (0-based) in cell `(i, j)`.
    #[inline]
    pub fn count(&self, i: usize, j: usize, l: usize) -> Count {
        self.cells[i][j][l]
    }

    /// Total occurrences of symbol `l` in the rectangle.
    pub fn symbol_total(&self, l: usize) -> Count {
        self.cells
            .iter()
            .map(|row| row.iter().map(|c| c[l]).sum::<Count>())
            .sum()
    }

    /// Occurrences of symbol `l` in row `i`.
    pub fn row_count(&self, i: usize, l: usize) -> Count {
        self.cells[i].iter().map(|c| c[l]).sum()
    }

    /// Occurrences of symbol `l` in column `j`.
    pub fn col_count(&self, j: usize, l: usize) -> Count {
        self.cells.iter().map(|row| row[j][l]).sum()
    }

    pub fn symbol_counts(&self) -> SymbolCounts {
        let per_row: Vec<Vec<Count>> = (0..self.r)
            .map(|i| (0..self.k).map(|l| self.row_count(i, l)).collect())
            .collect();
        let per_col: Vec<Vec<Count>> = (0..self.s)
            .map(|j| (0..self.k).map(|l| self.col_count(j, l)).collect())
            .collect();
        let per_symbol: Vec<Count> = (0..self.k)
            .map(|l| per_row.iter().map(|row| row[l]).sum())
            .collect();
        SymbolCounts {
            per_symbol,
            per_row,
            per_col,
        }
    }

    /// Checks every defining property of an `(rho, lambda)`-Latin rectangle.
    /// With `simple_required` it additionally demands cell multiplicities of
    /// at most one and `lambda <= k`.
    pub fn validate(&self, simple_required: bool) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.r.max(self.s) > self.n {
            report.push(format!(
                "max(r, s) = {} exceeds n = {}",
                self.r.max(self.s),
                self.n
            ));
        }
        if self.n > self.k {
            report.push(format!("n = {} exceeds k = {}", self.n, self.k));
        }
        let lambda_n = self.lambda * self.n as Count;
        let mut rho_sum: Count = 0;
        for (l, &v) in self.rho.iter().enumerate() {
            if v < 1 || v > lambda_n {
                report.push(format!(
                    "rho[{}] = {} outside [1, lambda*n = {}]",
                    l + 1,
                    v,
                    lambda_n
                ));
            }
            rho_sum += v;
        }
        let want = self.lambda * (self.n as Count) * (self.n as Count);
        if rho_sum != want {
            report.push(format!(
                "sum of rho = {} differs from lambda*n^2 = {}",
                rho_sum, want
            ));
        }
        for i in 0..self.r {
            for j in 0..self.s {
                let total: Count = self.cells[i][j].iter().sum();
                if total != self.lambda {
                    report.push(format!(
                        "cell ({}, {}) holds {} symbols, expected lambda = {}",
                        i + 1,
                        j + 1,
                        total,
                        self.lambda
                    ));
                }
                if simple_required {
                    for l in 0..self.k {
                        if self.cells[i][j][l] > 1 {
                            report.push(format!(
                                "cell ({}, {}) repeats symbol {} ({} copies)",
                                i + 1,
                                j + 1,
                                l + 1,
                                self.cells[i][j][l]
                            ));
                        }
                    }
                }
            }
        }
        for l in 0..self.k {
            for i in 0..self.r {
                let c = self.row_count(i, l);
                if c > self.lambda {
                    report.push(format!(
                        "symbol {} occurs {} times in row {} (cap lambda = {})",
                        l + 1,
                        c,
                        i + 1,
                        self.lambda
                    ));
                }
            }
            for j in 0..self.s {
                let c = self.col_count(j, l);
                if c > self.lambda {
                    report.push(format!(
                        "symbol {} occurs {} times in column {} (cap lambda = {})",
                        l + 1,
                        c,
                        j + 1,
                        self.lambda
                    ));
                }
            }
            let total = self.symbol_total(l);
            if total > self.rho[l] {
                report.push(format!(
                    "symbol {} occurs {} times, more than rho[{}] = {}",
                    l + 1,
                    total,
                    l + 1,
                    self.rho[l]
                ));
            }
        }
        if simple_required && self.lambda > self.k as Count {
            report.push(format!(
                "simple rectangles need lambda <= k, got lambda = {}, k = {}",
                self.lambda, self.k
            ));
        }
        report
    }

    /// True when no cell repeats a symbol.
    pub fn is_simple(&self) -> bool {
        self.cells
            .iter()
            .flatten()
            .all(|c| c.iter().all(|&v| v <= 1))
    }
}

/// The `|M_l|`, `|M_l^i|`, `|^j M_l|` tables of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolCounts {
    pub per_symbol: Vec<Count>,
    pub per_row: Vec<Vec<Count>>,
    pub per_col: Vec<Vec<Count>>,
}

/// Violation list; empty means every checked invariant holds.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn push(&mut self, violation: String) {
        self.violations.push(violation);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A completed `n x n` square; structurally identical to an instance with
/// `r = s = n` and serialized in exactly that shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub n: usize,
    pub k: usize,
    pub lambda: Count,
    pub rho: Vec<Count>,
    pub cells: Vec<Vec<Vec<Count>>>,
}

impl Square {
    pub fn new(
        n: usize,
        k: usize,
        lambda: Count,
        rho: Vec<Count>,
        cells: Vec<Vec<Vec<Count>>>,
    ) -> Result<Self, ModelError> {
        check_parameters(n, k, lambda)?;
        if rho.len() != k {
            return Err(ModelError::Shape(format!(
                "rho has {} entries, expected k = {}",
                rho.len(),
                k
            )));
        }
        check_grid(&cells, n, n, k)?;
        Ok(Square {
            n,
            k,
            lambda,
            rho,
            cells,
        })
    }

    pub fn from_instance(inst: Instance) -> Result<Self, ModelError> {
        if inst.r != inst.n || inst.s != inst.n {
            return Err(ModelError::Shape(format!(
                "square must have r = s = n, got {} x {} with n = {}",
                inst.r, inst.s, inst.n
            )));
        }
        Square::new(inst.n, inst.k, inst.lambda, inst.rho, inst.cells)
    }

    /// View as an instance with `r = s = n` (the wire format for squares).
    pub fn as_instance(&self) -> Instance {
        Instance {
            r: self.n,
            s: self.n,
            n: self.n,
            k: self.k,
            lambda: self.lambda,
            rho: self.rho.clone(),
            cells: self.cells.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        self.as_instance().to_json()
    }

    #[inline]
    pub fn count(&self, i: usize, j: usize, l: usize) -> Count {
        self.cells[i][j][l]
    }

    pub fn symbol_total(&self, l: usize) -> Count {
        self.cells
            .iter()
            .map(|row| row.iter().map(|c| c[l]).sum::<Count>())
            .sum()
    }
}

/// Checks all square invariants; with `contains` it also demands that the
/// top-left block equals the given rectangle (same parameters, same cells),
/// and with `simple_required` that no cell repeats a symbol.
pub fn verify_square(
    sq: &Square,
    contains: Option<&Instance>,
    simple_required: bool,
) -> ValidationReport {
    let as_inst = sq.as_instance();
    let mut report = as_inst.validate(simple_required);
    for l in 0..sq.k {
        let total = sq.symbol_total(l);
        if total != sq.rho[l] {
            report.push(format!(
                "symbol {} occurs {} times, expected rho[{}] = {}",
                l + 1,
                total,
                l + 1,
                sq.rho[l]
            ));
        }
    }
    if let Some(inst) = contains {
        if inst.n != sq.n || inst.k != sq.k || inst.lambda != sq.lambda || inst.rho != sq.rho {
            report.push("containment check: parameters differ".to_string());
        } else if inst.r > sq.n || inst.s > sq.n {
            report.push(format!(
                "containment check: {} x {} rectangle cannot fit in order {}",
                inst.r, inst.s, sq.n
            ));
        } else {
            for i in 0..inst.r {
                for j in 0..inst.s {
                    if sq.cells[i][j] != inst.cells[i][j] {
                        report.push(format!(
                            "containment check: cell ({}, {}) differs from the rectangle",
                            i + 1,
                            j + 1
                        ));
                    }
                }
            }
        }
    }
    report
}

/// An `r x r` array whose cells hold *at most* `lambda` symbols, with the
/// usual row/column caps. The subject of Evans-type embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPartial")]
pub struct PartialInstance {
    pub r: usize,
    pub lambda: Count,
    pub k: usize,
    pub cells: Vec<Vec<Vec<Count>>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawPartial {
    pub r: usize,
    pub lambda: Count,
    pub k: usize,
    pub cells: Vec<Vec<Vec<Count>>>,
}

impl TryFrom<RawPartial> for PartialInstance {
    type Error = ModelError;

    fn try_from(raw: RawPartial) -> Result<Self, ModelError> {
        PartialInstance::new(raw.r, raw.lambda, raw.k, raw.cells)
    }
}

impl PartialInstance {
    pub fn new(
        r: usize,
        lambda: Count,
        k: usize,
        cells: Vec<Vec<Vec<Count>>>,
    ) -> Result<Self, ModelError> {
        check_parameters(r.max(1), k, lambda)?;
        check_grid(&cells, r, r, k)?;
        Ok(PartialInstance {
            r,
            lambda,
            k,
            cells,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn row_count(&self, i: usize, l: usize) -> Count {
        self.cells[i].iter().map(|c| c[l]).sum()
    }

    pub fn col_count(&self, j: usize, l: usize) -> Count {
        self.cells.iter().map(|row| row[j][l]).sum()
    }

    pub fn validate(&self, simple_required: bool) -> ValidationReport {
        let mut report = ValidationReport::default();
        for i in 0..self.r {
            for j in 0..self.r {
                let total: Count = self.cells[i][j].iter().sum();
                if total > self.lambda {
                    report.push(format!(
                        "cell ({}, {}) holds {} symbols, more than lambda = {}",
                        i + 1,
                        j + 1,
                        total,
                        self.lambda
                    ));
                }
                if simple_required {
                    for l in 0..self.k {
                        if self.cells[i][j][l] > 1 {
                            report.push(format!(
                                "cell ({}, {}) repeats symbol {}",
                                i + 1,
                                j + 1,
                                l + 1
                            ));
                        }
                    }
                }
            }
        }
        for l in 0..self.k {
            for i in 0..self.r {
                if self.row_count(i, l) > self.lambda {
                    report.push(format!("symbol {} over cap in row {}", l + 1, i + 1));
                }
            }
            for j in 0..self.r {
                if self.col_count(j, l) > self.lambda {
                    report.push(format!("symbol {} over cap in column {}", l + 1, j + 1));
                }
            }
        }
        report
    }
}

fn check_parameters(n: usize, k: usize, lambda: Count) -> Result<(), ModelError> {
    if n == 0 || k == 0 {
        return Err(ModelError::Parameter("n and k must be positive".into()));
    }
    if lambda <= 0 {
        return Err(ModelError::Parameter("lambda must be positive".into()));
    }
    let total = lambda
        .checked_mul(n as Count)
        .and_then(|v| v.checked_mul(n as Count))
        .ok_or_else(|| ModelError::TooLarge("lambda * n^2 overflows".into()))?;
    if total > MAX_TOTAL_SYMBOLS {
        return Err(ModelError::TooLarge(format!(
            "lambda * n^2 = {} exceeds 2^40",
            total
        )));
    }
    Ok(())
}

fn check_grid(
    cells: &[Vec<Vec<Count>>],
    rows: usize,
    cols: usize,
    k: usize,
) -> Result<(), ModelError> {
    let entries = rows
        .checked_mul(cols)
        .and_then(|v| v.checked_mul(k))
        .ok_or_else(|| ModelError::TooLarge("grid dimensions overflow".into()))?;
    if entries > MAX_GRID_ENTRIES || rows > MAX_GRID_ENTRIES || cols > MAX_GRID_ENTRIES {
        return Err(ModelError::TooLarge(format!(
            "{} x {} x {} grid exceeds the entry cap",
            rows, cols, k
        )));
    }
    if cells.len() != rows {
        return Err(ModelError::Shape(format!(
            "{} rows given, expected {}",
            cells.len(),
            rows
        )));
    }
    // Any single count above lambda * n^2 is already invalid; capping entries
    // at 2^40 with at most 2^22 of them keeps every downstream sum in i64.
    let count_cap = MAX_TOTAL_SYMBOLS;
    for (i, row) in cells.iter().enumerate() {
        if row.len() != cols {
            return Err(ModelError::Shape(format!(
                "row {} has {} cells, expected {}",
                i + 1,
                row.len(),
                cols
            )));
        }
        for (j, cell) in row.iter().enumerate() {
            if cell.len() != k {
                return Err(ModelError::Shape(format!(
                    "cell ({}, {}) has {} counts, expected k = {}",
                    i + 1,
                    j + 1,
                    cell.len(),
                    k
                )));
            }
            for &v in cell {
                if v < 0 || v > count_cap {
                    return Err(ModelError::CountRange(format!(
                        "cell ({}, {}) holds count {}",
                        i + 1,
                        j + 1,
                        v
                    )));
                }
            }
        }
    }
    Ok(())
}
