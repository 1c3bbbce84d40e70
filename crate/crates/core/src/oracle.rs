//! Independent ground truth at tiny scale: backtracking extension search,
//! exhaustive instance enumeration, and witness-space search.
//!
//! These deliberately share nothing with the flow solvers; they are naive
//! transcriptions of the definitions with different bug surfaces, used to
//! validate the production decision procedures empirically. Scale guards are
//! hard errors, never silent truncation.

use sha2::{Digest, Sha256};

use crate::admissibility::{witness_satisfies_with_context, Context, Witness};
use crate::model::{Count, Instance, Square};
use crate::GuardError;

/// Hard limits for the oracle operations; [`OracleGuards::unlimited`] lifts
/// them for callers that accept the cost.
#[derive(Debug, Clone)]
pub struct OracleGuards {
    /// Cap on `lambda * n^2` for the extension search.
    pub max_brute_total: Count,
    /// Cap on `k` for the extension search.
    pub max_brute_symbols: usize,
    pub max_enum_n: usize,
    pub max_enum_k: usize,
    pub max_enum_lambda: Count,
    pub max_witness_symbols: usize,
    /// Cap on the witness box volume (product of per-symbol ranges).
    pub max_witness_box: u128,
}

impl Default for OracleGuards {
    fn default() -> Self {
        OracleGuards {
            max_brute_total: 64,
            max_brute_symbols: 6,
            max_enum_n: 3,
            max_enum_k: 4,
            max_enum_lambda: 2,
            max_witness_symbols: 6,
            max_witness_box: 1_000_000,
        }
    }
}

impl OracleGuards {
    pub fn unlimited() -> Self {
        OracleGuards {
            max_brute_total: Count::MAX,
            max_brute_symbols: usize::MAX,
            max_enum_n: usize::MAX,
            max_enum_k: usize::MAX,
            max_enum_lambda: Count::MAX,
            max_witness_symbols: usize::MAX,
            max_witness_box: u128::MAX,
        }
    }
}

/// Depth-first extension search. Fills every cell outside the given
/// rectangle in row-major order, one symbol slot at a time in ascending
/// symbol order, pruning on row, column and total budgets (and cell
/// multiplicity in simple mode). Returns the first extension found or a
/// definitive `None`.
pub fn brute_extend(
    inst: &Instance,
    simple_mode: bool,
    guards: &OracleGuards,
) -> Result<Option<Square>, GuardError> {
    let total = inst.lambda * (inst.n * inst.n) as Count;
    if total > guards.max_brute_total {
        return Err(GuardError(format!(
            "extension search limited to lambda*n^2 <= {}, got {}",
            guards.max_brute_total, total
        )));
    }
    if inst.k > guards.max_brute_symbols {
        return Err(GuardError(format!(
            "extension search limited to {} symbols, got {}",
            guards.max_brute_symbols, inst.k
        )));
    }
    debug_assert!(inst.validate(simple_mode).is_valid());

    let (n, k, lambda) = (inst.n, inst.k, inst.lambda);
    let mut grid = vec![vec![vec![0; k]; n]; n];
    let mut row_used = vec![vec![0; k]; n];
    let mut col_used = vec![vec![0; k]; n];
    let sym_left: Vec<Count> = (0..k).map(|l| inst.rho[l] - inst.symbol_total(l)).collect();
    for i in 0..inst.r {
        for j in 0..inst.s {
            for l in 0..k {
                let c = inst.cells[i][j][l];
                grid[i][j][l] = c;
                row_used[i][l] += c;
                col_used[j][l] += c;
            }
        }
    }
    let free_cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i >= inst.r || j >= inst.s)
        .collect();

    struct Search<'a> {
        free_cells: &'a [(usize, usize)],
        grid: Vec<Vec<Vec<Count>>>,
        row_used: Vec<Vec<Count>>,
        col_used: Vec<Vec<Count>>,
        sym_left: Vec<Count>,
        lambda: Count,
        k: usize,
        simple: bool,
    }

    impl Search<'_> {
        fn fill(&mut self, cell: usize, slot: Count, min_symbol: usize) -> bool {
            if cell == self.free_cells.len() {
                return true;
            }
            let (i, j) = self.free_cells[cell];
            if slot == self.lambda {
                return self.fill(cell + 1, 0, 0);
            }
            for l in min_symbol..self.k {
                if self.sym_left[l] == 0
                    || self.row_used[i][l] == self.lambda
                    || self.col_used[j][l] == self.lambda
                    || (self.simple && self.grid[i][j][l] == 1)
                {
                    continue;
                }
                self.grid[i][j][l] += 1;
                self.row_used[i][l] += 1;
                self.col_used[j][l] += 1;
                self.sym_left[l] -= 1;
                let next_min = if self.simple { l + 1 } else { l };
                if self.fill(cell, slot + 1, next_min) {
                    return true;
                }
                self.grid[i][j][l] -= 1;
                self.row_used[i][l] -= 1;
                self.col_used[j][l] -= 1;
                self.sym_left[l] += 1;
            }
            false
        }
    }

    let mut search = Search {
        free_cells: &free_cells,
        grid,
        row_used,
        col_used,
        sym_left,
        lambda,
        k,
        simple: simple_mode,
    };
    if search.fill(0, 0, 0) {
        let square = Square::new(n, k, lambda, inst.rho.clone(), search.grid)
            .expect("search output is structurally sound");
        Ok(Some(square))
    } else {
        Ok(None)
    }
}

/// Upper bounds for exhaustive enumeration; every `n <= max_n`, `k <= max_k`
/// (with `n <= k`) and `lambda <= max_lambda` combination is covered.
#[derive(Debug, Clone)]
pub struct ScaleBounds {
    pub max_n: usize,
    pub max_k: usize,
    pub max_lambda: Count,
}

impl Default for ScaleBounds {
    fn default() -> Self {
        ScaleBounds {
            max_n: 3,
            max_k: 4,
            max_lambda: 2,
        }
    }
}

/// Restriction of the enumerated corpus, applied during generation.
#[derive(Debug, Clone, Default)]
pub struct InstanceFilter {
    pub simple_only: bool,
    pub s_equals_n: bool,
    pub k_equals_n: bool,
    pub uniform_rho: bool,
}

/// Exhaustively yields every valid instance within the bounds, in a fixed
/// deterministic order (parameters ascending, `rho` lexicographic, cells
/// row-major with symbol-ascending content). Returns the hex digest of the
/// canonical serialization sequence for corpus identity.
pub fn enumerate_instances<F: FnMut(&Instance)>(
    bounds: &ScaleBounds,
    filter: &InstanceFilter,
    guards: &OracleGuards,
    mut visit: F,
) -> Result<String, GuardError> {
    if bounds.max_n > guards.max_enum_n
        || bounds.max_k > guards.max_enum_k
        || bounds.max_lambda > guards.max_enum_lambda
    {
        return Err(GuardError(format!(
            "enumeration bounds {:?} exceed the guard (n <= {}, k <= {}, lambda <= {})",
            bounds, guards.max_enum_n, guards.max_enum_k, guards.max_enum_lambda
        )));
    }
    let mut hasher = Sha256::new();
    for n in 1..=bounds.max_n {
        for k in n..=bounds.max_k {
            for lambda in 1..=bounds.max_lambda {
                if filter.k_equals_n && k != n {
                    continue;
                }
                if filter.simple_only && lambda > k as Count {
                    continue;
                }
                for r in 0..=n {
                    for s in 0..=n {
                        if filter.s_equals_n && s != n {
                            continue;
                        }
                        for_each_rho(n, k, lambda, filter.uniform_rho, &mut |rho| {
                            for_each_grid(r, s, k, lambda, rho, filter.simple_only, &mut |cells| {
                                let inst = Instance::new(
                                    r,
                                    s,
                                    n,
                                    k,
                                    lambda,
                                    rho.to_vec(),
                                    cells.to_vec(),
                                )
                                .expect("enumerated instances are structurally sound");
                                debug_assert!(inst.validate(filter.simple_only).is_valid());
                                hasher.update(inst.to_json().as_bytes());
                                hasher.update(b"\n");
                                visit(&inst);
                            });
                        });
                    }
                }
            }
        }
    }
    Ok(hex_digest(&hasher.finalize()))
}

fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

/// All `rho` vectors with entries in `[1, lambda n]` summing to
/// `lambda n^2`, lexicographically ascending.
fn for_each_rho(
    n: usize,
    k: usize,
    lambda: Count,
    uniform_only: bool,
    visit: &mut impl FnMut(&[Count]),
) {
    let cap = lambda * n as Count;
    let want = lambda * (n * n) as Count;
    if uniform_only {
        if cap * k as Count == want {
            visit(&vec![cap; k]);
        }
        return;
    }
    let mut rho = vec![0; k];
    fn rec(
        rho: &mut Vec<Count>,
        idx: usize,
        remaining: Count,
        cap: Count,
        visit: &mut impl FnMut(&[Count]),
    ) {
        let slots_left = (rho.len() - idx) as Count;
        if idx == rho.len() {
            if remaining == 0 {
                visit(rho);
            }
            return;
        }
        // Bounds: the rest must be able to absorb what remains.
        let low = (remaining - cap * (slots_left - 1)).max(1);
        let high = remaining - (slots_left - 1).max(0) * 1;
        for v in low.max(1)..=high.min(cap) {
            rho[idx] = v;
            rec(rho, idx + 1, remaining - v, cap, visit);
        }
        rho[idx] = 0;
    }
    rec(&mut rho, 0, want, cap, visit);
}

/// All valid `r x s` grids for the given totals, row-major, each cell's
/// count vector enumerated symbol by symbol.
fn for_each_grid(
    r: usize,
    s: usize,
    k: usize,
    lambda: Count,
    rho: &[Count],
    simple_only: bool,
    visit: &mut impl FnMut(&Vec<Vec<Vec<Count>>>),
) {
    struct Gen<'a> {
        r: usize,
        s: usize,
        k: usize,
        lambda: Count,
        rho: &'a [Count],
        simple: bool,
        grid: Vec<Vec<Vec<Count>>>,
        row_used: Vec<Vec<Count>>,
        col_used: Vec<Vec<Count>>,
        sym_used: Vec<Count>,
    }

    impl Gen<'_> {
        fn cell(&mut self, t: usize, visit: &mut impl FnMut(&Vec<Vec<Vec<Count>>>)) {
            if t == self.r * self.s {
                visit(&self.grid);
                return;
            }
            let (i, j) = (t / self.s, t % self.s);
            self.symbol(t, i, j, 0, self.lambda, visit);
        }

        fn symbol(
            &mut self,
            t: usize,
            i: usize,
            j: usize,
            l: usize,
            left: Count,
            visit: &mut impl FnMut(&Vec<Vec<Vec<Count>>>),
        ) {
            if l == self.k {
                if left == 0 {
                    self.cell(t + 1, visit);
                }
                return;
            }
            let mut max_c = left
                .min(self.lambda - self.row_used[i][l])
                .min(self.lambda - self.col_used[j][l])
                .min(self.rho[l] - self.sym_used[l]);
            if self.simple {
                max_c = max_c.min(1);
            }
            for c in 0..=max_c.max(0) {
                self.grid[i][j][l] = c;
                self.row_used[i][l] += c;
                self.col_used[j][l] += c;
                self.sym_used[l] += c;
                self.symbol(t, i, j, l + 1, left - c, visit);
                self.row_used[i][l] -= c;
                self.col_used[j][l] -= c;
                self.sym_used[l] -= c;
                self.grid[i][j][l] = 0;
            }
        }
    }

    if r == 0 || s == 0 {
        let empty = vec![vec![vec![0; k]; s]; r];
        visit(&empty);
        return;
    }
    let mut gen = Gen {
        r,
        s,
        k,
        lambda,
        rho,
        simple: simple_only,
        grid: vec![vec![vec![0; k]; s]; r],
        row_used: vec![vec![0; k]; r],
        col_used: vec![vec![0; k]; s],
        sym_used: vec![0; k],
    };
    gen.cell(0, visit);
}

/// Searches the witness box directly against the definition: all
/// non-negative `(a, b)` pairs meeting the sum equalities and per-symbol
/// windows, each checked against both `2^k` subset families. Returns the
/// first witness in lexicographic order, or `None` after exhaustion.
pub fn witness_search(
    inst: &Instance,
    simple_mode: bool,
    guards: &OracleGuards,
) -> Result<Option<Witness>, GuardError> {
    if inst.k > guards.max_witness_symbols {
        return Err(GuardError(format!(
            "witness search limited to {} symbols, got {}",
            guards.max_witness_symbols, inst.k
        )));
    }
    let ctx = Context::new(inst);
    let k = ctx.k;
    if simple_mode && ctx.lambda > k as Count {
        return Ok(None);
    }
    let target_a = ctx.target_a();
    let target_b = ctx.target_b();
    if target_a < 0 || target_b < 0 {
        return Ok(None);
    }
    let mut a_hi = vec![0; k];
    let mut b_hi = vec![0; k];
    for l in 0..k {
        let pair_cap = ctx.free[l] - ctx.a_floor[l] - ctx.b_floor[l];
        let (a_cap, b_cap) = if simple_mode {
            (
                (0..ctx.r).map(|i| ctx.row_mult(i, l, true)).sum::<Count>() - ctx.a_floor[l],
                (0..ctx.s).map(|j| ctx.col_mult(j, l, true)).sum::<Count>() - ctx.b_floor[l],
            )
        } else {
            (
                ctx.lambda * ctx.r as Count - ctx.totals[l] - ctx.a_floor[l],
                ctx.lambda * ctx.s as Count - ctx.totals[l] - ctx.b_floor[l],
            )
        };
        a_hi[l] = a_cap.min(pair_cap).min(target_a);
        b_hi[l] = b_cap.min(pair_cap).min(target_b);
        if a_hi[l] < 0 || b_hi[l] < 0 {
            return Ok(None);
        }
    }
    let volume: u128 = a_hi
        .iter()
        .chain(b_hi.iter())
        .map(|&v| (v as u128) + 1)
        .product();
    if volume > guards.max_witness_box {
        return Err(GuardError(format!(
            "witness box volume {} exceeds the {} guard",
            volume, guards.max_witness_box
        )));
    }

    fn vectors(
        hi: &[Count],
        idx: usize,
        remaining: Count,
        current: &mut Vec<Count>,
        emit: &mut impl FnMut(&[Count]) -> bool,
    ) -> bool {
        if idx == hi.len() {
            return remaining == 0 && emit(current);
        }
        let suffix: Count = hi[idx + 1..].iter().sum();
        let low = (remaining - suffix).max(0);
        let high = remaining.min(hi[idx]);
        for v in low..=high {
            current.push(v);
            if vectors(hi, idx + 1, remaining - v, current, emit) {
                return true;
            }
            current.pop();
        }
        false
    }

    let mut found: Option<Witness> = None;
    vectors(&a_hi, 0, target_a, &mut Vec::new(), &mut |a| {
        let a = a.to_vec();
        vectors(&b_hi, 0, target_b, &mut Vec::new(), &mut |b| {
            if witness_satisfies_with_context(&ctx, &a, b, simple_mode) {
                found = Some(Witness::from_parts(inst, a.clone(), b.to_vec()));
                true
            } else {
                false
            }
        })
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::check_admissible;
    use crate::model::verify_square;

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
    fn finds_the_unique_latin_extension() {
        let i = inst(1, 1, 2, 2, 1, &[2, 2], vec![vec![vec![1, 0]]]);
        let sq = brute_extend(&i, false, &OracleGuards::default())
            .unwrap()
            .unwrap();
        assert_eq!(sq.cells[0][1], vec![0, 1]);
        assert_eq!(sq.cells[1][0], vec![0, 1]);
        assert_eq!(sq.cells[1][1], vec![1, 0]);
        assert!(verify_square(&sq, Some(&i), false).is_valid());
    }

    #[test]
    fn reports_no_extension_for_the_starved_symbol() {
        let cells = vec![
            vec![vec![1, 0, 0], vec![0, 1, 0]],
            vec![vec![0, 1, 0], vec![1, 0, 0]],
        ];
        let i = inst(2, 2, 3, 3, 1, &[3, 3, 3], cells);
        assert!(brute_extend(&i, false, &OracleGuards::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn full_square_input_is_returned_unchanged() {
        let cells = vec![
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, 1], vec![1, 0]],
        ];
        let i = inst(2, 2, 2, 2, 1, &[2, 2], cells.clone());
        let sq = brute_extend(&i, false, &OracleGuards::default())
            .unwrap()
            .unwrap();
        assert_eq!(sq.cells, cells);
    }

    #[test]
    fn guards_reject_oversized_requests() {
        let i = inst(0, 0, 9, 9, 1, &[9; 9], vec![]);
        assert!(brute_extend(&i, false, &OracleGuards::default()).is_err());
        let bounds = ScaleBounds {
            max_n: 5,
            max_k: 5,
            max_lambda: 1,
        };
        let res = enumerate_instances(
            &bounds,
            &InstanceFilter::default(),
            &OracleGuards::default(),
            |_| {},
        );
        assert!(res.is_err());
    }

    #[test]
    fn order_one_corpus_is_exactly_four_instances() {
        let bounds = ScaleBounds {
            max_n: 1,
            max_k: 1,
            max_lambda: 1,
        };
        let mut seen = Vec::new();
        enumerate_instances(
            &bounds,
            &InstanceFilter::default(),
            &OracleGuards::default(),
            |i| seen.push((i.r, i.s)),
        )
        .unwrap();
        assert_eq!(seen, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn restricted_corpus_count_matches_hand_formula() {
        let bounds = ScaleBounds {
            max_n: 2,
            max_k: 2,
            max_lambda: 1,
        };
        let mut count = 0;
        enumerate_instances(
            &bounds,
            &InstanceFilter::default(),
            &OracleGuards::default(),
            |i| {
                if i.n == 2 && i.r == 1 && i.s == 1 {
                    count += 1;
                }
            },
        )
        .unwrap();
        // Only rho = (2, 2) is valid, and a single cell holds symbol 1 or 2.
        assert_eq!(count, 2);
    }

    #[test]
    fn digest_is_reproducible() {
        let bounds = ScaleBounds {
            max_n: 2,
            max_k: 3,
            max_lambda: 1,
        };
        let run = || {
            enumerate_instances(
                &bounds,
                &InstanceFilter::default(),
                &OracleGuards::default(),
                |_| {},
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn witness_search_is_a_single_point_in_the_uniform_regime() {
        let i = inst(1, 1, 2, 2, 2, &[4, 4], vec![vec![vec![1, 1]]]);
        let w = witness_search(&i, true, &OracleGuards::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.a, vec![0, 0]);
        assert_eq!(w.b, vec![0, 0]);
    }

    #[test]
    fn witness_search_agrees_with_the_solver_on_small_cases() {
        let guards = OracleGuards::default();
        let bounds = ScaleBounds {
            max_n: 2,
            max_k: 3,
            max_lambda: 1,
        };
        let mut checked = 0;
        enumerate_instances(&bounds, &InstanceFilter::default(), &guards, |i| {
            let via_flow = check_admissible(i, false).is_ok();
            let via_search = witness_search(i, false, &guards).unwrap().is_some();
            assert_eq!(via_flow, via_search, "disagreement on {:?}", i);
            checked += 1;
        })
        .unwrap();
        assert!(checked > 50, "corpus unexpectedly small: {}", checked);
    }

    #[test]
    fn witness_search_returns_none_on_starved_instances() {
        let cells = vec![
            vec![vec![1, 0, 0], vec![0, 1, 0]],
            vec![vec![0, 1, 0], vec![1, 0, 0]],
        ];
        let i = inst(2, 2, 3, 3, 1, &[3, 3, 3], cells);
        assert!(witness_search(&i, false, &OracleGuards::default())
            .unwrap()
            .is_none());
    }
}
