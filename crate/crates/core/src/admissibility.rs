//! Decides whether a rectangle extends to a square of the requested shape.
//!
//! The defining condition systems quantify existentially over a vector pair
//! `(a, b)` subject to sum equalities, per-symbol windows and two families of
//! `2^k` subset inequalities. Rather than searching that space, feasibility
//! is decided on a single flow network whose integral solutions project
//! exactly onto valid witness pairs: rows and columns are the fixed supplies,
//! per-symbol block occupancies are the arcs holding the witness, and the
//! subset inequalities appear as the network's cut conditions. The literal
//! inequality systems are kept alongside ([`recheck_conditions`]) purely as
//! a cross-validation oracle.

use serde::Serialize;

use crate::factors::FlowNetwork;
use crate::model::{monus, Count, Instance};
use crate::GuardError;

/// Witness pair `(a, b)` together with the derived per-symbol block counts:
/// `block_a[l]`/`block_b[l]` copies of symbol `l + 1` go to the right/bottom
/// extension blocks and `block_c[l]` to the corner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub a: Vec<Count>,
    pub b: Vec<Count>,
    pub a_floor: Vec<Count>,
    pub b_floor: Vec<Count>,
    pub block_a: Vec<Count>,
    pub block_b: Vec<Count>,
    pub block_c: Vec<Count>,
}

impl Witness {
    pub fn from_parts(inst: &Instance, a: Vec<Count>, b: Vec<Count>) -> Self {
        let ctx = Context::new(inst);
        assert_eq!(a.len(), inst.k);
        assert_eq!(b.len(), inst.k);
        let block_a: Vec<Count> = (0..inst.k).map(|l| a[l] + ctx.a_floor[l]).collect();
        let block_b: Vec<Count> = (0..inst.k).map(|l| b[l] + ctx.b_floor[l]).collect();
        let block_c: Vec<Count> = (0..inst.k)
            .map(|l| ctx.free[l] - block_a[l] - block_b[l])
            .collect();
        Witness {
            a,
            b,
            a_floor: ctx.a_floor,
            b_floor: ctx.b_floor,
            block_a,
            block_b,
            block_c,
        }
    }
}

/// Why an instance admits no extension, with the deficient side of the
/// certifying cut translated back to symbols where possible (best effort,
/// not guaranteed minimal).
#[derive(Debug, Clone, Serialize)]
pub struct NotAdmissible {
    pub reason: String,
    pub deficit: Count,
    /// 1-based symbols touching the deficient cut side.
    pub symbol_hint: Vec<usize>,
}

impl std::fmt::Display for NotAdmissible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.reason)?;
        if !self.symbol_hint.is_empty() {
            write!(f, " (symbols involved: {:?})", self.symbol_hint)?;
        }
        Ok(())
    }
}

/// Precomputed per-instance quantities shared by the solver and the checkers.
pub(crate) struct Context {
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub k: usize,
    pub lambda: Count,
    /// `|M_l|`
    pub totals: Vec<Count>,
    /// `|M_l^i|`, indexed `[i][l]`
    pub row: Vec<Vec<Count>>,
    /// `|^j M_l|`, indexed `[j][l]`
    pub col: Vec<Vec<Count>>,
    /// `rho_l - |M_l|`
    pub free: Vec<Count>,
    /// `(rho_l - |M_l| + lambda r) .- lambda n`
    pub a_floor: Vec<Count>,
    /// `(rho_l - |M_l| + lambda s) .- lambda n`
    pub b_floor: Vec<Count>,
}

impl Context {
    pub fn new(inst: &Instance) -> Self {
        let counts = inst.symbol_counts();
        let lambda = inst.lambda;
        let (r, s, n, k) = (inst.r as Count, inst.s as Count, inst.n as Count, inst.k);
        let free: Vec<Count> = (0..k).map(|l| inst.rho[l] - counts.per_symbol[l]).collect();
        let a_floor: Vec<Count> = (0..k)
            .map(|l| monus(free[l] + lambda * r, lambda * n))
            .collect();
        let b_floor: Vec<Count> = (0..k)
            .map(|l| monus(free[l] + lambda * s, lambda * n))
            .collect();
        Context {
            r: inst.r,
            s: inst.s,
            n: inst.n,
            k,
            lambda,
            totals: counts.per_symbol,
            row: counts.per_row,
            col: counts.per_col,
            free,
            a_floor,
            b_floor,
        }
    }

    /// Edge multiplicity row `i` -- symbol `l` in the row/symbol graph.
    pub fn row_mult(&self, i: usize, l: usize, simple: bool) -> Count {
        let slack = self.lambda - self.row[i][l];
        if simple {
            slack.min((self.n - self.s) as Count)
        } else {
            slack
        }
    }

    /// Edge multiplicity column `j` -- symbol `l` in the column/symbol graph.
    pub fn col_mult(&self, j: usize, l: usize, simple: bool) -> Count {
        let slack = self.lambda - self.col[j][l];
        if simple {
            slack.min((self.n - self.r) as Count)
        } else {
            slack
        }
    }

    pub fn row_supply(&self) -> Count {
        self.lambda * (self.n - self.s) as Count
    }

    pub fn col_supply(&self) -> Count {
        self.lambda * (self.n - self.r) as Count
    }

    pub fn target_a(&self) -> Count {
        self.row_supply() * self.r as Count - self.a_floor.iter().sum::<Count>()
    }

    pub fn target_b(&self) -> Count {
        self.col_supply() * self.s as Count - self.b_floor.iter().sum::<Count>()
    }

    pub fn corner_area(&self) -> Count {
        ((self.n - self.r) * (self.n - self.s)) as Count
    }
}

/// Decides (simple) admissibility and produces a certifying witness.
///
/// The instance must already pass [`Instance::validate`] for the same mode.
pub fn check_admissible(inst: &Instance, simple_mode: bool) -> Result<Witness, NotAdmissible> {
    debug_assert!(inst.validate(simple_mode).is_valid());
    let ctx = Context::new(inst);
    if simple_mode && ctx.lambda > ctx.k as Count {
        return Err(NotAdmissible {
            reason: format!(
                "a simple square needs lambda <= k, got lambda = {}, k = {}",
                ctx.lambda, ctx.k
            ),
            deficit: ctx.lambda - ctx.k as Count,
            symbol_hint: Vec::new(),
        });
    }
    // The forced part of each symbol's block occupancy cannot exceed the
    // total row (column) slack available to that symbol.
    for l in 0..ctx.k {
        let row_cap: Count = (0..ctx.r).map(|i| ctx.row_mult(i, l, simple_mode)).sum();
        if ctx.a_floor[l] > row_cap {
            return Err(NotAdmissible {
                reason: format!(
                    "symbol {} must occur at least {} times right of the rectangle \
                     but only {} slots admit it",
                    l + 1,
                    ctx.a_floor[l],
                    row_cap
                ),
                deficit: ctx.a_floor[l] - row_cap,
                symbol_hint: vec![l + 1],
            });
        }
        let col_cap: Count = (0..ctx.s).map(|j| ctx.col_mult(j, l, simple_mode)).sum();
        if ctx.b_floor[l] > col_cap {
            return Err(NotAdmissible {
                reason: format!(
                    "symbol {} must occur at least {} times below the rectangle \
                     but only {} slots admit it",
                    l + 1,
                    ctx.b_floor[l],
                    col_cap
                ),
                deficit: ctx.b_floor[l] - col_cap,
                symbol_hint: vec![l + 1],
            });
        }
    }

    let (r, s, k) = (ctx.r, ctx.s, ctx.k);
    let source = 0;
    let sink = 1;
    let row_base = 2;
    let col_base = 2 + r;
    let sym_a_base = 2 + r + s;
    let sym_b_base = 2 + r + s + k;
    let hub_base = 2 + r + s + 2 * k;
    let mut net = FlowNetwork::new(2 + r + s + 3 * k, source, sink);

    for i in 0..r {
        net.add_arc(source, row_base + i, ctx.row_supply(), ctx.row_supply());
    }
    for j in 0..s {
        net.add_arc(source, col_base + j, ctx.col_supply(), ctx.col_supply());
    }
    for i in 0..r {
        for l in 0..k {
            let m = ctx.row_mult(i, l, simple_mode);
            if m > 0 {
                net.add_arc(row_base + i, sym_a_base + l, 0, m);
            }
        }
    }
    for j in 0..s {
        for l in 0..k {
            let m = ctx.col_mult(j, l, simple_mode);
            if m > 0 {
                net.add_arc(col_base + j, sym_b_base + l, 0, m);
            }
        }
    }
    let mut a_arcs = Vec::with_capacity(k);
    let mut b_arcs = Vec::with_capacity(k);
    for l in 0..k {
        let row_cap: Count = (0..r).map(|i| ctx.row_mult(i, l, simple_mode)).sum();
        a_arcs.push(net.add_arc(sym_a_base + l, hub_base + l, ctx.a_floor[l], row_cap));
    }
    for l in 0..k {
        let col_cap: Count = (0..s).map(|j| ctx.col_mult(j, l, simple_mode)).sum();
        b_arcs.push(net.add_arc(sym_b_base + l, hub_base + l, ctx.b_floor[l], col_cap));
    }
    for l in 0..k {
        debug_assert!(ctx.free[l] >= 0, "validated instances satisfy |M_l| <= rho_l");
        let hub_lower = if simple_mode {
            monus(ctx.free[l], ctx.corner_area())
        } else {
            0
        };
        net.add_arc(hub_base + l, sink, hub_lower, ctx.free[l]);
    }
    let total_supply = ctx.row_supply() * r as Count + ctx.col_supply() * s as Count;
    net.add_arc(sink, source, 0, total_supply);

    match net.feasible_flow() {
        Ok(assignment) => {
            let a: Vec<Count> = (0..k)
                .map(|l| assignment.flow[a_arcs[l]] - ctx.a_floor[l])
                .collect();
            let b: Vec<Count> = (0..k)
                .map(|l| assignment.flow[b_arcs[l]] - ctx.b_floor[l])
                .collect();
            Ok(Witness::from_parts(inst, a, b))
        }
        Err(infeasible) => {
            let mut symbol_hint = Vec::new();
            for l in 0..k {
                if infeasible.source_side[sym_a_base + l]
                    || infeasible.source_side[sym_b_base + l]
                    || infeasible.source_side[hub_base + l]
                {
                    symbol_hint.push(l + 1);
                }
            }
            Err(NotAdmissible {
                reason: format!(
                    "no placement satisfies the demanded symbol counts; \
                     the blocking cut is short by {} placements",
                    infeasible.deficit
                ),
                deficit: infeasible.deficit,
                symbol_hint,
            })
        }
    }
}

/// One evaluated inequality of a condition system.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    /// 1-based symbol subset, for the `2^k` families.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    pub lhs: Count,
    pub rhs: Count,
    pub ok: bool,
}

impl ConditionCheck {
    fn le(name: impl Into<String>, subset: Option<Vec<usize>>, lhs: Count, rhs: Count) -> Self {
        ConditionCheck {
            name: name.into(),
            subset,
            lhs,
            rhs,
            ok: lhs <= rhs,
        }
    }

    fn eq(name: impl Into<String>, lhs: Count, rhs: Count) -> Self {
        ConditionCheck {
            name: name.into(),
            subset: None,
            lhs,
            rhs,
            ok: lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

fn mask_symbols(mask: u32, k: usize) -> Vec<usize> {
    (0..k).filter(|l| mask >> l & 1 == 1).map(|l| l + 1).collect()
}

/// Evaluates every inequality of the (simple) admissibility definition for a
/// given witness, including both `2^k` subset families. This is the literal
/// transcription of the condition systems and deliberately shares nothing
/// with the flow solver.
pub fn recheck_conditions(
    inst: &Instance,
    w: &Witness,
    simple_mode: bool,
) -> Result<ConditionReport, GuardError> {
    if inst.k > 20 {
        return Err(GuardError(format!(
            "subset enumeration limited to 20 symbols, got {}",
            inst.k
        )));
    }
    let ctx = Context::new(inst);
    let k = ctx.k;
    let lambda = ctx.lambda;
    let (rr, ss, nn) = (ctx.r as Count, ctx.s as Count, ctx.n as Count);
    let mut report = ConditionReport::default();

    for l in 0..k {
        report
            .checks
            .push(ConditionCheck::le(format!("a_nonneg[{}]", l + 1), None, 0, w.a[l]));
        report
            .checks
            .push(ConditionCheck::le(format!("b_nonneg[{}]", l + 1), None, 0, w.b[l]));
    }
    report.checks.push(ConditionCheck::eq(
        "sum_a",
        w.a.iter().sum::<Count>(),
        ctx.target_a(),
    ));
    report.checks.push(ConditionCheck::eq(
        "sum_b",
        w.b.iter().sum::<Count>(),
        ctx.target_b(),
    ));

    if simple_mode {
        report.checks.push(ConditionCheck::le(
            "lambda_le_k",
            None,
            lambda,
            k as Count,
        ));
    }

    for l in 0..k {
        if simple_mode {
            let row_cap: Count = (0..ctx.r).map(|i| ctx.row_mult(i, l, true)).sum();
            let col_cap: Count = (0..ctx.s).map(|j| ctx.col_mult(j, l, true)).sum();
            report.checks.push(ConditionCheck::le(
                format!("a_upper_simple[{}]", l + 1),
                None,
                w.a[l],
                row_cap - ctx.a_floor[l],
            ));
            report.checks.push(ConditionCheck::le(
                format!("b_upper_simple[{}]", l + 1),
                None,
                w.b[l],
                col_cap - ctx.b_floor[l],
            ));
        } else {
            report.checks.push(ConditionCheck::le(
                format!("a_upper[{}]", l + 1),
                None,
                w.a[l],
                lambda * rr - ctx.totals[l] - ctx.a_floor[l],
            ));
            report.checks.push(ConditionCheck::le(
                format!("b_upper[{}]", l + 1),
                None,
                w.b[l],
                lambda * ss - ctx.totals[l] - ctx.b_floor[l],
            ));
        }
        report.checks.push(ConditionCheck::le(
            format!("pair_upper[{}]", l + 1),
            None,
            w.a[l] + w.b[l],
            ctx.free[l] - ctx.a_floor[l] - ctx.b_floor[l],
        ));
        if simple_mode {
            report.checks.push(ConditionCheck::le(
                format!("pair_lower[{}]", l + 1),
                None,
                ctx.free[l] - ctx.a_floor[l] - ctx.b_floor[l] - ctx.corner_area(),
                w.a[l] + w.b[l],
            ));
        }
    }

    if simple_mode {
        for i in 0..ctx.r {
            let cap: Count = (0..k).map(|l| ctx.row_mult(i, l, true)).sum();
            report.checks.push(ConditionCheck::le(
                format!("row_min_sum[{}]", i + 1),
                None,
                ctx.row_supply(),
                cap,
            ));
        }
        for j in 0..ctx.s {
            let cap: Count = (0..k).map(|l| ctx.col_mult(j, l, true)).sum();
            report.checks.push(ConditionCheck::le(
                format!("col_min_sum[{}]", j + 1),
                None,
                ctx.col_supply(),
                cap,
            ));
        }
    }

    for mask in 0u32..(1 << k) {
        let subset = mask_symbols(mask, k);
        let size = subset.len() as Count;
        let mut lhs_rows: Count = 0;
        for i in 0..ctx.r {
            if simple_mode {
                let mut inside = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        inside += ctx.row_mult(i, l, true);
                    }
                }
                lhs_rows += monus(ctx.row_supply(), inside);
            } else {
                let mut in_row = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        in_row += ctx.row[i][l];
                    }
                }
                lhs_rows += monus(lambda * nn - lambda * ss + in_row, lambda * size);
            }
        }
        let mut rhs_rows: Count = 0;
        for l in 0..k {
            if mask >> l & 1 == 0 {
                rhs_rows += w.a[l] + ctx.a_floor[l];
            }
        }
        report.checks.push(ConditionCheck::le(
            if simple_mode {
                "row_subset_simple"
            } else {
                "row_subset"
            },
            Some(subset.clone()),
            lhs_rows,
            rhs_rows,
        ));

        let mut lhs_cols: Count = 0;
        for j in 0..ctx.s {
            if simple_mode {
                let mut inside = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        inside += ctx.col_mult(j, l, true);
                    }
                }
                lhs_cols += monus(ctx.col_supply(), inside);
            } else {
                let mut in_col = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        in_col += ctx.col[j][l];
                    }
                }
                lhs_cols += monus(lambda * nn - lambda * rr + in_col, lambda * size);
            }
        }
        let mut rhs_cols: Count = 0;
        for l in 0..k {
            if mask >> l & 1 == 0 {
                rhs_cols += w.b[l] + ctx.b_floor[l];
            }
        }
        report.checks.push(ConditionCheck::le(
            if simple_mode {
                "col_subset_simple"
            } else {
                "col_subset"
            },
            Some(subset),
            lhs_cols,
            rhs_cols,
        ));
    }

    Ok(report)
}

/// Boolean fast path over the same inequality systems, used by the
/// witness-space search oracle. Short-circuits on the first failure.
pub fn witness_satisfies_definition(
    inst: &Instance,
    a: &[Count],
    b: &[Count],
    simple_mode: bool,
) -> bool {
    let ctx = Context::new(inst);
    witness_satisfies_with_context(&ctx, a, b, simple_mode)
}

pub(crate) fn witness_satisfies_with_context(
    ctx: &Context,
    a: &[Count],
    b: &[Count],
    simple_mode: bool,
) -> bool {
    let k = ctx.k;
    let lambda = ctx.lambda;
    if a.iter().chain(b.iter()).any(|&v| v < 0) {
        return false;
    }
    if simple_mode && lambda > k as Count {
        return false;
    }
    if a.iter().sum::<Count>() != ctx.target_a() || b.iter().sum::<Count>() != ctx.target_b() {
        return false;
    }
    for l in 0..k {
        let (a_cap, b_cap) = if simple_mode {
            (
                (0..ctx.r).map(|i| ctx.row_mult(i, l, true)).sum::<Count>() - ctx.a_floor[l],
                (0..ctx.s).map(|j| ctx.col_mult(j, l, true)).sum::<Count>() - ctx.b_floor[l],
            )
        } else {
            (
                lambda * ctx.r as Count - ctx.totals[l] - ctx.a_floor[l],
                lambda * ctx.s as Count - ctx.totals[l] - ctx.b_floor[l],
            )
        };
        if a[l] > a_cap || b[l] > b_cap {
            return false;
        }
        let pair_cap = ctx.free[l] - ctx.a_floor[l] - ctx.b_floor[l];
        if a[l] + b[l] > pair_cap {
            return false;
        }
        if simple_mode && a[l] + b[l] < pair_cap - ctx.corner_area() {
            return false;
        }
    }
    if simple_mode {
        for i in 0..ctx.r {
            if (0..k).map(|l| ctx.row_mult(i, l, true)).sum::<Count>() < ctx.row_supply() {
                return false;
            }
        }
        for j in 0..ctx.s {
            if (0..k).map(|l| ctx.col_mult(j, l, true)).sum::<Count>() < ctx.col_supply() {
                return false;
            }
        }
    }
    for mask in 0u32..(1 << k) {
        let size = (mask.count_ones()) as Count;
        let mut lhs_rows: Count = 0;
        for i in 0..ctx.r {
            if simple_mode {
                let mut inside = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        inside += ctx.row_mult(i, l, true);
                    }
                }
                lhs_rows += monus(ctx.row_supply(), inside);
            } else {
                let mut in_row = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        in_row += ctx.row[i][l];
                    }
                }
                lhs_rows += monus(
                    lambda * (ctx.n - ctx.s) as Count + in_row,
                    lambda * size,
                );
            }
        }
        let mut rhs_rows: Count = 0;
        let mut rhs_cols: Count = 0;
        for l in 0..k {
            if mask >> l & 1 == 0 {
                rhs_rows += a[l] + ctx.a_floor[l];
                rhs_cols += b[l] + ctx.b_floor[l];
            }
        }
        if lhs_rows > rhs_rows {
            return false;
        }
        let mut lhs_cols: Count = 0;
        for j in 0..ctx.s {
            if simple_mode {
                let mut inside = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        inside += ctx.col_mult(j, l, true);
                    }
                }
                lhs_cols += monus(ctx.col_supply(), inside);
            } else {
                let mut in_col = 0;
                for l in 0..k {
                    if mask >> l & 1 == 1 {
                        in_col += ctx.col[j][l];
                    }
                }
                lhs_cols += monus(
                    lambda * (ctx.n - ctx.r) as Count + in_col,
                    lambda * size,
                );
            }
        }
        if lhs_cols > rhs_cols {
            return false;
        }
    }
    true
}

/// Linear-time necessary screen: every symbol's missing occurrences must fit
/// in the new rows and columns. `false` means definitely not admissible;
/// `true` is inconclusive.
pub fn necessary_quick_check(inst: &Instance) -> bool {
    let ctx = Context::new(inst);
    let budget = ctx.lambda * (2 * ctx.n - ctx.r - ctx.s) as Count;
    (0..ctx.k).all(|l| ctx.free[l] <= budget)
}
