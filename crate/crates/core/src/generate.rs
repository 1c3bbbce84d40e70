//! Seeded generation of guaranteed-admissible instances.
//!
//! A random prescribed-total vector is drawn, the empty rectangle with those
//! totals is completed to a full square, the symbols are relabeled by a
//! seeded permutation, and the square is truncated to the requested shape.
//! Truncations of squares are always admissible, so every generated instance
//! is a positive case by construction; the solvers never see the seed.

use crate::completion::complete;
use crate::model::{Count, Instance};
use crate::rng::Lcg64;

#[derive(Debug, Clone)]
pub struct GenerateParams {
    pub n: usize,
    pub k: usize,
    pub lambda: Count,
    pub r: usize,
    pub s: usize,
    pub simple: bool,
}

/// Builds one admissible instance for the parameters and seed, or explains
/// why the parameter set cannot produce any instance at all.
pub fn admissible_instance(params: &GenerateParams, seed: u64) -> Result<Instance, String> {
    let GenerateParams {
        n,
        k,
        lambda,
        r,
        s,
        simple,
    } = *params;
    if n == 0 || k == 0 || lambda < 1 {
        return Err("n, k and lambda must be positive".into());
    }
    if k < n {
        return Err(format!("k = {} must be at least n = {}", k, n));
    }
    if r > n || s > n {
        return Err(format!("r = {}, s = {} must be at most n = {}", r, s, n));
    }
    let nn = n as Count;
    let total = lambda * nn * nn;
    if (k as Count) > total {
        return Err(format!(
            "k = {} symbols cannot all appear among lambda*n^2 = {} slots",
            k, total
        ));
    }
    if simple && lambda > k as Count {
        return Err(format!(
            "simple squares need lambda <= k, got lambda = {}, k = {}",
            lambda, k
        ));
    }
    let cap = if simple {
        (lambda * nn).min(nn * nn)
    } else {
        lambda * nn
    };

    let mut rng = Lcg64::new(seed);
    let base = total / k as Count;
    let remainder = (total % k as Count) as usize;
    let mut rho: Vec<Count> = (0..k)
        .map(|l| if l < remainder { base + 1 } else { base })
        .collect();
    debug_assert!(rho.iter().all(|&v| 1 <= v && v <= cap));
    for _ in 0..4 * k {
        let from = rng.next_below(k as u64) as usize;
        let to = rng.next_below(k as u64) as usize;
        if from != to && rho[to] < cap && rho[from] > 1 {
            rho[to] += 1;
            rho[from] -= 1;
        }
    }

    let empty = Instance::new(0, 0, n, k, lambda, rho, vec![])
        .map_err(|e| format!("generated parameters are unusable: {}", e))?;
    debug_assert!(empty.validate(simple).is_valid());
    let square = complete(&empty, simple)
        .expect("empty rectangles within the caps are always admissible");

    let mut position: Vec<usize> = (0..k).collect();
    rng.shuffle(&mut position);
    let mut rho = vec![0; k];
    for l in 0..k {
        rho[position[l]] = square.rho[l];
    }
    let cells: Vec<Vec<Vec<Count>>> = (0..r)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let mut cell = vec![0; k];
                    for l in 0..k {
                        cell[position[l]] = square.cells[i][j][l];
                    }
                    cell
                })
                .collect()
        })
        .collect();
    let inst = Instance::new(r, s, n, k, lambda, rho, cells)
        .expect("truncated squares are structurally sound");
    debug_assert!(inst.validate(simple).is_valid());
    Ok(inst)
}
