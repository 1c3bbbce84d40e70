// Temporary sizing probe for the acceptance corpora. Not part of the build.

use std::time::Instant;

use latin_forge::admissibility::check_admissible;
use latin_forge::corollaries::hall_check;
use latin_forge::factors::{f_factor, ore_condition_holds, BipartiteMultigraph, DegreeSpec};
use latin_forge::model::Count;
use latin_forge::oracle::{
    brute_extend, enumerate_instances, InstanceFilter, OracleGuards, ScaleBounds,
};

fn main() {
    let guards = OracleGuards::default();

    // Criterion 6 corpus: s = n, n <= 3, k <= 4, lambda <= 2.
    let start = Instant::now();
    let bounds = ScaleBounds {
        max_n: 3,
        max_k: 4,
        max_lambda: 2,
    };
    for simple in [false, true] {
        let t = Instant::now();
        let filter = InstanceFilter {
            simple_only: simple,
            s_equals_n: true,
            ..InstanceFilter::default()
        };
        let mut count: u64 = 0;
        let mut agree: u64 = 0;
        enumerate_instances(&bounds, &filter, &guards, |inst| {
            count += 1;
            let closed = hall_check(inst, simple).unwrap().ok;
            let solver = check_admissible(inst, simple).is_ok();
            assert_eq!(closed, solver);
            agree += 1;
        })
        .unwrap();
        println!(
            "criterion6 simple={}: {} instances, {} checked, {:?}",
            simple,
            count,
            agree,
            t.elapsed()
        );
    }
    println!("criterion6 total: {:?}", start.elapsed());

    // Criterion 1 corpus: n <= 2, k <= 3, lambda <= 2 with brute_extend.
    let t = Instant::now();
    let bounds = ScaleBounds {
        max_n: 2,
        max_k: 3,
        max_lambda: 2,
    };
    let mut count = 0u64;
    enumerate_instances(&bounds, &InstanceFilter::default(), &guards, |inst| {
        let a = check_admissible(inst, false).is_ok();
        let b = brute_extend(inst, false, &guards).unwrap().is_some();
        assert_eq!(a, b);
        count += 1;
    })
    .unwrap();
    println!("criterion1 exhaustive: {} instances, {:?}", count, t.elapsed());

    // Criterion 8 inner-loop cost: one mid-size shape, timed.
    let t = Instant::now();
    let sym_count = 4usize;
    let mut fy_by_sum: Vec<Vec<Vec<Count>>> = vec![Vec::new(); 17];
    let mut v = vec![0 as Count; sym_count];
    loop {
        fy_by_sum[v.iter().sum::<Count>() as usize].push(v.clone());
        let mut i = 0;
        loop {
            if i == sym_count {
                break;
            }
            v[i] += 1;
            if v[i] <= 4 {
                break;
            }
            v[i] = 0;
            i += 1;
        }
        if i == sym_count {
            break;
        }
    }
    let mut checked = 0u64;
    let mut state: u64 = 5;
    let mut next = move |bound: u64| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) % bound
    };
    // 20k random (graph, fx) pairs at the dominant shape, all matching fy.
    for _ in 0..20_000 {
        let mult: Vec<Vec<Count>> = (0..3)
            .map(|_| (0..sym_count).map(|_| next(3) as Count).collect())
            .collect();
        let g = BipartiteMultigraph::new(mult, sym_count);
        let fx: Vec<Count> = (0..3).map(|_| next(5) as Count).collect();
        let sum: Count = fx.iter().sum();
        let mut spec = DegreeSpec::new(fx, vec![0; sym_count]);
        for fy in &fy_by_sum[sum as usize] {
            spec.symbol.copy_from_slice(fy);
            let flow = f_factor(&g, &spec).is_some();
            std::hint::black_box(flow);
            checked += 1;
        }
    }
    let per = t.elapsed().as_nanos() as f64 / checked as f64;
    println!(
        "criterion8 sample: {} checks in {:?} ({:.0} ns/check)",
        checked,
        t.elapsed(),
        per
    );
    let full_estimate = 3.2e8 * per / 1e9;
    println!("criterion8 full-sweep estimate: {:.0} s", full_estimate);
}
