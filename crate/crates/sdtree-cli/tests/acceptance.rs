//! Acceptance gate: one test per shipping criterion, each printing a
//! PASS/FAIL line (visible under --nocapture) and enforcing its time budget.
//!
//! Expected tables are frozen here, independent of the library's own
//! constants, so a drift in either is caught.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use sdtree::counting::{alpha, theta_table};
use sdtree::formulas::{
    c_asc, c_desc, c_max, delta, mind_bounds, normalized_colless, sigma, takagi_dyadic, weight,
    CAscMethod, DeltaMethod, SigmaMethod, TakagiMethod,
};
use sdtree::mind::{enumerate_mind, mind_ascending, mind_descending};
use sdtree::oracle::enumerate_shapes;
use sdtree::sumplan::{error_report, heuristic_mind_plan, plan_in_input_order};
use sdtree::tree::{
    make_complete_full_binary, make_divide_and_conquer, make_ladder, make_perfect, CanonicalForm,
    Tree,
};

fn criterion(name: &str, budget: Option<Duration>, body: impl FnOnce()) {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    let pass = result.is_ok() && in_budget;
    println!(
        "acceptance: {name}: {} ({elapsed:.2?})",
        if pass { "PASS" } else { "FAIL" }
    );
    if let Err(panic) = result {
        resume_unwind(panic);
    }
    assert!(in_budget, "{name} took {elapsed:?}, budget {budget:?}");
}

fn sdtree_bin(args: &[&str]) -> String {
    let output = Command::new(env!("CARGO_BIN_EXE_sdtree"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).unwrap()
}

// Shape counts by S-node count, n = 2..=16, entries s = 1..=n-1.
const THETA_ROWS: &[(usize, &[u64])] = &[
    (2, &[1]),
    (3, &[1, 0]),
    (4, &[1, 0, 1]),
    (5, &[1, 1, 1, 0]),
    (6, &[1, 2, 2, 1, 0]),
    (7, &[1, 4, 3, 3, 0, 0]),
    (8, &[1, 6, 7, 6, 3, 0, 1]),
    (9, &[1, 9, 14, 13, 8, 1, 1, 0]),
    (10, &[1, 12, 27, 28, 23, 8, 3, 1, 0]),
    (11, &[1, 16, 49, 58, 54, 25, 8, 3, 0, 0]),
    (12, &[1, 20, 82, 119, 125, 82, 34, 15, 2, 1, 0]),
    (13, &[1, 25, 132, 237, 270, 213, 99, 42, 8, 3, 0, 0]),
    (14, &[1, 30, 199, 449, 578, 542, 322, 151, 51, 11, 3, 0, 0]),
    (15, &[1, 36, 294, 821, 1190, 1255, 867, 440, 173, 39, 15, 0, 0, 0]),
    (16, &[1, 42, 414, 1419, 2394, 2841, 2338, 1388, 656, 215, 79, 18, 7, 0, 1]),
];

// Row sums of the above; index n - 1.
const ALPHA_1_TO_16: [u64; 16] =
    [1, 1, 1, 2, 3, 6, 11, 24, 47, 103, 214, 481, 1030, 2337, 5131, 11813];

const SIGMA_2_TO_16: [u64; 15] = [1, 1, 3, 2, 3, 4, 7, 5, 5, 5, 7, 7, 9, 11, 15];
const DELTA_2_TO_16: [u64; 15] = [0, 1, 0, 2, 2, 2, 0, 3, 4, 5, 4, 5, 4, 3, 0];

fn expected_theta_csv(by_d: bool) -> String {
    let cols = 15;
    let mut out = String::from("n");
    for c in 0..cols {
        if by_d {
            out.push_str(&format!(",d={c}"));
        } else {
            out.push_str(&format!(",s={}", c + 1));
        }
    }
    out.push_str(",alpha\n");
    for &(n, row) in THETA_ROWS {
        out.push_str(&n.to_string());
        for c in 0..cols {
            out.push(',');
            if c <= n - 2 {
                let s_index = if by_d { n - 2 - c } else { c };
                out.push_str(&row[s_index].to_string());
            }
        }
        out.push_str(&format!(",{}\n", ALPHA_1_TO_16[n - 1]));
    }
    out
}

#[test]
fn c01_shape_counts_by_s_and_d() {
    criterion("theta-by-s-and-d", Some(Duration::from_secs(1)), || {
        let by_s = sdtree_bin(&["count", "theta", "--n-max", "16", "--view", "s"]);
        assert_eq!(by_s, expected_theta_csv(false));
        let by_d = sdtree_bin(&["count", "theta", "--n-max", "16", "--view", "d"]);
        assert_eq!(by_d, expected_theta_csv(true));

        let table = theta_table(16).unwrap();
        assert_eq!(table.alpha(16), BigUint::from(11813u64));
        assert_eq!(table.theta(9, 5).unwrap(), BigUint::from(8u64));
        assert_eq!(table.theta(16, 15).unwrap(), BigUint::from(1u64));
    });
}

#[test]
fn c02_exhaustive_shape_census() {
    criterion("shape-census", Some(Duration::from_secs(60)), || {
        let table = theta_table(16).unwrap();
        for n in 1..=16u64 {
            let catalog = enumerate_shapes(n).unwrap();
            assert_eq!(BigUint::from(catalog.len() as u64), alpha(n).unwrap(), "n={n}");
            let histogram: Vec<BigUint> =
                catalog.s_histogram().into_iter().map(BigUint::from).collect();
            assert_eq!(histogram, table.row(n), "n={n}");
        }
    });
}

#[test]
fn c03_formula_methods_agree() {
    criterion("formula-agreement", Some(Duration::from_secs(10)), || {
        for n in 1..=100_000u64 {
            let s = sigma(n, SigmaMethod::Recursive).unwrap();
            assert_eq!(s, sigma(n, SigmaMethod::Levelwise).unwrap(), "n={n}");
            assert_eq!(s, sigma(n, SigmaMethod::Bitwise).unwrap(), "n={n}");

            let d = delta(n, DeltaMethod::Recursive).unwrap();
            assert_eq!(d, delta(n, DeltaMethod::Levelwise).unwrap(), "n={n}");
            assert_eq!(d, delta(n, DeltaMethod::Explicit).unwrap(), "n={n}");
            assert_eq!(d, delta(n, DeltaMethod::Recurrence).unwrap(), "n={n}");
            if !n.is_power_of_two() {
                assert_eq!(d, delta(n, DeltaMethod::Midpoint).unwrap(), "n={n}");
            }

            assert_eq!(s + d, n - 1, "n={n}");
        }
    });
}

#[test]
fn c04_leading_values_frozen() {
    criterion("frozen-leading-values", None, || {
        for (i, n) in (2..=16u64).enumerate() {
            assert_eq!(sigma(n, SigmaMethod::Recursive).unwrap(), SIGMA_2_TO_16[i], "n={n}");
            assert_eq!(delta(n, DeltaMethod::Recursive).unwrap(), DELTA_2_TO_16[i], "n={n}");
        }
    });
}

// (2 omega - 3)!! classes of minimum-D trees; empty product below 2.
fn odd_double_factorial(omega: u32) -> u64 {
    let mut product = 1u64;
    let mut k = 2 * omega as i64 - 3;
    while k > 1 {
        product *= k as u64;
        k -= 2;
    }
    product
}

#[test]
fn c05_minimum_d_classes() {
    criterion("mind-classes", Some(Duration::from_secs(120)), || {
        for n in 1..=14u64 {
            let omega = weight(n);
            let catalog = enumerate_shapes(n).unwrap();
            let min_d = catalog.stats.iter().map(|st| st.d_count).min().unwrap();
            assert_eq!(min_d, omega as u64 - 1, "n={n}");

            let minimizers: BTreeSet<CanonicalForm> = catalog
                .shapes
                .iter()
                .zip(&catalog.stats)
                .filter(|(_, st)| st.d_count == min_d)
                .map(|(tree, _)| tree.canonical_form())
                .collect();
            let enumerated = enumerate_mind(n).unwrap();
            let enumerated_forms: BTreeSet<CanonicalForm> =
                enumerated.iter().map(Tree::canonical_form).collect();
            assert_eq!(minimizers, enumerated_forms, "n={n}");
            // No class is listed twice.
            assert_eq!(enumerated.len(), enumerated_forms.len(), "n={n}");
            assert_eq!(enumerated.len() as u64, odd_double_factorial(omega), "n={n}");
        }
        assert_eq!(enumerate_mind(27).unwrap().len(), 15);
    });
}

#[test]
fn c06_colless_extremes() {
    criterion("colless-extremes", None, || {
        for n in 1..=14u64 {
            let catalog = enumerate_shapes(n).unwrap();
            let max = catalog.stats.iter().map(|st| st.colless).max().unwrap();
            let min = catalog.stats.iter().map(|st| st.colless).min().unwrap();
            assert_eq!(max, c_max(n).unwrap(), "n={n}");
            assert_eq!(max, make_ladder(n).colless_index(), "n={n}");
            assert_eq!(min, delta(n, DeltaMethod::Recursive).unwrap(), "n={n}");
            assert_eq!(min, make_divide_and_conquer(n).colless_index(), "n={n}");
            assert_eq!(min, make_complete_full_binary(n).colless_index(), "n={n}");
        }
    });
}

#[test]
fn c07_arrangement_colless_formulas() {
    criterion("arrangement-formulas", Some(Duration::from_secs(30)), || {
        for n in 1..=(1u64 << 14) {
            let desc = mind_descending(n).unwrap().colless_index();
            assert_eq!(desc, c_desc(n).unwrap(), "n={n}");
            let asc = mind_ascending(n).unwrap().colless_index();
            assert_eq!(asc, c_asc(n, CAscMethod::Recurrence).unwrap(), "n={n}");
            assert_eq!(asc, c_asc(n, CAscMethod::Closed).unwrap(), "n={n}");
        }
        assert_eq!(c_asc(5, CAscMethod::Closed).unwrap(), 3);
        assert_eq!(delta(5, DeltaMethod::Recursive).unwrap(), 2);
        assert_eq!(normalized_colless(3, 5).unwrap(), Ratio::new(1, 4));
        let c7 = c_asc(7, CAscMethod::Closed).unwrap();
        assert_eq!(normalized_colless(c7, 7).unwrap(), Ratio::new(5, 13));
    });
}

#[test]
fn c08_colless_bounds_chain() {
    criterion("bounds-chain", None, || {
        for n in 4..=4096u64 {
            let bounds = mind_bounds(n).unwrap();
            assert_eq!(bounds.c_desc, c_desc(n).unwrap());
            assert_eq!(bounds.c_asc, c_asc(n, CAscMethod::Closed).unwrap());
            assert_eq!(bounds.c_max, c_max(n).unwrap());
            assert_eq!(bounds.delta, delta(n, DeltaMethod::Explicit).unwrap());
            assert!(bounds.c_desc <= bounds.c_asc, "n={n}");

            let k = n.ilog2();
            let normalized = normalized_colless(bounds.c_asc, n).unwrap();
            assert_eq!(normalized, bounds.normalized_upper, "n={n}");
            // normalized < 2 floor(log2 n) / n, strictly.
            assert!(normalized < Ratio::new(2 * k as u64, n), "n={n}");
            // 2 floor(log2 n) / n <= 2 log2(n) / n.
            assert!(1u64 << k <= n, "n={n}");
            // 2 log2(n) / n <= floor(log2 n) / 2^(floor(log2 n) - 1),
            // cleared of logs: n^(2^k) <= 2^(k n).
            let lhs = BigUint::from(n).pow(1u32 << k);
            let rhs = BigUint::from(1u8) << (k as u64 * n) as usize;
            assert!(lhs <= rhs, "n={n}");
        }
        for n in 1..=14u64 {
            let lo = c_desc(n).unwrap();
            let hi = c_asc(n, CAscMethod::Closed).unwrap();
            for tree in enumerate_mind(n).unwrap() {
                let c = tree.colless_index();
                assert!(lo <= c && c <= hi, "n={n} colless={c} range=[{lo}, {hi}]");
            }
        }
    });
}

// Piecewise-linear tent sum: tau(r / 2^k) = sum over scales of the distance
// from r to the nearest multiple of 2^(k-m), all over 2^k.
fn tent_numerator(r: u64, k: u32) -> u64 {
    (0..k)
        .map(|m| {
            let modulus = 1u64 << (k - m);
            let rem = r % modulus;
            rem.min(modulus - rem)
        })
        .sum()
}

#[test]
fn c09_takagi_grid() {
    criterion("takagi-grid", Some(Duration::from_secs(10)), || {
        for k in 0..=12u32 {
            for r in 0..=(1u64 << k) {
                let value = takagi_dyadic(r, k, TakagiMethod::ViaDelta).unwrap();
                assert_eq!(value, takagi_dyadic(r, k, TakagiMethod::Series).unwrap(), "r={r} k={k}");
                assert_eq!(value, takagi_dyadic(r, k, TakagiMethod::Weighted).unwrap(), "r={r} k={k}");
                let tent = Ratio::new(tent_numerator(r, k), 1u64 << k);
                assert_eq!(value.to_ratio(), tent, "r={r} k={k}");
            }
        }
    });
}

#[test]
fn c10_summation_flagship() {
    criterion("summation-flagship", Some(Duration::from_secs(1)), || {
        let mut values = vec![(1u64 << 53) as f64];
        values.extend([1.0; 8]);

        let plan = heuristic_mind_plan(&values).unwrap();
        let report = error_report(&plan).unwrap();
        assert_eq!(report.ulp_distance, Some(0));
        assert_eq!(report.evaluated, ((1u64 << 53) + 8) as f64);
        // The schedule isolates the large value against a perfect 8-block.
        let expected_shape = make_perfect(3).join(&Tree::leaf(None));
        assert_eq!(plan.tree().canonical_form(), expected_shape.canonical_form());

        let ladder = plan_in_input_order(&make_ladder(9), &values).unwrap();
        let report = error_report(&ladder).unwrap();
        assert_eq!(report.evaluated, (1u64 << 53) as f64);
        assert_eq!(report.abs_error, Some(BigRational::from_integer(BigInt::from(8))));
        assert_eq!(report.ulp_distance, Some(4));
        assert_eq!(report.kahan_result, ((1u64 << 53) + 8) as f64);
    });
}
