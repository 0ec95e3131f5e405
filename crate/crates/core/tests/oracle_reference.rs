mod common;

use hk_core::{colength, colength_with, parse_trinomial, OracleConfig, PivotOrder, Trinomial};
use proptest::prelude::*;

use common::dense_hk;

fn term_text(e: &[u32]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| format!("x{i}^{k}"))
        .collect::<Vec<_>>()
        .join("*")
}

fn trinomial(p: u64, m: usize) -> impl Strategy<Value = Trinomial> {
    let mon = proptest::collection::vec(0u32..=3, m)
        .prop_filter("non-constant", |e| e.iter().any(|&k| k > 0));
    (
        proptest::collection::vec(mon, 3),
        proptest::collection::vec(1u64..p.max(2), 3),
    )
        .prop_filter_map("three distinct terms", move |(mons, coeffs)| {
            let text = mons
                .iter()
                .zip(&coeffs)
                .map(|(e, c)| format!("{c}*{}", term_text(e)))
                .collect::<Vec<_>>()
                .join(" + ");
            hk_core::parse_trinomial_in(&text, p, Some(m)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_dense_reference_two_vars(f in prop_oneof![trinomial(2, 2), trinomial(3, 2), trinomial(5, 2)]) {
        let p = f.p() as u64;
        for n in 1..=2u32 {
            if p.pow(n) > 25 {
                break;
            }
            prop_assert_eq!(colength(&f, n).unwrap(), dense_hk(&f, p.pow(n)));
        }
    }

    #[test]
    fn matches_dense_reference_three_vars(f in prop_oneof![trinomial(2, 3), trinomial(3, 3)]) {
        let p = f.p() as u64;
        let n = if p == 2 { 2 } else { 1 };
        prop_assert_eq!(colength(&f, n).unwrap(), dense_hk(&f, p.pow(n)));
    }

    #[test]
    fn invariant_under_relabelling(f in trinomial(2, 3), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let g = f.permute_vars(&perm).unwrap();
        for n in 1..=3 {
            prop_assert_eq!(colength(&f, n).unwrap(), colength(&g, n).unwrap());
        }
    }

    #[test]
    fn pivot_order_does_not_change_colength(f in prop_oneof![trinomial(2, 2), trinomial(3, 3)]) {
        let lead = OracleConfig { pivot: PivotOrder::Leading, ..Default::default() };
        for n in 1..=2 {
            let a = colength(&f, n).unwrap();
            prop_assert_eq!(a, colength_with(&f, n, &lead).unwrap());
            prop_assert!(a <= (f.p() as u64).pow(n).pow(f.nvars() as u32));
        }
    }
}

#[test]
fn diagonal_cubic_over_several_primes() {
    for p in [2u64, 3, 5, 7] {
        let f = parse_trinomial("x0^3 + x1^3 + x2^3", p).unwrap();
        for n in 1..=2u32 {
            if p.pow(n) > 25 {
                break;
            }
            assert_eq!(
                colength(&f, n).unwrap(),
                dense_hk(&f, p.pow(n)),
                "p = {p}, n = {n}"
            );
        }
    }
}
