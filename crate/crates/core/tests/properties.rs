use mubforge_core::entropy::{avg_entropy, bounds, renyi_entropy, OverlapTable, State};
use mubforge_core::mub::{trace_form_mub_set, MubSet};
use mubforge_core::wigner::{point_operators, wigner_value, Assignment};
use mubforge_core::C64;
use proptest::prelude::*;

fn state(d: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            v.into_iter().map(|(a, b)| C64::new(a / n, b / n)).collect()
        })
}

fn set(n: usize, l: usize) -> MubSet {
    trace_form_mub_set(n).unwrap().prefix(l).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_respects_the_bound(psi in state(8), l in 2usize..=9) {
        let ms = set(3, l);
        let h = avg_entropy(&ms, &State::Pure(psi), f64::INFINITY).unwrap();
        prop_assert!(h >= bounds(l, 8).best - 1e-9);
    }

    #[test]
    fn renyi_is_nonincreasing(psi in state(4), a in 0.2f64..6.0, da in 0.0f64..4.0) {
        let ms = set(2, 5);
        let s = State::Pure(psi);
        for k in 0..ms.len() {
            let lo = renyi_entropy(ms.basis(k), &s, a).unwrap();
            let hi = renyi_entropy(ms.basis(k), &s, a + da).unwrap();
            let inf = renyi_entropy(ms.basis(k), &s, f64::INFINITY).unwrap();
            prop_assert!(hi <= lo + 1e-9 && inf <= hi + 1e-9);
        }
    }

    #[test]
    fn string_eigenvalues_below_the_bound(seed in any::<u64>(), l in 2usize..=9) {
        let ms = set(3, l);
        let table = OverlapTable::new(&ms);
        let b: Vec<usize> = (0..l).map(|k| ((seed >> (3 * k)) & 7) as usize).collect();
        let lambda = table.lambda(&b);
        prop_assert!(-lambda.log2() >= bounds(l, 8).best - 1e-9);
    }

    #[test]
    fn wigner_function_sums_to_one(psi in state(4)) {
        let ms = set(2, 5);
        let rho = State::Pure(psi).density();
        let ops = point_operators(&ms, &Assignment::identity(4)).unwrap();
        let total: f64 = ops.iter().map(|a| wigner_value(a, &rho).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn complete_sets_are_unbiased() {
    for n in 1..=4 {
        let ms = trace_form_mub_set(n).unwrap();
        assert_eq!(ms.len(), (1 << n) + 1);
        assert!(ms.bias_deviation() < 1e-10);
    }
}
