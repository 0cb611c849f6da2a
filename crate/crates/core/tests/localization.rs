use equiloc::builtins;
use equiloc::localization::{character, dh_inner, rr_total, todd_rho, Normalization};
use equiloc::model::{cp1_rotation, cpn_linear, product, scale_bundle, shift_moment, ManifoldPresentation};
use equiloc::oracle::invariant_count;
use equiloc::quantize::rr_invariant;
use equiloc::witten::{witten_pair, TestFunction, WittenOptions};
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn characters_match_enumeration_on_all_builtins() {
    for name in builtins::NAMES {
        let p = builtins::presentation(name).unwrap();
        let recipe = builtins::oracle_recipe(name).unwrap();
        for m in 0..=8 {
            let ws = recipe.weights(m).unwrap();
            assert_eq!(character(&p, m).unwrap(), ws.to_laurent(), "{} m={}", name, m);
            assert_eq!(rr_invariant(&p, m).unwrap(), BigInt::from(invariant_count(&ws)), "{} m={}", name, m);
        }
    }
}

#[test]
fn hirzebruch_riemann_roch_totals() {
    let cp2 = cpn_linear(&[0, 1, 2], 1).unwrap();
    let cp1 = cp1_rotation(1).unwrap();
    let square = product(&cp1, &cp1);
    for m in 0..6u64 {
        let m_big = BigInt::from(m);
        assert_eq!(rr_total(&cp1, m).unwrap(), &m_big + 1);
        assert_eq!(rr_total(&cp2, m).unwrap(), (&m_big + 1) * (&m_big + 2) / 2);
        assert_eq!(rr_total(&square, m).unwrap(), (&m_big + 1) * (&m_big + 1));
    }
}

fn factors() -> Vec<ManifoldPresentation> {
    vec![
        cp1_rotation(1).unwrap(),
        cp1_rotation(-1).unwrap(),
        cp1_rotation(3).unwrap(),
        cpn_linear(&[0, 0, 1], 1).unwrap(),
        cpn_linear(&[0, 2], 1).unwrap(),
        cpn_linear(&[0, 1], 2).unwrap(),
        cpn_linear(&[0, -1, 2], 1).unwrap(),
    ]
}

/// Consistent random data: products of builders, moment shifts, bundle powers.
fn random_presentation() -> impl Strategy<Value = ManifoldPresentation> {
    let n = factors().len();
    (prop::collection::vec(0..n, 1..=2), -3i64..=3, 1i64..=3).prop_map(|(idx, shift, k)| {
        let fs = factors();
        let mut p = fs[idx[0]].clone();
        for i in &idx[1..] {
            p = product(&p, &fs[*i]);
        }
        scale_bundle(&shift_moment(&p, shift), k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn poles_cancel_and_weights_stay_in_the_moment_image(p in random_presentation(), m in 0u64..=4) {
        let chi = character(&p, m).unwrap();
        let lo = p.components.iter().map(|f| f.moment).min().unwrap() * m as i64;
        let hi = p.components.iter().map(|f| f.moment).max().unwrap() * m as i64;
        for e in chi.coeffs().keys() {
            prop_assert!(lo <= *e && *e <= hi, "z^{} outside [{}, {}]", e, lo, hi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kunneth(a in 0usize..7, b in 0usize..7, m in 0u64..=5) {
        let fs = factors();
        let lhs = rr_total(&product(&fs[a], &fs[b]), m).unwrap();
        prop_assert_eq!(lhs, rr_total(&fs[a], m).unwrap() * rr_total(&fs[b], m).unwrap());
    }

    #[test]
    fn dh_inner_is_conjugate_symmetric(x in 0.01f64..0.45, m in 0u64..6, which in 0usize..7) {
        let p = &factors()[which];
        let rho = todd_rho(p);
        let norm = Normalization::CALIBRATED;
        let plus = dh_inner(p, &rho, m, x, norm).unwrap();
        let minus = dh_inner(p, &rho, m, -x, norm).unwrap();
        prop_assert!((plus - minus.conj()).norm() < 1e-10 * (1.0 + plus.norm()));
    }
}

#[test]
fn raising_the_taylor_order_changes_nothing() {
    let phi = TestFunction::<f64>::default_bump(12);
    for name in ["cp1", "cp001", "prod11"] {
        let p = builtins::presentation(name).unwrap();
        let rho = todd_rho(&p);
        for m in [8u64, 32] {
            let base = WittenOptions::<f64>::default();
            let k = base.order_for(&p, m);
            let raised = WittenOptions {
                taylor_order: Some(k + 6),
                ..WittenOptions::default()
            };
            let a = witten_pair(&p, &rho, &phi, m, &base).unwrap();
            let b = witten_pair(&p, &rho, &phi, m, &raised).unwrap();
            assert!((a - b).norm() < 1e-10, "{} m={}: {}", name, m, (a - b).norm());
        }
    }
}
