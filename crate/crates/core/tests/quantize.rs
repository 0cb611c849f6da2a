use std::sync::Arc;

use equiloc::builtins;
use equiloc::model::{scale_bundle, FixedComponent, NormalBlock};
use equiloc::quantize::{
    classify, exceptional_term, fit_polynomial, main_formula_report, polynomiality_check, residue_term,
    rr_invariant, Classification, RegularTag,
};
use equiloc::ring::{qi, RingSpec};
use equiloc::GradedQ;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn point(weights: &[i64]) -> FixedComponent {
    let ring: Arc<RingSpec> = RingSpec::point();
    FixedComponent {
        name: "p".into(),
        dim_f: 0,
        moment: 0,
        todd: GradedQ::one(&ring),
        omega: GradedQ::zero(&ring),
        blocks: weights
            .iter()
            .map(|&weight| NormalBlock {
                weight,
                chern_roots: vec![GradedQ::zero(&ring)],
            })
            .collect(),
        ring,
    }
}

fn rr(p: &equiloc::model::ManifoldPresentation, m: u64) -> BigRational {
    BigRational::from_integer(rr_invariant(p, m).unwrap())
}

#[test]
fn cp1_minimum_residue_is_the_invariant_number() {
    let p = builtins::presentation("cp1").unwrap();
    let f = p.components.iter().find(|f| f.moment == 0).unwrap();
    assert_eq!(classify(f), Classification::PositiveDefinite);
    for m in 0..=8 {
        assert_eq!(residue_term(f, m).unwrap(), qi(1));
        assert_eq!(rr(&p, m), qi(1));
    }
}

#[test]
fn residues_account_for_everything_when_the_zero_level_is_fixed() {
    for name in ["dgmw", "dgmw_mixed"] {
        let p = builtins::presentation(name).unwrap();
        for m in 0..=8 {
            let r = main_formula_report(&p, m).unwrap();
            assert_eq!(r.residue_sum(), rr(&p, m), "{} m={}", name, m);
            assert!(r.exceptional_terms.is_empty());
            assert_eq!(r.regular_term.value, qi(0));
            assert_eq!(r.balance, Some(true));
        }
    }
}

#[test]
fn indefinite_four_dimensional_product() {
    let p = builtins::presentation("prod11").unwrap();
    let mut values = Vec::new();
    for m in 0..=6u64 {
        let r = main_formula_report(&p, m).unwrap();
        assert_eq!(rr(&p, m), qi(m as i64 + 1));
        assert!(r.exceptional_sum().is_zero());
        assert_eq!(r.regular_term.tag, RegularTag::Diagnostic);
        if m >= 1 {
            values.push((m, rr(&p, m) - r.residue_sum()));
        }
    }
    let fit = fit_polynomial(&values, 1).unwrap();
    assert!(fit.is_exact());
    assert_eq!(fit.degree(), Some(1));
    assert!(fit.coefficients[1].is_positive());
}

#[test]
fn six_dimensional_balance_with_supplied_quotients() {
    for name in ["dim6", "dim6r"] {
        let p = builtins::presentation(name).unwrap();
        for m in 1..=6 {
            let r = main_formula_report(&p, m).unwrap();
            assert_eq!(r.balance, Some(true), "{} m={} defect {}", name, m, r.defect());
        }
    }
}

#[test]
fn invariant_numbers_are_polynomial_on_free_builtins() {
    for name in builtins::NAMES {
        let p = builtins::presentation(name).unwrap();
        if p.free_on_regular {
            let fit = polynomiality_check(&p, 1, 10).unwrap();
            assert!(fit.is_exact(), "{}", name);
        }
    }
}

#[test]
fn positive_dimensional_indefinite_components_are_unsupported() {
    let mut f = builtins::presentation("cp001").unwrap().components[0].clone();
    f.blocks[0].weight = -1;
    f.blocks.push(NormalBlock {
        weight: 2,
        chern_roots: vec![GradedQ::zero(&f.ring)],
    });
    assert!(matches!(exceptional_term(&f, 1), Err(equiloc::Error::Unsupported(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bundle_power_coherence(which in 0usize..10, k in 1i64..=3, m in 0u64..=3) {
        let p = builtins::presentation(builtins::NAMES[which]).unwrap();
        let scaled = scale_bundle(&p, k);
        prop_assert_eq!(rr_invariant(&p, k as u64 * m).unwrap(), rr_invariant(&scaled, m).unwrap());
    }

    #[test]
    fn exceptional_term_is_swap_symmetric(
        pos in prop::collection::vec(1i64..=4, 1..=3),
        neg in prop::collection::vec(1i64..=4, 1..=3),
    ) {
        let weights: Vec<i64> = pos.iter().copied().chain(neg.iter().map(|n| -n)).collect();
        let flipped: Vec<i64> = weights.iter().map(|w| -w).collect();
        prop_assert_eq!(
            exceptional_term(&point(&weights), 0).unwrap(),
            exceptional_term(&point(&flipped), 0).unwrap()
        );
    }
}
