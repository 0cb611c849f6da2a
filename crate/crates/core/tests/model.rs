use equiloc::builtins;
use equiloc::localization::character;
use equiloc::model::{cp1_rotation, cpn_linear, parse, product, serialize, shift_moment, validate};
use proptest::prelude::*;

#[test]
fn builtin_documents_are_valid_and_stable() {
    for name in builtins::NAMES {
        let p = builtins::presentation(name).unwrap();
        assert!(validate(&p).is_empty(), "{}", name);
        assert_eq!(serialize(&p), builtins::document(name).unwrap());
    }
}

#[test]
fn cp1_document_equals_builder() {
    let mut built = cpn_linear(&[0, 1], 1).unwrap();
    let shipped = builtins::presentation("cp1").unwrap();
    built.name = shipped.name.clone();
    built.quotient = shipped.quotient.clone();
    assert_eq!(shipped, built);
    assert_eq!(cp1_rotation(1).unwrap().components, built.components);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn serialization_round_trips(a in -2i64..=2, b in 1i64..=3, d in 1i64..=2, s in -3i64..=3) {
        let p = shift_moment(&product(&cpn_linear(&[0, a, b], d).unwrap(), &cp1_rotation(-1).unwrap()), s);
        let text = serialize(&p);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(serialize(&back), text);
    }

    #[test]
    fn product_is_associative_on_characters(m in 0u64..=3, w in 1i64..=3) {
        let a = cp1_rotation(1).unwrap();
        let b = cp1_rotation(-w).unwrap();
        let c = cpn_linear(&[0, 0, 1], 1).unwrap();
        let left = product(&product(&a, &b), &c);
        let right = product(&a, &product(&b, &c));
        prop_assert_eq!(character(&left, m).unwrap(), character(&right, m).unwrap());
    }
}
