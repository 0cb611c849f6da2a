//! Named example presentations. Each is shipped as a document generated by
//! the builders, together with a recipe for the enumeration oracle.

use crate::error::{Error, Result};
use crate::model::{
    cp1_rotation, cpn_linear, disjoint_union, parse, product, shift_moment, ManifoldPresentation,
    QuotientData,
};
use crate::oracle::{Factor, OracleRecipe};

pub const NAMES: &[&str] = &[
    "cp1",
    "cp001",
    "cp012",
    "prod11",
    "dgmw",
    "dgmw_mixed",
    "regular",
    "dim6",
    "dim6r",
    "dim6w",
];

/// The shipped document text.
pub fn document(name: &str) -> Result<&'static str> {
    Ok(match name {
        "cp1" => include_str!("../data/cp1.json"),
        "cp001" => include_str!("../data/cp001.json"),
        "cp012" => include_str!("../data/cp012.json"),
        "prod11" => include_str!("../data/prod11.json"),
        "dgmw" => include_str!("../data/dgmw.json"),
        "dgmw_mixed" => include_str!("../data/dgmw_mixed.json"),
        "regular" => include_str!("../data/regular.json"),
        "dim6" => include_str!("../data/dim6.json"),
        "dim6r" => include_str!("../data/dim6r.json"),
        "dim6w" => include_str!("../data/dim6w.json"),
        _ => return Err(Error::UnknownBuiltin(name.into())),
    })
}

/// Parse the shipped document.
pub fn presentation(name: &str) -> Result<ManifoldPresentation> {
    parse(document(name)?)
}

/// Rebuild the presentation from builders.
pub fn build(name: &str) -> Result<ManifoldPresentation> {
    let cp1 = cp1_rotation(1)?;
    let cp1m = cp1_rotation(-1)?;
    let mut p = match name {
        "cp1" => with_quotient(cpn_linear(&[0, 1], 1)?, QuotientData::empty()),
        "cp001" | "dgmw" => with_quotient(cpn_linear(&[0, 0, 1], 1)?, QuotientData::empty()),
        "cp012" => with_quotient(cpn_linear(&[0, 1, 2], 1)?, QuotientData::empty()),
        "prod11" => product(&cp1, &cp1m),
        "dgmw_mixed" => {
            let lower = cpn_linear(&[0, 0, 2], 1)?;
            let upper = shift_moment(&cpn_linear(&[0, 0, -3], 1)?, -3);
            with_quotient(disjoint_union(&lower, &upper)?, QuotientData::empty())
        }
        "regular" => with_quotient(
            shift_moment(&cpn_linear(&[0, 1, 1], 2)?, -1),
            QuotientData::projective(1),
        ),
        "dim6" => with_quotient(product(&product(&cp1, &cp1), &cp1m), QuotientData::projective(2)),
        "dim6r" => with_quotient(product(&product(&cp1m, &cp1m), &cp1), QuotientData::projective(2)),
        "dim6w" => product(
            &product(&cpn_linear(&[0, 2], 1)?, &cpn_linear(&[0, 1], 2)?),
            &shift_moment(&cpn_linear(&[0, -1], 2)?, -2),
        ),
        _ => return Err(Error::UnknownBuiltin(name.into())),
    };
    p.name = name.into();
    Ok(p)
}

fn with_quotient(mut p: ManifoldPresentation, q: QuotientData) -> ManifoldPresentation {
    p.quotient = Some(q);
    p
}

fn factor(weights: &[i64], d: i64, shift: i64) -> Factor {
    Factor {
        weights: weights.to_vec(),
        d,
        shift,
    }
}

/// Enumeration recipe reproducing the character of a builtin.
pub fn oracle_recipe(name: &str) -> Result<OracleRecipe> {
    let cp1 = factor(&[0, 1], 1, 0);
    let cp1m = factor(&[0, -1], 1, -1);
    let summands = match name {
        "cp1" => vec![vec![cp1]],
        "cp001" | "dgmw" => vec![vec![factor(&[0, 0, 1], 1, 0)]],
        "cp012" => vec![vec![factor(&[0, 1, 2], 1, 0)]],
        "prod11" => vec![vec![cp1, cp1m]],
        "dgmw_mixed" => vec![vec![factor(&[0, 0, 2], 1, 0)], vec![factor(&[0, 0, -3], 1, -3)]],
        "regular" => vec![vec![factor(&[0, 1, 1], 2, -1)]],
        "dim6" => vec![vec![cp1.clone(), cp1, cp1m]],
        "dim6r" => vec![vec![cp1m.clone(), cp1m, cp1]],
        "dim6w" => vec![vec![
            factor(&[0, 2], 1, 0),
            factor(&[0, 1], 2, 0),
            factor(&[0, -1], 2, -2),
        ]],
        _ => return Err(Error::UnknownBuiltin(name.into())),
    };
    Ok(OracleRecipe { summands })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::serialize;

    /// Set `EQUILOC_REGENERATE=1` to rewrite the shipped documents.
    #[test]
    fn shipped_documents_match_builders() {
        let regenerate = std::env::var("EQUILOC_REGENERATE").is_ok();
        for name in NAMES {
            let text = serialize(&build(name).unwrap());
            if regenerate {
                let path = format!("{}/data/{}.json", env!("CARGO_MANIFEST_DIR"), name);
                std::fs::write(path, &text).unwrap();
            } else {
                assert_eq!(document(name).unwrap(), text, "{}", name);
                assert_eq!(presentation(name).unwrap(), build(name).unwrap(), "{}", name);
            }
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(build("cp9"), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(document("cp9"), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(oracle_recipe("cp9"), Err(Error::UnknownBuiltin(_))));
    }
}
