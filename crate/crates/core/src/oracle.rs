//! Brute-force weight enumeration for linear actions on projective spaces,
//! used as ground truth for the character.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::zrational::LaurentPoly;

/// Largest `n` for `CP^n` the enumeration accepts.
pub const MAX_N: usize = 4;
/// Largest total degree `m d` the enumeration accepts.
pub const MAX_DEGREE: i64 = 60;

/// Multiplicity of each integer weight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightMultiset(pub BTreeMap<i64, u64>);

impl WeightMultiset {
    pub fn unit() -> Self {
        WeightMultiset(BTreeMap::from([(0, 1)]))
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn shifted(&self, s: i64) -> Self {
        WeightMultiset(self.0.iter().map(|(w, c)| (w + s, *c)).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (w, c) in &other.0 {
            *out.entry(*w).or_insert(0) += c;
        }
        WeightMultiset(out)
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_map(
            self.0
                .iter()
                .map(|(w, c)| (*w, BigRational::from_integer((*c).into())))
                .collect(),
        )
    }
}

/// Weights of degree-`m d` monomials in `n + 1` variables of the given
/// weights, normalized so the lowest weight is zero.
pub fn cpn_weights(weights: &[i64], d: i64, m: u64) -> Result<WeightMultiset> {
    if weights.is_empty() || weights.len() > MAX_N + 1 {
        return Err(Error::OracleLimit(format!(
            "{} variables, at most {} supported",
            weights.len(),
            MAX_N + 1
        )));
    }
    let total = d * m as i64;
    if total < 0 {
        return Err(Error::InvalidArgument("m d must be nonnegative".into()));
    }
    if total > MAX_DEGREE {
        return Err(Error::OracleLimit(format!("m d = {} exceeds {}", total, MAX_DEGREE)));
    }
    let w_min = *weights.iter().min().unwrap();
    let mut out = BTreeMap::new();
    let mut exps = vec![0i64; weights.len()];
    enumerate(weights, total, 0, &mut exps, &mut |a| {
        let w: i64 = a.iter().zip(weights).map(|(x, y)| x * y).sum::<i64>() - total * w_min;
        *out.entry(w).or_insert(0u64) += 1;
    });
    Ok(WeightMultiset(out))
}

fn enumerate(weights: &[i64], left: i64, i: usize, exps: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if i + 1 == weights.len() {
        exps[i] = left;
        f(exps);
        return;
    }
    for a in 0..=left {
        exps[i] = a;
        enumerate(weights, left - a, i + 1, exps, f);
    }
}

/// Additive convolution.
pub fn convolve(a: &WeightMultiset, b: &WeightMultiset) -> WeightMultiset {
    let mut out = BTreeMap::new();
    for (wa, ca) in &a.0 {
        for (wb, cb) in &b.0 {
            *out.entry(wa + wb).or_insert(0) += ca * cb;
        }
    }
    WeightMultiset(out)
}

/// Multiplicity of the zero weight.
pub fn invariant_count(ws: &WeightMultiset) -> u64 {
    ws.0.get(&0).copied().unwrap_or(0)
}

/// `CP^n` factor with its moment shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub weights: Vec<i64>,
    pub d: i64,
    pub shift: i64,
}

/// Disjoint union of products of projective factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRecipe {
    pub summands: Vec<Vec<Factor>>,
}

impl OracleRecipe {
    pub fn single(weights: &[i64], d: i64, shift: i64) -> Self {
        OracleRecipe {
            summands: vec![vec![Factor {
                weights: weights.to_vec(),
                d,
                shift,
            }]],
        }
    }

    pub fn weights(&self, m: u64) -> Result<WeightMultiset> {
        let mut total = WeightMultiset::default();
        for summand in &self.summands {
            let mut acc = WeightMultiset::unit();
            for f in summand {
                let w = cpn_weights(&f.weights, f.d, m)?.shifted(m as i64 * f.shift);
                acc = convolve(&acc, &w);
            }
            total = total.union(&acc);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(pairs: &[(i64, u64)]) -> WeightMultiset {
        WeightMultiset(pairs.iter().copied().collect())
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(cpn_weights(&[0, 1], 1, 2).unwrap(), ms(&[(0, 1), (1, 1), (2, 1)]));
        assert_eq!(cpn_weights(&[0, 0, 1], 1, 1).unwrap(), ms(&[(0, 2), (1, 1)]));
        assert_eq!(cpn_weights(&[0, 3, 7], 2, 0).unwrap(), ms(&[(0, 1)]));
        for m in 0..10 {
            assert_eq!(invariant_count(&cpn_weights(&[0, 1], 1, m).unwrap()), 1);
        }
    }

    #[test]
    fn convolution_examples() {
        let x = ms(&[(2, 3), (-1, 1)]);
        assert_eq!(convolve(&WeightMultiset::unit(), &x), x);
        assert_eq!(
            convolve(&ms(&[(0, 1), (1, 1)]), &ms(&[(0, 1), (-1, 1)])),
            ms(&[(-1, 1), (0, 2), (1, 1)])
        );
    }

    #[test]
    fn invariant_counts() {
        assert_eq!(invariant_count(&ms(&[(0, 3), (2, 1)])), 3);
        assert_eq!(invariant_count(&WeightMultiset::default()), 0);
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(cpn_weights(&[0, 1, 2, 3, 4, 5], 1, 1), Err(Error::OracleLimit(_))));
        assert!(matches!(cpn_weights(&[0, 1], 2, 31), Err(Error::OracleLimit(_))));
        assert!(cpn_weights(&[0, 1], 2, 30).is_ok());
    }

    #[test]
    fn total_count_is_section_dimension() {
        // dim H^0(CP^2, O(m)) = (m+1)(m+2)/2
        for m in 0..8u64 {
            let w = cpn_weights(&[0, 1, 5], 1, m).unwrap();
            assert_eq!(w.total(), (m + 1) * (m + 2) / 2);
        }
    }
}
