//! Assembly of the singular Riemann-Roch formula for the invariant part:
//! residues at fixed components on the zero level, exceptional terms at
//! isolated indefinite points, and the regular-stratum term.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::localization::{character, chi_tilde, EquivariantClassAtF};
use crate::model::{FixedComponent, ManifoldPresentation};
use crate::ring::qi;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::PositiveDefinite => "positive_definite",
            Classification::NegativeDefinite => "negative_definite",
            Classification::Indefinite => "indefinite",
        }
    }
}

pub fn classify(f: &FixedComponent) -> Classification {
    let w = f.weights();
    if w.iter().all(|k| *k > 0) {
        Classification::PositiveDefinite
    } else if w.iter().all(|k| *k < 0) {
        Classification::NegativeDefinite
    } else {
        Classification::Indefinite
    }
}

/// Coefficient of `z^0` in the character.
pub fn rr_invariant(p: &ManifoldPresentation, m: u64) -> Result<BigInt> {
    Ok(character(p, m)?.coefficient(0).to_integer())
}

/// Residue of `chi_tilde_F` at `0`, at infinity, or their mean, by the
/// classification of `F`.
pub fn residue_term(f: &FixedComponent, m: u64) -> Result<BigRational> {
    if f.moment != 0 {
        return Err(Error::NotAtZeroLevel(f.name.clone()));
    }
    let chi = chi_tilde(f, m)?;
    let at_zero = || chi.shifted(-1).residue_at_zero();
    let at_infinity = || chi.residue_at_infinity();
    Ok(match classify(f) {
        Classification::PositiveDefinite => at_zero(),
        Classification::NegativeDefinite => at_infinity(),
        Classification::Indefinite => (at_zero() + at_infinity()) / qi(2),
    })
}

/// Exceptional contribution of an isolated indefinite point on the zero level.
pub fn exceptional_term(f: &FixedComponent, _m: u64) -> Result<BigRational> {
    if classify(f) != Classification::Indefinite {
        return Err(Error::NotIndefinite(f.name.clone()));
    }
    if f.moment != 0 {
        return Err(Error::NotAtZeroLevel(f.name.clone()));
    }
    if f.dim_f > 0 {
        return Err(Error::Unsupported(format!(
            "exceptional term of the positive-dimensional component `{}`",
            f.name
        )));
    }
    let weights = f.weights();
    let pos: Vec<i64> = weights.iter().copied().filter(|k| *k > 0).collect();
    let neg: Vec<i64> = weights.iter().copied().filter(|k| *k < 0).collect();
    if pos.len() == 1 && neg.len() == 1 {
        return Ok(BigRational::zero());
    }
    let rho = EquivariantClassAtF::todd(f)
        .series(pos.len() + neg.len())
        .into_iter()
        .map(|c| c.scalar_part())
        .collect::<Vec<_>>();
    let coef = exceptional_coefficient(&rho, pos.len(), neg.len())?;
    let norm: i64 = weights.iter().product();
    Ok(coef / qi(norm))
}

/// Coefficient of `u^{lp-1} v^{ln-1}` in
/// `(rho(u)/2 + rho(v)/2 - rho((u+v)/2)) / (u - v)`.
pub fn exceptional_coefficient(rho: &[BigRational], lp: usize, ln: usize) -> Result<BigRational> {
    let d = lp + ln - 1;
    let r = rho.get(d).cloned().unwrap_or_else(BigRational::zero);
    // degree-d part of N: c_i u^i v^{d-i}
    let half = BigRational::new(1.into(), 2.into());
    let scale = &r / qi(2).pow(d as i32);
    let mut c: Vec<BigRational> = (0..=d).map(|i| -(&scale * binomial(d, i))).collect();
    c[0] += &r * &half;
    c[d] += &r * &half;
    // (u - v) Q = N: q_{d-1} = c_d, q_{i-1} = c_i + q_i, remainder c_0 + q_0
    let mut q = vec![BigRational::zero(); d];
    q[d - 1] = c[d].clone();
    for i in (1..d).rev() {
        q[i - 1] = &c[i] + &q[i];
    }
    if !(&c[0] + &q[0]).is_zero() {
        return Err(Error::CancellationFailure("numerator is not divisible by u - v".into()));
    }
    Ok(q[lp - 1].clone())
}

fn binomial(n: usize, k: usize) -> BigRational {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularTag {
    Supplied,
    Diagnostic,
}

impl RegularTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegularTag::Supplied => "supplied",
            RegularTag::Diagnostic => "diagnostic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularTerm {
    pub value: BigRational,
    pub tag: RegularTag,
}

/// Integral over the quotient when supplied, otherwise what balance demands.
pub fn regular_term(p: &ManifoldPresentation, m: u64) -> Result<RegularTerm> {
    if let Some(qd) = &p.quotient {
        let e = qd.omega0.scale(&qi(m as i64)).exp_nilpotent()?;
        return Ok(RegularTerm {
            value: (&e * &qd.kappa_todd).integrate(),
            tag: RegularTag::Supplied,
        });
    }
    let rr = BigRational::from_integer(rr_invariant(p, m)?);
    let (res, exc) = zero_level_terms(p, m)?;
    let total = res.iter().chain(&exc).fold(rr, |acc, t| acc - &t.value);
    Ok(RegularTerm {
        value: total,
        tag: RegularTag::Diagnostic,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueEntry {
    pub component: String,
    pub classification: Classification,
    pub value: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalEntry {
    pub component: String,
    pub value: BigRational,
}

fn zero_level_terms(p: &ManifoldPresentation, m: u64) -> Result<(Vec<ResidueEntry>, Vec<ResidueEntry>)> {
    let mut res = Vec::new();
    let mut exc = Vec::new();
    for f in p.components.iter().filter(|f| f.moment == 0) {
        let class = classify(f);
        res.push(ResidueEntry {
            component: f.name.clone(),
            classification: class,
            value: residue_term(f, m)?,
        });
        if class == Classification::Indefinite {
            exc.push(ResidueEntry {
                component: f.name.clone(),
                classification: class,
                value: exceptional_term(f, m)?,
            });
        }
    }
    Ok((res, exc))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainFormulaReport {
    pub m: u64,
    pub rr_invariant: BigInt,
    pub residue_terms: Vec<ResidueEntry>,
    pub exceptional_terms: Vec<ExceptionalEntry>,
    pub regular_term: RegularTerm,
    /// Present only when the regular term was supplied.
    pub balance: Option<bool>,
}

impl MainFormulaReport {
    pub fn residue_sum(&self) -> BigRational {
        self.residue_terms.iter().fold(BigRational::zero(), |a, t| a + &t.value)
    }

    pub fn exceptional_sum(&self) -> BigRational {
        self.exceptional_terms.iter().fold(BigRational::zero(), |a, t| a + &t.value)
    }

    /// `rr_invariant - regular - residues - exceptional`.
    pub fn defect(&self) -> BigRational {
        BigRational::from_integer(self.rr_invariant.clone())
            - &self.regular_term.value
            - self.residue_sum()
            - self.exceptional_sum()
    }
}

pub fn main_formula_report(p: &ManifoldPresentation, m: u64) -> Result<MainFormulaReport> {
    let rr = rr_invariant(p, m)?;
    let (res, exc) = zero_level_terms(p, m)?;
    let regular = regular_term(p, m)?;
    let mut report = MainFormulaReport {
        m,
        rr_invariant: rr,
        residue_terms: res,
        exceptional_terms: exc
            .into_iter()
            .map(|e| ExceptionalEntry {
                component: e.component,
                value: e.value,
            })
            .collect(),
        regular_term: regular,
        balance: None,
    };
    if report.regular_term.tag == RegularTag::Supplied {
        report.balance = Some(report.defect().is_zero());
    }
    Ok(report)
}

/// Exact polynomial fit of `rr_invariant` and its deviations.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialFit {
    /// Coefficients of `1, m, m^2, ...`.
    pub coefficients: Vec<BigRational>,
    /// `(m, value - fit(m))` at the points not used for fitting.
    pub residual: Vec<(u64, BigRational)>,
}

impl PolynomialFit {
    pub fn is_exact(&self) -> bool {
        self.residual.iter().all(|(_, r)| r.is_zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, m: &BigRational) -> BigRational {
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * m + c)
    }
}

/// Fit of degree at most `dim_M / 2` through the first values, checked on the rest.
pub fn polynomiality_check(p: &ManifoldPresentation, m_min: u64, m_max: u64) -> Result<PolynomialFit> {
    let values = (m_min..=m_max)
        .map(|m| Ok((m, BigRational::from_integer(rr_invariant(p, m)?))))
        .collect::<Result<Vec<_>>>()?;
    fit_polynomial(&values, (p.dim_m / 2) as usize)
}

/// Lagrange fit of degree at most `degree` on the first `degree + 1` points.
pub fn fit_polynomial(values: &[(u64, BigRational)], degree: usize) -> Result<PolynomialFit> {
    if values.len() < degree + 3 {
        return Err(Error::InsufficientRange(format!(
            "{} points for a degree-{} fit, need {}",
            values.len(),
            degree,
            degree + 3
        )));
    }
    let (fit_pts, rest) = values.split_at(degree + 1);
    let mut coefficients = vec![BigRational::zero(); degree + 1];
    for (i, (xi, yi)) in fit_pts.iter().enumerate() {
        // basis polynomial prod_{j != i} (m - x_j) / (x_i - x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in fit_pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let xj = qi(*xj as i64);
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * &xj;
            }
            basis = next;
            denom *= qi(*xi as i64) - xj;
        }
        for (k, b) in basis.iter().enumerate() {
            coefficients[k] += b * yi / &denom;
        }
    }
    let mut fit = PolynomialFit {
        coefficients,
        residual: vec![],
    };
    fit.residual = rest
        .iter()
        .map(|(x, y)| (*x, y - fit.eval(&qi(*x as i64))))
        .collect();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::model::{cp1_rotation, cpn_linear, product, FixedComponent, NormalBlock};
    use std::collections::BTreeMap;

    use crate::ring::{q, GradedElement, RingSpec};

    fn point(weights: &[i64]) -> FixedComponent {
        let ring = RingSpec::point();
        let mut blocks: BTreeMap<i64, usize> = BTreeMap::new();
        for w in weights {
            *blocks.entry(*w).or_insert(0) += 1;
        }
        FixedComponent {
            name: format!("{:?}", weights),
            dim_f: 0,
            moment: 0,
            todd: GradedElement::one(&ring),
            omega: GradedElement::zero(&ring),
            blocks: blocks
                .into_iter()
                .map(|(weight, n)| NormalBlock {
                    weight,
                    chern_roots: vec![GradedElement::zero(&ring); n],
                })
                .collect(),
            ring,
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&point(&[1, 2])), Classification::PositiveDefinite);
        assert_eq!(classify(&point(&[-3])), Classification::NegativeDefinite);
        assert_eq!(classify(&point(&[1, -1])), Classification::Indefinite);
    }

    #[test]
    fn invariant_numbers() {
        let cp1 = cp1_rotation(1).unwrap();
        let cp001 = cpn_linear(&[0, 0, 1], 1).unwrap();
        let prod = product(&cp1, &cp1_rotation(-1).unwrap());
        for m in 0..7u64 {
            assert_eq!(rr_invariant(&cp1, m).unwrap(), BigInt::from(1));
            assert_eq!(rr_invariant(&cp001, m).unwrap(), BigInt::from(m + 1));
            assert_eq!(rr_invariant(&prod, m).unwrap(), BigInt::from(m + 1));
        }
    }

    #[test]
    fn residues_of_points() {
        assert_eq!(residue_term(&point(&[1]), 4).unwrap(), qi(1));
        let mut f = point(&[1]);
        f.moment = 2;
        assert!(matches!(residue_term(&f, 1), Err(Error::NotAtZeroLevel(_))));
    }

    #[test]
    fn exceptional_vanishes_in_low_dimension() {
        assert_eq!(exceptional_term(&point(&[1, -1]), 3).unwrap(), qi(0));
        assert_eq!(exceptional_term(&point(&[2, -5]), 3).unwrap(), qi(0));
        assert!(matches!(exceptional_term(&point(&[1, 1]), 0), Err(Error::NotIndefinite(_))));
        let p = cpn_linear(&[0, 0, 1, -1], 1).unwrap();
        let f = p.components.iter().find(|f| f.dim_f > 0).unwrap().clone();
        let mut f = f;
        f.moment = 0;
        assert!(matches!(exceptional_term(&f, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn exceptional_of_constant_rho_is_zero() {
        let rho = vec![qi(1), qi(0), qi(0), qi(0), qi(0)];
        assert_eq!(exceptional_coefficient(&rho, 2, 2).unwrap(), qi(0));
        assert_eq!(exceptional_coefficient(&rho, 3, 1).unwrap(), qi(0));
    }

    #[test]
    fn exceptional_values_are_frozen() {
        // Independent check: N(u,v) = (u^2 + v^2)/2 - (u+v)^2/4 = (u-v)^2/4,
        // so N/(u-v) = (u - v)/4 for rho(s) = s^2.
        let rho = vec![qi(0), qi(0), qi(1)];
        assert_eq!(exceptional_coefficient(&rho, 2, 1).unwrap(), q(1, 4));
        assert_eq!(exceptional_coefficient(&rho, 1, 2).unwrap(), q(-1, 4));
        // weights (1,1,-1): a_2 of td(s)^2 td(-s) vanishes
        assert_eq!(exceptional_term(&point(&[1, 1, -1]), 0).unwrap(), qi(0));
        // weights (2,1,-1): rho = td(2s) td(s) td(-s) has a_2 = 1/4, so the
        // coefficient is 1/16 and the value (1/16) / (2 * 1 * (-1)).
        assert_eq!(exceptional_term(&point(&[2, 1, -1]), 0).unwrap(), q(-1, 32));
        assert_eq!(exceptional_term(&point(&[-2, -1, 1]), 0).unwrap(), q(-1, 32));
    }

    #[test]
    fn regular_value_builtin_balances() {
        let p = builtins::presentation("regular").unwrap();
        for m in 0..6 {
            let r = main_formula_report(&p, m).unwrap();
            assert_eq!(r.balance, Some(true));
            assert_eq!(r.regular_term.value, qi(m as i64 + 1));
            assert!(r.residue_terms.is_empty());
        }
    }

    #[test]
    fn diagnostic_tag_when_no_quotient() {
        let p = builtins::presentation("prod11").unwrap();
        let r = main_formula_report(&p, 2).unwrap();
        assert_eq!(r.regular_term.tag, RegularTag::Diagnostic);
        assert_eq!(r.balance, None);
    }

    #[test]
    fn polynomial_fits() {
        let fit = polynomiality_check(&cp1_rotation(1).unwrap(), 1, 10).unwrap();
        assert_eq!(fit.coefficients[0], qi(1));
        assert_eq!(fit.degree(), Some(0));
        assert!(fit.is_exact());
        let prod = product(&cp1_rotation(1).unwrap(), &cp1_rotation(-1).unwrap());
        let fit = polynomiality_check(&prod, 1, 10).unwrap();
        assert_eq!(fit.coefficients[..2], [qi(1), qi(1)]);
        assert!(fit.is_exact());
        let fit = polynomiality_check(&cpn_linear(&[0, 1, 2], 1).unwrap(), 1, 10).unwrap();
        assert!(fit.is_exact());
        assert!(fit.degree().unwrap() <= 1);
        assert!(matches!(
            polynomiality_check(&prod, 1, 3),
            Err(Error::InsufficientRange(_))
        ));
    }
}
