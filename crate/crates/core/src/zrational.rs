//! Rational functions of `z` whose denominators are products of `(1 - z^k)`,
//! `k > 0`, with exact Laurent expansion and residues at `0` and `infinity`.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{qi, GradedElement};

type GradedQ = GradedElement<BigRational>;

/// Coefficient algebra for [`ZRational`] numerators.
pub trait ZCoeff: Clone + Debug + PartialEq + Send + Sync {
    fn is_zero_coeff(&self) -> bool;
    fn add_coeff(&self, other: &Self) -> Self;
    fn mul_coeff(&self, other: &Self) -> Self;
    fn neg_coeff(&self) -> Self;
}

impl ZCoeff for BigRational {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_coeff(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_coeff(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_coeff(&self) -> Self {
        -self
    }
}

impl ZCoeff for GradedQ {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_coeff(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_coeff(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_coeff(&self) -> Self {
        self.neg_elem()
    }
}

/// `z^shift * N(z) / prod_k (1 - z^k)^{mult_k}` with `N` a polynomial whose
/// lowest coefficient is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct ZRational<C> {
    numerator: BTreeMap<i64, C>,
    denominator: BTreeMap<u32, u32>,
    shift: i64,
}

/// Numerators in a component ring.
pub type RingZRational = ZRational<GradedQ>;
/// Numerators in `Q`.
pub type ScalarZRational = ZRational<BigRational>;

fn poly_mul<C: ZCoeff>(a: &BTreeMap<i64, C>, b: &BTreeMap<i64, C>) -> BTreeMap<i64, C> {
    let mut out: BTreeMap<i64, C> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let p = ca.mul_coeff(cb);
            add_into(&mut out, ea + eb, p);
        }
    }
    out.retain(|_, c| !c.is_zero_coeff());
    out
}

fn add_into<C: ZCoeff>(map: &mut BTreeMap<i64, C>, e: i64, c: C) {
    match map.get_mut(&e) {
        Some(v) => *v = v.add_coeff(&c),
        None => {
            map.insert(e, c);
        }
    }
}

/// Multiply by `(1 - z^k)`.
fn times_one_minus<C: ZCoeff>(p: &BTreeMap<i64, C>, k: u32) -> BTreeMap<i64, C> {
    let mut out = p.clone();
    for (e, c) in p {
        add_into(&mut out, e + k as i64, c.neg_coeff());
    }
    out.retain(|_, c| !c.is_zero_coeff());
    out
}

impl<C: ZCoeff> ZRational<C> {
    pub fn from_parts(numerator: BTreeMap<i64, C>, denominator: BTreeMap<u32, u32>, shift: i64) -> Self {
        let mut numerator = numerator;
        numerator.retain(|_, c| !c.is_zero_coeff());
        let mut denominator = denominator;
        denominator.retain(|_, m| *m > 0);
        if numerator.is_empty() {
            return ZRational {
                numerator,
                denominator: BTreeMap::new(),
                shift: 0,
            };
        }
        let low = *numerator.keys().next().unwrap();
        let numerator = numerator.into_iter().map(|(e, c)| (e - low, c)).collect();
        ZRational {
            numerator,
            denominator,
            shift: shift + low,
        }
    }

    /// `c * z^e`.
    pub fn monomial(c: C, e: i64) -> Self {
        Self::from_parts(BTreeMap::from([(0, c)]), BTreeMap::new(), e)
    }

    pub fn numerator(&self) -> &BTreeMap<i64, C> {
        &self.numerator
    }

    pub fn denominator(&self) -> &BTreeMap<u32, u32> {
        &self.denominator
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = self.denominator.clone();
        for (k, m) in &other.denominator {
            *den.entry(*k).or_insert(0) += m;
        }
        Self::from_parts(
            poly_mul(&self.numerator, &other.numerator),
            den,
            self.shift + other.shift,
        )
    }

    fn lift_to(&self, den: &BTreeMap<u32, u32>, shift: i64) -> BTreeMap<i64, C> {
        let mut num: BTreeMap<i64, C> = self
            .numerator
            .iter()
            .map(|(e, c)| (e + self.shift - shift, c.clone()))
            .collect();
        for (k, m) in den {
            let have = self.denominator.get(k).copied().unwrap_or(0);
            for _ in have..*m {
                num = times_one_minus(&num, *k);
            }
        }
        num
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut den = self.denominator.clone();
        for (k, m) in &other.denominator {
            let e = den.entry(*k).or_insert(0);
            *e = (*e).max(*m);
        }
        let shift = self.shift.min(other.shift);
        let mut num = self.lift_to(&den, shift);
        for (e, c) in other.lift_to(&den, shift) {
            add_into(&mut num, e, c);
        }
        Self::from_parts(num, den, shift)
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(
            self.numerator.iter().map(|(e, c)| (*e, c.neg_coeff())).collect(),
            self.denominator.clone(),
            self.shift,
        )
    }

    /// Multiply by `z^e`.
    pub fn shifted(&self, e: i64) -> Self {
        let mut out = self.clone();
        if !out.is_zero() {
            out.shift += e;
        }
        out
    }

    pub fn map<D: ZCoeff>(&self, f: impl Fn(&C) -> D) -> ZRational<D> {
        ZRational::from_parts(
            self.numerator.iter().map(|(e, c)| (*e, f(c))).collect(),
            self.denominator.clone(),
            self.shift,
        )
    }

    /// Divide out the denominator exactly; exponents include the shift.
    pub fn exact_polynomial(&self) -> Result<BTreeMap<i64, C>> {
        let mut num = self.numerator.clone();
        for (k, m) in &self.denominator {
            let k = *k as i64;
            for _ in 0..*m {
                num = divide_one_minus(&num, k).ok_or_else(|| {
                    Error::NotAPolynomial(format!("pole at a {}-th root of unity does not cancel", k))
                })?;
            }
        }
        Ok(num.into_iter().map(|(e, c)| (e + self.shift, c)).collect())
    }

    /// Total degree of the denominator, counted with multiplicity.
    pub fn denominator_degree(&self) -> i64 {
        self.denominator.iter().map(|(k, m)| (*k as i64) * (*m as i64)).sum()
    }

    fn numerator_degree(&self) -> i64 {
        self.numerator.keys().next_back().copied().unwrap_or(0)
    }
}

impl RingZRational {
    /// `(1 - z^k e^a)^{-1}` for a nilpotent `a`.
    pub fn inv_one_minus(k: i64, a: &GradedQ) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroWeight);
        }
        if !a.scalar_part().is_zero() {
            return Err(Error::NotNilpotent);
        }
        let ring = a.ring();
        if k < 0 {
            // 1 - z^k e^a = -z^k e^a (1 - z^{-k} e^{-a})
            let inner = Self::inv_one_minus(-k, &a.neg_elem())?;
            let unit = a.neg_elem().exp_nilpotent()?.neg_elem();
            return Ok(inner.mul(&Self::monomial(unit, -k)));
        }
        let k = k as u32;
        let u = &a.exp_nilpotent()? - &GradedQ::one(ring);
        let mut powers = vec![GradedQ::one(ring)];
        loop {
            let next = powers.last().unwrap() * &u;
            if next.is_zero() {
                break;
            }
            powers.push(next);
        }
        // sum_j z^{kj} u^j / (1 - z^k)^{j+1}, all over (1 - z^k)^{J+1}
        let top = powers.len() - 1;
        let mut num: BTreeMap<i64, GradedQ> = BTreeMap::new();
        for (j, uj) in powers.iter().enumerate() {
            let mut term = BTreeMap::from([((k as usize * j) as i64, uj.clone())]);
            for _ in j..top {
                term = times_one_minus(&term, k);
            }
            for (e, c) in term {
                add_into(&mut num, e, c);
            }
        }
        Ok(Self::from_parts(num, BTreeMap::from([(k, top as u32 + 1)]), 0))
    }

    /// Integrate every coefficient over the component.
    pub fn integrate_over_f(&self) -> ScalarZRational {
        self.map(|c| c.integrate())
    }
}

impl ScalarZRational {
    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    /// `1 / (1 - z^k)` with `k > 0`.
    pub fn geometric(k: u32) -> Self {
        Self::from_parts(BTreeMap::from([(0, qi(1))]), BTreeMap::from([(k, 1)]), 0)
    }

    /// Exact division; fails when a genuine pole survives.
    pub fn to_laurent_polynomial(&self) -> Result<LaurentPoly> {
        Ok(LaurentPoly::from_map(self.exact_polynomial()?))
    }

    /// Laurent coefficients of `z^shift..z^{shift+n-1}` at `z = 0`.
    pub fn series_at_zero(&self, n: usize) -> Vec<BigRational> {
        let mut inv = vec![BigRational::zero(); n];
        if n == 0 {
            return inv;
        }
        inv[0] = qi(1);
        for (k, m) in &self.denominator {
            let k = *k as usize;
            for _ in 0..*m {
                // multiply by 1/(1 - z^k): running sum with stride k
                for i in k..n {
                    let prev = inv[i - k].clone();
                    inv[i] += prev;
                }
            }
        }
        let mut out = vec![BigRational::zero(); n];
        for (e, c) in &self.numerator {
            let e = *e as usize;
            for i in e..n {
                out[i] += c * &inv[i - e];
            }
        }
        out
    }

    /// Coefficient of `z^{-1}` in the expansion at `z = 0`.
    pub fn residue_at_zero(&self) -> BigRational {
        let target = -1 - self.shift;
        if target < 0 {
            return BigRational::zero();
        }
        self.series_at_zero(target as usize + 1)
            .pop()
            .unwrap_or_else(BigRational::zero)
    }

    /// `f(1/z)`, renormalized to the canonical denominator shape.
    pub fn substitute_inverse(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        // 1 - z^{-k} = -z^{-k} (1 - z^k); N(1/z) = z^{-deg N} rev(N)(z)
        let deg = self.numerator_degree();
        let mult: u32 = self.denominator.values().sum();
        let sign = if mult % 2 == 1 { -qi(1) } else { qi(1) };
        let num = self
            .numerator
            .iter()
            .map(|(e, c)| (deg - e, c * &sign))
            .collect();
        Self::from_parts(
            num,
            self.denominator.clone(),
            -self.shift - deg + self.denominator_degree(),
        )
    }

    /// `residue_at_zero(chi(1/z) / z)`.
    pub fn residue_at_infinity(&self) -> BigRational {
        self.substitute_inverse().shifted(-1).residue_at_zero()
    }

    /// `d/dz`.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let n = &self.numerator;
        let s = self.shift;
        let ks: Vec<u32> = self.denominator.keys().copied().collect();
        // f' = z^{s-1} [ (s N + z N') prod(1 - z^k) + N sum_k m_k k z^k prod_{k' != k}(1 - z^k') ] / (D prod(1 - z^k))
        let mut first: BTreeMap<i64, BigRational> = n
            .iter()
            .map(|(e, c)| (*e, c * qi(s + e)))
            .collect();
        for k in &ks {
            first = times_one_minus(&first, *k);
        }
        let mut total = first;
        for k in &ks {
            let m = self.denominator[k] as i64;
            let mut term: BTreeMap<i64, BigRational> = n
                .iter()
                .map(|(e, c)| (e + *k as i64, c * qi(m * *k as i64)))
                .collect();
            for other in ks.iter().filter(|o| *o != k) {
                term = times_one_minus(&term, *other);
            }
            for (e, c) in term {
                add_into(&mut total, e, c);
            }
        }
        let mut den = self.denominator.clone();
        for k in &ks {
            *den.get_mut(k).unwrap() += 1;
        }
        Self::from_parts(total, den, s - 1)
    }

    /// Floating evaluation at a complex point.
    pub fn eval<F: Float>(&self, z: Complex<F>) -> Complex<F> {
        let to_f = |c: &BigRational| F::from(c.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan);
        // Horner over the dense range of exponents.
        let deg = self.numerator_degree();
        let mut acc = Complex::new(F::zero(), F::zero());
        for e in (0..=deg).rev() {
            acc = acc * z;
            if let Some(c) = self.numerator.get(&e) {
                acc = acc + Complex::new(to_f(c), F::zero());
            }
        }
        let mut den = Complex::new(F::one(), F::zero());
        for (k, m) in &self.denominator {
            let f = Complex::new(F::one(), F::zero()) - z.powi(*k as i32);
            for _ in 0..*m {
                den = den * f;
            }
        }
        acc * z.powi(self.shift as i32) / den
    }
}

/// Exact division of `p` by `(1 - z^k)`, or `None` when the remainder is nonzero.
fn divide_one_minus<C: ZCoeff>(p: &BTreeMap<i64, C>, k: i64) -> Option<BTreeMap<i64, C>> {
    if p.is_empty() {
        return Some(BTreeMap::new());
    }
    let lo = *p.keys().next().unwrap();
    let hi = *p.keys().next_back().unwrap();
    if hi - lo < k {
        return None;
    }
    // p_i = q_i - q_{i-k}
    let mut q: BTreeMap<i64, C> = BTreeMap::new();
    let step = |i: i64, q: &BTreeMap<i64, C>| -> Option<C> {
        match (p.get(&i), q.get(&(i - k))) {
            (Some(a), Some(b)) => Some(a.add_coeff(b)),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    };
    for i in lo..=hi - k {
        if let Some(v) = step(i, &q) {
            if !v.is_zero_coeff() {
                q.insert(i, v);
            }
        }
    }
    for i in hi - k + 1..=hi {
        if let Some(v) = step(i, &q) {
            if !v.is_zero_coeff() {
                return None;
            }
        }
    }
    Some(q)
}

/// Exact Laurent polynomial in `z`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn from_map(mut coeffs: BTreeMap<i64, BigRational>) -> Self {
        coeffs.retain(|_, c| !c.is_zero());
        LaurentPoly { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, BigRational> {
        &self.coeffs
    }

    pub fn coefficient(&self, e: i64) -> BigRational {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval_at_one(&self) -> BigRational {
        self.coeffs.values().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Integer coefficients; `None` if any coefficient is fractional.
    pub fn integer_coeffs(&self) -> Option<BTreeMap<i64, BigInt>> {
        self.coeffs
            .iter()
            .map(|(e, c)| c.is_integer().then(|| (*e, c.to_integer())))
            .collect()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn eval<F: Float>(&self, z: Complex<F>) -> Complex<F> {
        let mut acc = Complex::new(F::zero(), F::zero());
        for (e, c) in &self.coeffs {
            let cf = F::from(c.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan);
            acc = acc + z.powi(*e as i32) * cf;
        }
        acc
    }

    pub fn as_zrational(&self) -> ScalarZRational {
        ScalarZRational::from_parts(self.coeffs.clone(), BTreeMap::new(), 0)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let num = if abs.is_integer() {
                abs.numer().to_string()
            } else {
                format!("{}/{}", abs.numer(), abs.denom())
            };
            let var = match e {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{}", e),
            };
            if var.is_empty() {
                write!(f, "{}", num)?;
            } else if abs.is_one() {
                write!(f, "{}", var)?;
            } else {
                write!(f, "{}*{}", num, var)?;
            }
        }
        Ok(())
    }
}
