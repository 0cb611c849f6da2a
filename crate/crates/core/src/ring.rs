//! Truncated graded-commutative rings standing in for `H*(F, Q)`.
//!
//! Only even-degree generators are admitted, so the ring is commutative and
//! no sign bookkeeping is needed. Relations are expressed purely by the
//! truncation degree together with the integration table.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent vector, one entry per generator.
pub type Monomial = Vec<u32>;

/// Coefficient field of a [`GradedElement`].
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(q: &BigRational) -> Self;
}

impl Coeff for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

impl<F: Float + Debug + Send + Sync> Coeff for Complex<F> {
    fn from_rational(q: &BigRational) -> Self {
        let v = q.to_f64().unwrap_or(f64::NAN);
        Complex::new(F::from(v).unwrap_or_else(F::nan), F::zero())
    }
}

/// Shorthand for an exact rational.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// Generators, truncation degree and integration table of a ring.
#[derive(Clone, Debug, PartialEq)]
pub struct RingSpec {
    generators: Vec<Generator>,
    truncation: u32,
    integrals: BTreeMap<Monomial, BigRational>,
}

impl RingSpec {
    pub fn new(
        generators: Vec<Generator>,
        truncation: u32,
        integrals: BTreeMap<Monomial, BigRational>,
    ) -> Result<Arc<Self>> {
        let spec = RingSpec {
            generators,
            truncation,
            integrals,
        };
        let problems = spec.check();
        if let Some(first) = problems.into_iter().next() {
            return Err(Error::InvalidRing(first));
        }
        Ok(Arc::new(spec))
    }

    /// All invariant violations, as human-readable strings.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.truncation % 2 != 0 {
            out.push(format!("truncation degree {} is odd", self.truncation));
        }
        for g in &self.generators {
            if g.degree < 2 || g.degree % 2 != 0 {
                out.push(format!(
                    "generator {} has degree {}; degrees must be even and at least 2",
                    g.name, g.degree
                ));
            }
        }
        for i in 0..self.generators.len() {
            for j in 0..i {
                if self.generators[i].name == self.generators[j].name {
                    out.push(format!("duplicate generator name {}", self.generators[i].name));
                }
            }
        }
        for key in self.integrals.keys() {
            if key.len() != self.generators.len() {
                out.push("integration key has the wrong number of exponents".to_string());
            } else if self.degree(key) != self.truncation {
                out.push(format!(
                    "integration key of degree {} differs from truncation {}",
                    self.degree(key),
                    self.truncation
                ));
            }
        }
        out
    }

    /// The ring of a point: no generators, truncation 0, `integral(1) = 1`.
    pub fn point() -> Arc<Self> {
        let mut integrals = BTreeMap::new();
        integrals.insert(Vec::new(), qi(1));
        Arc::new(RingSpec {
            generators: Vec::new(),
            truncation: 0,
            integrals,
        })
    }

    /// `H*(CP^n)` with hyperplane class `name` and `integral(h^n) = 1`.
    pub fn projective(n: u32, name: &str) -> Arc<Self> {
        if n == 0 {
            return Self::point();
        }
        let mut integrals = BTreeMap::new();
        integrals.insert(vec![n], qi(1));
        Arc::new(RingSpec {
            generators: vec![Generator {
                name: name.to_string(),
                degree: 2,
            }],
            truncation: 2 * n,
            integrals,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn integrals(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.integrals
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn degree(&self, mono: &[u32]) -> u32 {
        mono.iter()
            .zip(&self.generators)
            .map(|(e, g)| e * g.degree)
            .sum()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Tensor product. Generators of `b` whose names clash with `a` are
    /// renamed with a numeric suffix. Returns the ring and the offset of
    /// `b`'s generators.
    pub fn tensor(a: &RingSpec, b: &RingSpec) -> (Arc<RingSpec>, usize) {
        let mut generators = a.generators.clone();
        for g in &b.generators {
            let mut name = g.name.clone();
            let mut k = 2;
            while generators.iter().any(|x| x.name == name) {
                name = format!("{}_{}", g.name, k);
                k += 1;
            }
            generators.push(Generator {
                name,
                degree: g.degree,
            });
        }
        let mut integrals = BTreeMap::new();
        for (ka, va) in &a.integrals {
            for (kb, vb) in &b.integrals {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                integrals.insert(key, va * vb);
            }
        }
        let spec = RingSpec {
            generators,
            truncation: a.truncation + b.truncation,
            integrals,
        };
        (Arc::new(spec), a.ngens())
    }
}

fn same_ring(a: &Arc<RingSpec>, b: &Arc<RingSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Element of a truncated ring, stored canonically (no zero coefficients,
/// nothing above the truncation degree).
#[derive(Clone)]
pub struct GradedElement<T> {
    ring: Arc<RingSpec>,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> PartialEq for GradedElement<T> {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl<T: Coeff> Debug for GradedElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<T: Coeff> GradedElement<T> {
    pub fn from_terms<I>(ring: &Arc<RingSpec>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, T)>,
    {
        let mut out = GradedElement {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        };
        for (mono, c) in terms {
            out.add_term(mono, c);
        }
        out
    }

    fn add_term(&mut self, mono: Monomial, c: T) {
        if c.is_zero() || self.ring.degree(&mono) > self.ring.truncation {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn zero(ring: &Arc<RingSpec>) -> Self {
        Self::from_terms(ring, [])
    }

    pub fn constant(ring: &Arc<RingSpec>, c: T) -> Self {
        Self::from_terms(ring, [(vec![0; ring.ngens()], c)])
    }

    pub fn one(ring: &Arc<RingSpec>) -> Self {
        Self::constant(ring, T::one())
    }

    /// The `i`-th generator.
    pub fn generator(ring: &Arc<RingSpec>, i: usize) -> Self {
        let mut mono = vec![0; ring.ngens()];
        mono[i] = 1;
        Self::from_terms(ring, [(mono, T::one())])
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, T> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scalar_part(&self) -> T {
        self.terms
            .get(&vec![0; self.ring.ngens()])
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// True when every stored term has degree `d`.
    pub fn is_pure_degree(&self, d: u32) -> bool {
        self.terms.keys().all(|m| self.ring.degree(m) == d)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self::from_terms(
            &self.ring,
            self.terms
                .iter()
                .filter(|(m, _)| self.ring.degree(m) == d)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_elem())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = Self::zero(&self.ring);
        for (ma, ca) in &self.terms {
            let da = self.ring.degree(ma);
            for (mb, cb) in &other.terms {
                if da + self.ring.degree(mb) > self.ring.truncation {
                    continue;
                }
                let mono: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(mono, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn neg_elem(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::from_terms(
            &self.ring,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * k.clone())),
        )
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> GradedElement<U> {
        GradedElement::from_terms(&self.ring, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.ring);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Upper bound on the nilpotency index of any element with zero scalar part.
    pub fn nilpotency_bound(&self) -> u32 {
        self.ring.truncation / 2 + 1
    }

    /// `sum_k coeffs[k] * self^k`.
    pub fn apply_series(&self, coeffs: &[T]) -> Self {
        let mut out = Self::zero(&self.ring);
        let mut power = Self::one(&self.ring);
        for c in coeffs {
            if power.is_zero() {
                break;
            }
            out = &out + &power.scale(c);
            power = &power * self;
        }
        out
    }

    /// Exponential of a nilpotent element; the series terminates.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.scalar_part().is_zero() {
            return Err(Error::NotNilpotent);
        }
        let n = self.nilpotency_bound() as usize;
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut c = T::one();
        for k in 0..=n {
            if k > 0 {
                c = c / T::from_rational(&qi(k as i64));
            }
            coeffs.push(c.clone());
        }
        Ok(self.apply_series(&coeffs))
    }

    /// Pairs the top-degree component with the integration table.
    pub fn integrate(&self) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            if let Some(v) = self.ring.integrals.get(m) {
                acc = acc + c.clone() * T::from_rational(v);
            }
        }
        acc
    }

    /// Reinterpret in a larger ring: generator `i` goes to generator `offset + i`.
    pub fn embed(&self, target: &Arc<RingSpec>, offset: usize) -> Self {
        Self::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut mono = vec![0; target.ngens()];
                mono[offset..offset + m.len()].copy_from_slice(m);
                (mono, c.clone())
            }),
        )
    }
}

impl GradedElement<BigRational> {
    pub fn to_complex<F: Float + Debug + Send + Sync>(&self) -> GradedElement<Complex<F>> {
        self.map(Complex::<F>::from_rational)
    }

    /// Parse a polynomial expression such as `1 + 3/2*h + h^2`.
    pub fn parse(ring: &Arc<RingSpec>, text: &str) -> Result<Self> {
        parse_expr(ring, text)
    }
}

macro_rules! checked_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, T: Coeff> $tr<&'a GradedElement<T>> for &'a GradedElement<T> {
            type Output = GradedElement<T>;
            /// Panics on ring mismatch; use the `checked_*` form for fallible input.
            fn $method(self, rhs: &'a GradedElement<T>) -> GradedElement<T> {
                self.$checked(rhs).expect("ring mismatch")
            }
        }
    };
}
checked_op!(Add, add, checked_add);
checked_op!(Sub, sub, checked_sub);
checked_op!(Mul, mul, checked_mul);

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(qi(1));
    for m in 1..=n {
        // sum_{k<m} C(m+1, k) B_k = -(m+1) B_m
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / qi(m as i64 + 1));
    }
    b
}

/// Taylor coefficients of `y / (1 - e^{-y})` up to `y^n`.
pub fn todd_series(n: usize) -> Vec<BigRational> {
    let b = bernoulli_numbers(n);
    let mut fact = BigInt::one();
    let mut out = Vec::with_capacity(n + 1);
    for (j, bj) in b.into_iter().enumerate() {
        if j > 0 {
            fact *= BigInt::from(j);
        }
        let sign = if j % 2 == 1 { -qi(1) } else { qi(1) };
        out.push(sign * bj / BigRational::from_integer(fact.clone()));
    }
    out
}

/// Taylor coefficients of `e^y` up to `y^n`.
pub fn exp_series(n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = qi(1);
    for j in 0..=n {
        if j > 0 {
            c /= qi(j as i64);
        }
        out.push(c.clone());
    }
    out
}

/// `prod_i r_i / (1 - e^{-r_i})` for degree-2 roots.
pub fn todd_from_roots(
    ring: &Arc<RingSpec>,
    roots: &[GradedElement<BigRational>],
) -> Result<GradedElement<BigRational>> {
    let n = (ring.truncation() / 2) as usize;
    let series = todd_series(n);
    let mut out = GradedElement::one(ring);
    for r in roots {
        if !same_ring(r.ring(), ring) {
            return Err(Error::RingMismatch);
        }
        if !r.is_pure_degree(2) {
            return Err(Error::NotDegreeTwo);
        }
        out = &out * &r.apply_series(&series);
    }
    Ok(out)
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Graded-lex order: total degree ascending, then exponent vectors descending.
pub fn graded_lex(ring: &RingSpec, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    ring.degree(a).cmp(&ring.degree(b)).then_with(|| b.cmp(a))
}

/// Monomial as `g1^e1*g2^e2`, or `1` for the unit monomial.
pub fn format_monomial(ring: &RingSpec, mono: &Monomial) -> String {
    let parts: Vec<String> = mono
        .iter()
        .zip(ring.generators())
        .filter(|(e, _)| **e > 0)
        .map(|(e, g)| {
            if *e == 1 {
                g.name.clone()
            } else {
                format!("{}^{}", g.name, e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for GradedElement<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut monos: Vec<&Monomial> = self.terms.keys().collect();
        monos.sort_by(|a, b| graded_lex(&self.ring, a, b));
        for (i, m) in monos.into_iter().enumerate() {
            let c = &self.terms[m];
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = format_monomial(&self.ring, m);
            if mono == "1" {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), mono)?;
            }
        }
        Ok(())
    }
}

/// Parse a rational literal `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Parse a monomial key such as `h^2*k` or `1`.
pub fn parse_monomial(ring: &RingSpec, text: &str) -> Result<Monomial> {
    let mut mono = vec![0; ring.ngens()];
    let text = text.trim();
    if text == "1" {
        return Ok(mono);
    }
    for factor in text.split('*') {
        let factor = factor.trim();
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => {
                let e: u32 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Expression(format!("bad exponent in `{}`", factor)))?;
                (n.trim(), e)
            }
            None => (factor, 1),
        };
        let i = ring
            .index_of(name)
            .ok_or_else(|| Error::Expression(format!("unknown generator `{}`", name)))?;
        mono[i] += exp;
    }
    Ok(mono)
}

fn parse_expr(ring: &Arc<RingSpec>, text: &str) -> Result<GradedElement<BigRational>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Expression("empty expression".into()));
    }
    // Split into signed terms; a '-' directly after '/', '^' or '*' is not a separator.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
        let is_sep = (ch == '+' || ch == '-') && !matches!(prev, Some('/') | Some('^') | Some('*'));
        if is_sep {
            if !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if matches!(prev, Some('+') | Some('-')) {
                negative ^= ch == '-';
            } else {
                negative = ch == '-';
            }
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    if current.is_empty() {
        return Err(Error::Expression(format!("trailing sign in `{}`", text)));
    }
    terms.push((negative, current));

    let mut out = GradedElement::zero(ring);
    for (neg, term) in terms {
        let mut coef = qi(1);
        let mut mono = vec![0u32; ring.ngens()];
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(Error::Expression(format!("empty factor in `{}`", text)));
            }
            if factor.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
                let r = parse_rational(factor)
                    .ok_or_else(|| Error::Expression(format!("bad number `{}`", factor)))?;
                coef *= r;
            } else {
                let m = parse_monomial(ring, factor)?;
                for (a, b) in mono.iter_mut().zip(m) {
                    *a += b;
                }
            }
        }
        if ring.degree(&mono) > ring.truncation() {
            return Err(Error::Expression(format!(
                "term `{}` exceeds the truncation degree",
                term
            )));
        }
        if neg {
            coef = -coef;
        }
        out.add_term(mono, coef);
    }
    Ok(out)
}
