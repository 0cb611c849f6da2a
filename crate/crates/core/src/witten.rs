//! The Witten integral `int phi(x) [sum_F e^{2 pi i m x J(F)} Lambda_F(x)] dx`
//! by quadrature, and its large-`m` expansion through boundary-value
//! distributions `(x +- i0)^{-k}`.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::localization::{lambda_laurent, todd_rho, CompensatedSum, EquivariantClassAtF, Normalization};
use crate::model::{FixedComponent, ManifoldPresentation};
use crate::quantize::{classify, exceptional_term, regular_term, Classification, RegularTag};
use crate::ring::{qi, GradedElement};
use crate::Real;

/// Even bump: `1` on `[-delta1, delta1]`, `0` outside `[-delta2, delta2]`,
/// with the `e^{-1/t}` smooth-step profile in between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunction<F> {
    pub delta1: F,
    pub delta2: F,
    /// Highest derivative order the pairings may request.
    pub max_order: usize,
}

impl<F: Real> TestFunction<F> {
    pub fn new(delta1: F, delta2: F, max_order: usize) -> Result<Self> {
        if !(delta1 > F::zero() && delta1 < delta2) {
            return Err(Error::InvalidArgument("need 0 < delta1 < delta2".into()));
        }
        Ok(TestFunction {
            delta1,
            delta2,
            max_order,
        })
    }

    /// `delta1 = 0.05`, `delta2 = 0.3`.
    pub fn default_bump(max_order: usize) -> Self {
        TestFunction {
            delta1: F::from(0.05).unwrap(),
            delta2: F::from(0.3).unwrap(),
            max_order,
        }
    }

    /// Taylor jet at `x` up to `order`.
    pub fn jet(&self, x: F, order: usize) -> Result<Jet<F>> {
        if order > self.max_order {
            return Err(Error::MissingDerivatives {
                available: self.max_order,
                needed: order,
            });
        }
        let one = Complex::new(F::one(), F::zero());
        let ax = x.abs();
        if ax <= self.delta1 {
            return Ok(Jet::constant(one, order));
        }
        if ax >= self.delta2 {
            return Ok(Jet::constant(Complex::zero(), order));
        }
        // t = (|x| - delta1) / (delta2 - delta1) as a jet in x
        let width = self.delta2 - self.delta1;
        let sign = if x > F::zero() { F::one() } else { -F::one() };
        let t = Jet::variable(Complex::new(x, F::zero()), order)
            .scale(Complex::new(sign / width, F::zero()))
            .add_const(Complex::new(-self.delta1 / width, F::zero()));
        let up = smooth(&t);
        let down = smooth(&t.scale(-one).add_const(one));
        Ok(down.mul(&up.add(&down).recip()))
    }

    pub fn value(&self, x: F) -> F {
        self.jet(x, 0).map(|j| j.value().re).unwrap_or_else(|_| F::zero())
    }

    pub fn derivative(&self, k: usize, x: F) -> Result<F> {
        Ok(self.jet(x, k)?.derivative(k).re)
    }
}

/// `e^{-1/t}` for `t > 0`.
fn smooth<F: Real>(t: &Jet<F>) -> Jet<F> {
    if t.value().re <= F::zero() {
        return Jet::constant(Complex::zero(), t.order());
    }
    t.recip().scale(Complex::new(-F::one(), F::zero())).exp()
}

/// Tuning of the quadrature and the Taylor region around `x = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WittenOptions<F> {
    /// Half-width of the Taylor region; default `m^{-1/2} / 10`.
    pub eta: Option<F>,
    /// Taylor order `K`; default `2 dim_M + 4`, raised until the series
    /// remainder at `eta` is below `1e-14`.
    pub taylor_order: Option<usize>,
    /// Absolute quadrature tolerance.
    pub tolerance: F,
    pub norm: Normalization,
}

impl<F: Real> Default for WittenOptions<F> {
    fn default() -> Self {
        WittenOptions {
            eta: None,
            taylor_order: None,
            tolerance: F::from(1e-10).unwrap(),
            norm: Normalization::CALIBRATED,
        }
    }
}

impl<F: Real> WittenOptions<F> {
    pub fn eta_for(&self, m: u64) -> F {
        self.eta.unwrap_or_else(|| {
            let mm = F::from(m.max(1)).unwrap();
            F::one() / (mm.sqrt() * F::from(10).unwrap())
        })
    }

    pub fn order_for(&self, p: &ManifoldPresentation, m: u64) -> usize {
        if let Some(k) = self.taylor_order {
            return k;
        }
        let base = 2 * p.dim_m as usize + 4;
        let ratio = self.eta_for(m).to_f64().unwrap() * max_weight(p) as f64;
        let needed = if ratio > 0.0 && ratio < 1.0 {
            ((1e-14f64).ln() / ratio.ln()).ceil() as usize + 1
        } else {
            base
        };
        base.max(needed).min(60)
    }
}

fn max_weight(p: &ManifoldPresentation) -> i64 {
    p.components
        .iter()
        .flat_map(|f| f.weights())
        .map(|k| k.abs())
        .max()
        .unwrap_or(1)
}

// ---------------------------------------------------------------------------
// Quadrature

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Real>(f: &(impl Fn(F) -> Complex<F> + Sync), a: F, b: F) -> (Complex<F>, F) {
    let c = (a + b) / F::from(2).unwrap();
    let h = (b - a) / F::from(2).unwrap();
    let fc = f(c);
    let mut kron = fc * F::from(WGK[7]).unwrap();
    let mut gauss = fc * F::from(WG[3]).unwrap();
    for i in 0..7 {
        let dx = h * F::from(XGK[i]).unwrap();
        let pair = f(c - dx) + f(c + dx);
        kron = kron + pair * F::from(WGK[i]).unwrap();
        if i % 2 == 1 {
            gauss = gauss + pair * F::from(WG[i / 2]).unwrap();
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

fn adaptive<F: Real>(f: &(impl Fn(F) -> Complex<F> + Sync), a: F, b: F, tol: F, depth: u32) -> Complex<F> {
    let (v, err) = gk15(f, a, b);
    if err <= tol || depth >= 40 {
        return v;
    }
    let mid = (a + b) / F::from(2).unwrap();
    let half = (tol / F::from(2).unwrap()).max(F::from(1e-16).unwrap());
    adaptive(f, a, mid, half, depth + 1) + adaptive(f, mid, b, half, depth + 1)
}

/// Adaptive Gauss-Kronrod over `[a, b]`, starting from `panels` equal
/// panels evaluated in parallel and summed in order.
pub fn integrate<F: Real>(
    f: &(impl Fn(F) -> Complex<F> + Sync),
    a: F,
    b: F,
    panels: usize,
    tol: F,
) -> Complex<F> {
    if !(b > a) {
        return Complex::zero();
    }
    let n = panels.max(1);
    let width = (b - a) / F::from(n).unwrap();
    let parts: Vec<Complex<F>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let lo = a + width * F::from(i).unwrap();
            let hi = if i + 1 == n { b } else { lo + width };
            adaptive(f, lo, hi, tol / F::from(n).unwrap(), 0)
        })
        .collect();
    let mut sum = CompensatedSum::new();
    for p in parts {
        sum.add(p);
    }
    sum.total()
}

fn panels_for<F: Real>(len: F, m: u64) -> usize {
    (len.to_f64().unwrap() * (m as f64 + 1.0) * 4.0).ceil().max(4.0) as usize
}

// ---------------------------------------------------------------------------
// Per-component numeric data

/// `Lambda_F(s) = integral_F e^{m omega} rho(s) / e_F(s)` prepared for
/// repeated floating evaluation, with its exact Laurent data at `s = 0`.
struct LocalTerm<F> {
    moment: i64,
    einv: Vec<(i32, GradedElement<Complex<F>>)>,
    emw: GradedElement<Complex<F>>,
    rho: EquivariantClassAtF,
    /// `lambda_{-j}` for `j >= 1`.
    principal: Vec<(usize, BigRational)>,
    /// `a_n` for `0 <= n <= K`.
    analytic: Vec<F>,
}

impl<F: Real> LocalTerm<F> {
    fn new(f: &FixedComponent, rho: &EquivariantClassAtF, m: u64, order: usize) -> Result<Self> {
        let einv = crate::localization::inverse_euler_laurent(f)
            .into_iter()
            .map(|(i, c)| (-(i as i32), c.to_complex::<F>()))
            .collect();
        let emw = f.omega.scale(&qi(m as i64)).exp_nilpotent()?.to_complex::<F>();
        let lau = lambda_laurent(f, rho, m, order)?;
        let principal = lau
            .iter()
            .filter(|(e, _)| **e < 0)
            .map(|(e, c)| ((-e) as usize, c.clone()))
            .collect();
        let analytic = (0..=order as i64)
            .map(|n| to_real(lau.get(&n).unwrap_or(&BigRational::zero())))
            .collect();
        Ok(LocalTerm {
            moment: f.moment,
            einv,
            emw,
            rho: rho.clone(),
            principal,
            analytic,
        })
    }

    /// Closed-form value at `s != 0`.
    fn value(&self, s: Complex<F>) -> Complex<F> {
        let ring = self.emw.ring();
        let mut e = GradedElement::<Complex<F>>::zero(ring);
        for (p, c) in &self.einv {
            e = &e + &c.scale(&s.powi(*p));
        }
        (&(&self.emw * &self.rho.eval(s)) * &e).integrate()
    }

    fn principal_value(&self, s: Complex<F>) -> Complex<F> {
        let mut acc = Complex::zero();
        for (j, c) in &self.principal {
            acc = acc + s.powi(-(*j as i32)) * to_real::<F>(c);
        }
        acc
    }

    fn analytic_series(&self, s: Complex<F>) -> Complex<F> {
        let mut acc = Complex::zero();
        for a in self.analytic.iter().rev() {
            acc = acc * s + *a;
        }
        acc
    }
}

fn to_real<F: Real>(q: &BigRational) -> F {
    F::from(q.to_f64().unwrap()).unwrap()
}

/// `(e^w - sum_{n<j} w^n/n!) / w^j`.
fn exp_remainder<F: Real>(j: usize, w: Complex<F>) -> Complex<F> {
    if w.norm() < F::one() {
        let mut term = Complex::new(F::one(), F::zero());
        for i in 1..=j {
            term = term / F::from(i).unwrap();
        }
        let mut acc = term;
        for n in 1..30 {
            term = term * w / F::from(n + j).unwrap();
            acc = acc + term;
        }
        return acc;
    }
    let mut partial = Complex::zero();
    let mut term = Complex::new(F::one(), F::zero());
    for n in 0..j {
        if n > 0 {
            term = term * w / F::from(n).unwrap();
        }
        partial = partial + term;
    }
    (w.exp() - partial) / w.powi(j as i32)
}

/// The inner integrand as a sum over components, with both a closed form
/// away from `0` and a pole-free form near `0`.
struct Integrand<F> {
    m: u64,
    terms: Vec<LocalTerm<F>>,
    norm: Normalization,
}

impl<F: Real> Integrand<F> {
    fn new(p: &ManifoldPresentation, rho: &[EquivariantClassAtF], m: u64, order: usize, norm: Normalization) -> Result<Self> {
        if rho.len() != p.components.len() {
            return Err(Error::InvalidArgument("one class per component is required".into()));
        }
        let terms = p
            .components
            .par_iter()
            .zip(rho.par_iter())
            .map(|(f, r)| LocalTerm::new(f, r, m, order))
            .collect::<Result<Vec<_>>>()?;
        let out = Integrand { m, terms, norm };
        out.check_cancellation()?;
        Ok(out)
    }

    /// The poles of `sum_F e^{-m J s} Lambda_F(s)` at `s = 0` must cancel exactly.
    fn check_cancellation(&self) -> Result<()> {
        let mut total: BTreeMap<i64, BigRational> = BTreeMap::new();
        for t in &self.terms {
            let mj = qi(-(self.m as i64) * t.moment);
            for (j, c) in &t.principal {
                let mut coef = c.clone();
                for n in 0..*j {
                    if n > 0 {
                        coef = coef * &mj / qi(n as i64);
                    }
                    *total.entry(n as i64 - *j as i64).or_insert_with(BigRational::zero) += &coef;
                }
            }
        }
        if let Some((e, c)) = total.iter().find(|(_, c)| !c.is_zero()) {
            return Err(Error::CancellationFailure(format!(
                "coefficient of s^{} is {}",
                e, c
            )));
        }
        Ok(())
    }

    fn phase(&self, t: &LocalTerm<F>, s: Complex<F>) -> Complex<F> {
        (s * F::from(-(self.m as f64) * t.moment as f64).unwrap()).exp()
    }

    fn closed(&self, x: F) -> Complex<F> {
        let s = self.norm.s(x);
        let mut sum = CompensatedSum::new();
        for t in &self.terms {
            sum.add(self.phase(t, s) * t.value(s));
        }
        sum.total()
    }

    fn near_zero(&self, x: F) -> Complex<F> {
        let s = self.norm.s(x);
        let mut sum = CompensatedSum::new();
        for t in &self.terms {
            sum.add(self.phase(t, s) * t.analytic_series(s));
            if t.moment == 0 {
                continue;
            }
            let mj = -F::from(self.m as f64 * t.moment as f64).unwrap();
            let w = s * mj;
            for (j, c) in &t.principal {
                sum.add(exp_remainder(*j, w) * mj.powi(*j as i32) * to_real::<F>(c));
            }
        }
        sum.total()
    }
}

/// Integral of the localized integrand against `phi`.
pub fn witten_pair<F: Real>(
    p: &ManifoldPresentation,
    rho: &[EquivariantClassAtF],
    phi: &TestFunction<F>,
    m: u64,
    opts: &WittenOptions<F>,
) -> Result<Complex<F>> {
    check_support(p, phi)?;
    let eta = opts.eta_for(m).min(phi.delta2);
    let integrand = Integrand::<F>::new(p, rho, m, opts.order_for(p, m), opts.norm)?;
    let outer = |x: F| integrand.closed(x) * phi.value(x);
    let inner = |x: F| integrand.near_zero(x) * phi.value(x);
    let tol = opts.tolerance / F::from(3).unwrap();
    let len = phi.delta2 - eta;
    let n = panels_for(len, m);
    let mut sum = CompensatedSum::new();
    sum.add(integrate(&outer, -phi.delta2, -eta, n, tol));
    sum.add(integrate(&inner, -eta, eta, panels_for(eta + eta, m), tol));
    sum.add(integrate(&outer, eta, phi.delta2, n, tol));
    Ok(sum.total())
}

/// Largest gap between the closed and near-zero evaluations on
/// `|x| in [eta/2, 2 eta]`.
pub fn overlap_deviation<F: Real>(
    p: &ManifoldPresentation,
    rho: &[EquivariantClassAtF],
    m: u64,
    opts: &WittenOptions<F>,
) -> Result<F> {
    let eta = opts.eta_for(m);
    let integrand = Integrand::<F>::new(p, rho, m, opts.order_for(p, m), opts.norm)?;
    let mut worst = F::zero();
    for r in [0.5, 0.8, 1.0, 1.25, 2.0] {
        for sign in [-1.0, 1.0] {
            let x = eta * F::from(r * sign).unwrap();
            worst = worst.max((integrand.closed(x) - integrand.near_zero(x)).norm());
        }
    }
    Ok(worst)
}

fn check_support<F: Real>(p: &ManifoldPresentation, phi: &TestFunction<F>) -> Result<()> {
    let k = F::from(max_weight(p)).unwrap();
    if phi.delta2 * k >= F::one() {
        return Err(Error::InvalidArgument(format!(
            "test function support must stay below 1/{}",
            max_weight(p)
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    Avg,
}

/// Pairing of `(x + i0)^{-k}`, `(x - i0)^{-k}` or their mean with `phi`.
///
/// Uses `<(x +- i0)^{-k}, phi> = <(x +- i0)^{-1}, phi^{(k-1)}> / (k-1)!` and
/// `<(x +- i0)^{-1}, psi> = int_0^inf (psi(x) - psi(-x))/x dx -+ i pi psi(0)`.
pub fn dist_pair<F: Real>(k: usize, side: Side, phi: &TestFunction<F>) -> Result<Complex<F>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let d = k - 1;
    if d > phi.max_order {
        return Err(Error::MissingDerivatives {
            available: phi.max_order,
            needed: d,
        });
    }
    let psi = |x: F| phi.derivative(d, x).unwrap_or_else(|_| F::zero());
    let odd = |x: F| Complex::new((psi(x) - psi(-x)) / x, F::zero());
    let pv = integrate(&odd, F::zero(), phi.delta2, 8, F::from(1e-13).unwrap());
    let jump = Complex::new(F::zero(), F::PI() * psi(F::zero()));
    let v = match side {
        Side::Plus => pv - jump,
        Side::Minus => pv + jump,
        Side::Avg => pv,
    };
    let mut fact = F::one();
    for i in 2..=d {
        fact = fact * F::from(i).unwrap();
    }
    Ok(v / fact)
}

/// Terms of the large-`m` expansion of the Witten integral with Todd data.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion<F> {
    pub regular: BigRational,
    pub regular_tag: RegularTag,
    pub exceptional: BigRational,
    /// Pairing of each zero-level component's term with `phi`.
    pub fixed: Vec<(String, Complex<F>)>,
}

impl<F: Real> Expansion<F> {
    pub fn total(&self, phi0: F) -> Complex<F> {
        let mut sum = CompensatedSum::new();
        sum.add(Complex::new(to_real::<F>(&(&self.regular + &self.exceptional)) * phi0, F::zero()));
        for (_, v) in &self.fixed {
            sum.add(*v);
        }
        sum.total()
    }

    pub fn total_without_fixed(&self, phi0: F) -> Complex<F> {
        Complex::new(to_real::<F>(&(&self.regular + &self.exceptional)) * phi0, F::zero())
    }
}

/// Regular, exceptional and distributional terms at the zero level.
pub fn expansion_terms<F: Real>(
    p: &ManifoldPresentation,
    phi: &TestFunction<F>,
    m: u64,
    opts: &WittenOptions<F>,
) -> Result<Expansion<F>> {
    check_support(p, phi)?;
    let order = opts.order_for(p, m);
    let eta = opts.eta_for(m).min(phi.delta2);
    let regular = regular_term(p, m)?;
    let mut exceptional = BigRational::zero();
    let mut fixed = Vec::new();
    let c = Complex::new(
        F::from(opts.norm.scale.re).unwrap(),
        F::from(opts.norm.scale.im).unwrap(),
    );
    for f in p.components.iter().filter(|f| f.moment == 0) {
        let class = classify(f);
        if class == Classification::Indefinite {
            exceptional += exceptional_term(f, m)?;
        }
        let side = match class {
            Classification::PositiveDefinite => Side::Plus,
            Classification::NegativeDefinite => Side::Minus,
            Classification::Indefinite => Side::Avg,
        };
        let term = LocalTerm::<F>::new(f, &EquivariantClassAtF::todd(f), m, order)?;
        let mut sum = CompensatedSum::new();
        for (j, lam) in &term.principal {
            // s^{-j} = c^{-j} x^{-j}
            let coef = c.powi(-(*j as i32)) * to_real::<F>(lam);
            sum.add(coef * dist_pair(*j, side, phi)?);
        }
        let analytic = |x: F| {
            let s = opts.norm.s(x);
            let a = if x.abs() < eta {
                term.analytic_series(s)
            } else {
                term.value(s) - term.principal_value(s)
            };
            a * phi.value(x)
        };
        let n = panels_for(phi.delta2, m);
        let tol = opts.tolerance / F::from(4).unwrap();
        sum.add(integrate(&analytic, -phi.delta2, -eta, n, tol));
        sum.add(integrate(&analytic, -eta, eta, 4, tol));
        sum.add(integrate(&analytic, eta, phi.delta2, n, tol));
        fixed.push((f.name.clone(), sum.total()));
    }
    Ok(Expansion {
        regular: regular.value,
        regular_tag: regular.tag,
        exceptional,
        fixed,
    })
}

/// Sum of the expansion terms.
pub fn expansion_rhs<F: Real>(
    p: &ManifoldPresentation,
    phi: &TestFunction<F>,
    m: u64,
    opts: &WittenOptions<F>,
) -> Result<Complex<F>> {
    Ok(expansion_terms(p, phi, m, opts)?.total(phi.value(F::zero())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WittenCheckReport {
    pub ms: Vec<u64>,
    pub lhs: Vec<Complex<f64>>,
    pub rhs: Vec<Complex<f64>>,
    pub regular_tag: RegularTag,
    /// Least-squares slope of `log max(|lhs - rhs|, floor)` against `log m`.
    pub exponent: f64,
    pub floor: f64,
}

impl WittenCheckReport {
    pub fn differences(&self) -> Vec<f64> {
        self.lhs.iter().zip(&self.rhs).map(|(a, b)| (a - b).norm()).collect()
    }
}

/// Absolute floor applied to differences before fitting the decay exponent.
pub const DECAY_FLOOR: f64 = 1e-8;

/// Compare the quadrature with the expansion over several `m` with Todd
/// data. With `drop_fixed` the zero-level distribution terms are left out.
pub fn decay_check(
    p: &ManifoldPresentation,
    phi: &TestFunction<f64>,
    ms: &[u64],
    opts: &WittenOptions<f64>,
    drop_fixed: bool,
) -> Result<WittenCheckReport> {
    if ms.len() < 4 {
        return Err(Error::InsufficientRange("at least four values of m are required".into()));
    }
    let rho = todd_rho(p);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut tag = RegularTag::Supplied;
    for &m in ms {
        lhs.push(witten_pair(p, &rho, phi, m, opts)?);
        let e = expansion_terms(p, phi, m, opts)?;
        tag = e.regular_tag;
        rhs.push(if drop_fixed {
            e.total_without_fixed(phi.value(0.0))
        } else {
            e.total(phi.value(0.0))
        });
    }
    let diffs: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).collect();
    let exponent = fit_exponent(ms, &diffs, DECAY_FLOOR);
    Ok(WittenCheckReport {
        ms: ms.to_vec(),
        lhs,
        rhs,
        regular_tag: tag,
        exponent,
        floor: DECAY_FLOOR,
    })
}

/// Least-squares slope of `log max(d, floor)` against `log m`.
pub fn fit_exponent(ms: &[u64], diffs: &[f64], floor: f64) -> f64 {
    let xs: Vec<f64> = ms.iter().map(|m| (*m as f64).ln()).collect();
    let ys: Vec<f64> = diffs.iter().map(|d| d.max(floor).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::cp1_rotation;

    #[test]
    fn bump_shape() {
        let phi = TestFunction::<f64>::default_bump(4);
        assert_eq!(phi.value(0.0), 1.0);
        assert_eq!(phi.value(0.05), 1.0);
        assert_eq!(phi.value(0.3), 0.0);
        assert_eq!(phi.value(-0.31), 0.0);
        let v = phi.value(0.175);
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(phi.value(-0.12), phi.value(0.12));
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let phi = TestFunction::<f64>::default_bump(4);
        let h = 1e-6;
        for x in [0.07, 0.11, 0.2, -0.15, 0.28] {
            for k in 1..=3 {
                let fd = (phi.derivative(k - 1, x + h).unwrap() - phi.derivative(k - 1, x - h).unwrap()) / (2.0 * h);
                let d = phi.derivative(k, x).unwrap();
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "x={} k={} {} {}", x, k, fd, d);
            }
        }
        assert!(matches!(phi.jet(0.1, 5), Err(Error::MissingDerivatives { .. })));
    }

    #[test]
    fn exp_remainder_branches_agree() {
        for j in 1..4 {
            let w = Complex::new(0.0, 0.999);
            let a = exp_remainder::<f64>(j, w);
            let w2 = Complex::new(0.0, 1.001);
            let b = exp_remainder::<f64>(j, w2);
            assert!((a - b).norm() < 2e-3);
        }
    }

    #[test]
    fn gauss_kronrod_integrates_polynomials_and_oscillations() {
        let f = |x: f64| Complex::new(x * x * x - x, 0.0);
        let v = integrate(&f, 0.0, 2.0, 3, 1e-12);
        assert!((v.re - 2.0).abs() < 1e-12);
        let g = |x: f64| Complex::new(0.0, 40.0 * x).exp();
        let v = integrate(&g, 0.0, 1.0, 2, 1e-12);
        let want = (Complex::new(0.0, 40.0).exp() - 1.0) / Complex::new(0.0, 40.0);
        assert!((v - want).norm() < 1e-11);
    }

    #[test]
    fn dist_pair_of_an_even_bump() {
        let phi = TestFunction::<f64>::default_bump(4);
        let plus = dist_pair(1, Side::Plus, &phi).unwrap();
        assert!(plus.re.abs() < 1e-14);
        assert!((plus.im + std::f64::consts::PI).abs() < 1e-14);
        assert!(dist_pair(1, Side::Avg, &phi).unwrap().norm() < 1e-14);
    }

    #[test]
    fn near_zero_and_closed_forms_overlap() {
        let p = cp1_rotation(1).unwrap();
        let rho = todd_rho(&p);
        for m in [1, 8, 64] {
            let dev = overlap_deviation(&p, &rho, m, &WittenOptions::<f64>::default()).unwrap();
            assert!(dev < 1e-9, "m={} dev={}", m, dev);
        }
    }

    #[test]
    fn inconsistent_data_fails_cancellation() {
        // simple poles cancel for any moments; double poles do not
        let cp1 = cp1_rotation(1).unwrap();
        let mut p = crate::model::product(&cp1, &cp1);
        p.components[3].moment += 1;
        let rho = todd_rho(&p);
        let phi = TestFunction::<f64>::default_bump(4);
        let err = witten_pair(&p, &rho, &phi, 3, &WittenOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CancellationFailure(_)));
    }
}
