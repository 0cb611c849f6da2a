//! Fixed-point localization: the per-component factors of the equivariant
//! character, the global character, and the localized inner Witten integrand.
//!
//! Floating evaluations use the variable `s = c x`. With the fixed-point
//! factor written as `prod 1/(1 - z^k e^a)` and `z = e^{2 pi i x}`, one has
//! `z^k e^a = e^{-(k s - a)}` exactly when `c = -2 pi i`, and then
//!
//! ```text
//! 1/(1 - z^k e^a) = td(k s - a) / (k s - a),   z^{m J} = e^{-m J s}.
//! ```
//!
//! So the equivariant Todd class restricted to `F` is
//! `Td(F) prod td(k s - a)` and the equivariant Euler class is
//! `prod (k s - a)`. This pins `c`; the Duistermaat-Heckman calibration on
//! `CP^1` and the Kirillov check both fail for any other choice.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jet::todd_jet;
use crate::model::{FixedComponent, ManifoldPresentation};
use crate::ring::{qi, todd_series, GradedElement, RingSpec};
use crate::zrational::{LaurentPoly, RingZRational, ScalarZRational};
use crate::{GradedQ, Real};

/// Scale `c` in `s = c x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    pub scale: Complex<f64>,
}

impl Normalization {
    pub const CALIBRATED: Normalization = Normalization {
        scale: Complex::new(0.0, -2.0 * std::f64::consts::PI),
    };

    pub fn s<F: Real>(&self, x: F) -> Complex<F> {
        Complex::new(
            F::from(self.scale.re).unwrap() * x,
            F::from(self.scale.im).unwrap() * x,
        )
    }
}

impl Default for Normalization {
    fn default() -> Self {
        Self::CALIBRATED
    }
}

/// `integral_F Td(F) e^{m omega} prod 1/(1 - z^k e^a)`.
pub fn chi_tilde(f: &FixedComponent, m: u64) -> Result<ScalarZRational> {
    let ring = &f.ring;
    let emw = f.omega.scale(&qi(m as i64)).exp_nilpotent()?;
    let mut acc = RingZRational::monomial(f.todd.checked_mul(&emw)?, 0);
    for b in &f.blocks {
        for a in &b.chern_roots {
            if !Arc::ptr_eq(a.ring(), ring) && **a.ring() != **ring {
                return Err(Error::RingMismatch);
            }
            acc = acc.mul(&RingZRational::inv_one_minus(b.weight, a)?);
        }
    }
    Ok(acc.integrate_over_f())
}

/// Sum of `z^{m J(F)} chi_tilde_F` before pole cancellation.
pub fn character_rational(p: &ManifoldPresentation, m: u64) -> Result<ScalarZRational> {
    let terms: Vec<ScalarZRational> = p
        .components
        .par_iter()
        .map(|f| Ok(chi_tilde(f, m)?.shifted(m as i64 * f.moment)))
        .collect::<Result<_>>()?;
    let mut total = ScalarZRational::constant(BigRational::zero());
    for t in &terms {
        total = total.add(t);
    }
    Ok(total)
}

/// The equivariant index as a Laurent polynomial in `z`.
pub fn character(p: &ManifoldPresentation, m: u64) -> Result<LaurentPoly> {
    character_rational(p, m)?.to_laurent_polynomial().map_err(|e| match e {
        Error::NotAPolynomial(msg) => Error::NotAPolynomial(format!(
            "fixed-point contributions of `{}` at m = {} leave a pole: {}",
            p.name, m, msg
        )),
        other => other,
    })
}

/// The character at `z = 1`.
pub fn rr_total(p: &ManifoldPresentation, m: u64) -> Result<BigInt> {
    let v = character(p, m)?.eval_at_one();
    Ok(v.to_integer())
}

/// A class restricted to a fixed component, as a function of `s`.
#[derive(Clone, Debug, PartialEq)]
pub enum EquivariantClassAtF {
    /// `Td(F) prod td(k s - a)`, evaluated in closed form.
    Todd {
        todd: GradedQ,
        roots: Vec<(i64, GradedQ)>,
    },
    /// `sum_n c_n s^n`.
    Series {
        ring: Arc<RingSpec>,
        coeffs: Vec<GradedQ>,
    },
}

impl EquivariantClassAtF {
    pub fn todd(f: &FixedComponent) -> Self {
        EquivariantClassAtF::Todd {
            todd: f.todd.clone(),
            roots: f
                .blocks
                .iter()
                .flat_map(|b| b.chern_roots.iter().map(move |a| (b.weight, a.clone())))
                .collect(),
        }
    }

    pub fn constant(ring: &Arc<RingSpec>, c: BigRational) -> Self {
        EquivariantClassAtF::Series {
            ring: ring.clone(),
            coeffs: vec![GradedQ::constant(ring, c)],
        }
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        match self {
            EquivariantClassAtF::Todd { todd, .. } => todd.ring(),
            EquivariantClassAtF::Series { ring, .. } => ring,
        }
    }

    /// Exact Taylor coefficients in `s` up to `s^order`.
    pub fn series(&self, order: usize) -> Vec<GradedQ> {
        match self {
            EquivariantClassAtF::Series { ring, coeffs } => (0..=order)
                .map(|n| coeffs.get(n).cloned().unwrap_or_else(|| GradedQ::zero(ring)))
                .collect(),
            EquivariantClassAtF::Todd { todd, roots } => {
                let ring = todd.ring();
                let mut acc: Vec<GradedQ> = (0..=order)
                    .map(|n| if n == 0 { todd.clone() } else { GradedQ::zero(ring) })
                    .collect();
                let nil = todd.nilpotency_bound() as usize;
                let t = todd_series(order + nil + 1);
                for (k, a) in roots {
                    let f = shifted_todd_series(&t, *k, a, order);
                    acc = mul_series(&acc, &f, order);
                }
                acc
            }
        }
    }

    /// Floating value at a complex `s`.
    pub fn eval<F: Real>(&self, s: Complex<F>) -> GradedElement<Complex<F>> {
        match self {
            EquivariantClassAtF::Series { ring, coeffs } => {
                let mut acc = GradedElement::zero(ring);
                for c in coeffs.iter().rev() {
                    acc = &acc.scale(&s) + &c.to_complex::<F>();
                }
                acc
            }
            EquivariantClassAtF::Todd { todd, roots } => {
                let nil = todd.nilpotency_bound() as usize;
                let mut acc = todd.to_complex::<F>();
                for (k, a) in roots {
                    let y0 = s * F::from(*k).unwrap();
                    let jet = todd_jet(y0, nil);
                    let minus_a = a.neg_elem().to_complex::<F>();
                    acc = &acc * &minus_a.apply_series(jet.coeffs());
                }
                acc
            }
        }
    }

    /// `alpha * self + beta * other` as a series truncated at `order`.
    pub fn combine(&self, alpha: &BigRational, other: &Self, beta: &BigRational, order: usize) -> Self {
        let a = self.series(order);
        let b = other.series(order);
        EquivariantClassAtF::Series {
            ring: self.ring().clone(),
            coeffs: a
                .iter()
                .zip(&b)
                .map(|(x, y)| &x.scale(alpha) + &y.scale(beta))
                .collect(),
        }
    }
}

/// Equivariant Todd data on every component.
pub fn todd_rho(p: &ManifoldPresentation) -> Vec<EquivariantClassAtF> {
    p.components.iter().map(EquivariantClassAtF::todd).collect()
}

/// Default truncation order of `s`-series.
pub fn default_order(p: &ManifoldPresentation) -> usize {
    2 * p.dim_m as usize
}

/// Coefficients of `td(k s - a)` in powers of `s`.
fn shifted_todd_series(t: &[BigRational], k: i64, a: &GradedQ, order: usize) -> Vec<GradedQ> {
    let ring = a.ring();
    let minus_a = a.neg_elem();
    let mut powers = vec![GradedQ::one(ring)];
    loop {
        let next = powers.last().unwrap() * &minus_a;
        if next.is_zero() {
            break;
        }
        powers.push(next);
    }
    // (k s - a)^n = sum_i C(n, i) k^i s^i (-a)^{n-i}
    (0..=order)
        .map(|i| {
            let mut c = GradedQ::zero(ring);
            let ki = qi(k).pow(i as i32);
            for (j, pj) in powers.iter().enumerate() {
                let n = i + j;
                if n >= t.len() {
                    break;
                }
                let coef = &t[n] * binomial(n, i) * &ki;
                c = &c + &pj.scale(&coef);
            }
            c
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> BigRational {
    let mut b = BigInt::from(1);
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(b)
}

fn mul_series(a: &[GradedQ], b: &[GradedQ], order: usize) -> Vec<GradedQ> {
    let ring = a[0].ring();
    let mut out = vec![GradedQ::zero(ring); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `1 / prod (k s - a)` as `sum_i E_i s^{-i}`.
pub fn inverse_euler_laurent(f: &FixedComponent) -> BTreeMap<u32, GradedQ> {
    let ring = &f.ring;
    let mut acc: BTreeMap<u32, GradedQ> = BTreeMap::from([(0, GradedQ::one(ring))]);
    for b in &f.blocks {
        let k = qi(b.weight);
        for a in &b.chern_roots {
            // 1/(k s - a) = sum_j a^j / k^{j+1} s^{-(j+1)}
            let mut factor = BTreeMap::new();
            let mut aj = GradedQ::one(ring);
            let mut kj = k.clone();
            let mut j = 1;
            while !aj.is_zero() {
                factor.insert(j, aj.scale(&(qi(1) / &kj)));
                aj = &aj * a;
                kj = &kj * &k;
                j += 1;
            }
            let mut next: BTreeMap<u32, GradedQ> = BTreeMap::new();
            for (i, x) in &acc {
                for (j, y) in &factor {
                    let prod = x * y;
                    if prod.is_zero() {
                        continue;
                    }
                    let e = next.entry(i + j).or_insert_with(|| GradedQ::zero(ring));
                    *e = &*e + &prod;
                }
            }
            acc = next;
        }
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// Exact Laurent coefficients of `Lambda_F(s) = integral_F e^{m omega} rho / e_F`
/// from the most negative power up to `s^order`.
pub fn lambda_laurent(
    f: &FixedComponent,
    rho: &EquivariantClassAtF,
    m: u64,
    order: usize,
) -> Result<BTreeMap<i64, BigRational>> {
    let einv = inverse_euler_laurent(f);
    let depth = einv.keys().next_back().copied().unwrap_or(0) as usize;
    let series = rho.series(order + depth);
    let emw = f.omega.scale(&qi(m as i64)).exp_nilpotent()?;
    let weighted: Vec<GradedQ> = series.iter().map(|c| c * &emw).collect();
    let mut out: BTreeMap<i64, BigRational> = BTreeMap::new();
    for (i, e) in &einv {
        for (n, c) in weighted.iter().enumerate() {
            let power = n as i64 - *i as i64;
            if power > order as i64 {
                break;
            }
            let v = (c * e).integrate();
            if !v.is_zero() {
                *out.entry(power).or_insert_with(BigRational::zero) += v;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Floating value of `Lambda_F(s)` at `s != 0`.
pub fn lambda_value<F: Real>(
    f: &FixedComponent,
    rho: &EquivariantClassAtF,
    m: u64,
    s: Complex<F>,
) -> Result<Complex<F>> {
    let einv = inverse_euler_laurent(f);
    let mut e = GradedElement::<Complex<F>>::zero(&f.ring);
    let inv_s = Complex::new(F::one(), F::zero()) / s;
    for (i, c) in &einv {
        e = &e + &c.to_complex::<F>().scale(&inv_s.powi(*i as i32));
    }
    let emw = f.omega.scale(&qi(m as i64)).exp_nilpotent()?.to_complex::<F>();
    let v = &(&emw * &rho.eval(s)) * &e;
    Ok(v.integrate())
}

/// `sum_F e^{2 pi i m x J(F)} integral_F e^{m omega} rho_F / e_F` at `x != 0`.
pub fn dh_inner<F: Real>(
    p: &ManifoldPresentation,
    rho: &[EquivariantClassAtF],
    m: u64,
    x: F,
    norm: Normalization,
) -> Result<Complex<F>> {
    if x.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if rho.len() != p.components.len() {
        return Err(Error::InvalidArgument("one class per component is required".into()));
    }
    let s = norm.s(x);
    let mut sum = CompensatedSum::new();
    for (f, r) in p.components.iter().zip(rho) {
        let phase = (s * F::from(-(m as f64) * f.moment as f64).unwrap()).exp();
        sum.add(phase * lambda_value(f, r, m, s)?);
    }
    Ok(sum.total())
}

/// Largest deviation between the character on the unit circle and the
/// localized integral with Todd data.
pub fn kirillov_check(p: &ManifoldPresentation, m: u64, xs: &[f64], norm: Normalization) -> Result<f64> {
    let chi = character(p, m)?;
    let rho = todd_rho(p);
    let mut worst = 0.0f64;
    for &x in xs {
        let z = Complex::new(0.0, 2.0 * std::f64::consts::PI * x).exp();
        let lhs = chi.eval(z);
        let rhs = dh_inner(p, &rho, m, x, norm)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Kahan summation for complex values in a fixed order.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<F> {
    sum: Complex<F>,
    comp: Complex<F>,
}

impl<F: Float> CompensatedSum<F> {
    pub fn new() -> Self {
        let z = Complex::new(F::zero(), F::zero());
        CompensatedSum { sum: z, comp: z }
    }

    pub fn add(&mut self, v: Complex<F>) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> Complex<F> {
        self.sum
    }
}

impl<F: Float> Default for CompensatedSum<F> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{cp1_rotation, cpn_linear, product, shift_moment};

    fn poly(p: &ManifoldPresentation, m: u64) -> String {
        character(p, m).unwrap().to_string()
    }

    #[test]
    fn chi_tilde_of_points() {
        let p = cp1_rotation(1).unwrap();
        let c0 = chi_tilde(&p.components[0], 3).unwrap();
        assert_eq!(c0, ScalarZRational::geometric(1));
        let prod = product(&cp1_rotation(1).unwrap(), &cp1_rotation(-1).unwrap());
        // weights {-1, +1}: 1/(1-z) * (-z)/(1-z)
        let c = chi_tilde(&prod.components[1], 0).unwrap();
        let want = ScalarZRational::geometric(1)
            .mul(&ScalarZRational::geometric(1))
            .mul(&ScalarZRational::monomial(qi(-1), 1));
        assert_eq!(c, want);
    }

    #[test]
    fn chi_tilde_of_projective_line_component() {
        let p = cpn_linear(&[0, 0, 1], 1).unwrap();
        let c = chi_tilde(&p.components[0], 1).unwrap();
        // 2/(1-z) - z/(1-z)^2
        let g = ScalarZRational::geometric(1);
        let want = g
            .mul(&ScalarZRational::constant(qi(2)))
            .add(&g.mul(&g).mul(&ScalarZRational::monomial(qi(-1), 1)));
        assert_eq!(c.add(&want.neg()).to_laurent_polynomial().unwrap().to_string(), "0");
    }

    #[test]
    fn characters_of_small_examples() {
        assert_eq!(poly(&cp1_rotation(1).unwrap(), 2), "1 + z + z^2");
        assert_eq!(poly(&cpn_linear(&[0, 0, 1], 1).unwrap(), 1), "2 + z");
        let prod = product(&cp1_rotation(1).unwrap(), &cp1_rotation(-1).unwrap());
        assert_eq!(poly(&prod, 1), "z^-1 + 2 + z");
        for p in [cp1_rotation(1).unwrap(), cpn_linear(&[0, 1, 2], 1).unwrap(), prod] {
            assert_eq!(poly(&p, 0), "1");
        }
    }

    #[test]
    fn rr_totals() {
        let cp2 = cpn_linear(&[0, 1, 2], 1).unwrap();
        let cp1 = cp1_rotation(1).unwrap();
        let p2 = product(&cp1, &cp1);
        for m in 0..6i64 {
            let mu = m as u64;
            assert_eq!(rr_total(&cp1, mu).unwrap(), BigInt::from(m + 1));
            assert_eq!(rr_total(&cp2, mu).unwrap(), BigInt::from((m + 1) * (m + 2) / 2));
            assert_eq!(rr_total(&p2, mu).unwrap(), BigInt::from((m + 1) * (m + 1)));
        }
    }

    #[test]
    fn todd_series_of_a_point_block() {
        let p = cp1_rotation(1).unwrap();
        let s = EquivariantClassAtF::todd(&p.components[0]).series(4);
        let t = todd_series(4);
        for n in 0..=4 {
            assert_eq!(s[n].scalar_part(), t[n]);
        }
        // weight -1 flips odd coefficients
        let s1 = EquivariantClassAtF::todd(&p.components[1]).series(4);
        assert_eq!(s1[1].scalar_part(), -&t[1]);
    }

    #[test]
    fn closed_form_todd_matches_series_near_zero() {
        let p = cpn_linear(&[0, 0, 1, 3], 1).unwrap();
        for f in &p.components {
            let rho = EquivariantClassAtF::todd(f);
            let series = EquivariantClassAtF::Series {
                ring: f.ring.clone(),
                coeffs: rho.series(30),
            };
            let s = Complex::new(0.0, 0.3);
            let a = rho.eval::<f64>(s);
            let b = series.eval::<f64>(s);
            for (mono, c) in a.terms() {
                let d = b.terms().get(mono).copied().unwrap_or_default();
                assert!((c - d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn scale_is_calibrated_by_duistermaat_heckman_on_cp1() {
        let p = cp1_rotation(1).unwrap();
        let ones: Vec<_> = p
            .components
            .iter()
            .map(|f| EquivariantClassAtF::constant(&f.ring, qi(1)))
            .collect();
        for m in [1u64, 3, 8] {
            for x in [0.013, 0.1, -0.27, 0.4] {
                let got = dh_inner(&p, &ones, m, x, Normalization::CALIBRATED).unwrap();
                let ix = Complex::new(0.0, 2.0 * std::f64::consts::PI * x);
                let want = ((ix * m as f64).exp() - 1.0) / ix;
                assert!((got - want).norm() < 1e-12, "m={} x={}", m, x);
            }
        }
        assert_eq!(Normalization::CALIBRATED.scale, Complex::new(0.0, -2.0 * std::f64::consts::PI));
    }

    #[test]
    fn kirillov_with_and_without_calibration() {
        let p = cp1_rotation(1).unwrap();
        let dev = kirillov_check(&p, 3, &[0.1], Normalization::CALIBRATED).unwrap();
        assert!(dev < 1e-8, "{}", dev);
        let wrong = Normalization {
            scale: Complex::new(0.0, 2.0 * std::f64::consts::PI),
        };
        let dev = kirillov_check(&p, 3, &[0.1], wrong).unwrap();
        assert!(dev > 0.1, "{}", dev);
        let cp001 = cpn_linear(&[0, 0, 1], 1).unwrap();
        let dev = kirillov_check(&cp001, 2, &[0.45, 0.05], Normalization::CALIBRATED).unwrap();
        assert!(dev < 1e-8, "{}", dev);
    }

    #[test]
    fn volume_free_integral_vanishes() {
        for p in [
            cp1_rotation(2).unwrap(),
            cpn_linear(&[0, 0, 1], 1).unwrap(),
            product(&cp1_rotation(1).unwrap(), &cp1_rotation(-1).unwrap()),
        ] {
            let mut total: BTreeMap<i64, BigRational> = BTreeMap::new();
            for f in &p.components {
                let one = EquivariantClassAtF::constant(&f.ring, qi(1));
                for (e, c) in lambda_laurent(f, &one, 0, 4).unwrap() {
                    *total.entry(e).or_insert_with(BigRational::zero) += c;
                }
            }
            total.retain(|_, v| !v.is_zero());
            assert!(total.is_empty(), "{}: {:?}", p.name, total);
        }
    }

    #[test]
    fn moment_shift_multiplies_by_phase() {
        let p = cpn_linear(&[0, 0, 1], 1).unwrap();
        let q = shift_moment(&p, 2);
        let rho = todd_rho(&p);
        let x = 0.07;
        let a = dh_inner(&p, &rho, 3, x, Normalization::CALIBRATED).unwrap();
        let b = dh_inner(&q, &rho, 3, x, Normalization::CALIBRATED).unwrap();
        let phase = Complex::new(0.0, 2.0 * std::f64::consts::PI * 3.0 * 2.0 * x).exp();
        assert!((b - a * phase).norm() < 1e-12);
        let c = dh_inner(&p, &rho, 3, -x, Normalization::CALIBRATED).unwrap();
        assert!((c - a.conj()).norm() < 1e-12);
    }

    #[test]
    fn laurent_and_closed_form_agree() {
        let p = cpn_linear(&[0, 0, 1], 2).unwrap();
        for f in &p.components {
            let rho = EquivariantClassAtF::todd(f);
            let lau = lambda_laurent(f, &rho, 2, 20).unwrap();
            let s = Complex::new(0.0, 0.4);
            let mut series = Complex::new(0.0, 0.0);
            for (e, c) in &lau {
                series += s.powi(*e as i32) * num_traits::ToPrimitive::to_f64(c).unwrap();
            }
            let direct = lambda_value(f, &rho, 2, s).unwrap();
            assert!((series - direct).norm() < 1e-10, "{} {}", series, direct);
        }
    }
}
