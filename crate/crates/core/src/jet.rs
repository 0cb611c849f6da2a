//! Truncated Taylor series with complex floating coefficients.

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{Float, ToPrimitive};

/// `sum_{i<=n} c_i t^i`, truncated at a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<F> {
    c: Vec<Complex<F>>,
}

impl<F: Float> Jet<F> {
    pub fn constant(v: Complex<F>, order: usize) -> Self {
        let mut c = vec![Complex::new(F::zero(), F::zero()); order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `v`.
    pub fn variable(v: Complex<F>, order: usize) -> Self {
        let mut j = Self::constant(v, order);
        if order > 0 {
            j.c[1] = Complex::new(F::one(), F::zero());
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex<F>] {
        &self.c
    }

    pub fn value(&self) -> Complex<F> {
        self.c[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> Complex<F> {
        let mut f = F::one();
        for i in 2..=k {
            f = f * F::from(i).unwrap();
        }
        self.c[k] * f
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: Complex<F>) -> Self {
        Jet {
            c: self.c.iter().map(|a| a * k).collect(),
        }
    }

    pub fn add_const(&self, k: Complex<F>) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0] + k;
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut c = vec![Complex::new(F::zero(), F::zero()); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] = c[i + j] + self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    /// Reciprocal; the constant term must be nonzero.
    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let inv0 = Complex::new(F::one(), F::zero()) / self.c[0];
        let mut r = vec![Complex::new(F::zero(), F::zero()); n];
        r[0] = inv0;
        for k in 1..n {
            let mut acc = Complex::new(F::zero(), F::zero());
            for i in 1..=k {
                acc = acc + self.c[i] * r[k - i];
            }
            r[k] = -acc * inv0;
        }
        Jet { c: r }
    }

    pub fn exp(&self) -> Self {
        // f' = f g'
        let n = self.c.len();
        let mut e = vec![Complex::new(F::zero(), F::zero()); n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = Complex::new(F::zero(), F::zero());
            for i in 1..=k {
                acc = acc + self.c[i] * e[k - i] * F::from(i).unwrap();
            }
            e[k] = acc / F::from(k).unwrap();
        }
        Jet { c: e }
    }
}

/// Jet of `td(y) = y / (1 - e^{-y})` at `y0`, valid away from `2 pi i Z \ {0}`.
pub fn todd_jet<F: Float>(y0: Complex<F>, order: usize) -> Jet<F> {
    let one = Complex::new(F::one(), F::zero());
    let small = F::from(0.5).unwrap();
    if y0.norm() < small {
        // Taylor series at 0 re-expanded: td(y0 + t) = sum_n b_n (y0 + t)^n.
        let y = Jet::variable(y0, order);
        let mut acc = Jet::constant(Complex::new(F::zero(), F::zero()), order);
        for bn in todd_coeffs_f64().iter().rev() {
            acc = acc.mul(&y).add_const(Complex::new(F::from(*bn).unwrap(), F::zero()));
        }
        return acc;
    }
    let y = Jet::variable(y0, order);
    let denom = y.scale(-one).exp().scale(-one).add_const(one);
    y.mul(&denom.recip())
}

fn todd_coeffs_f64() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| {
        crate::ring::todd_series(48)
            .iter()
            .map(|c| c.to_f64().unwrap())
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn exp_and_recip_agree_with_closed_forms() {
        let x = Jet::variable(C::new(0.3, -0.2), 6);
        let e = x.exp();
        for k in 0..=6 {
            assert!((e.derivative(k) - C::new(0.3, -0.2).exp()).norm() < 1e-12);
        }
        let r = x.recip();
        // d^k/dx^k 1/x = (-1)^k k! / x^{k+1}
        let v = C::new(0.3, -0.2);
        let mut fact = 1.0;
        for k in 0..=6 {
            if k > 0 {
                fact *= k as f64;
            }
            let want = v.powi(-(k as i32 + 1)) * fact * if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((r.derivative(k) - want).norm() < 1e-9 * want.norm().max(1.0));
        }
    }

    #[test]
    fn todd_jet_branches_match() {
        for y0 in [C::new(0.49, 0.0), C::new(0.0, 0.499), C::new(0.3, 0.39)] {
            let a = todd_jet(y0, 5);
            let y = Jet::variable(y0, 5);
            let b = y.mul(&y.scale(C::new(-1.0, 0.0)).exp().scale(C::new(-1.0, 0.0)).add_const(C::new(1.0, 0.0)).recip());
            for k in 0..=5 {
                assert!((a.coeffs()[k] - b.coeffs()[k]).norm() < 1e-11, "{:?} {}", y0, k);
            }
        }
    }
}
