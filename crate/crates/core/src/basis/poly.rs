//! Dense bivariate polynomials in the monomial basis.

use std::ops::{Add, Mul, Sub};

/// `Σ c[a][b] x^a y^b` with `a + b <= degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2 {
    degree: usize,
    coeffs: Vec<f64>,
}

impl Poly2 {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; (degree + 1) * (degree + 1)],
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// `c0 + cx x + cy y`
    pub fn affine(c0: f64, cx: f64, cy: f64) -> Self {
        let mut p = Self::zero(1);
        p.set(0, 0, c0);
        p.set(1, 0, cx);
        p.set(0, 1, cy);
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.degree + 1) + b
    }

    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        if a + b > self.degree {
            0.0
        } else {
            self.coeffs[self.idx(a, b)]
        }
    }

    fn set(&mut self, a: usize, b: usize, v: f64) {
        let i = self.idx(a, b);
        self.coeffs[i] = v;
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let d = self.degree;
        (0..=d).flat_map(move |a| (0..=d - a).map(move |b| (a, b, self.coeff(a, b))))
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        // Horner in y for each power of x, then in x
        let d = self.degree;
        let mut acc = 0.0;
        for a in (0..=d).rev() {
            let mut inner = 0.0;
            for b in (0..=d - a).rev() {
                inner = inner * p[1] + self.coeff(a, b);
            }
            acc = acc * p[0] + inner;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        let d = self.degree.saturating_sub(1);
        let mut out = Self::zero(d);
        for (a, b, c) in self.terms().filter(|t| t.0 > 0) {
            out.set(a - 1, b, c * a as f64);
        }
        out
    }

    pub fn dy(&self) -> Self {
        let d = self.degree.saturating_sub(1);
        let mut out = Self::zero(d);
        for (a, b, c) in self.terms().filter(|t| t.1 > 0) {
            out.set(a, b - 1, c * b as f64);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Substitutes this polynomial into a univariate one, `q(self)`.
    pub fn compose(&self, q: &[f64]) -> Self {
        let mut acc = Poly2::constant(0.0);
        for &c in q.iter().rev() {
            acc = &(&acc * self) + &Poly2::constant(c);
        }
        acc
    }

    /// Exact integral over the reference triangle `(0,0), (1,0), (0,1)`.
    pub fn integrate_reference(&self) -> f64 {
        self.terms().map(|(a, b, c)| c * monomial_integral(a, b)).sum()
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.degree.max(rhs.degree));
        for (a, b, _) in out.clone().terms() {
            out.set(a, b, self.coeff(a, b) + rhs.coeff(a, b));
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.degree + rhs.degree);
        for (a, b, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            for (e, f, g) in rhs.terms() {
                let i = out.idx(a + e, b + f);
                out.coeffs[i] += c * g;
            }
        }
        out
    }
}

/// `∫_T̂ x^a y^b = a! b! / (a + b + 2)!`
pub fn monomial_integral(a: usize, b: usize) -> f64 {
    // a! b! / (a+b+2)! = 1 / ((a+b+2)(a+b+1) * C(a+b, a))
    let n = a + b;
    let mut binom = 1.0;
    for i in 0..a.min(b) {
        binom = binom * (n - i) as f64 / (i + 1) as f64;
    }
    1.0 / ((n + 2) as f64 * (n + 1) as f64 * binom)
}

/// Coefficients (ascending powers) of the Legendre polynomials `P_0..=P_n`.
pub fn legendre_coefficients(n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![1.0]];
    if n >= 1 {
        out.push(vec![0.0, 1.0]);
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}
        let mut next = vec![0.0; k + 2];
        for (i, c) in out[k].iter().enumerate() {
            next[i + 1] += (2 * k + 1) as f64 * c;
        }
        for (i, c) in out[k - 1].iter().enumerate() {
            next[i] -= k as f64 * c;
        }
        for c in &mut next {
            *c /= (k + 1) as f64;
        }
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_integrals() {
        assert!((monomial_integral(0, 0) - 0.5).abs() < 1e-16);
        assert!((monomial_integral(1, 0) - 1.0 / 6.0).abs() < 1e-16);
        assert!((monomial_integral(2, 2) - 1.0 / 180.0).abs() < 1e-16);
        assert!((monomial_integral(3, 1) - 6.0 / 720.0).abs() < 1e-16);
    }

    #[test]
    fn product_and_derivatives() {
        let x = Poly2::affine(0.0, 1.0, 0.0);
        let y = Poly2::affine(0.0, 0.0, 1.0);
        let p = &(&(&x * &x) * &y) + &Poly2::constant(2.0); // x²y + 2
        assert_eq!(p.eval([3.0, 0.5]), 6.5);
        assert_eq!(p.dx().eval([3.0, 0.5]), 3.0);
        assert_eq!(p.dy().eval([3.0, 0.5]), 9.0);
        assert_eq!(p.dx().dx().eval([1.0, 4.0]), 8.0);
    }

    #[test]
    fn legendre_values() {
        let p = legendre_coefficients(4);
        let eval = |c: &[f64], t: f64| c.iter().rev().fold(0.0, |acc, &c| acc * t + c);
        for &t in &[-1.0, -0.3, 0.7, 1.0] {
            assert!((eval(&p[2], t) - 0.5 * (3.0 * t * t - 1.0)).abs() < 1e-15);
            assert!((eval(&p[4], t) - (35.0 * t.powi(4) - 30.0 * t * t + 3.0) / 8.0).abs() < 1e-14);
        }
        assert!((eval(&p[3], 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compose_matches_pointwise() {
        let s = Poly2::affine(-1.0, 2.0, 1.0);
        let q = [0.5, -1.0, 3.0];
        let p = s.compose(&q);
        let pt = [0.2, 0.35];
        let t = s.eval(pt);
        assert!((p.eval(pt) - (0.5 - t + 3.0 * t * t)).abs() < 1e-14);
    }
}
