use std::f64::consts::PI;

use crate::{Error, Point, Result};

pub const MAX_QUADRATURE_DEGREE: usize = 20;

/// Points and weights on a reference domain.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, w)| w * f(p)).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss rule on `[0, 1]` exact for polynomials of the given degree.
/// Points are stored as `[t, 0]`.
pub fn quadrature_edge(degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::UnsupportedQuadrature {
            degree,
            max: MAX_QUADRATURE_DEGREE,
        });
    }
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(QuadratureRule {
        points: x.iter().map(|&t| [0.5 * (t + 1.0), 0.0]).collect(),
        weights: w.iter().map(|&w| 0.5 * w).collect(),
        degree,
    })
}

/// Collapsed (conical product) Gauss rule on the reference triangle
/// `(0,0), (1,0), (0,1)`, exact for polynomials of the given total degree.
///
/// The square `[0,1]²` is mapped by `(s, t) -> (s, t (1 - s))`; the Jacobian
/// `1 - s` raises the degree in `s` by one.
pub fn quadrature_triangle(degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::UnsupportedQuadrature {
            degree,
            max: MAX_QUADRATURE_DEGREE,
        });
    }
    let n = (degree + 1) / 2 + 1;
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let s = 0.5 * (x[i] + 1.0);
        for j in 0..n {
            let t = 0.5 * (x[j] + 1.0);
            points.push([s, t * (1.0 - s)]);
            weights.push(0.25 * w[i] * w[j] * (1.0 - s));
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree,
    })
}
