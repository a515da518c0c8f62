use std::f64::consts::PI;
use std::sync::Arc;

use crate::dpg::Problem;
use crate::Point;

/// A smooth solution of `-ε Δu + c u = f` with its derivatives.
///
/// The first-order fields are `σ = ε^α ∇u` and `ρ = div σ = ε^α Δu`.
pub trait ExactSolution: Send + Sync {
    fn eps(&self) -> f64;
    fn u(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
    fn laplacian(&self, p: Point) -> f64;

    fn reaction(&self, _p: Point) -> f64 {
        1.0
    }

    fn load(&self, p: Point) -> f64 {
        -self.eps() * self.laplacian(p) + self.reaction(p) * self.u(p)
    }
}

/// Problem data generated by an exact solution: load `-ε Δu + c u`,
/// its reaction coefficient and Dirichlet data `u|_Γ`.
pub fn problem_from_exact(exact: Arc<dyn ExactSolution>) -> Problem {
    let (f, c, g) = (exact.clone(), exact.clone(), exact);
    Problem::new(move |p| f.load(p))
        .with_reaction(move |p| c.reaction(p))
        .with_dirichlet(move |p| g.u(p))
}

/// `exp(t)`, flushed to zero far below the underflow threshold.
fn exp_clamped(t: f64) -> f64 {
    if t < -700.0 {
        0.0
    } else {
        t.exp()
    }
}

/// Smooth part plus boundary layers of width `√ε` on all four sides of the
/// unit square:
///
/// `u = x³(1+y²) + sin(πx²) + cos(πy/2)
///    + (x+y)(e^{-2x/√ε} + e^{-2(1-x)/√ε} + e^{-3y/√ε} + e^{-3(1-y)/√ε})`
///
/// with `c = 1 + x²y² e^{xy/2}`.
#[derive(Clone, Copy, Debug)]
pub struct Manufactured {
    eps: f64,
    sqrt_eps: f64,
}

impl Manufactured {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "eps must be positive");
        Self { eps, sqrt_eps: eps.sqrt() }
    }

    /// Layer sum `E` with `∂xE`, `∂yE`, `ΔE`.
    fn layers(&self, [x, y]: Point) -> (f64, f64, f64, f64) {
        let s = self.sqrt_eps;
        let e1 = exp_clamped(-2.0 * x / s);
        let e2 = exp_clamped(-2.0 * (1.0 - x) / s);
        let e3 = exp_clamped(-3.0 * y / s);
        let e4 = exp_clamped(-3.0 * (1.0 - y) / s);
        let ex = 2.0 / s * (e2 - e1);
        let ey = 3.0 / s * (e4 - e3);
        let lap = 4.0 / self.eps * (e1 + e2) + 9.0 / self.eps * (e3 + e4);
        (e1 + e2 + e3 + e4, ex, ey, lap)
    }
}

impl ExactSolution for Manufactured {
    fn eps(&self) -> f64 {
        self.eps
    }

    fn u(&self, p: Point) -> f64 {
        let [x, y] = p;
        let (e, ..) = self.layers(p);
        x.powi(3) * (1.0 + y * y) + (PI * x * x).sin() + (PI * y / 2.0).cos() + (x + y) * e
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let [x, y] = p;
        let (e, ex, ey, _) = self.layers(p);
        [
            3.0 * x * x * (1.0 + y * y) + 2.0 * PI * x * (PI * x * x).cos() + e + (x + y) * ex,
            2.0 * x.powi(3) * y - PI / 2.0 * (PI * y / 2.0).sin() + e + (x + y) * ey,
        ]
    }

    fn laplacian(&self, p: Point) -> f64 {
        let [x, y] = p;
        let (_, ex, ey, lap) = self.layers(p);
        let smooth = 6.0 * x * (1.0 + y * y) + 2.0 * PI * (PI * x * x).cos()
            - 4.0 * PI * PI * x * x * (PI * x * x).sin()
            + 2.0 * x.powi(3)
            - PI * PI / 4.0 * (PI * y / 2.0).cos();
        smooth + 2.0 * (ex + ey) + (x + y) * lap
    }

    fn reaction(&self, [x, y]: Point) -> f64 {
        1.0 + x * x * y * y * (x * y / 2.0).exp()
    }
}

/// Indicator of the disk `|(x,y) - (1/2,1/2)|² < 1/10`.
pub fn load_unaligned(p: Point) -> f64 {
    let d = (p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2);
    if d < 0.1 {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_values() {
        let m = Manufactured::new(1e-4);
        assert_eq!(m.u([0.0, 0.0]), 1.0);
        assert!((m.reaction([1.0, 1.0]) - (1.0 + 0.5f64.exp())).abs() < 1e-15);
        assert_eq!(load_unaligned([0.5, 0.5]), 1.0);
        assert_eq!(load_unaligned([0.0, 0.0]), 0.0);
    }

    /// Central differences of the closed-form `u` against the hand-derived
    /// gradient and Laplacian.
    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &eps in &[1.0, 1e-2, 1e-4] {
            let m = Manufactured::new(eps);
            let h = 1e-4 * eps.sqrt().min(1.0);
            for _ in 0..100 {
                let p = [rng.gen::<f64>(), rng.gen::<f64>()];
                let fx = |dx: f64, dy: f64| m.u([p[0] + dx, p[1] + dy]);
                let gx = (fx(h, 0.0) - fx(-h, 0.0)) / (2.0 * h);
                let gy = (fx(0.0, h) - fx(0.0, -h)) / (2.0 * h);
                let g = m.gradient(p);
                let scale = 1.0 + g[0].abs() + g[1].abs();
                assert!((gx - g[0]).abs() < 1e-5 * scale, "eps={eps} p={p:?}");
                assert!((gy - g[1]).abs() < 1e-5 * scale);
                // Laplacian from differences of the analytic gradient
                let lap = (m.gradient([p[0] + h, p[1]])[0] - m.gradient([p[0] - h, p[1]])[0]
                    + m.gradient([p[0], p[1] + h])[1]
                    - m.gradient([p[0], p[1] - h])[1])
                    / (2.0 * h);
                let l = m.laplacian(p);
                assert!((lap - l).abs() < 1e-5 * (1.0 + l.abs()), "eps={eps} p={p:?}");
            }
        }
    }

    #[test]
    fn manufactured_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &eps in &[1.0, 1e-4, 1e-8] {
            let m = Manufactured::new(eps);
            for _ in 0..100 {
                let p = [rng.gen::<f64>(), rng.gen::<f64>()];
                let f = m.load(p);
                let res = -eps * m.laplacian(p) + m.reaction(p) * m.u(p) - f;
                assert!(res.abs() <= 1e-8 * (1.0 + f.abs()));
            }
        }
    }

    #[test]
    fn tiny_eps_is_finite() {
        let m = Manufactured::new(1e-32);
        for p in [[0.0, 0.0], [1.0, 1.0], [0.5, 0.25], [1e-20, 0.5]] {
            assert!(m.u(p).is_finite());
            assert!(m.gradient(p).iter().all(|g| g.is_finite()));
            assert!(m.laplacian(p).is_finite());
        }
        // interior value is the smooth part only
        let p = [0.5, 0.5];
        let smooth = 0.125 * 1.25 + (PI / 4.0).sin() + (PI / 4.0).cos();
        assert!((m.u(p) - smooth).abs() < 1e-15);
    }
}
