//! Closed-form solution of the single-point tracking problem on a disc.
//!
//! With tracking point `x_1` at the center of `B_R(x_1)`, the state
//! `ū = cos(π|x − x_1|)` and target `ξ_1 = ū(x_1) − 1`, the adjoint is the
//! Green's function `z_1` of the ball with pole `x_1`, the optimal control is
//! `q̄ = P_[a,b](−z_1/α)`, and the source `f = −Δū − q̄` makes `ū` the state.

use std::f64::consts::PI;

use crate::mesh::dist;
use crate::{Bounds, Point};

/// Below this radius the source uses the series of `sin(πr)/r`.
const SERIES_RADIUS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Two,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    pub center: Point,
    pub radius: f64,
    pub alpha: f64,
    pub bounds: Bounds,
    pub dim: Dimension,
}

impl ExactSolution {
    /// The planar experiment: `x_1 = (0.5, 0.5)`, `R = 0.5`, `α = 1`.
    pub fn planar(bounds: Bounds) -> Self {
        ExactSolution {
            center: [0.5, 0.5],
            radius: 0.5,
            alpha: 1.0,
            bounds,
            dim: Dimension::Two,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_dimension(mut self, dim: Dimension) -> Self {
        self.dim = dim;
        self
    }

    pub fn distance(&self, x: Point) -> f64 {
        dist(x, self.center)
    }

    /// Target value at the tracking point, `ū(x_1) − 1`.
    pub fn target(&self) -> f64 {
        self.state_radial(0.0) - 1.0
    }

    /// Green's function at distance `r` from the pole; `+∞` at `r = 0`.
    pub fn z1_radial(&self, r: f64) -> f64 {
        match self.dim {
            Dimension::Two => (self.radius / r).ln() / (2.0 * PI),
            Dimension::Three => (1.0 / r - 1.0 / self.radius) / (4.0 * PI),
        }
    }

    pub fn z1_exact(&self, x: Point) -> f64 {
        self.z1_radial(self.distance(x))
    }

    pub fn state_radial(&self, r: f64) -> f64 {
        (PI * r).cos()
    }

    pub fn exact_state(&self, x: Point) -> f64 {
        self.state_radial(self.distance(x))
    }

    /// `P_[a,b](−z_1/α)`; equals `a` at the pole.
    pub fn control_radial(&self, r: f64) -> f64 {
        self.bounds.project(-self.z1_radial(r) / self.alpha)
    }

    pub fn exact_control(&self, x: Point) -> f64 {
        self.control_radial(self.distance(x))
    }

    /// `−Δū − q̄` with the radial Laplacian of `cos(πr)`.
    pub fn source_radial(&self, r: f64) -> f64 {
        let spokes = match self.dim {
            Dimension::Two => 1.0,
            Dimension::Three => 2.0,
        };
        let sinc = if r < SERIES_RADIUS {
            PI * PI * (1.0 - (PI * r).powi(2) / 6.0)
        } else {
            PI * (PI * r).sin() / r
        };
        PI * PI * (PI * r).cos() + spokes * sinc - self.control_radial(r)
    }

    pub fn manufactured_f(&self, x: Point) -> f64 {
        self.source_radial(self.distance(x))
    }

    /// Radius at which `−z_1/α` equals `level`, i.e. where the control leaves
    /// the bound `level`. `None` if there is no such radius inside the ball.
    pub fn crossing_radius(&self, level: f64) -> Option<f64> {
        let z = -self.alpha * level;
        let r = match self.dim {
            Dimension::Two => self.radius * (-2.0 * PI * z).exp(),
            Dimension::Three => 1.0 / (4.0 * PI * z + 1.0 / self.radius),
        };
        (r > 0.0 && r < self.radius).then_some(r)
    }

    /// Radius of the disc where `q̄ = a`.
    pub fn active_radius(&self) -> Option<f64> {
        self.crossing_radius(self.bounds.lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar() -> ExactSolution {
        ExactSolution::planar(Bounds::symmetric(1.0))
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if (f(m) > 0.0) == (flo > 0.0) {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn greens_function_values() {
        let s = planar();
        assert!(s.z1_radial(0.5).abs() < 1e-15);
        assert!((s.z1_radial(0.25) - 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((s.z1_radial(0.25) - 0.110318).abs() < 1e-6);
        let s3 = s.with_dimension(Dimension::Three);
        assert!((s3.z1_radial(0.25) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((s3.z1_radial(0.25) - 0.159155).abs() < 1e-6);
        assert!(s3.z1_radial(0.5).abs() < 1e-15);
        assert_eq!(s.z1_exact(s.center), f64::INFINITY);
    }

    #[test]
    fn state_and_target() {
        let s = planar();
        assert_eq!(s.exact_state(s.center), 1.0);
        assert!(s.exact_state([1.0, 0.5]).abs() < 1e-16);
        assert_eq!(s.target(), 0.0);
    }

    #[test]
    fn control_clipping() {
        let s = planar();
        assert!(s.exact_control([1.0, 0.5]).abs() < 1e-15);
        assert_eq!(s.exact_control(s.center), -1.0);
        assert_eq!(s.exact_control([0.5 + 1e-4, 0.5]), -1.0);

        let narrow = ExactSolution::planar(Bounds::symmetric(0.2));
        let oracle = bisect(|r| (1.0 / (2.0 * r)).ln() / (2.0 * PI) - 0.2, 1e-6, 0.5);
        let r_star = narrow.active_radius().unwrap();
        assert!((r_star - oracle).abs() < 1e-14);
        assert!((r_star - 0.142307).abs() < 5e-6);
        assert_eq!(narrow.control_radial(0.99 * r_star), -0.2);
        assert!(narrow.control_radial(1.01 * r_star) > -0.2);
    }

    #[test]
    fn source_values() {
        let s = planar();
        let f0 = s.manufactured_f(s.center);
        assert!((f0 - (2.0 * PI * PI + 1.0)).abs() < 1e-12);
        assert!((f0 - 20.7392).abs() < 1e-4);
        let edge = s.source_radial(0.5);
        assert!((edge - 2.0 * PI).abs() < 1e-12);
        // series and closed form agree across the switch radius
        let below = s.source_radial(0.999e-8);
        let above = s.source_radial(1.001e-8);
        assert!((below - above).abs() < 1e-9);
    }

    #[test]
    fn greens_function_is_radially_decreasing() {
        for dim in [Dimension::Two, Dimension::Three] {
            let s = planar().with_dimension(dim);
            let mut prev = f64::INFINITY;
            for i in 1..=10_000 {
                let z = s.z1_radial(0.5 * i as f64 / 10_000.0);
                assert!(z < prev);
                prev = z;
            }
        }
    }
}
