//! Manufactured solutions with closed-form derivatives and loads.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{Domain, Point};
use crate::projection::SmoothFunction;

/// c r^beta cos(alpha theta) or c r^beta sin(alpha theta).
#[derive(Debug, Clone, Copy, PartialEq)]
struct PolarTerm {
    c: f64,
    beta: f64,
    alpha: f64,
    sine: bool,
}

/// Finite sum of polar terms, closed under d/dx and d/dy.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolarSum(Vec<PolarTerm>);

/// Angle in [0, 2pi). On the L-shaped domain this is continuous with
/// theta in [0, 3pi/2], which keeps sin(theta/2) > 0 away from the ray theta = 0.
pub fn polar_angle(p: Point) -> f64 {
    let t = p[1].atan2(p[0]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

impl PolarSum {
    pub fn cos_term(c: f64, beta: f64, alpha: f64) -> Self {
        PolarSum(vec![PolarTerm { c, beta, alpha, sine: false }])
    }

    pub fn sin_term(c: f64, beta: f64, alpha: f64) -> Self {
        PolarSum(vec![PolarTerm { c, beta, alpha, sine: true }])
    }

    pub fn eval(&self, p: Point) -> f64 {
        let r = p[0].hypot(p[1]);
        let th = polar_angle(p);
        self.0
            .iter()
            .map(|t| {
                let ang = if t.sine { (t.alpha * th).sin() } else { (t.alpha * th).cos() };
                t.c * r.powf(t.beta) * ang
            })
            .sum()
    }

    fn push(&mut self, c: f64, beta: f64, alpha: f64, sine: bool) {
        // sin(-a t) = -sin(a t), cos(-a t) = cos(a t)
        let (c, alpha) = if alpha < 0.0 { (if sine { -c } else { c }, -alpha) } else { (c, alpha) };
        if c == 0.0 || (sine && alpha == 0.0) {
            return;
        }
        if let Some(t) = self.0.iter_mut().find(|t| t.beta == beta && t.alpha == alpha && t.sine == sine) {
            t.c += c;
        } else {
            self.0.push(PolarTerm { c, beta, alpha, sine });
        }
    }

    pub fn dx(&self) -> PolarSum {
        let mut out = PolarSum::default();
        for t in &self.0 {
            let (b, a) = (t.beta, t.alpha);
            if t.sine {
                out.push(t.c * (b - a) / 2.0, b - 1.0, a + 1.0, true);
                out.push(t.c * (b + a) / 2.0, b - 1.0, a - 1.0, true);
            } else {
                out.push(t.c * (b + a) / 2.0, b - 1.0, a - 1.0, false);
                out.push(t.c * (b - a) / 2.0, b - 1.0, a + 1.0, false);
            }
        }
        out
    }

    pub fn dy(&self) -> PolarSum {
        let mut out = PolarSum::default();
        for t in &self.0 {
            let (b, a) = (t.beta, t.alpha);
            if t.sine {
                out.push(t.c * (b + a) / 2.0, b - 1.0, a - 1.0, false);
                out.push(t.c * (a - b) / 2.0, b - 1.0, a + 1.0, false);
            } else {
                out.push(t.c * (b - a) / 2.0, b - 1.0, a + 1.0, true);
                out.push(-t.c * (b + a) / 2.0, b - 1.0, a - 1.0, true);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct PolarSolution {
    u: PolarSum,
    ux: PolarSum,
    uy: PolarSum,
    uxx: PolarSum,
    uxy: PolarSum,
    uyy: PolarSum,
    f: PolarSum,
}

impl PolarSolution {
    fn new(u: PolarSum, f: PolarSum) -> Self {
        let (ux, uy) = (u.dx(), u.dy());
        PolarSolution { uxx: ux.dx(), uxy: ux.dy(), uyy: uy.dy(), u, ux, uy, f }
    }
}

#[derive(Debug, Clone)]
enum Exact {
    /// cos(x+1) sin(2y-1)
    CosShift,
    SinSin,
    CosSin,
    Polar(Box<PolarSolution>),
    /// 1 + 2x - y + x^2 - 3xy + y^2/2
    Quadratic,
}

/// An exact solution u of the clamped biharmonic problem and its load f.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub id: &'static str,
    pub formula: &'static str,
    /// Regularity of u on the intended domain.
    pub regularity: &'static str,
    /// Domain used when a configuration does not override it.
    pub default_domain: Domain,
    exact: Exact,
}

pub const CASE_IDS: [&str; 5] = ["cosx1sin2y1", "sinxsiny", "cosxsiny", "corner08", "rsingular"];

/// The five manufactured solutions.
pub fn registry() -> Vec<ManufacturedCase> {
    CASE_IDS.iter().map(|id| lookup(id).expect("registered id")).collect()
}

/// Any registered case, plus the quadratic `patch` case.
pub fn lookup(id: &str) -> Result<ManufacturedCase> {
    let case = |id, formula, regularity, default_domain, exact| ManufacturedCase {
        id,
        formula,
        regularity,
        default_domain,
        exact,
    };
    Ok(match id {
        "cosx1sin2y1" => case("cosx1sin2y1", "cos(x+1)sin(2y-1)", "analytic", Domain::UnitSquare, Exact::CosShift),
        "sinxsiny" => case("sinxsiny", "sin(x)sin(y)", "analytic", Domain::UnitSquare, Exact::SinSin),
        "cosxsiny" => case("cosxsiny", "cos(x)sin(y)", "analytic", Domain::UnitSquare, Exact::CosSin),
        "corner08" => case(
            "corner08",
            "(x^2+y^2)^0.8",
            "H^{2.6-eps}, singular at the origin",
            Domain::UnitSquare,
            Exact::Polar(Box::new(PolarSolution::new(
                PolarSum::cos_term(1.0, 1.6, 0.0),
                PolarSum::cos_term(0.4096, -2.4, 0.0),
            ))),
        ),
        "rsingular" => case(
            "rsingular",
            "r^{3/2} sin(theta/2)",
            "H^{2.5-eps}, singular at the origin",
            Domain::LShaped,
            Exact::Polar(Box::new(PolarSolution::new(PolarSum::sin_term(1.0, 1.5, 0.5), PolarSum::default()))),
        ),
        "patch" => case("patch", "1+2x-y+x^2-3xy+y^2/2", "polynomial", Domain::UnitSquare, Exact::Quadratic),
        other => return Err(Error::UnknownCase(other.to_string())),
    })
}

impl ManufacturedCase {
    /// f = biharmonic of u.
    pub fn load(&self, p: Point) -> f64 {
        let [x, y] = p;
        match &self.exact {
            Exact::CosShift => 25.0 * (x + 1.0).cos() * (2.0 * y - 1.0).sin(),
            Exact::SinSin => 4.0 * x.sin() * y.sin(),
            Exact::CosSin => 4.0 * x.cos() * y.sin(),
            Exact::Polar(s) => s.f.eval(p),
            Exact::Quadratic => 0.0,
        }
    }

    /// True when u has bounded derivatives of every order on its domain.
    pub fn is_smooth(&self) -> bool {
        !matches!(self.exact, Exact::Polar(_))
    }
}

impl SmoothFunction for ManufacturedCase {
    fn value(&self, p: Point) -> f64 {
        let [x, y] = p;
        match &self.exact {
            Exact::CosShift => (x + 1.0).cos() * (2.0 * y - 1.0).sin(),
            Exact::SinSin => x.sin() * y.sin(),
            Exact::CosSin => x.cos() * y.sin(),
            Exact::Polar(s) => s.u.eval(p),
            Exact::Quadratic => 1.0 + 2.0 * x - y + x * x - 3.0 * x * y + 0.5 * y * y,
        }
    }

    fn gradient(&self, p: Point) -> Point {
        let [x, y] = p;
        match &self.exact {
            Exact::CosShift => [
                -(x + 1.0).sin() * (2.0 * y - 1.0).sin(),
                2.0 * (x + 1.0).cos() * (2.0 * y - 1.0).cos(),
            ],
            Exact::SinSin => [x.cos() * y.sin(), x.sin() * y.cos()],
            Exact::CosSin => [-x.sin() * y.sin(), x.cos() * y.cos()],
            Exact::Polar(s) => [s.ux.eval(p), s.uy.eval(p)],
            Exact::Quadratic => [2.0 + 2.0 * x - 3.0 * y, -1.0 - 3.0 * x + y],
        }
    }

    fn hessian(&self, p: Point) -> [f64; 3] {
        let [x, y] = p;
        match &self.exact {
            Exact::CosShift => {
                let (c, s) = ((x + 1.0).cos(), (x + 1.0).sin());
                let (c2, s2) = ((2.0 * y - 1.0).cos(), (2.0 * y - 1.0).sin());
                [-c * s2, -2.0 * s * c2, -4.0 * c * s2]
            }
            Exact::SinSin => [-x.sin() * y.sin(), x.cos() * y.cos(), -x.sin() * y.sin()],
            Exact::CosSin => [-x.cos() * y.sin(), -x.sin() * y.cos(), -x.cos() * y.sin()],
            Exact::Polar(s) => [s.uxx.eval(p), s.uxy.eval(p), s.uyy.eval(p)],
            Exact::Quadratic => [2.0, -3.0, 1.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(f: impl Fn(Point) -> f64, p: Point) -> Point {
        let h = 1e-6;
        [
            (f([p[0] + h, p[1]]) - f([p[0] - h, p[1]])) / (2.0 * h),
            (f([p[0], p[1] + h]) - f([p[0], p[1] - h])) / (2.0 * h),
        ]
    }

    #[test]
    fn unknown_id_is_rejected() {
        assert!(matches!(lookup("nope"), Err(Error::UnknownCase(_))));
        assert_eq!(registry().len(), 5);
    }

    #[test]
    fn spot_values() {
        let c = lookup("sinxsiny").unwrap();
        let p = [PI / 2.0, PI / 2.0];
        assert!((c.value(p) - 1.0).abs() < 1e-15 && (c.load(p) - 4.0).abs() < 1e-14);
        let c = lookup("corner08").unwrap();
        assert!((c.load([1.0, 0.0]) - 0.4096).abs() < 1e-14);
        assert!((c.value([0.6, 0.8]) - 1.0).abs() < 1e-14);
        assert_eq!(lookup("rsingular").unwrap().load([1.0, 1.0]), 0.0);
    }

    #[test]
    fn angle_branch_is_continuous_on_l_shape() {
        // third quadrant lies in (pi, 3pi/2)
        let t = polar_angle([-0.5, -0.5]);
        assert!((t - 1.25 * PI).abs() < 1e-15);
        assert!((polar_angle([0.0, -1.0]) - 1.5 * PI).abs() < 1e-15);
        assert_eq!(polar_angle([1.0, 0.0]), 0.0);
        let u = lookup("rsingular").unwrap();
        for p in [[-0.3, -0.7], [-0.9, 0.1], [0.2, 0.4]] {
            assert!(u.value(p) > 0.0);
        }
    }

    #[test]
    fn polar_derivatives_match_finite_differences() {
        for id in ["corner08", "rsingular"] {
            let c = lookup(id).unwrap();
            for p in [[0.3, 0.4], [-0.5, 0.2], [-0.4, -0.6], [0.7, 0.1]] {
                let g = c.gradient(p);
                let fd = fd_grad(|q| c.value(q), p);
                assert!((g[0] - fd[0]).abs() < 1e-7 && (g[1] - fd[1]).abs() < 1e-7, "{id} {p:?}");
                let h = c.hessian(p);
                let fx = fd_grad(|q| c.gradient(q)[0], p);
                let fy = fd_grad(|q| c.gradient(q)[1], p);
                assert!((h[0] - fx[0]).abs() < 1e-6 && (h[1] - fx[1]).abs() < 1e-6 && (h[2] - fy[1]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn r_singular_is_biharmonic_symbolically() {
        let c = lookup("rsingular").unwrap();
        let Exact::Polar(s) = &c.exact else { panic!() };
        let lap = {
            let mut l = s.uxx.clone();
            for t in &s.uyy.0 {
                l.push(t.c, t.beta, t.alpha, t.sine);
            }
            l
        };
        // Laplacian of r^{3/2} sin(theta/2) is 2 r^{-1/2} sin(theta/2).
        for p in [[0.3f64, 0.4], [-0.2, -0.9]] {
            let expect = 2.0 * p[0].hypot(p[1]).powf(-0.5) * (polar_angle(p) / 2.0).sin();
            assert!((lap.eval(p) - expect).abs() < 1e-12);
        }
        let bih_x = lap.dx().dx();
        let bih_y = lap.dy().dy();
        for p in [[0.3, 0.4], [-0.2, -0.9]] {
            assert!((bih_x.eval(p) + bih_y.eval(p)).abs() < 1e-10);
        }
    }
}
