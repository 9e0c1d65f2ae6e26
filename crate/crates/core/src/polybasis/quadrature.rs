//! Gauss rules: Legendre on [-1, 1], collapsed (Stroud) rules on triangles and
//! centroid-fan rules on convex polygons.

use crate::error::{Error, Result};
use crate::mesh::Point;

/// Highest polynomial exactness any rule in this module will build.
pub const MAX_EXACTNESS: usize = 48;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(npts > 0);
    let n = npts;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One-dimensional rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl LineRule {
    pub fn with_exactness(degree: usize) -> Result<Self> {
        check_exactness(degree)?;
        let npts = degree / 2 + 1;
        let (nodes, weights) = gauss_legendre(npts);
        Ok(LineRule { nodes, weights, exactness: degree })
    }
}

/// Points and weights in physical coordinates.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    /// Collapsed Gauss rule on the triangle (a, b, c).
    pub fn triangle(a: Point, b: Point, c: Point, degree: usize) -> Result<Self> {
        let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new(), exactness: degree };
        rule.push_triangle(a, b, c, degree)?;
        Ok(rule)
    }

    fn push_triangle(&mut self, a: Point, b: Point, c: Point, degree: usize) -> Result<()> {
        check_exactness(degree)?;
        // The Duffy Jacobian adds one degree in the collapsed direction.
        let (xi, wi) = gauss_legendre(degree.div_ceil(2) + 1);
        let (eta, we) = gauss_legendre(degree / 2 + 1);
        let twice_area = ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
        for (&s, &ws) in xi.iter().zip(&wi) {
            let u = 0.5 * (1.0 + s);
            for (&t, &wt) in eta.iter().zip(&we) {
                let v = 0.5 * (1.0 + t) * (1.0 - u);
                self.points.push([
                    a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]),
                    a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]),
                ]);
                self.weights.push(0.25 * ws * wt * (1.0 - u) * twice_area);
            }
        }
        Ok(())
    }

    /// Centroid-fan rule on a convex polygon given counter-clockwise.
    pub fn polygon(vertices: &[Point], centroid: Point, degree: usize) -> Result<Self> {
        let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new(), exactness: degree };
        let nv = vertices.len();
        if nv == 3 {
            rule.push_triangle(vertices[0], vertices[1], vertices[2], degree)?;
        } else {
            for k in 0..nv {
                rule.push_triangle(centroid, vertices[k], vertices[(k + 1) % nv], degree)?;
            }
        }
        Ok(rule)
    }
}

fn check_exactness(degree: usize) -> Result<()> {
    if degree > MAX_EXACTNESS {
        return Err(Error::Config(format!(
            "quadrature exactness {degree} exceeds the supported maximum {MAX_EXACTNESS}"
        )));
    }
    Ok(())
}
