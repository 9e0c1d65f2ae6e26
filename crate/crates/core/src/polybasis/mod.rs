//! Scaled monomial bases on elements and Legendre bases on edges.

pub mod quadrature;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::mesh::{EdgeGeometry, ElementGeometry, Point};
pub use quadrature::{gauss_legendre, LineRule, QuadratureRule, MAX_EXACTNESS};

/// Dimension of P_r in two variables.
#[inline]
pub fn dim_p(r: usize) -> usize {
    (r + 1) * (r + 2) / 2
}

/// Exponents `(a, b)` in graded-lex order: (0,0), (1,0), (0,1), (2,0), (1,1), ...
///
/// The P_r list is a prefix of the P_{r+1} list.
pub fn exponents(r: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(dim_p(r));
    for d in 0..=r as u32 {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

/// Position of `(a, b)` in the graded-lex list.
#[inline]
pub fn exponent_index(a: u32, b: u32) -> usize {
    let d = (a + b) as usize;
    d * (d + 1) / 2 + b as usize
}

/// phi_(a,b)(x, y) = ((x - xc)/h)^a ((y - yc)/h)^b for a + b <= degree.
#[derive(Debug, Clone)]
pub struct ElementBasis {
    degree: usize,
    center: Point,
    scale: f64,
    exps: Vec<(u32, u32)>,
}

fn powers(x: f64, n: usize) -> [f64; 16] {
    let mut p = [0.0; 16];
    p[0] = 1.0;
    for i in 1..=n.min(15) {
        p[i] = p[i - 1] * x;
    }
    p
}

impl ElementBasis {
    pub fn new(degree: usize, center: Point, scale: f64) -> Self {
        assert!(degree <= 14, "element basis degree {degree} is not supported");
        ElementBasis { degree, center, scale, exps: exponents(degree) }
    }

    pub fn on_element(degree: usize, geom: &ElementGeometry) -> Self {
        Self::new(degree, geom.centroid, geom.diameter)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn dim(&self) -> usize {
        self.exps.len()
    }
    pub fn center(&self) -> Point {
        self.center
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exps
    }

    /// Same center and scale, different degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        Self::new(degree, self.center, self.scale)
    }

    #[inline]
    fn local(&self, p: Point) -> (f64, f64) {
        ((p[0] - self.center[0]) / self.scale, (p[1] - self.center[1]) / self.scale)
    }

    pub fn eval_into(&self, p: Point, out: &mut [f64]) {
        let (s, t) = self.local(p);
        let (ps, pt) = (powers(s, self.degree), powers(t, self.degree));
        for (o, &(a, b)) in out.iter_mut().zip(&self.exps) {
            *o = ps[a as usize] * pt[b as usize];
        }
    }

    pub fn eval(&self, p: Point) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.eval_into(p, &mut v);
        v
    }

    pub fn eval_grad_into(&self, p: Point, out: &mut [[f64; 2]]) {
        let (s, t) = self.local(p);
        let (ps, pt) = (powers(s, self.degree), powers(t, self.degree));
        let h = self.scale;
        for (o, &(a, b)) in out.iter_mut().zip(&self.exps) {
            let (a, b) = (a as usize, b as usize);
            let dx = if a > 0 { a as f64 * ps[a - 1] * pt[b] / h } else { 0.0 };
            let dy = if b > 0 { b as f64 * ps[a] * pt[b - 1] / h } else { 0.0 };
            *o = [dx, dy];
        }
    }

    pub fn eval_grad(&self, p: Point) -> Vec<[f64; 2]> {
        let mut v = vec![[0.0; 2]; self.dim()];
        self.eval_grad_into(p, &mut v);
        v
    }

    /// Second derivatives `[d11, d12, d22]`.
    pub fn eval_hess(&self, p: Point) -> Vec<[f64; 3]> {
        let (s, t) = self.local(p);
        let (ps, pt) = (powers(s, self.degree), powers(t, self.degree));
        let h2 = self.scale * self.scale;
        self.exps
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a as usize, b as usize);
                let dxx = if a > 1 { (a * (a - 1)) as f64 * ps[a - 2] * pt[b] / h2 } else { 0.0 };
                let dxy = if a > 0 && b > 0 { (a * b) as f64 * ps[a - 1] * pt[b - 1] / h2 } else { 0.0 };
                let dyy = if b > 1 { (b * (b - 1)) as f64 * ps[a] * pt[b - 2] / h2 } else { 0.0 };
                [dxx, dxy, dyy]
            })
            .collect()
    }

    /// Rows are points, columns basis functions.
    pub fn eval_at(&self, points: &[Point]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(points.len(), self.dim());
        let mut row = vec![0.0; self.dim()];
        for (q, &p) in points.iter().enumerate() {
            self.eval_into(p, &mut row);
            for (j, &v) in row.iter().enumerate() {
                m[(q, j)] = v;
            }
        }
        m
    }

    /// Value of the polynomial with the given coefficients.
    pub fn eval_poly(&self, coeffs: &[f64], p: Point) -> f64 {
        self.eval(p).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn eval_poly_grad(&self, coeffs: &[f64], p: Point) -> [f64; 2] {
        self.eval_grad(p)
            .iter()
            .zip(coeffs)
            .fold([0.0; 2], |acc, (g, c)| [acc[0] + c * g[0], acc[1] + c * g[1]])
    }

    pub fn eval_poly_hess(&self, coeffs: &[f64], p: Point) -> [f64; 3] {
        self.eval_hess(p)
            .iter()
            .zip(coeffs)
            .fold([0.0; 3], |acc, (h, c)| [acc[0] + c * h[0], acc[1] + c * h[1], acc[2] + c * h[2]])
    }

    /// Gram matrix (phi_a, phi_b)_T under `rule`.
    pub fn mass_matrix(&self, rule: &QuadratureRule) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut v = vec![0.0; n];
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            self.eval_into(p, &mut v);
            for j in 0..n {
                let wj = w * v[j];
                for i in j..n {
                    m[(i, j)] += wj * v[i];
                }
            }
        }
        for j in 0..n {
            for i in j + 1..n {
                m[(j, i)] = m[(i, j)];
            }
        }
        m
    }

    /// Matrix taking coefficients in this basis to coefficients of the
    /// `(i, j)` second derivative in the degree-(r-2) basis with the same
    /// center and scale. Indices are 0-based.
    pub fn second_derivative_matrix(&self, i: usize, j: usize) -> DMatrix<f64> {
        let low = self.degree.saturating_sub(2);
        let rows = if self.degree >= 2 { dim_p(low) } else { 1 };
        let mut m = DMatrix::zeros(rows, self.dim());
        if self.degree < 2 {
            return m;
        }
        let h2 = self.scale * self.scale;
        for (col, &(a, b)) in self.exps.iter().enumerate() {
            let (da, db) = match (i.min(j), i.max(j)) {
                (0, 0) => (2, 0),
                (0, 1) => (1, 1),
                (1, 1) => (0, 2),
                _ => panic!("second derivative index out of range"),
            };
            if a < da || b < db {
                continue;
            }
            let mut factor = 1.0;
            for k in 0..da {
                factor *= (a - k) as f64;
            }
            for k in 0..db {
                factor *= (b - k) as f64;
            }
            m[(exponent_index(a - da, b - db), col)] = factor / h2;
        }
        m
    }
}

/// Legendre polynomials L_0..L_r at `t`.
pub fn legendre_values(r: usize, t: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if r >= 1 {
        out[1] = t;
    }
    for k in 2..=r {
        out[k] = ((2 * k - 1) as f64 * t * out[k - 1] - (k - 1) as f64 * out[k - 2]) / k as f64;
    }
}

/// Legendre basis on an edge parameterized by t in [-1, 1].
#[derive(Debug, Clone, Copy)]
pub struct EdgeBasis {
    pub degree: usize,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Self {
        EdgeBasis { degree }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        legendre_values(self.degree, t, &mut v);
        v
    }

    /// Diagonal Gram entry int_e L_r^2 ds = |e| / (2r + 1).
    #[inline]
    pub fn gram(&self, r: usize, length: f64) -> f64 {
        length / (2 * r + 1) as f64
    }

    pub fn eval_poly(&self, coeffs: &[f64], t: f64) -> f64 {
        self.eval(t).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }
}

/// Integral over the element of `f` using a centroid-fan rule of the given exactness.
pub fn integrate_element(geom: &ElementGeometry, degree: usize, f: impl Fn(Point) -> f64) -> Result<f64> {
    let rule = QuadratureRule::polygon(&geom.vertices, geom.centroid, degree)?;
    Ok(rule.integrate(f))
}

/// Integral over the edge of `f`, with respect to arclength.
pub fn integrate_edge(edge: &EdgeGeometry, degree: usize, f: impl Fn(Point) -> f64) -> Result<f64> {
    let rule = LineRule::with_exactness(degree)?;
    Ok(0.5
        * edge.length
        * rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| w * f(edge.point_at(t)))
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_uniform_rectangular, generate_uniform_square, generate_uniform_triangular, Domain};

    #[test]
    fn dimension_and_ordering() {
        for r in 0..8 {
            let e = exponents(r);
            assert_eq!(e.len(), dim_p(r));
            for (idx, &(a, b)) in e.iter().enumerate() {
                assert_eq!(exponent_index(a, b), idx);
            }
        }
        assert_eq!(exponents(2), vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
    }

    #[test]
    fn constant_and_quadratic_derivatives() {
        let b = ElementBasis::new(3, [0.3, 0.2], 0.5);
        let p = [0.41, 0.13];
        assert_eq!(b.eval(p)[0], 1.0);
        assert_eq!(b.eval_grad(p)[0], [0.0, 0.0]);
        assert_eq!(b.eval_hess(p)[0], [0.0, 0.0, 0.0]);
        let h = b.eval_hess(p);
        let i20 = exponent_index(2, 0);
        assert!((h[i20][0] - 2.0 / 0.25).abs() < 1e-14);
        for row in &h[..3] {
            assert_eq!(*row, [0.0; 3]);
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let b = ElementBasis::new(3, [0.25, -0.1], 0.7);
        let p = [0.4, 0.05];
        let step = 1e-5;
        let hess = b.eval_hess(p);
        let grad = b.eval_grad(p);
        for idx in 0..b.dim() {
            let f = |q: Point| b.eval(q)[idx];
            let fxx = (f([p[0] + step, p[1]]) - 2.0 * f(p) + f([p[0] - step, p[1]])) / (step * step);
            let fyy = (f([p[0], p[1] + step]) - 2.0 * f(p) + f([p[0], p[1] - step])) / (step * step);
            let fxy = (f([p[0] + step, p[1] + step]) - f([p[0] + step, p[1] - step]) - f([p[0] - step, p[1] + step])
                + f([p[0] - step, p[1] - step]))
                / (4.0 * step * step);
            let scale = 1.0 + hess[idx].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!((fxx - hess[idx][0]).abs() / scale < 1e-5);
            assert!((fxy - hess[idx][1]).abs() / scale < 1e-5);
            assert!((fyy - hess[idx][2]).abs() / scale < 1e-5);
            let gx = (f([p[0] + step, p[1]]) - f([p[0] - step, p[1]])) / (2.0 * step);
            let gy = (f([p[0], p[1] + step]) - f([p[0], p[1] - step])) / (2.0 * step);
            assert!((gx - grad[idx][0]).abs() < 1e-8 * (1.0 + gx.abs()));
            assert!((gy - grad[idx][1]).abs() < 1e-8 * (1.0 + gy.abs()));
        }
    }

    #[test]
    fn second_derivative_matrix_matches_pointwise() {
        let b = ElementBasis::new(4, [0.1, 0.2], 0.3);
        let low = b.with_degree(2);
        let p = [0.17, 0.31];
        let hess = b.eval_hess(p);
        let vals = low.eval(p);
        for (slot, (i, j)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            let m = b.second_derivative_matrix(i, j);
            for col in 0..b.dim() {
                let v: f64 = (0..low.dim()).map(|r| m[(r, col)] * vals[r]).sum();
                assert!((v - hess[col][slot]).abs() < 1e-9 * (1.0 + v.abs()));
            }
        }
        assert_eq!(b.second_derivative_matrix(0, 1), b.second_derivative_matrix(1, 0));
    }

    #[test]
    fn legendre_gram_is_diagonal() {
        let edge = EdgeGeometry {
            edge: 0,
            normal: [0.0, -1.0],
            tangent: [1.0, 0.0],
            length: 0.5,
            midpoint: [0.25, 0.0],
            start: [0.0, 0.0],
            end: [0.5, 0.0],
        };
        let basis = EdgeBasis::new(5);
        let rule = LineRule::with_exactness(10).unwrap();
        for r in 0..=5 {
            for s in 0..=5 {
                let g: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| {
                        let v = basis.eval(t);
                        0.5 * edge.length * w * v[r] * v[s]
                    })
                    .sum();
                let expected = if r == s { basis.gram(r, edge.length) } else { 0.0 };
                assert!((g - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn element_and_edge_integrals() {
        let sq = generate_uniform_square(Domain::UnitSquare, 1).unwrap();
        let g = sq.geometry(0);
        assert!((integrate_element(&g, 0, |_| 1.0).unwrap() - 1.0).abs() < 1e-15);
        let e = EdgeGeometry {
            edge: 0,
            normal: [0.0, -1.0],
            tangent: [1.0, 0.0],
            length: 1.0,
            midpoint: [0.5, 0.0],
            start: [0.0, 0.0],
            end: [1.0, 0.0],
        };
        assert!((integrate_edge(&e, 3, |p| p[0].powi(3)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mass_matrices_are_spd() {
        let meshes = [
            generate_uniform_triangular(Domain::UnitSquare, 4).unwrap(),
            generate_uniform_square(Domain::LShaped, 2).unwrap(),
            generate_uniform_rectangular(2).unwrap(),
        ];
        for mesh in &meshes {
            for t in 0..mesh.num_elements() {
                let g = mesh.geometry(t);
                for r in 0..=6 {
                    let b = ElementBasis::on_element(r, &g);
                    let rule = QuadratureRule::polygon(&g.vertices, g.centroid, 2 * r).unwrap();
                    let m = b.mass_matrix(&rule);
                    assert_eq!(m, m.transpose());
                    assert!(m.cholesky().is_some(), "degree {r} element {t}");
                }
            }
        }
    }
}
