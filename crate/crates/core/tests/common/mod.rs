//! Shared helpers for the integration tests: exact polynomial algebra on
//! polygons, random elements, and closed-form reference solutions.

#![allow(dead_code)]

use gwg::mesh::{ElementGeometry, Mesh};
use gwg::polybasis::ElementBasis;
use gwg::Domain;
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::Rng;

pub type Point = [f64; 2];

/// Dense bivariate polynomial, `c[a][b]` multiplies x^a y^b.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub c: Vec<Vec<f64>>,
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl Poly {
    pub fn zero(deg: usize) -> Self {
        Poly { c: vec![vec![0.0; deg + 1]; deg + 1] }
    }

    pub fn monomial(a: usize, b: usize) -> Self {
        let mut p = Poly::zero(a.max(b));
        p.c[a][b] = 1.0;
        p
    }

    fn size(&self) -> usize {
        self.c.len()
    }

    fn grown(&self, size: usize) -> Self {
        let mut p = Poly::zero(size.max(self.size()) - 1);
        for (a, row) in self.c.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                p.c[a][b] = v;
            }
        }
        p
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.grown(o.size());
        for (a, row) in o.c.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                p.c[a][b] += v;
            }
        }
        p
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly { c: self.c.iter().map(|r| r.iter().map(|v| v * s).collect()).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-1.0))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero(self.size() + o.size() - 2);
        for (a, r1) in self.c.iter().enumerate() {
            for (b, &v) in r1.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                for (c, r2) in o.c.iter().enumerate() {
                    for (d, &w) in r2.iter().enumerate() {
                        p.c[a + c][b + d] += v * w;
                    }
                }
            }
        }
        p
    }

    pub fn dx(&self) -> Poly {
        let mut p = Poly::zero(self.size() - 1);
        for a in 1..self.size() {
            for b in 0..self.size() {
                p.c[a - 1][b] = a as f64 * self.c[a][b];
            }
        }
        p
    }

    pub fn dy(&self) -> Poly {
        let mut p = Poly::zero(self.size() - 1);
        for a in 0..self.size() {
            for b in 1..self.size() {
                p.c[a][b - 1] = b as f64 * self.c[a][b];
            }
        }
        p
    }

    /// d/dx_i for i in {0, 1}.
    pub fn d(&self, i: usize) -> Poly {
        if i == 0 {
            self.dx()
        } else {
            self.dy()
        }
    }

    pub fn eval(&self, p: Point) -> f64 {
        let mut s = 0.0;
        for (a, row) in self.c.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                s += v * p[0].powi(a as i32) * p[1].powi(b as i32);
            }
        }
        s
    }

    /// Exact integral over a counter-clockwise simple polygon.
    pub fn integrate(&self, poly: &[Point]) -> f64 {
        let mut s = 0.0;
        for (a, row) in self.c.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    s += v * monomial_integral(a as u32, b as u32, poly);
                }
            }
        }
        s
    }

    /// Random polynomial of total degree <= deg with coefficients in [-1, 1].
    pub fn random(rng: &mut StdRng, deg: usize) -> Poly {
        let mut p = Poly::zero(deg);
        for a in 0..=deg {
            for b in 0..=deg - a {
                p.c[a][b] = rng.gen_range(-1.0..1.0);
            }
        }
        p
    }

    /// Expands a coefficient vector of a scaled-monomial library basis.
    pub fn from_basis(basis: &ElementBasis, coeffs: &[f64]) -> Poly {
        let [cx, cy] = basis.center();
        let s = basis.scale();
        let mut out = Poly::zero(basis.degree());
        for (&(a, b), &v) in basis.exponents().iter().zip(coeffs) {
            // ((x - cx)/s)^a ((y - cy)/s)^b
            let f = v / s.powi((a + b) as i32);
            for i in 0..=a {
                for j in 0..=b {
                    out.c[i as usize][j as usize] +=
                        f * binom(a, i) * (-cx).powi((a - i) as i32) * binom(b, j) * (-cy).powi((b - j) as i32);
                }
            }
        }
        out
    }
}

/// Closed-form integral of x^p y^q over a CCW polygon.
pub fn monomial_integral(p: u32, q: u32, poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let [x0, y0] = poly[i];
        let [x1, y1] = poly[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        let mut inner = 0.0;
        for k in 0..=p {
            for l in 0..=q {
                inner += binom(k + l, l)
                    * binom(p - k + q - l, q - l)
                    * x1.powi(k as i32)
                    * x0.powi((p - k) as i32)
                    * y1.powi(l as i32)
                    * y0.powi((q - l) as i32);
            }
        }
        s += cross * inner;
    }
    s * factorial(p) * factorial(q) / factorial(p + q + 2)
}

/// Monomials x^a y^b spanning P_r.
pub fn monomial_basis(r: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    for d in 0..=r {
        for b in 0..=d {
            out.push(Poly::monomial(d - b, b));
        }
    }
    out
}

/// L2 projection of `f` onto P_r(polygon), via exact monomial integrals.
pub fn l2_project(f: &Poly, r: usize, poly: &[Point]) -> Poly {
    let basis = monomial_basis(r);
    let n = basis.len();
    let gram = DMatrix::from_fn(n, n, |a, b| basis[a].mul(&basis[b]).integrate(poly));
    let rhs = DVector::from_fn(n, |a, _| basis[a].mul(f).integrate(poly));
    let c = gram.cholesky().expect("Gram matrix is SPD").solve(&rhs);
    basis.iter().zip(c.iter()).fold(Poly::zero(r), |acc, (m, &v)| acc.add(&m.scale(v)))
}

/// Element shapes used for randomized checks.
#[derive(Debug, Clone, Copy)]
pub enum Shape {
    Triangle,
    Rectangle,
    ConvexQuad,
}

/// A random CCW element of diameter O(1) near the origin.
pub fn random_element(rng: &mut StdRng, shape: Shape) -> Vec<Point> {
    let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let size = rng.gen_range(0.3..1.5);
    match shape {
        Shape::Triangle => loop {
            let pts: Vec<Point> =
                (0..3).map(|_| [c[0] + size * rng.gen_range(-1.0..1.0), c[1] + size * rng.gen_range(-1.0..1.0)]).collect();
            let area = signed_area(&pts);
            if area.abs() > 0.1 * size * size {
                return if area > 0.0 { pts } else { vec![pts[0], pts[2], pts[1]] };
            }
        },
        Shape::Rectangle => {
            let (w, h) = (size * rng.gen_range(0.5..1.0), size * rng.gen_range(0.5..1.0));
            vec![c, [c[0] + w, c[1]], [c[0] + w, c[1] + h], [c[0], c[1] + h]]
        }
        Shape::ConvexQuad => {
            // Perturbed square; the perturbation keeps every interior angle below pi.
            let j = 0.2 * size;
            let base = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
            base.iter()
                .map(|v| {
                    [c[0] + 0.5 * size * v[0] + rng.gen_range(-j..j), c[1] + 0.5 * size * v[1] + rng.gen_range(-j..j)]
                })
                .collect()
        }
    }
}

pub fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1]).sum::<f64>()
}

/// Single-element mesh and its geometry.
pub fn single_element(pts: &[Point]) -> (Mesh, ElementGeometry) {
    let mesh = Mesh::from_elements(Domain::UnitSquare, pts.to_vec(), vec![(0..pts.len()).collect()]).unwrap();
    let g = mesh.geometry(0);
    (mesh, g)
}

/// Closed-form value, gradient and Hessian [uxx, uxy, uyy] of the smooth cases.
pub fn smooth_reference(id: &str, p: Point) -> (f64, Point, [f64; 3]) {
    let [x, y] = p;
    match id {
        "sinxsiny" => (
            x.sin() * y.sin(),
            [x.cos() * y.sin(), x.sin() * y.cos()],
            [-x.sin() * y.sin(), x.cos() * y.cos(), -x.sin() * y.sin()],
        ),
        "cosxsiny" => (
            x.cos() * y.sin(),
            [-x.sin() * y.sin(), x.cos() * y.cos()],
            [-x.cos() * y.sin(), -x.sin() * y.cos(), -x.cos() * y.sin()],
        ),
        "cosx1sin2y1" => {
            let (a, b) = (x + 1.0, 2.0 * y - 1.0);
            (
                a.cos() * b.sin(),
                [-a.sin() * b.sin(), 2.0 * a.cos() * b.cos()],
                [-a.cos() * b.sin(), -2.0 * a.sin() * b.cos(), -4.0 * a.cos() * b.sin()],
            )
        }
        other => panic!("no closed form for {other}"),
    }
}

/// Largest relative residual of
/// (d2_{ij,g} Q_h phi, psi)_T = (Q0 phi - phi, d2_{ji} psi)_T + (d2_{ij} phi, psi)_T
/// over all (i, j) and all monomials psi of P_s(T).
pub fn commuting_residual(pts: &[Point], degrees: gwg::Degrees, phi: &Poly) -> f64 {
    use gwg::projection::{project_edge, project_element};
    use gwg::weak_hessian::LocalWeakHessian;

    let (_, g) = single_element(pts);
    let op = LocalWeakHessian::build(&g, degrees).unwrap();
    let quad = 2 * degrees.k.max(4) + 4;
    let mut dofs = vec![0.0; op.layout.len()];
    let q0 = project_element(&g, &op.basis, |p| phi.eval(p), quad).unwrap();
    dofs[..q0.len()].copy_from_slice(&q0);
    let grad = [phi.dx(), phi.dy()];
    for (e, eg) in g.edges.iter().enumerate() {
        let qb = project_edge(eg, degrees.m, |p| phi.eval(p), quad).unwrap();
        let off = op.layout.trace_offset(e);
        dofs[off..off + qb.len()].copy_from_slice(&qb);
        for (c, gc) in grad.iter().enumerate() {
            let qg = project_edge(eg, degrees.l, |p| gc.eval(p), quad).unwrap();
            let off = op.layout.gradient_offset(e, c);
            dofs[off..off + qg.len()].copy_from_slice(&qg);
        }
    }
    let q0_ref = l2_project(phi, degrees.k, pts);
    let diff = q0_ref.sub(phi);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let (low, delta) = op.apply(i, j, &dofs);
            let weak = Poly::from_basis(&op.low_basis, low.as_slice()).add(&Poly::from_basis(&op.delta_basis, delta.as_slice()));
            let phi_ij = phi.d(i).d(j);
            for psi in monomial_basis(degrees.s()) {
                let lhs = weak.mul(&psi).integrate(pts);
                let t1 = diff.mul(&psi.d(j).d(i)).integrate(pts);
                let t2 = phi_ij.mul(&psi).integrate(pts);
                let scale = 1f64.max(lhs.abs()).max(t1.abs()).max(t2.abs());
                worst = worst.max((lhs - t1 - t2).abs() / scale);
            }
        }
    }
    worst
}
