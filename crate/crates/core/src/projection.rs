//! L2 projections onto element and edge polynomial spaces, and the
//! componentwise projection Q_h into the weak space.

use nalgebra::{DMatrix, DVector};

use crate::assembly::{Discretization, WeakFunction};
use crate::error::{Error, Result};
use crate::mesh::{EdgeGeometry, ElementGeometry, Mesh, Point};
use crate::polybasis::{legendre_values, ElementBasis, LineRule, QuadratureRule};

/// A smooth function with first and second derivatives.
pub trait SmoothFunction: Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> Point;
    /// `[d11, d12, d22]`.
    fn hessian(&self, p: Point) -> [f64; 3];
}

/// Coefficients of the L2 projection of `f` onto the span of `basis` on `geom`.
pub fn project_element(
    geom: &ElementGeometry,
    basis: &ElementBasis,
    f: impl Fn(Point) -> f64,
    quad_degree: usize,
) -> Result<Vec<f64>> {
    let rule = QuadratureRule::polygon(&geom.vertices, geom.centroid, quad_degree.max(2 * basis.degree()))?;
    project_with_rule(basis, &rule, f)
}

pub(crate) fn project_with_rule(basis: &ElementBasis, rule: &QuadratureRule, f: impl Fn(Point) -> f64) -> Result<Vec<f64>> {
    let mass = basis.mass_matrix(rule);
    let mut rhs = DVector::zeros(basis.dim());
    let mut vals = vec![0.0; basis.dim()];
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        basis.eval_into(p, &mut vals);
        let fv = w * f(p);
        for (r, v) in rhs.iter_mut().zip(&vals) {
            *r += fv * v;
        }
    }
    let chol = mass.cholesky().ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    Ok(chol.solve(&rhs).as_slice().to_vec())
}

/// Legendre coefficients of the L2 projection of `f` onto P_degree(e).
pub fn project_edge(edge: &EdgeGeometry, degree: usize, f: impl Fn(Point) -> f64, quad_degree: usize) -> Result<Vec<f64>> {
    let rule = LineRule::with_exactness(quad_degree.max(2 * degree))?;
    let mut out = vec![0.0; degree + 1];
    let mut leg = vec![0.0; degree + 1];
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        legendre_values(degree, t, &mut leg);
        let fv = f(edge.point_at(t));
        for (r, o) in out.iter_mut().enumerate() {
            *o += w * 0.5 * (2 * r + 1) as f64 * leg[r] * fv;
        }
    }
    Ok(out)
}

/// Q_h phi = {Q0 phi, Qb phi, Qg grad phi}.
pub fn project_weak(disc: &Discretization, mesh: &Mesh, phi: &dyn SmoothFunction) -> Result<WeakFunction> {
    let deg = disc.config.degrees;
    let quad = disc.config.error_exactness().max(deg.edge_exactness());
    let mut out = WeakFunction::zeros(&disc.dofs);
    for t in 0..mesh.num_elements() {
        let q0 = project_element(&mesh.geometry(t), &disc.ops[t].basis, |p| phi.value(p), quad)?;
        out.coeffs[disc.dofs.interior_range(t)].copy_from_slice(&q0);
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        let geom = mesh.geometry(edge.left);
        let eg = geom.edges.iter().find(|g| g.edge == e).expect("edge belongs to its left element");
        let qb = project_edge(eg, deg.m, |p| phi.value(p), quad)?;
        out.coeffs[disc.dofs.trace_range(e)].copy_from_slice(&qb);
        for c in 0..2 {
            let qg = project_edge(eg, deg.l, |p| phi.gradient(p)[c], quad)?;
            out.coeffs[disc.dofs.gradient_range(e, c)].copy_from_slice(&qg);
        }
    }
    Ok(out)
}

/// Element-wise L2 projection onto P_s as a matrix acting on P_r coefficients
/// of the same (center, scale) basis family.
pub fn restriction_matrix(from: &ElementBasis, to: &ElementBasis, rule: &QuadratureRule) -> Result<DMatrix<f64>> {
    let a = from.eval_at(&rule.points);
    let b = to.eval_at(&rule.points);
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(&rule.weights));
    let mass = b.transpose() * &w * &b;
    let cross = b.transpose() * &w * a;
    let chol = mass.cholesky().ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    Ok(chol.solve(&cross))
}
