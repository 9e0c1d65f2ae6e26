//! Discrete error measures between Q_h u and a computed weak function.

use nalgebra::DVector;
use serde::Serialize;

use crate::assembly::{Discretization, Homogeneous, WeakFunction};
use crate::error::Result;
use crate::mesh::Mesh;
use crate::projection::{project_weak, SmoothFunction};

/// The six error quantities reported per refinement level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct ErrorReport {
    /// Energy norm of e_h = Q_h u - u_h.
    pub tri_norm: f64,
    /// ||Q0 u - u0|| in L2.
    pub l2_e0: f64,
    /// (sum_T h_T ||Qb u - ub||^2_{dT})^{1/2}
    pub eb: f64,
    /// Same for Qg grad u - ug.
    pub eg: f64,
    /// Centroid-evaluated broken H2 seminorm of e0.
    pub h2c: f64,
    /// Centroid-evaluated broken H1 seminorm of e0.
    pub h1c: f64,
}

impl ErrorReport {
    pub fn values(&self) -> [f64; 6] {
        [self.tri_norm, self.l2_e0, self.eb, self.eg, self.h2c, self.h1c]
    }

    pub fn max(&self) -> f64 {
        self.values().into_iter().fold(0.0, f64::max)
    }
}

/// log2(coarse / fine).
pub fn rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Energy norm squared of `v`, evaluated from the weak Hessian and mismatch operators.
pub fn triple_bar_squared(disc: &Discretization, mesh: &Mesh, v: &WeakFunction) -> f64 {
    let cfg = disc.config;
    let mut total = 0.0;
    for (t, op) in disc.ops.iter().enumerate() {
        let local = DVector::from_vec(v.local(&disc.dofs, mesh, t));
        let mass = op.basis.with_degree(cfg.degrees.hessian_degree()).mass_matrix(op.rule());
        for slot in 0..4 {
            let c = op.combined(slot) * &local;
            total += c.dot(&(&mass * &c));
        }
        let h = op.diameter;
        let (w1, w2) = (cfg.rho1 * h.powf(cfg.gamma1), cfg.rho2 * h.powf(cfg.gamma2));
        for (e, &len) in op.edge_lengths.iter().enumerate() {
            total += w1 * legendre_norm_sq(&(&op.mismatch.trace[e] * &local), len);
            for g in &op.mismatch.gradient[e] {
                total += w2 * legendre_norm_sq(&(g * &local), len);
            }
        }
    }
    total
}

pub fn triple_bar(disc: &Discretization, mesh: &Mesh, v: &WeakFunction) -> f64 {
    triple_bar_squared(disc, mesh, v).max(0.0).sqrt()
}

fn legendre_norm_sq(c: &DVector<f64>, len: f64) -> f64 {
    c.iter().enumerate().map(|(r, v)| v * v * len / (2 * r + 1) as f64).sum()
}

/// ||v0|| in L2 over the mesh.
pub fn l2_interior(disc: &Discretization, v: &WeakFunction) -> f64 {
    let mut total = 0.0;
    for (t, op) in disc.ops.iter().enumerate() {
        let c = DVector::from_column_slice(v.interior(&disc.dofs, t));
        let mass = op.basis.mass_matrix(op.rule());
        total += c.dot(&(&mass * &c));
    }
    total.max(0.0).sqrt()
}

/// (sum_T h_T ||vb||^2_{dT})^{1/2}; interior edges contribute from both sides.
pub fn edge_trace_norm(disc: &Discretization, mesh: &Mesh, v: &WeakFunction) -> f64 {
    edge_norm(disc, mesh, |e| vec![v.trace(&disc.dofs, e)])
}

/// Same as [`edge_trace_norm`] for both components of vg.
pub fn edge_gradient_norm(disc: &Discretization, mesh: &Mesh, v: &WeakFunction) -> f64 {
    edge_norm(disc, mesh, |e| vec![v.gradient(&disc.dofs, e, 0), v.gradient(&disc.dofs, e, 1)])
}

fn edge_norm<'a>(disc: &Discretization, mesh: &Mesh, coeffs: impl Fn(usize) -> Vec<&'a [f64]>) -> f64 {
    let mut total = 0.0;
    for t in 0..mesh.num_elements() {
        let h = disc.ops[t].diameter;
        for &e in mesh.element_edges(t) {
            let len = mesh.edge_length(e);
            for c in coeffs(e) {
                total += h * c.iter().enumerate().map(|(r, v)| v * v * len / (2 * r + 1) as f64).sum::<f64>();
            }
        }
    }
    total.sqrt()
}

/// Centroid H2 and H1 seminorm errors of u0 against `u`, weighted by |T|.
pub fn centroid_seminorms(disc: &Discretization, mesh: &Mesh, uh: &WeakFunction, u: &dyn SmoothFunction) -> (f64, f64) {
    let (mut h2, mut h1) = (0.0, 0.0);
    for (t, op) in disc.ops.iter().enumerate() {
        let g = mesh.geometry(t);
        let c = uh.interior(&disc.dofs, t);
        let (p, ph, pg) = (g.centroid, u.hessian(g.centroid), u.gradient(g.centroid));
        let hess = op.basis.eval_poly_hess(c, p);
        let grad = op.basis.eval_poly_grad(c, p);
        let d = [hess[0] - ph[0], hess[1] - ph[1], hess[2] - ph[2]];
        h2 += g.area * (d[0] * d[0] + 2.0 * d[1] * d[1] + d[2] * d[2]);
        h1 += g.area * ((grad[0] - pg[0]).powi(2) + (grad[1] - pg[1]).powi(2));
    }
    (h2.sqrt(), h1.sqrt())
}

/// All six error measures of `uh` against the exact solution `u`.
pub fn compute_errors(disc: &Discretization, mesh: &Mesh, uh: &WeakFunction, u: &dyn SmoothFunction) -> Result<ErrorReport> {
    let qu = project_weak(disc, mesh, u)?;
    let (h2c, h1c) = centroid_seminorms(disc, mesh, uh, u);
    Ok(ErrorReport { h2c, h1c, ..report_for(disc, mesh, &qu.sub(uh)) })
}

/// Error measures of a given error vector e_h. The centroid terms use e0 itself.
pub fn report_for(disc: &Discretization, mesh: &Mesh, e: &WeakFunction) -> ErrorReport {
    let (h2c, h1c) = centroid_seminorms(disc, mesh, e, &Homogeneous);
    ErrorReport {
        tri_norm: triple_bar(disc, mesh, e),
        l2_e0: l2_interior(disc, e),
        eb: edge_trace_norm(disc, mesh, e),
        eg: edge_gradient_norm(disc, mesh, e),
        h2c,
        h1c,
    }
}
