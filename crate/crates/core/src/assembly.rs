//! Global DOF numbering, assembly of the gWG bilinear form and load, and
//! elimination of the clamped boundary data.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsolve::SparseSymMatrix;
use crate::mesh::{Mesh, Point};
use crate::polybasis::{legendre_values, LineRule, QuadratureRule};
use crate::projection::SmoothFunction;
use crate::weak_hessian::{Degrees, LocalDofLayout, LocalWeakHessian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Cg,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwgConfig {
    pub degrees: Degrees,
    pub rho1: f64,
    pub rho2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub solver: SolverKind,
    /// Relative residual tolerance of the iterative solver.
    pub tol: f64,
    pub max_iters: usize,
}

impl GwgConfig {
    /// rho1 = rho2 = 1, gamma1 = -3, gamma2 = -1.
    pub fn new(degrees: Degrees) -> Self {
        GwgConfig {
            degrees,
            rho1: 1.0,
            rho2: 1.0,
            gamma1: -3.0,
            gamma2: -1.0,
            solver: SolverKind::Cg,
            tol: 1e-12,
            max_iters: 200_000,
        }
    }

    pub fn with_rho(mut self, rho1: f64, rho2: f64) -> Self {
        self.rho1 = rho1;
        self.rho2 = rho2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.degrees.validate()?;
        if !(self.rho1 > 0.0 && self.rho2 > 0.0) {
            return Err(Error::Config("stabilizer weights rho1, rho2 must be positive".into()));
        }
        if !self.gamma1.is_finite() || !self.gamma2.is_finite() {
            return Err(Error::Config("stabilizer exponents must be finite".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config("solver tolerance must be positive".into()));
        }
        Ok(())
    }

    /// s = min{k, m, l, n}.
    pub fn s(&self) -> usize {
        self.degrees.s()
    }

    /// Quadrature exactness for non-polynomial integrands (loads, data, error norms).
    pub fn error_exactness(&self) -> usize {
        2 * self.degrees.k + 4
    }
}

/// Global numbering: interior blocks element by element, then one vb block
/// per edge, then the two vg blocks of every edge.
///
/// Both vb and vg are single-valued on interior edges.
#[derive(Debug, Clone)]
pub struct DofMap {
    degrees: Degrees,
    num_elements: usize,
    num_edges: usize,
    boundary_edges: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, degrees: Degrees) -> Self {
        DofMap {
            degrees,
            num_elements: mesh.num_elements(),
            num_edges: mesh.num_edges(),
            boundary_edges: (0..mesh.num_edges()).filter(|&e| mesh.edges()[e].is_boundary()).collect(),
        }
    }

    pub fn degrees(&self) -> Degrees {
        self.degrees
    }
    fn interior_dim(&self) -> usize {
        crate::polybasis::dim_p(self.degrees.k)
    }
    fn trace_base(&self) -> usize {
        self.num_elements * self.interior_dim()
    }
    fn gradient_base(&self) -> usize {
        self.trace_base() + self.num_edges * (self.degrees.m + 1)
    }
    pub fn len(&self) -> usize {
        self.gradient_base() + self.num_edges * 2 * (self.degrees.l + 1)
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn interior_range(&self, t: usize) -> std::ops::Range<usize> {
        let nk = self.interior_dim();
        t * nk..(t + 1) * nk
    }
    pub fn trace_range(&self, e: usize) -> std::ops::Range<usize> {
        let start = self.trace_base() + e * (self.degrees.m + 1);
        start..start + self.degrees.m + 1
    }
    pub fn gradient_range(&self, e: usize, component: usize) -> std::ops::Range<usize> {
        let l1 = self.degrees.l + 1;
        let start = self.gradient_base() + (2 * e + component) * l1;
        start..start + l1
    }
    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    /// Global indices in local-layout order for element `t`.
    pub fn local_to_global(&self, mesh: &Mesh, t: usize) -> Vec<usize> {
        let edges = mesh.element_edges(t);
        let mut out: Vec<usize> = self.interior_range(t).collect();
        for &e in edges {
            out.extend(self.trace_range(e));
        }
        for &e in edges {
            out.extend(self.gradient_range(e, 0));
            out.extend(self.gradient_range(e, 1));
        }
        out
    }

    /// True for vb and vg DOFs on boundary edges.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        let ranges = self
            .boundary_edges
            .iter()
            .flat_map(|&e| [self.trace_range(e), self.gradient_range(e, 0), self.gradient_range(e, 1)]);
        for r in ranges {
            for m in &mut mask[r] {
                *m = true;
            }
        }
        mask
    }
}

/// Global coefficient vector of a weak function {v0, vb, vg}.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFunction {
    pub coeffs: Vec<f64>,
}

impl WeakFunction {
    pub fn zeros(dofs: &DofMap) -> Self {
        WeakFunction { coeffs: vec![0.0; dofs.len()] }
    }

    pub fn interior<'a>(&'a self, dofs: &DofMap, t: usize) -> &'a [f64] {
        &self.coeffs[dofs.interior_range(t)]
    }
    pub fn trace<'a>(&'a self, dofs: &DofMap, e: usize) -> &'a [f64] {
        &self.coeffs[dofs.trace_range(e)]
    }
    pub fn gradient<'a>(&'a self, dofs: &DofMap, e: usize, component: usize) -> &'a [f64] {
        &self.coeffs[dofs.gradient_range(e, component)]
    }

    pub fn local(&self, dofs: &DofMap, mesh: &Mesh, t: usize) -> Vec<f64> {
        dofs.local_to_global(mesh, t).into_iter().map(|g| self.coeffs[g]).collect()
    }

    pub fn sub(&self, other: &WeakFunction) -> WeakFunction {
        WeakFunction { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, alpha: f64) -> WeakFunction {
        WeakFunction { coeffs: self.coeffs.iter().map(|a| alpha * a).collect() }
    }
}

/// Clamped boundary data: g1 = u, g2 = du/dn, and the gradient of g1 for the tangential part.
pub trait BoundaryData: Sync {
    fn g1(&self, p: Point) -> f64;
    fn g2(&self, p: Point, normal: Point) -> f64;
    fn grad_g1(&self, p: Point) -> Point;
}

impl<T: SmoothFunction> BoundaryData for T {
    fn g1(&self, p: Point) -> f64 {
        self.value(p)
    }
    fn g2(&self, p: Point, normal: Point) -> f64 {
        let g = self.gradient(p);
        g[0] * normal[0] + g[1] * normal[1]
    }
    fn grad_g1(&self, p: Point) -> Point {
        self.gradient(p)
    }
}

/// The zero function, for homogeneous clamped data.
pub struct Homogeneous;

impl SmoothFunction for Homogeneous {
    fn value(&self, _: Point) -> f64 {
        0.0
    }
    fn gradient(&self, _: Point) -> Point {
        [0.0, 0.0]
    }
    fn hessian(&self, _: Point) -> [f64; 3] {
        [0.0; 3]
    }
}

/// Which terms of the bilinear form to assemble, with their weights.
#[derive(Debug, Clone, Copy)]
pub struct FormWeights {
    pub hessian: f64,
    pub rho1: f64,
    pub rho2: f64,
}

/// Per-element operators and numbering for one mesh and configuration.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub config: GwgConfig,
    pub dofs: DofMap,
    pub ops: Vec<LocalWeakHessian>,
}

impl Discretization {
    pub fn new(mesh: &Mesh, config: GwgConfig) -> Result<Self> {
        config.validate()?;
        let ops = (0..mesh.num_elements())
            .into_par_iter()
            .map(|t| LocalWeakHessian::build(&mesh.geometry(t), config.degrees))
            .collect::<Result<Vec<_>>>()?;
        Ok(Discretization { config, dofs: DofMap::new(mesh, config.degrees), ops })
    }

    pub fn layout(&self, t: usize) -> LocalDofLayout {
        self.ops[t].layout
    }

    pub fn form_weights(&self) -> FormWeights {
        FormWeights { hessian: 1.0, rho1: self.config.rho1, rho2: self.config.rho2 }
    }

    /// Local matrix of a(w, v) on element `t`, exactly symmetric.
    pub fn local_matrix(&self, t: usize, w: FormWeights) -> DMatrix<f64> {
        let op = &self.ops[t];
        let h = op.diameter;
        let (s1, s2) = op.stabilizer_blocks();
        let mut k = op.hessian_gram() * w.hessian;
        k += s1 * (w.rho1 * h.powf(self.config.gamma1));
        k += s2 * (w.rho2 * h.powf(self.config.gamma2));
        let kt = k.transpose();
        (k + kt) * 0.5
    }

    pub fn assemble_matrix(&self, mesh: &Mesh, w: FormWeights) -> SparseSymMatrix {
        let blocks: Vec<(Vec<usize>, DMatrix<f64>)> = (0..mesh.num_elements())
            .into_par_iter()
            .map(|t| (self.dofs.local_to_global(mesh, t), self.local_matrix(t, w)))
            .collect();
        let mut triplets = Vec::with_capacity(blocks.iter().map(|(g, _)| g.len() * g.len()).sum());
        for (globals, k) in &blocks {
            for (a, &ga) in globals.iter().enumerate() {
                for (b, &gb) in globals.iter().enumerate() {
                    triplets.push((ga, gb, k[(a, b)]));
                }
            }
        }
        SparseSymMatrix::from_triplets(self.dofs.len(), triplets)
    }

    /// The full (unconstrained) stiffness matrix.
    pub fn assemble_stiffness(&self, mesh: &Mesh) -> SparseSymMatrix {
        self.assemble_matrix(mesh, self.form_weights())
    }

    /// (f, v0) for every interior basis function; zero on edge DOFs.
    pub fn assemble_load(&self, mesh: &Mesh, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<Vec<f64>> {
        let degree = self.config.error_exactness();
        let blocks = (0..mesh.num_elements())
            .into_par_iter()
            .map(|t| {
                let g = mesh.geometry(t);
                let rule = QuadratureRule::polygon(&g.vertices, g.centroid, degree)?;
                let basis = &self.ops[t].basis;
                let mut vals = vec![0.0; basis.dim()];
                let mut out = vec![0.0; basis.dim()];
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    let fv = f(p);
                    if !fv.is_finite() {
                        return Err(Error::NonFiniteLoad { x: p[0], y: p[1] });
                    }
                    basis.eval_into(p, &mut vals);
                    for (o, v) in out.iter_mut().zip(&vals) {
                        *o += w * fv * v;
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut load = vec![0.0; self.dofs.len()];
        for (t, block) in blocks.into_iter().enumerate() {
            load[self.dofs.interior_range(t)].copy_from_slice(&block);
        }
        Ok(load)
    }

    /// Boundary DOF values: vb = Qb g1, vg = (Qg g2) n + (Qg(grad g1 . tau)) tau.
    pub fn boundary_values(&self, mesh: &Mesh, data: &dyn BoundaryData) -> Result<Vec<f64>> {
        let deg = self.config.degrees;
        let rule = LineRule::with_exactness(deg.edge_exactness().max(self.config.error_exactness()))?;
        let mut values = vec![0.0; self.dofs.len()];
        let mut lb = vec![0.0; deg.m + 1];
        let mut lg = vec![0.0; deg.l + 1];
        for (e, edge) in mesh.edges().iter().enumerate() {
            if !edge.is_boundary() {
                continue;
            }
            let geom = mesh.geometry(edge.left);
            let eg = geom.edges.iter().find(|g| g.edge == e).expect("edge belongs to its left element");
            let (n, tau) = (eg.normal, eg.tangent);
            let mut vb = vec![0.0; deg.m + 1];
            let mut normal = vec![0.0; deg.l + 1];
            let mut tangential = vec![0.0; deg.l + 1];
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let p = eg.point_at(t);
                legendre_values(deg.m, t, &mut lb);
                legendre_values(deg.l, t, &mut lg);
                let g1 = data.g1(p);
                let g2 = data.g2(p, n);
                let grad = data.grad_g1(p);
                let dt = grad[0] * tau[0] + grad[1] * tau[1];
                for r in 0..=deg.m {
                    vb[r] += w * 0.5 * (2 * r + 1) as f64 * lb[r] * g1;
                }
                for r in 0..=deg.l {
                    let c = w * 0.5 * (2 * r + 1) as f64 * lg[r];
                    normal[r] += c * g2;
                    tangential[r] += c * dt;
                }
            }
            values[self.dofs.trace_range(e)].copy_from_slice(&vb);
            for c in 0..2 {
                let range = self.dofs.gradient_range(e, c);
                for (r, v) in values[range].iter_mut().enumerate() {
                    *v = normal[r] * n[c] + tangential[r] * tau[c];
                }
            }
        }
        Ok(values)
    }
}

/// Full stiffness matrix and load vector before constraints.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: SparseSymMatrix,
    pub load: Vec<f64>,
}

pub fn assemble(disc: &Discretization, mesh: &Mesh, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<AssembledSystem> {
    Ok(AssembledSystem { matrix: disc.assemble_stiffness(mesh), load: disc.assemble_load(mesh, f)? })
}

/// Convenience wrapper: operators plus full stiffness with zero load.
pub fn assemble_stiffness(mesh: &Mesh, config: GwgConfig) -> Result<(Discretization, SparseSymMatrix)> {
    let disc = Discretization::new(mesh, config)?;
    let a = disc.assemble_stiffness(mesh);
    Ok((disc, a))
}

/// System on the free DOFs after eliminating the boundary values.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: SparseSymMatrix,
    pub rhs: Vec<f64>,
    /// Free global DOFs, ascending.
    pub free: Vec<usize>,
    /// Full-length vector holding the boundary values (zero on free DOFs).
    pub fixed_values: Vec<f64>,
}

impl ReducedSystem {
    pub fn expand(&self, x_free: &[f64]) -> WeakFunction {
        let mut coeffs = self.fixed_values.clone();
        for (&g, &v) in self.free.iter().zip(x_free) {
            coeffs[g] = v;
        }
        WeakFunction { coeffs }
    }
}

pub fn apply_boundary_conditions(
    disc: &Discretization,
    mesh: &Mesh,
    system: &AssembledSystem,
    data: &dyn BoundaryData,
) -> Result<ReducedSystem> {
    let mask = disc.dofs.boundary_mask();
    let mut fixed_values = disc.boundary_values(mesh, data)?;
    for (v, &m) in fixed_values.iter_mut().zip(&mask) {
        if !m {
            *v = 0.0;
        }
    }
    let free: Vec<usize> = (0..mask.len()).filter(|&i| !mask[i]).collect();
    let a_fixed = system.matrix.matvec(&fixed_values);
    let rhs = free.iter().map(|&i| system.load[i] - a_fixed[i]).collect();
    Ok(ReducedSystem { matrix: system.matrix.submatrix(&free), rhs, free, fixed_values })
}
