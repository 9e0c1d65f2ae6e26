//! Generalized discrete weak second-order partial derivatives.
//!
//! On an element T the weak derivative of v = {v0, vb, vg} is
//!
//! ```text
//! d2_{ij,g} v = d2_{ij} v0 + delta_ij(v),      delta_ij(v) in P_n(T),
//! (delta_ij(v), phi)_T = <(Qb v0 - vb) n_i, d_j phi>_{dT} - <Qg_i(d_i v0) - vg_i, phi n_j>_{dT}
//! ```
//!
//! for all phi in P_n(T). Every piece is represented as a dense matrix acting on
//! the local DOF vector so that assembly, norms and tests share one operator.
//! The correction depends on the ordered pair (i, j); d2_{12,g} and d2_{21,g}
//! agree in their P_{k-2} part only.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::mesh::ElementGeometry;
use crate::polybasis::{dim_p, legendre_values, ElementBasis, LineRule, QuadratureRule};

/// Polynomial degrees of the P_k | P_m | [P_l]^2 || P_n element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Degrees {
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub n: usize,
}

impl Degrees {
    pub fn new(k: usize, m: usize, l: usize, n: usize) -> Result<Self> {
        let d = Degrees { k, m, l, n };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("interior degree k must be at least 2, got {}", self.k)));
        }
        if self.k > 8 || self.m > 8 || self.l > 8 || self.n > 8 {
            return Err(Error::Config("polynomial degrees above 8 are not supported".into()));
        }
        Ok(())
    }

    /// s = min{k, m, l, n}.
    pub fn s(&self) -> usize {
        self.k.min(self.m).min(self.l).min(self.n)
    }

    /// Degree of the space holding both parts of d2_{ij,g} v.
    pub fn hessian_degree(&self) -> usize {
        (self.k - 2).max(self.n)
    }

    /// Edge quadrature exactness for the bilinear-form integrands.
    pub fn edge_exactness(&self) -> usize {
        2 * self.k.max(self.m).max(self.l).max(self.n) + 2
    }

    /// Element quadrature exactness for mass matrices.
    pub fn element_exactness(&self) -> usize {
        2 * self.k.max(self.n) + 2
    }
}

impl std::fmt::Display for Degrees {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "P{}|P{}|[P{}]^2||P{}", self.k, self.m, self.l, self.n)
    }
}

/// Local DOF ordering: v0 coefficients, then vb per edge, then vg per edge
/// (component 1 coefficients followed by component 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalDofLayout {
    pub degrees: Degrees,
    pub num_edges: usize,
}

impl LocalDofLayout {
    pub fn new(degrees: Degrees, num_edges: usize) -> Self {
        LocalDofLayout { degrees, num_edges }
    }
    pub fn interior_dim(&self) -> usize {
        dim_p(self.degrees.k)
    }
    pub fn trace_dim(&self) -> usize {
        self.degrees.m + 1
    }
    pub fn gradient_dim(&self) -> usize {
        self.degrees.l + 1
    }
    pub fn len(&self) -> usize {
        self.interior_dim() + self.num_edges * (self.trace_dim() + 2 * self.gradient_dim())
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn trace_offset(&self, edge: usize) -> usize {
        self.interior_dim() + edge * self.trace_dim()
    }
    pub fn gradient_offset(&self, edge: usize, component: usize) -> usize {
        self.interior_dim()
            + self.num_edges * self.trace_dim()
            + edge * 2 * self.gradient_dim()
            + component * self.gradient_dim()
    }
}

/// Per-edge mismatch operators on the local DOFs.
///
/// `trace[e]` maps DOFs to the Legendre coefficients of `Qb v0 - vb` on edge e,
/// `gradient[e][c]` to those of `Qg(d_c v0) - vg_c`.
#[derive(Debug, Clone)]
pub struct EdgeMismatch {
    pub trace: Vec<DMatrix<f64>>,
    pub gradient: Vec<[DMatrix<f64>; 2]>,
}

impl EdgeMismatch {
    pub fn build(geom: &ElementGeometry, basis: &ElementBasis, layout: &LocalDofLayout) -> Result<Self> {
        let deg = layout.degrees;
        let rule = LineRule::with_exactness(deg.edge_exactness())?;
        let nk = layout.interior_dim();
        let ndof = layout.len();
        let mut trace = Vec::with_capacity(layout.num_edges);
        let mut gradient = Vec::with_capacity(layout.num_edges);
        let mut lb = vec![0.0; deg.m + 1];
        let mut lg = vec![0.0; deg.l + 1];
        let mut vals = vec![0.0; nk];
        let mut grads = vec![[0.0; 2]; nk];
        for (e, edge) in geom.edges.iter().enumerate() {
            let mut b = DMatrix::zeros(deg.m + 1, ndof);
            let mut g = [DMatrix::zeros(deg.l + 1, ndof), DMatrix::zeros(deg.l + 1, ndof)];
            // Legendre coefficient r of f: (2r+1)/2 * int_{-1}^{1} f L_r dt.
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let p = edge.point_at(t);
                basis.eval_into(p, &mut vals);
                basis.eval_grad_into(p, &mut grads);
                legendre_values(deg.m, t, &mut lb);
                legendre_values(deg.l, t, &mut lg);
                for r in 0..=deg.m {
                    let c = w * 0.5 * (2 * r + 1) as f64 * lb[r];
                    for a in 0..nk {
                        b[(r, a)] += c * vals[a];
                    }
                }
                for r in 0..=deg.l {
                    let c = w * 0.5 * (2 * r + 1) as f64 * lg[r];
                    for a in 0..nk {
                        g[0][(r, a)] += c * grads[a][0];
                        g[1][(r, a)] += c * grads[a][1];
                    }
                }
            }
            for r in 0..=deg.m {
                b[(r, layout.trace_offset(e) + r)] = -1.0;
            }
            for (comp, gc) in g.iter_mut().enumerate() {
                for r in 0..=deg.l {
                    gc[(r, layout.gradient_offset(e, comp) + r)] = -1.0;
                }
            }
            trace.push(b);
            gradient.push(g);
        }
        Ok(EdgeMismatch { trace, gradient })
    }
}

/// Right-hand side of the defining identity for delta_ij, tested against the P_n basis.
fn delta_rhs(
    geom: &ElementGeometry,
    basis_n: &ElementBasis,
    mismatch: &EdgeMismatch,
    layout: &LocalDofLayout,
    i: usize,
    j: usize,
) -> Result<DMatrix<f64>> {
    let deg = layout.degrees;
    let rule = LineRule::with_exactness(deg.edge_exactness())?;
    let nn = basis_n.dim();
    let mut rhs = DMatrix::zeros(nn, layout.len());
    let mut lb = vec![0.0; deg.m + 1];
    let mut lg = vec![0.0; deg.l + 1];
    let mut vals = vec![0.0; nn];
    let mut grads = vec![[0.0; 2]; nn];
    for (e, edge) in geom.edges.iter().enumerate() {
        // first[beta, r] = n_i <L_r, d_j phi_beta>_e ; second[beta, r] = n_j <L_r, phi_beta>_e
        let mut first = DMatrix::zeros(nn, deg.m + 1);
        let mut second = DMatrix::zeros(nn, deg.l + 1);
        let half = 0.5 * edge.length;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let p = edge.point_at(t);
            basis_n.eval_into(p, &mut vals);
            basis_n.eval_grad_into(p, &mut grads);
            legendre_values(deg.m, t, &mut lb);
            legendre_values(deg.l, t, &mut lg);
            for beta in 0..nn {
                let c1 = w * half * edge.normal[i] * grads[beta][j];
                for r in 0..=deg.m {
                    first[(beta, r)] += c1 * lb[r];
                }
                let c2 = w * half * edge.normal[j] * vals[beta];
                for r in 0..=deg.l {
                    second[(beta, r)] += c2 * lg[r];
                }
            }
        }
        rhs += &first * &mismatch.trace[e];
        rhs -= &second * &mismatch.gradient[e][i];
    }
    Ok(rhs)
}

fn mass_cholesky(basis: &ElementBasis, rule: &QuadratureRule) -> Result<Cholesky<f64, Dyn>> {
    basis
        .mass_matrix(rule)
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })
}

/// D_ij = M_n^{-1} R_ij: local DOFs to P_n coefficients of delta_ij. Indices are 0-based.
pub fn build_delta_g(geom: &ElementGeometry, i: usize, j: usize, layout: &LocalDofLayout) -> Result<DMatrix<f64>> {
    let basis_k = ElementBasis::on_element(layout.degrees.k, geom);
    let basis_n = basis_k.with_degree(layout.degrees.n);
    let mismatch = EdgeMismatch::build(geom, &basis_k, layout)?;
    let rule = QuadratureRule::polygon(&geom.vertices, geom.centroid, layout.degrees.element_exactness())?;
    let chol = mass_cholesky(&basis_n, &rule)?;
    Ok(chol.solve(&delta_rhs(geom, &basis_n, &mismatch, layout, i, j)?))
}

/// Index pairs (i, j) in row-major order; slot = 2*i + j.
pub const INDEX_PAIRS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// All weak-derivative operators of one element.
#[derive(Debug, Clone)]
pub struct LocalWeakHessian {
    pub layout: LocalDofLayout,
    pub basis: ElementBasis,
    /// P_{k-2} basis (same center and scale).
    pub low_basis: ElementBasis,
    /// P_n basis.
    pub delta_basis: ElementBasis,
    /// `h0[2i+j]`: v0 coefficients to P_{k-2} coefficients of d2_{ij} v0.
    pub h0: [DMatrix<f64>; 4],
    /// `delta[2i+j]`: local DOFs to P_n coefficients of delta_ij(v).
    pub delta: [DMatrix<f64>; 4],
    pub mismatch: EdgeMismatch,
    pub edge_lengths: Vec<f64>,
    pub diameter: f64,
    rule: QuadratureRule,
}

impl LocalWeakHessian {
    pub fn build(geom: &ElementGeometry, degrees: Degrees) -> Result<Self> {
        let layout = LocalDofLayout::new(degrees, geom.edges.len());
        let basis = ElementBasis::on_element(degrees.k, geom);
        let low_basis = basis.with_degree(degrees.k - 2);
        let delta_basis = basis.with_degree(degrees.n);
        let mismatch = EdgeMismatch::build(geom, &basis, &layout)?;
        let rule = QuadratureRule::polygon(&geom.vertices, geom.centroid, degrees.element_exactness())?;
        let chol = mass_cholesky(&delta_basis, &rule)?;
        let mut delta: [DMatrix<f64>; 4] = Default::default();
        let mut h0: [DMatrix<f64>; 4] = Default::default();
        for (slot, &(i, j)) in INDEX_PAIRS.iter().enumerate() {
            delta[slot] = chol.solve(&delta_rhs(geom, &delta_basis, &mismatch, &layout, i, j)?);
            h0[slot] = basis.second_derivative_matrix(i, j);
        }
        Ok(LocalWeakHessian {
            layout,
            basis,
            low_basis,
            delta_basis,
            h0,
            delta,
            mismatch,
            edge_lengths: geom.edges.iter().map(|e| e.length).collect(),
            diameter: geom.diameter,
            rule,
        })
    }

    pub fn degrees(&self) -> Degrees {
        self.layout.degrees
    }

    /// The element quadrature used for mass matrices.
    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// d2_{ij,g} v as the pair (P_{k-2} coefficients, P_n coefficients).
    pub fn apply(&self, i: usize, j: usize, dofs: &[f64]) -> (DVector<f64>, DVector<f64>) {
        assert_eq!(dofs.len(), self.layout.len());
        let slot = 2 * i + j;
        let nk = self.layout.interior_dim();
        let v0 = DVector::from_column_slice(&dofs[..nk]);
        let all = DVector::from_column_slice(dofs);
        (&self.h0[slot] * v0, &self.delta[slot] * all)
    }

    /// Maps local DOFs to P_N coefficients of d2_{ij,g} v, N = max(k-2, n).
    /// P_{k-2} and P_n coefficient vectors embed as prefixes of P_N.
    pub fn combined(&self, slot: usize) -> DMatrix<f64> {
        let big = dim_p(self.degrees().hessian_degree());
        let mut c = DMatrix::zeros(big, self.layout.len());
        let h = &self.h0[slot];
        c.view_mut((0, 0), (h.nrows(), h.ncols())).copy_from(h);
        let d = &self.delta[slot];
        let mut top = c.view_mut((0, 0), (d.nrows(), d.ncols()));
        top += d;
        c
    }

    /// sum_{ij} (d2_{ij,g} w, d2_{ij,g} v)_T as a matrix.
    pub fn hessian_gram(&self) -> DMatrix<f64> {
        let mass = self.basis.with_degree(self.degrees().hessian_degree()).mass_matrix(&self.rule);
        let n = self.layout.len();
        let mut k = DMatrix::zeros(n, n);
        for slot in 0..4 {
            let c = self.combined(slot);
            k += c.transpose() * &mass * &c;
        }
        k
    }

    /// The two stabilizer blocks, without the rho h^gamma weights.
    pub fn stabilizer_blocks(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.layout.len();
        let mut s1 = DMatrix::zeros(n, n);
        let mut s2 = DMatrix::zeros(n, n);
        for (e, &len) in self.edge_lengths.iter().enumerate() {
            let b = &self.mismatch.trace[e];
            let wb = DMatrix::from_diagonal(&DVector::from_fn(b.nrows(), |r, _| len / (2 * r + 1) as f64));
            s1 += b.transpose() * &wb * b;
            for g in &self.mismatch.gradient[e] {
                let wg = DMatrix::from_diagonal(&DVector::from_fn(g.nrows(), |r, _| len / (2 * r + 1) as f64));
                s2 += g.transpose() * &wg * g;
            }
        }
        (s1, s2)
    }
}
