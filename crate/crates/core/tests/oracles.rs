//! The library checked against independently computed references: exact
//! polygon integrals, closed-form energies and hand-derived weak Hessians.

mod common;

use common::*;
use gwg::assembly::{Discretization, FormWeights, GwgConfig, WeakFunction};
use gwg::mesh::{generate_uniform_square, generate_uniform_triangular};
use gwg::projection::{project_weak, SmoothFunction};
use gwg::{Degrees, Domain, Mesh};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn monomial_integral_matches_hand_values() {
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    assert!((monomial_integral(0, 0, &square) - 1.0).abs() < 1e-15);
    assert!((monomial_integral(2, 1, &square) - 1.0 / 6.0).abs() < 1e-15);
    assert!((monomial_integral(1, 1, &tri) - 1.0 / 24.0).abs() < 1e-15);
    assert!((monomial_integral(2, 0, &tri) - 1.0 / 12.0).abs() < 1e-15);
    assert!((monomial_integral(3, 2, &tri) - 6.0 * 2.0 / 5040.0).abs() < 1e-15);
}

#[test]
fn library_basis_expands_to_same_values() {
    let mut rng = StdRng::seed_from_u64(3);
    let pts = random_element(&mut rng, Shape::ConvexQuad);
    let (_, g) = single_element(&pts);
    let basis = gwg::polybasis::ElementBasis::on_element(4, &g);
    let coeffs: Vec<f64> = (0..basis.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
    let p = Poly::from_basis(&basis, &coeffs);
    for q in [g.centroid, pts[0], [0.1, -0.2]] {
        assert!((p.eval(q) - basis.eval_poly(&coeffs, q)).abs() < 1e-12);
    }
}

#[test]
fn commuting_identity_on_random_elements() {
    let mut rng = StdRng::seed_from_u64(11);
    let degrees = [(2, 0, 0, 0), (2, 1, 0, 1), (3, 1, 1, 1), (3, 2, 1, 0), (4, 2, 2, 2), (2, 2, 2, 2)];
    for (idx, &(k, m, l, n)) in degrees.iter().enumerate() {
        for shape in [Shape::Triangle, Shape::Rectangle, Shape::ConvexQuad] {
            let pts = random_element(&mut rng, shape);
            let phi = Poly::random(&mut rng, 4);
            let r = commuting_residual(&pts, Degrees::new(k, m, l, n).unwrap(), &phi);
            assert!(r < 1e-10, "degrees #{idx} {shape:?}: residual {r:e}");
        }
    }
}

/// A global polynomial wrapped as a smooth function.
struct PolyFn(Poly);

impl SmoothFunction for PolyFn {
    fn value(&self, p: Point) -> f64 {
        self.0.eval(p)
    }
    fn gradient(&self, p: Point) -> Point {
        [self.0.dx().eval(p), self.0.dy().eval(p)]
    }
    fn hessian(&self, p: Point) -> [f64; 3] {
        [self.0.dx().dx().eval(p), self.0.dx().dy().eval(p), self.0.dy().dy().eval(p)]
    }
}

fn energy(mesh: &Mesh, cfg: GwgConfig, v: &dyn SmoothFunction) -> (f64, f64) {
    let disc = Discretization::new(mesh, cfg).unwrap();
    let qv = project_weak(&disc, mesh, v).unwrap();
    let a = disc.assemble_stiffness(mesh);
    let s = disc.assemble_matrix(mesh, FormWeights { hessian: 0.0, rho1: 1.0, rho2: 1.0 });
    (a.quadratic_form(&qv.coeffs), s.quadratic_form(&qv.coeffs))
}

#[test]
fn energy_of_projected_polynomial_is_hessian_norm() {
    let mut rng = StdRng::seed_from_u64(5);
    // For phi in P_k the stabilizer vanishes on Q_h phi and the weak Hessian is the
    // classical one, so a(Q_h phi, Q_h phi) = sum_ij ||d_ij phi||^2.
    for (k, mesh) in [
        (2, generate_uniform_triangular(Domain::UnitSquare, 3).unwrap()),
        (3, generate_uniform_square(Domain::UnitSquare, 3).unwrap()),
        (3, generate_uniform_triangular(Domain::LShaped, 2).unwrap()),
    ] {
        let phi = Poly::random(&mut rng, k);
        let cfg = GwgConfig::new(Degrees::new(k, 1, 1, k - 2).unwrap());
        let (a, s) = energy(&mesh, cfg, &PolyFn(phi.clone()));
        let mut expect = 0.0;
        for t in 0..mesh.num_elements() {
            let pts = mesh.geometry(t).vertices;
            for i in 0..2 {
                for j in 0..2 {
                    let d = phi.d(i).d(j);
                    expect += d.mul(&d).integrate(&pts);
                }
            }
        }
        assert!(s.abs() < 1e-12 * (1.0 + expect), "stabilizer {s:e}");
        assert!((a - expect).abs() < 1e-10 * expect, "{a} vs {expect}");
    }
}

fn single_dof_energy(mesh: &Mesh, cfg: GwgConfig, pick: impl Fn(&Discretization) -> usize) -> f64 {
    let disc = Discretization::new(mesh, cfg).unwrap();
    let mut v = WeakFunction::zeros(&disc.dofs);
    v.coeffs[pick(&disc)] = 1.0;
    disc.assemble_stiffness(mesh).quadratic_form(&v.coeffs)
}

#[test]
fn lone_trace_dof_energy_is_closed_form() {
    // vb = 1 on one interior edge, everything else zero, n = 0:
    // the weak Hessian vanishes and each neighbour adds rho1 h_T^gamma1 |e|.
    let mesh = generate_uniform_triangular(Domain::UnitSquare, 2).unwrap();
    let e = (0..mesh.num_edges()).find(|&e| !mesh.edges()[e].is_boundary()).unwrap();
    let cfg = GwgConfig::new(Degrees::new(2, 0, 0, 0).unwrap()).with_rho(3.0, 1.0);
    let got = single_dof_energy(&mesh, cfg, |d| d.dofs.trace_range(e).start);
    let edge = &mesh.edges()[e];
    let len = mesh.edge_length(e);
    let expect: f64 =
        [edge.left, edge.right.unwrap()].iter().map(|&t| 3.0 * mesh.geometry(t).diameter.powi(-3) * len).sum();
    assert!((got - expect).abs() < 1e-12 * expect, "{got} vs {expect}");
}

#[test]
fn lone_gradient_dof_energy_is_closed_form() {
    // vg_c = 1 on one interior edge, n = 0: delta_cj = |e| n_j / |T| on each
    // neighbour, so the Hessian part is |e|^2/|T| and the stabilizer rho2 |e| / h_T.
    let mesh = generate_uniform_square(Domain::UnitSquare, 3).unwrap();
    let e = (0..mesh.num_edges()).find(|&e| !mesh.edges()[e].is_boundary()).unwrap();
    let cfg = GwgConfig::new(Degrees::new(2, 0, 0, 0).unwrap()).with_rho(1.0, 2.0);
    for c in 0..2 {
        let got = single_dof_energy(&mesh, cfg, |d| d.dofs.gradient_range(e, c).start);
        let edge = &mesh.edges()[e];
        let len = mesh.edge_length(e);
        let expect: f64 = [edge.left, edge.right.unwrap()]
            .iter()
            .map(|&t| {
                let g = mesh.geometry(t);
                len * len / g.area + 2.0 * len / g.diameter
            })
            .sum();
        assert!((got - expect).abs() < 1e-12 * expect, "component {c}: {got} vs {expect}");
    }
}

#[test]
fn unconstrained_kernel_is_global_linears() {
    // Small meshes: nullity 3, spanned by Q_h of 1, x, y.
    for mesh in [
        generate_uniform_triangular(Domain::UnitSquare, 1).unwrap(),
        generate_uniform_square(Domain::UnitSquare, 2).unwrap(),
    ] {
        let cfg = GwgConfig::new(Degrees::new(2, 0, 0, 0).unwrap());
        let disc = Discretization::new(&mesh, cfg).unwrap();
        let a = disc.assemble_stiffness(&mesh).to_dense();
        let eig = a.clone().symmetric_eigen();
        let max = eig.eigenvalues.amax();
        let null = eig.eigenvalues.iter().filter(|&&l| l.abs() < 1e-10 * max).count();
        assert_eq!(null, 3);
        for lin in [Poly::monomial(0, 0), Poly::monomial(1, 0), Poly::monomial(0, 1)] {
            let v = project_weak(&disc, &mesh, &PolyFn(lin)).unwrap();
            let av = &a * nalgebra::DVector::from_vec(v.coeffs);
            assert!(av.amax() < 1e-10 * max);
        }
    }
}

#[test]
fn projected_l2_error_matches_exact_projection() {
    // ||Q0 phi - phi|| from the library against the exact polygon projection.
    let mut rng = StdRng::seed_from_u64(21);
    let mesh = generate_uniform_triangular(Domain::UnitSquare, 2).unwrap();
    let phi = Poly::random(&mut rng, 4);
    let cfg = GwgConfig::new(Degrees::new(2, 0, 0, 0).unwrap());
    let disc = Discretization::new(&mesh, cfg).unwrap();
    let q = project_weak(&disc, &mesh, &PolyFn(phi.clone())).unwrap();
    for t in 0..mesh.num_elements() {
        let pts = mesh.geometry(t).vertices;
        let lib = Poly::from_basis(&disc.ops[t].basis, q.interior(&disc.dofs, t));
        let exact = l2_project(&phi, 2, &pts);
        let d = lib.sub(&exact);
        assert!(d.mul(&d).integrate(&pts).sqrt() < 1e-12);
    }
}
