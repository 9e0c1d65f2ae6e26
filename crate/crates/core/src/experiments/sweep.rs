//! Convergence sweeps: mesh, assemble, constrain, solve and measure at each level.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly::{apply_boundary_conditions, assemble, Discretization, GwgConfig, ReducedSystem, SolverKind, WeakFunction};
use crate::errnorms::{compute_errors, rate, ErrorReport};
use crate::error::{Error, Result};
use crate::linsolve::{solve_cg, solve_dense, CgOptions, DEFAULT_DENSE_CAP};
use crate::mesh::{Domain, Mesh, MeshKind};
use crate::weak_hessian::Degrees;

use super::cases::ManufacturedCase;

fn default_rho() -> f64 {
    1.0
}
fn default_gamma1() -> f64 {
    -3.0
}
fn default_gamma2() -> f64 {
    -1.0
}
fn default_tol() -> f64 {
    1e-12
}

/// Run configuration as read from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub domain: Domain,
    pub mesh_kind: MeshKind,
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub n: usize,
    #[serde(default = "default_rho")]
    pub rho1: f64,
    #[serde(default = "default_rho")]
    pub rho2: f64,
    #[serde(default = "default_gamma1")]
    pub gamma1: f64,
    #[serde(default = "default_gamma2")]
    pub gamma2: f64,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl SweepConfig {
    pub fn new(domain: Domain, mesh_kind: MeshKind, degrees: Degrees) -> Self {
        SweepConfig {
            domain,
            mesh_kind,
            k: degrees.k,
            m: degrees.m,
            l: degrees.l,
            n: degrees.n,
            rho1: 1.0,
            rho2: 1.0,
            gamma1: -3.0,
            gamma2: -1.0,
            solver: SolverKind::Cg,
            tol: 1e-12,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.gwg()?;
        Ok(cfg)
    }

    pub fn degrees(&self) -> Result<Degrees> {
        Degrees::new(self.k, self.m, self.l, self.n)
    }

    pub fn gwg(&self) -> Result<GwgConfig> {
        let mut cfg = GwgConfig::new(self.degrees()?);
        cfg.rho1 = self.rho1;
        cfg.rho2 = self.rho2;
        cfg.gamma1 = self.gamma1;
        cfg.gamma2 = self.gamma2;
        cfg.solver = self.solver;
        cfg.tol = self.tol;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Mesh whose nominal mesh size is 1/inv_h.
    ///
    /// Rectangular partitions are 3*2^l by 2*2^l cells, with inv_h = 2^(l+1).
    pub fn mesh(&self, inv_h: usize) -> Result<Mesh> {
        match self.mesh_kind {
            MeshKind::Rectangular => {
                if inv_h < 2 || !inv_h.is_power_of_two() {
                    return Err(Error::Config(format!(
                        "rectangular partitions need 1/h a power of two >= 2, got {inv_h}"
                    )));
                }
                self.mesh_kind.generate(self.domain, inv_h.trailing_zeros() as usize - 1)
            }
            kind => kind.generate(self.domain, inv_h),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub inv_h: usize,
    pub errors: ErrorReport,
    /// log2 of the ratio to the previous row; absent on the first row.
    pub rates: Option<[f64; 6]>,
    pub dofs: usize,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub case: String,
    pub config: SweepConfig,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn new(case: &str, config: SweepConfig) -> Self {
        ConvergenceTable { case: case.to_string(), config, rows: Vec::new() }
    }

    /// Appends a row, filling its rates from the previous one.
    pub fn push(&mut self, inv_h: usize, errors: ErrorReport, dofs: usize, seconds: f64) {
        let rates = self.rows.last().map(|prev| {
            let (a, b) = (prev.errors.values(), errors.values());
            std::array::from_fn(|i| rate(a[i], b[i]))
        });
        self.rows.push(ConvergenceRow { inv_h, errors, rates, dofs, seconds });
    }

    pub fn row(&self, inv_h: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.inv_h == inv_h)
    }
}

/// Solution of one level together with its discretization.
pub struct LevelSolution {
    pub mesh: Mesh,
    pub disc: Discretization,
    pub uh: WeakFunction,
    pub system: ReducedSystem,
}

pub fn solve_reduced(system: &ReducedSystem, cfg: &GwgConfig) -> Result<Vec<f64>> {
    match cfg.solver {
        SolverKind::Dense => solve_dense(&system.matrix, &system.rhs, DEFAULT_DENSE_CAP),
        SolverKind::Cg => {
            let opts = CgOptions { rel_tol: cfg.tol, max_iters: cfg.max_iters };
            Ok(solve_cg(&system.matrix, &system.rhs, opts)?.0)
        }
    }
}

/// Discretizes and solves the problem for `case` on `mesh`.
pub fn solve_on_mesh(mesh: Mesh, cfg: GwgConfig, case: &ManufacturedCase) -> Result<LevelSolution> {
    let disc = Discretization::new(&mesh, cfg)?;
    let full = assemble(&disc, &mesh, &|p| case.load(p))?;
    let system = apply_boundary_conditions(&disc, &mesh, &full, case)?;
    let x = solve_reduced(&system, &cfg)?;
    let uh = system.expand(&x);
    Ok(LevelSolution { mesh, disc, uh, system })
}

/// Runs one sweep. Levels are the 1/h values and must be strictly ascending.
pub fn run_sweep(config: &SweepConfig, case: &ManufacturedCase, levels: &[usize]) -> Result<ConvergenceTable> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("levels must be strictly ascending".into()));
    }
    let cfg = config.gwg()?;
    let mut table = ConvergenceTable::new(case.id, *config);
    for &inv_h in levels {
        let start = Instant::now();
        let wrap = |e: Error| Error::Level { context: format!("1/h = {inv_h}"), source: Box::new(e) };
        let mesh = config.mesh(inv_h).map_err(wrap)?;
        let sol = solve_on_mesh(mesh, cfg, case).map_err(wrap)?;
        let errors = compute_errors(&sol.disc, &sol.mesh, &sol.uh, case).map_err(wrap)?;
        table.push(inv_h, errors, sol.disc.dofs.len(), start.elapsed().as_secs_f64());
    }
    Ok(table)
}
