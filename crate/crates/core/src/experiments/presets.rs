//! Fixed configurations for the reference convergence tables.

use crate::error::{Error, Result};
use crate::mesh::{Domain, MeshKind};
use crate::weak_hessian::Degrees;

use super::sweep::SweepConfig;

#[derive(Debug, Clone)]
pub struct Preset {
    pub table: u32,
    /// Block label, used in output file names.
    pub label: String,
    pub case: &'static str,
    pub config: SweepConfig,
    /// Every 1/h row of the block.
    pub levels: Vec<usize>,
}

/// Largest 1/h run by default: 64 for triangles and squares, 32 (level 4) for rectangles.
pub fn desk_cap(kind: MeshKind) -> usize {
    match kind {
        MeshKind::Rectangular => 32,
        _ => 64,
    }
}

impl Preset {
    pub fn desk_levels(&self) -> Vec<usize> {
        let cap = desk_cap(self.config.mesh_kind);
        self.levels.iter().copied().filter(|&l| l <= cap).collect()
    }
}

pub const TABLES: std::ops::RangeInclusive<u32> = 1..=7;

const FINE: [usize; 5] = [8, 16, 32, 64, 128];
const COARSE: [usize; 5] = [4, 8, 16, 32, 64];

fn preset(table: u32, label: &str, case: &'static str, domain: Domain, kind: MeshKind, d: [usize; 4], levels: &[usize]) -> Preset {
    let degrees = Degrees::new(d[0], d[1], d[2], d[3]).expect("preset degrees are valid");
    Preset { table, label: label.to_string(), case, config: SweepConfig::new(domain, kind, degrees), levels: levels.to_vec() }
}

/// Blocks of table `table`.
pub fn presets(table: u32) -> Result<Vec<Preset>> {
    use Domain::*;
    use MeshKind::*;
    let out = match table {
        1 => vec![preset(1, "p2p0p0p1", "cosx1sin2y1", UnitSquare, Rectangular, [2, 0, 0, 1], &FINE)],
        2 => (0..=2)
            .map(|m| preset(2, &format!("m{m}"), "sinxsiny", UnitSquare, Triangular, [2, m, 0, 0], &FINE))
            .collect(),
        3 => vec![preset(3, "p3p0p1p1", "cosx1sin2y1", UnitSquare, Triangular, [3, 0, 1, 1], &COARSE)],
        4 => [(1.0, 1.0), (10.0, 10.0), (100.0, 1.0)]
            .into_iter()
            .map(|(r1, r2)| {
                let mut p = preset(4, &format!("rho{r1}_{r2}"), "cosxsiny", UnitSquare, Triangular, [2, 0, 0, 0], &FINE);
                p.config.rho1 = r1;
                p.config.rho2 = r2;
                p
            })
            .collect(),
        5 => (0..=1)
            .map(|n| preset(5, &format!("n{n}"), "corner08", UnitSquare, Square, [2, 0, 0, n], &FINE))
            .collect(),
        6 => vec![
            preset(6, "square_omega1", "rsingular", UnitSquare, Square, [2, 0, 0, 0], &FINE),
            preset(6, "tri_omega1", "rsingular", UnitSquare, Triangular, [2, 0, 0, 0], &FINE),
            preset(6, "tri_omega2", "rsingular", LShaped, Triangular, [2, 0, 0, 0], &COARSE),
        ],
        7 => [(0, 1), (2, 1), (2, 0)]
            .into_iter()
            .map(|(m, l)| preset(7, &format!("m{m}_l{l}"), "cosx1sin2y1", UnitSquare, Triangular, [3, m, l, 0], &COARSE))
            .collect(),
        other => return Err(Error::Config(format!("no preset for table {other} (expected 1..=7)"))),
    };
    Ok(out)
}
