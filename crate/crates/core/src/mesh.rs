//! Uniform polygonal partitions of the unit square and the L-shaped domain.
//!
//! Elements are stored as counter-clockwise vertex loops. Every edge carries a
//! global orientation `vertices[0] -> vertices[1]` which is counter-clockwise
//! with respect to its `left` element; edge polynomial data is always expressed
//! in that orientation.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// (0,1)^2
    UnitSquare,
    /// (-1,1)^2 with the quadrant (0,1)x(-1,0) removed.
    LShaped,
}

impl Domain {
    pub fn area(self) -> f64 {
        match self {
            Domain::UnitSquare => 1.0,
            Domain::LShaped => 3.0,
        }
    }

    /// Closed-domain membership test with a small tolerance.
    pub fn contains(self, p: Point) -> bool {
        let eps = 1e-12;
        let [x, y] = p;
        match self {
            Domain::UnitSquare => x >= -eps && x <= 1.0 + eps && y >= -eps && y <= 1.0 + eps,
            Domain::LShaped => {
                let in_box = x.abs() <= 1.0 + eps && y.abs() <= 1.0 + eps;
                let in_hole = x > eps && y < -eps;
                in_box && !in_hole
            }
        }
    }

    /// Boundary polygon, counter-clockwise.
    pub fn corners(self) -> Vec<Point> {
        match self {
            Domain::UnitSquare => vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            Domain::LShaped => vec![
                [-1.0, -1.0],
                [0.0, -1.0],
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 1.0],
                [-1.0, 1.0],
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

/// Geometry of one edge as seen from an element.
#[derive(Debug, Clone, Copy)]
pub struct EdgeGeometry {
    pub edge: usize,
    /// Unit outward normal with respect to the owning element.
    pub normal: Point,
    /// Unit tangent along the global edge orientation.
    pub tangent: Point,
    pub length: f64,
    pub midpoint: Point,
    /// Global edge endpoints in orientation order.
    pub start: Point,
    pub end: Point,
}

impl EdgeGeometry {
    /// Point at the edge parameter `t` in [-1, 1].
    #[inline]
    pub fn point_at(&self, t: f64) -> Point {
        let s = 0.5 * (1.0 + t);
        [
            self.start[0] + s * (self.end[0] - self.start[0]),
            self.start[1] + s * (self.end[1] - self.start[1]),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub diameter: f64,
    pub area: f64,
    pub centroid: Point,
    pub vertices: Vec<Point>,
    pub edges: Vec<EdgeGeometry>,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    elements: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    /// `element_edges[t][k]` joins local vertices k and k+1.
    element_edges: Vec<Vec<usize>>,
    domain: Domain,
}

#[derive(Serialize)]
struct MeshDump<'a> {
    vertices: &'a [Point],
    elements: &'a [Vec<usize>],
    edges: Vec<[i64; 4]>,
}

impl Mesh {
    /// Builds the edge structure from counter-clockwise element loops.
    pub fn from_elements(domain: Domain, vertices: Vec<Point>, elements: Vec<Vec<usize>>) -> Result<Self> {
        let mut edges: Vec<Edge> = Vec::new();
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut element_edges = Vec::with_capacity(elements.len());
        for (t, loop_) in elements.iter().enumerate() {
            if loop_.len() < 3 {
                return Err(Error::Argument(format!("element {t} has fewer than 3 vertices")));
            }
            let mut local = Vec::with_capacity(loop_.len());
            for k in 0..loop_.len() {
                let a = loop_[k];
                let b = loop_[(k + 1) % loop_.len()];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.right.is_some() || edge.vertices != [b, a] {
                            return Err(Error::Argument(format!(
                                "edge ({a},{b}) is shared inconsistently by element {t}"
                            )));
                        }
                        edge.right = Some(t);
                        local.push(e);
                    }
                    None => {
                        lookup.insert(key, edges.len());
                        local.push(edges.len());
                        edges.push(Edge { vertices: [a, b], left: t, right: None });
                    }
                }
            }
            element_edges.push(local);
        }
        let mesh = Mesh { vertices, elements, edges, element_edges, domain };
        for t in 0..mesh.num_elements() {
            if mesh.signed_area(t) <= 0.0 {
                return Err(Error::Argument(format!("element {t} is not counter-clockwise")));
            }
        }
        Ok(mesh)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn element_edges(&self, t: usize) -> &[usize] {
        &self.element_edges[t]
    }

    fn signed_area(&self, t: usize) -> f64 {
        let l = &self.elements[t];
        let mut a = 0.0;
        for k in 0..l.len() {
            let p = self.vertices[l[k]];
            let q = self.vertices[l[(k + 1) % l.len()]];
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a
    }

    /// Unit normal of edge `e` pointing out of its left element.
    pub fn edge_normal(&self, e: usize) -> Point {
        let [a, b] = self.edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
        let len = dx.hypot(dy);
        [dy / len, -dx / len]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        (pb[0] - pa[0]).hypot(pb[1] - pa[1])
    }

    pub fn geometry(&self, t: usize) -> ElementGeometry {
        let loop_ = &self.elements[t];
        let vertices: Vec<Point> = loop_.iter().map(|&v| self.vertices[v]).collect();
        let nv = vertices.len();

        let mut diameter: f64 = 0.0;
        for i in 0..nv {
            for j in i + 1..nv {
                let d = (vertices[i][0] - vertices[j][0]).hypot(vertices[i][1] - vertices[j][1]);
                diameter = diameter.max(d);
            }
        }

        let (mut area, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for k in 0..nv {
            let p = vertices[k];
            let q = vertices[(k + 1) % nv];
            let cross = p[0] * q[1] - q[0] * p[1];
            area += cross;
            cx += (p[0] + q[0]) * cross;
            cy += (p[1] + q[1]) * cross;
        }
        area *= 0.5;
        let centroid = [cx / (6.0 * area), cy / (6.0 * area)];

        let edges = self.element_edges[t]
            .iter()
            .map(|&e| {
                let edge = &self.edges[e];
                let start = self.vertices[edge.vertices[0]];
                let end = self.vertices[edge.vertices[1]];
                let length = (end[0] - start[0]).hypot(end[1] - start[1]);
                let tangent = [(end[0] - start[0]) / length, (end[1] - start[1]) / length];
                let left_normal = [tangent[1], -tangent[0]];
                let normal = if edge.left == t {
                    left_normal
                } else {
                    [-left_normal[0], -left_normal[1]]
                };
                EdgeGeometry {
                    edge: e,
                    normal,
                    tangent,
                    length,
                    midpoint: [0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1])],
                    start,
                    end,
                }
            })
            .collect();

        ElementGeometry { diameter, area, centroid, vertices, edges }
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|t| self.signed_area(t)).sum()
    }

    /// Mesh size: the largest element diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_elements())
            .map(|t| self.geometry(t).diameter)
            .fold(0.0, f64::max)
    }

    /// JSON dump with 0-based indices; edges are `[v0, v1, left, right]` with `right = -1` on the boundary.
    pub fn to_json(&self) -> Result<String> {
        let dump = MeshDump {
            vertices: &self.vertices,
            elements: &self.elements,
            edges: self
                .edges
                .iter()
                .map(|e| {
                    [
                        e.vertices[0] as i64,
                        e.vertices[1] as i64,
                        e.left as i64,
                        e.right.map_or(-1, |r| r as i64),
                    ]
                })
                .collect(),
        };
        Ok(serde_json::to_string(&dump)?)
    }
}

pub fn mesh_size(mesh: &Mesh) -> f64 {
    mesh.mesh_size()
}

/// Lattice of square cells of side `1/n` covering the domain.
struct CellGrid {
    origin: Point,
    cells_x: usize,
    cells_y: usize,
    width: f64,
    height: f64,
}

impl CellGrid {
    fn vertex(&self, i: usize, j: usize) -> Point {
        [self.origin[0] + i as f64 * self.width, self.origin[1] + j as f64 * self.height]
    }

    /// Emits the active cells as (lower-left index pair) plus a shared vertex table.
    fn build(&self, domain: Domain) -> (Vec<Point>, Vec<[usize; 4]>) {
        let mut index = vec![usize::MAX; (self.cells_x + 1) * (self.cells_y + 1)];
        let mut vertices = Vec::new();
        let mut quads = Vec::new();
        for j in 0..self.cells_y {
            for i in 0..self.cells_x {
                let lo = self.vertex(i, j);
                let hi = self.vertex(i + 1, j + 1);
                let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
                if !domain.contains(mid) {
                    continue;
                }
                let mut ids = [0usize; 4];
                for (slot, (di, dj)) in [(0, 0), (1, 0), (1, 1), (0, 1)].into_iter().enumerate() {
                    let key = (j + dj) * (self.cells_x + 1) + (i + di);
                    if index[key] == usize::MAX {
                        index[key] = vertices.len();
                        vertices.push(self.vertex(i + di, j + dj));
                    }
                    ids[slot] = index[key];
                }
                quads.push(ids);
            }
        }
        (vertices, quads)
    }
}

fn square_grid(domain: Domain, n_per_side: usize) -> Result<CellGrid> {
    if n_per_side == 0 {
        return Err(Error::Argument("n_per_side must be at least 1".into()));
    }
    let width = 1.0 / n_per_side as f64;
    Ok(match domain {
        Domain::UnitSquare => CellGrid {
            origin: [0.0, 0.0],
            cells_x: n_per_side,
            cells_y: n_per_side,
            width,
            height: width,
        },
        Domain::LShaped => CellGrid {
            origin: [-1.0, -1.0],
            cells_x: 2 * n_per_side,
            cells_y: 2 * n_per_side,
            width,
            height: width,
        },
    })
}

/// `n_per_side` cells per unit length, each square cut along its
/// lower-left to upper-right diagonal.
pub fn generate_uniform_triangular(domain: Domain, n_per_side: usize) -> Result<Mesh> {
    let grid = square_grid(domain, n_per_side)?;
    let (vertices, quads) = grid.build(domain);
    let mut elements = Vec::with_capacity(2 * quads.len());
    for [a, b, c, d] in quads {
        elements.push(vec![a, b, c]);
        elements.push(vec![a, c, d]);
    }
    Mesh::from_elements(domain, vertices, elements)
}

/// `n_per_side` axis-aligned squares per unit length.
pub fn generate_uniform_square(domain: Domain, n_per_side: usize) -> Result<Mesh> {
    let grid = square_grid(domain, n_per_side)?;
    let (vertices, quads) = grid.build(domain);
    Mesh::from_elements(domain, vertices, quads.into_iter().map(|q| q.to_vec()).collect())
}

/// `3*2^level` by `2*2^level` rectangles on the unit square.
pub fn generate_uniform_rectangular(level: u32) -> Result<Mesh> {
    if level > 12 {
        return Err(Error::Argument(format!("rectangular level {level} is unreasonably large")));
    }
    let f = 1usize << level;
    let grid = CellGrid {
        origin: [0.0, 0.0],
        cells_x: 3 * f,
        cells_y: 2 * f,
        width: 1.0 / (3 * f) as f64,
        height: 1.0 / (2 * f) as f64,
    };
    let (vertices, quads) = grid.build(Domain::UnitSquare);
    Mesh::from_elements(Domain::UnitSquare, vertices, quads.into_iter().map(|q| q.to_vec()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshKind {
    Triangular,
    Square,
    Rectangular,
}

impl MeshKind {
    /// `level` is cells per unit length for triangular/square meshes and the
    /// refinement level of the 3x2 partition for rectangular meshes.
    pub fn generate(self, domain: Domain, level: usize) -> Result<Mesh> {
        match self {
            MeshKind::Triangular => generate_uniform_triangular(domain, level),
            MeshKind::Square => generate_uniform_square(domain, level),
            MeshKind::Rectangular => {
                if domain != Domain::UnitSquare {
                    return Err(Error::Config("rectangular partitions exist only on the unit square".into()));
                }
                generate_uniform_rectangular(level as u32)
            }
        }
    }
}
