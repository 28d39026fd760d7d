//! Conforming triangulations of the disc and the unit square.
//!
//! The disc family starts from a fan of eight congruent triangles on a
//! regular inscribed octagon, so the disc center is a vertex on every level.
//! Uniform refinement splits each cell into four through its edge midpoints
//! and snaps midpoints of boundary edges radially onto the circle.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::{Error, Point, Result};

/// Largest refinement level accepted by the constructors.
pub const MAX_LEVEL: usize = 10;

/// Tolerance on barycentric coordinates used by point location.
pub const BARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Disc { center: Point, radius: f64 },
    UnitSquare,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    domain: Domain,
    level: usize,
    h: f64,
    // per cell, whether the edge opposite local vertex j lies on the boundary
    boundary_edges: Vec<[bool; 3]>,
}

impl Mesh {
    fn from_parts(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        domain: Domain,
        level: usize,
    ) -> Self {
        let mut mesh = Mesh {
            vertices,
            cells,
            boundary,
            domain,
            level,
            h: 0.0,
            boundary_edges: Vec::new(),
        };
        mesh.h = (0..mesh.n_cells())
            .map(|k| mesh.cell_diameter(k))
            .fold(0.0, f64::max);
        let counts = mesh.edge_counts();
        mesh.boundary_edges = mesh
            .cells
            .iter()
            .map(|c| {
                let opposite = |j: usize| edge_key(c[(j + 1) % 3], c[(j + 2) % 3]);
                [0, 1, 2].map(|j| counts[&opposite(j)] == 1)
            })
            .collect();
        mesh
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Maximal cell diameter (longest edge over all cells).
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_points(&self, k: usize) -> [Point; 3] {
        let [a, b, c] = self.cells[k];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of cell `k`; positive for counter-clockwise cells.
    pub fn signed_area(&self, k: usize) -> f64 {
        let [p0, p1, p2] = self.cell_points(k);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn cell_area(&self, k: usize) -> f64 {
        self.signed_area(k).abs()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_cells()).map(|k| self.cell_area(k)).sum()
    }

    /// Longest edge of cell `k`.
    pub fn cell_diameter(&self, k: usize) -> f64 {
        let [p0, p1, p2] = self.cell_points(k);
        dist(p0, p1).max(dist(p1, p2)).max(dist(p2, p0))
    }

    pub fn cell_centroid(&self, k: usize) -> Point {
        let [p0, p1, p2] = self.cell_points(k);
        [
            (p0[0] + p1[0] + p2[0]) / 3.0,
            (p0[1] + p1[1] + p2[1]) / 3.0,
        ]
    }

    /// Physical point with barycentric coordinates `bary` in cell `k`.
    pub fn map_to_cell(&self, k: usize, bary: [f64; 3]) -> Point {
        let [p0, p1, p2] = self.cell_points(k);
        [
            bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0],
            bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1],
        ]
    }

    /// Barycentric coordinates of `x` with respect to cell `k` (not clamped).
    pub fn barycentric(&self, k: usize, x: Point) -> [f64; 3] {
        let [p0, p1, p2] = self.cell_points(k);
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let dx = x[0] - p0[0];
        let dy = x[1] - p0[1];
        let l1 = (dx * (p2[1] - p0[1]) - dy * (p2[0] - p0[0])) / det;
        let l2 = ((p1[0] - p0[0]) * dy - (p1[1] - p0[1]) * dx) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Finds the lowest-index cell containing `x` together with the
    /// barycentric coordinates of `x` in that cell.
    pub fn locate_point(&self, x: Point) -> Result<(usize, [f64; 3])> {
        for k in 0..self.n_cells() {
            let bary = self.barycentric(k, x);
            if bary.iter().all(|&l| l >= -BARY_TOL) {
                return Ok((k, bary));
            }
        }
        Err(Error::PointNotFound { x: x[0], y: x[1] })
    }

    /// Whether `x` lies on the boundary of the triangulated domain (within
    /// the barycentric tolerance). Points outside the mesh count as boundary.
    pub fn on_boundary(&self, x: Point) -> bool {
        let cells = self.containing_cells(x);
        if cells.is_empty() {
            return true;
        }
        cells.iter().any(|&k| {
            let bary = self.barycentric(k, x);
            (0..3).any(|j| self.boundary_edges[k][j] && bary[j].abs() <= BARY_TOL)
        })
    }

    /// All cells containing `x`, in increasing index order.
    pub fn containing_cells(&self, x: Point) -> Vec<usize> {
        (0..self.n_cells())
            .filter(|&k| self.barycentric(k, x).iter().all(|&l| l >= -BARY_TOL))
            .collect()
    }

    /// Cells having `v` as one of their vertices.
    pub fn cells_around_vertex(&self, v: usize) -> Vec<usize> {
        (0..self.n_cells())
            .filter(|&k| self.cells[k].contains(&v))
            .collect()
    }

    /// Vertex located at `x` within `tol`, if any.
    pub fn find_vertex(&self, x: Point, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|&p| dist(p, x) <= tol)
    }

    /// `min_K |K| / h²`, the quasi-uniformity constant of this mesh.
    pub fn shape_constant(&self) -> f64 {
        let min_area = (0..self.n_cells())
            .map(|k| self.cell_area(k))
            .fold(f64::INFINITY, f64::min);
        min_area / (self.h * self.h)
    }

    /// Number of cells sharing each undirected edge.
    pub fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for cell in &self.cells {
            for (a, b) in cell_edges(cell) {
                *counts.entry(edge_key(a, b)).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Checks orientation, conformity, boundary flags, and boundary placement.
    pub fn audit(&self) -> std::result::Result<(), String> {
        for k in 0..self.n_cells() {
            let area = self.signed_area(k);
            if area <= 0.0 {
                return Err(format!("cell {k} has non-positive signed area {area:e}"));
            }
        }
        let counts = self.edge_counts();
        let mut on_boundary_edge = vec![false; self.n_vertices()];
        for (&(a, b), &n) in &counts {
            match n {
                1 => {
                    on_boundary_edge[a] = true;
                    on_boundary_edge[b] = true;
                }
                2 => {}
                _ => return Err(format!("edge ({a}, {b}) shared by {n} cells")),
            }
        }
        if on_boundary_edge != self.boundary {
            return Err("boundary flags do not match boundary edges".into());
        }
        for (v, &p) in self.vertices.iter().enumerate() {
            if !self.boundary[v] {
                continue;
            }
            match self.domain {
                Domain::Disc { center, radius } => {
                    let r = dist(p, center);
                    if (r - radius).abs() > 1e-12 {
                        return Err(format!("boundary vertex {v} at radius {r}"));
                    }
                }
                Domain::UnitSquare => {
                    let on_side = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
                    if !on_side {
                        return Err(format!("boundary vertex {v} off the square boundary"));
                    }
                }
            }
        }
        let observed = (0..self.n_cells())
            .map(|k| self.cell_diameter(k))
            .fold(0.0, f64::max);
        if observed != self.h {
            return Err(format!("stored h {} differs from {}", self.h, observed));
        }
        Ok(())
    }

    /// Text dump: `nv nc`, then `x y flag` per vertex, then `i j k` per cell.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n_vertices(), self.n_cells()).unwrap();
        for (p, &b) in self.vertices.iter().zip(&self.boundary) {
            writeln!(out, "{} {} {}", p[0], p[1], u8::from(b)).unwrap();
        }
        for c in &self.cells {
            writeln!(out, "{} {} {}", c[0], c[1], c[2]).unwrap();
        }
        out
    }

    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.dump().as_bytes())?;
        Ok(())
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn cell_edges(c: &[usize; 3]) -> [(usize, usize); 3] {
    [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])]
}

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::Capacity {
            level,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// Disc mesh of the given refinement level.
pub fn build_disc_mesh(center: Point, radius: f64, level: usize) -> Result<Mesh> {
    if !(radius > 0.0) {
        return Err(Error::Precondition(format!("radius must be positive, got {radius}")));
    }
    check_level(level)?;
    let mut vertices = vec![center];
    let mut boundary = vec![false];
    for k in 0..8 {
        let theta = k as f64 * std::f64::consts::FRAC_PI_4;
        vertices.push([
            center[0] + radius * theta.cos(),
            center[1] + radius * theta.sin(),
        ]);
        boundary.push(true);
    }
    let cells = (0..8).map(|k| [0, 1 + k, 1 + (k + 1) % 8]).collect();
    let mut mesh = Mesh::from_parts(
        vertices,
        cells,
        boundary,
        Domain::Disc { center, radius },
        0,
    );
    for _ in 0..level {
        mesh = refine_uniform(&mesh)?;
    }
    Ok(mesh)
}

/// Unit square split along its diagonal into two cells, then refined.
pub fn build_unit_square_mesh(level: usize) -> Result<Mesh> {
    check_level(level)?;
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let cells = vec![[0, 1, 2], [0, 2, 3]];
    let mut mesh = Mesh::from_parts(vertices, cells, vec![true; 4], Domain::UnitSquare, 0);
    for _ in 0..level {
        mesh = refine_uniform(&mesh)?;
    }
    Ok(mesh)
}

/// Splits every cell into four through its edge midpoints.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    check_level(mesh.level + 1)?;
    let counts = mesh.edge_counts();
    let mut vertices = mesh.vertices.clone();
    let mut boundary = mesh.boundary.clone();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::with_capacity(counts.len());
    let mut cells = Vec::with_capacity(4 * mesh.n_cells());

    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = edge_key(a, b);
        if let Some(&m) = midpoints.get(&key) {
            return m;
        }
        let (pa, pb) = (vertices[a], vertices[b]);
        let mut p = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        let on_boundary = counts[&key] == 1;
        if on_boundary {
            if let Domain::Disc { center, radius } = mesh.domain {
                let r = dist(p, center);
                p = [
                    center[0] + radius * (p[0] - center[0]) / r,
                    center[1] + radius * (p[1] - center[1]) / r,
                ];
            }
        }
        let m = vertices.len();
        vertices.push(p);
        boundary.push(on_boundary);
        midpoints.insert(key, m);
        m
    };

    for &[v0, v1, v2] in &mesh.cells {
        let m01 = midpoint(v0, v1, &mut vertices);
        let m12 = midpoint(v1, v2, &mut vertices);
        let m20 = midpoint(v2, v0, &mut vertices);
        cells.push([v0, m01, m20]);
        cells.push([m01, v1, m12]);
        cells.push([m20, m12, v2]);
        cells.push([m01, m12, m20]);
    }
    Ok(Mesh::from_parts(
        vertices,
        cells,
        boundary,
        mesh.domain,
        mesh.level + 1,
    ))
}
