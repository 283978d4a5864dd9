//! Conforming triangulations of 2D polygonal domains.
//!
//! Structured meshes of the unit square are generated internally; any other
//! polygon enters through the plain-text mesh format (see [`Mesh::write_text`]).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Domain descriptor for the structured generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    #[default]
    UnitSquare,
}

/// A conforming triangulation with counterclockwise triangles and a set of
/// boundary nodes.
#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_nodes: Vec<usize>,
    on_boundary: Vec<bool>,
    h: f64,
}

/// Area and the constant gradients of the three P1 basis functions on one
/// triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub grad_bary: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn from_vertices(v: [Point; 3]) -> Self {
        let [p0, p1, p2] = v;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let grad_bary = [
            [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
            [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
            [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
        ];
        Self {
            area: 0.5 * det,
            grad_bary,
        }
    }
}

fn signed_area(v: [Point; 3]) -> f64 {
    let [p0, p1, p2] = v;
    0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl Mesh {
    /// Builds a mesh after checking orientation and edge conformity.
    pub fn new(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_nodes: Vec<usize>,
    ) -> Result<Self> {
        let n = nodes.len();
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        let mut on_boundary = vec![false; n];
        for &b in &boundary_nodes {
            if b >= n {
                return Err(Error::InvalidMesh(format!("boundary node {b} out of range")));
            }
            on_boundary[b] = true;
        }
        let mut h: f64 = 0.0;
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing node")));
            }
            let v = tri.map(|i| nodes[i]);
            if signed_area(v) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not counterclockwise or is degenerate"
                )));
            }
            for k in 0..3 {
                h = h.max(dist(v[k], v[(k + 1) % 3]));
            }
        }
        let mut boundary_nodes: Vec<usize> = boundary_nodes;
        boundary_nodes.sort_unstable();
        boundary_nodes.dedup();
        let mesh = Self {
            nodes,
            triangles,
            boundary_nodes,
            on_boundary,
            h,
        };
        for (edge, count) in mesh.edge_counts() {
            if count > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge {edge:?} is shared by {count} triangles"
                )));
            }
            if count == 1 && !(mesh.on_boundary[edge.0] && mesh.on_boundary[edge.1]) {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge {edge:?} has an endpoint outside the boundary set"
                )));
            }
        }
        Ok(mesh)
    }

    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.on_boundary[node]
    }

    /// Longest edge length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn vertices(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.nodes[i])
    }

    pub fn element_geometry(&self, t: usize) -> Result<ElementGeometry> {
        if t >= self.triangles.len() {
            return Err(Error::IndexOutOfRange {
                index: t,
                len: self.triangles.len(),
            });
        }
        Ok(ElementGeometry::from_vertices(self.vertices(t)))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| signed_area(self.vertices(t)))
            .sum()
    }

    /// Nodes on edges that belong to exactly one triangle.
    pub fn topological_boundary_nodes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edge_counts()
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .flat_map(|((a, b), _)| [a, b])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Copy of the mesh with every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if s <= 0.0 {
            return Err(Error::InvalidArgument(format!("scale factor {s} must be positive")));
        }
        Self::new(
            self.nodes.iter().map(|p| [p[0] * s, p[1] * s]).collect(),
            self.triangles.clone(),
            self.boundary_nodes.clone(),
        )
    }

    /// Serializes to the plain-text mesh format:
    ///
    /// ```text
    /// nodes <N> triangles <T>
    /// x y            (N lines)
    /// i j k          (T lines, 0-based)
    /// boundary <count>
    /// index          (count lines)
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nodes {} triangles {}", self.n_nodes(), self.n_triangles());
        for p in &self.nodes {
            let _ = writeln!(s, "{} {}", p[0], p[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "boundary {}", self.boundary_nodes.len());
        for b in &self.boundary_nodes {
            let _ = writeln!(s, "{b}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tok = Tokens(text.split_whitespace());
        tok.keyword("nodes")?;
        let n: usize = tok.parse()?;
        tok.keyword("triangles")?;
        let nt: usize = tok.parse()?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            nodes.push([tok.parse()?, tok.parse()?]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            triangles.push([tok.parse()?, tok.parse()?, tok.parse()?]);
        }
        tok.keyword("boundary")?;
        let nb: usize = tok.parse()?;
        let boundary = (0..nb).map(|_| tok.parse()).collect::<Result<Vec<usize>>>()?;
        Self::new(nodes, triangles, boundary)
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_text(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

struct Tokens<'a>(std::str::SplitWhitespace<'a>);

impl Tokens<'_> {
    fn word(&mut self) -> Result<&str> {
        self.0
            .next()
            .ok_or_else(|| Error::Parse("unexpected end of mesh file".into()))
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.word()? {
            w if w == kw => Ok(()),
            w => Err(Error::Parse(format!("expected `{kw}`, found `{w}`"))),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self) -> Result<T> {
        let w = self.word()?;
        w.parse().map_err(|_| Error::Parse(format!("cannot parse `{w}`")))
    }
}

/// Bucket grid over triangle bounding boxes for point location.
#[derive(Debug, Clone)]
pub struct PointLocator {
    origin: Point,
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl PointLocator {
    pub fn new(mesh: &Mesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in mesh.nodes() {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let side = (mesh.n_triangles() as f64).sqrt().ceil().max(1.0) as usize;
        let dims = [side, side];
        let cell = [
            ((hi[0] - lo[0]) / side as f64).max(f64::MIN_POSITIVE),
            ((hi[1] - lo[1]) / side as f64).max(f64::MIN_POSITIVE),
        ];
        let mut loc = Self {
            origin: lo,
            cell,
            dims,
            buckets: vec![Vec::new(); side * side],
        };
        for t in 0..mesh.n_triangles() {
            let v = mesh.vertices(t);
            let bl = [0, 1].map(|k| v.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min));
            let bh = [0, 1].map(|k| v.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max));
            let (i0, j0) = loc.cell_of(bl);
            let (i1, j1) = loc.cell_of(bh);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    loc.buckets[j * dims[0] + i].push(t);
                }
            }
        }
        loc
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let c = |k: usize| {
            let x = ((p[k] - self.origin[k]) / self.cell[k]).floor();
            (x.max(0.0) as usize).min(self.dims[k] - 1)
        };
        (c(0), c(1))
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in it.
    /// Points on shared edges resolve to any incident triangle.
    pub fn locate(&self, mesh: &Mesh, p: Point) -> Option<(usize, [f64; 3])> {
        let (i, j) = self.cell_of(p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.dims[0] + i] {
            let g = ElementGeometry::from_vertices(mesh.vertices(t));
            let v0 = mesh.nodes()[mesh.triangles()[t][0]];
            let d = [p[0] - v0[0], p[1] - v0[1]];
            let l1 = g.grad_bary[1][0] * d[0] + g.grad_bary[1][1] * d[1];
            let l2 = g.grad_bary[2][0] * d[0] + g.grad_bary[2][1] * d[1];
            let b = [1.0 - l1 - l2, l1, l2];
            let worst = b.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= -1e-12 {
                return Some((t, b));
            }
            if best.as_ref().is_none_or(|x| worst > x.2) {
                best = Some((t, b, worst));
            }
        }
        best.filter(|x| x.2 >= -1e-9).map(|x| (x.0, x.1))
    }
}

/// Structured mesh of the unit square: an `(n+1)×(n+1)` node grid, every
/// cell split along its lower-left to upper-right diagonal.
///
/// Node `(i, j)` has index `j*(n+1) + i` and sits at `(i/n, j/n)`.
pub fn build_structured_mesh(n: usize, domain: Domain) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidResolution(n));
    }
    let Domain::UnitSquare = domain;
    let m = n + 1;
    let idx = |i: usize, j: usize| j * m + i;
    let mut nodes = Vec::with_capacity(m * m);
    let mut boundary = Vec::new();
    for j in 0..m {
        for i in 0..m {
            nodes.push([i as f64 / n as f64, j as f64 / n as f64]);
            if i == 0 || j == 0 || i == n || j == n {
                boundary.push(idx(i, j));
            }
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Mesh::new(nodes, triangles, boundary)
}
