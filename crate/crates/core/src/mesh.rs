//! Conforming triangulations and newest vertex bisection (NVB).
//!
//! Every [`Triangle`] stores its vertices counter-clockwise together with the
//! local index of its refinement edge. Local edge `i` is the edge opposite
//! local vertex `i`, so the vertex opposite the refinement edge is the
//! "newest vertex" of the element.
//!
//! Refinement never renumbers existing vertices: the vertices of a coarse
//! mesh are a prefix of the vertices of any of its refinements. A refined mesh
//! records its parent mesh and, for every new element, the coarse element it
//! was cut from.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use hashbrown::HashMap;

use crate::{Error, Point, Result};

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
    pub on_boundary: bool,
}

impl Vertex {
    pub fn point(&self) -> Point {
        [self.x, self.y]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    /// Counter-clockwise vertex indices.
    pub vertices: [usize; 3],
    /// Local index of the refinement edge (the edge opposite `vertices[refinement_edge]`).
    pub refinement_edge: u8,
    /// Index of the initial-mesh element this triangle descends from.
    pub ancestor: usize,
}

impl Triangle {
    /// Global endpoints of local edge `i`.
    #[inline]
    pub fn edge_vertices(&self, i: usize) -> [usize; 2] {
        [self.vertices[(i + 1) % 3], self.vertices[(i + 2) % 3]]
    }

    pub fn contains_vertex(&self, z: usize) -> bool {
        self.vertices.contains(&z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    /// Adjacent elements; the second slot is `None` on the boundary.
    pub triangles: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }
}

/// Parent information of a refined mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Lineage {
    pub parent_id: u64,
    /// Coarse element each fine element was cut from.
    pub parent: Vec<usize>,
    pub coarse_vertex_count: usize,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    id: u64,
    vertices: Vec<Vertex>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
    triangle_edges: Vec<[usize; 3]>,
    patch_ptr: Vec<usize>,
    patch_elems: Vec<usize>,
    lineage: Option<Lineage>,
}

/// Elements sharing a vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub center: usize,
    pub elements: Vec<usize>,
    /// `max |T|^{1/2}` over the patch.
    pub domain_size: f64,
}

/// Vertices whose smoothing patch changed between two consecutive meshes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelDelta {
    pub new_vertices: Vec<usize>,
    pub shrunk_vertices: Vec<usize>,
    /// Sorted union of the two sets above.
    pub changed: Vec<usize>,
}

impl LevelDelta {
    /// On the initial mesh every vertex counts as changed.
    pub fn initial(mesh: &Mesh) -> Self {
        let all: Vec<usize> = (0..mesh.n_vertices()).collect();
        Self { new_vertices: all.clone(), shrunk_vertices: Vec::new(), changed: all }
    }
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}

fn sorted(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    /// Builds and validates a mesh. Boundary flags must agree with the
    /// topology: exactly the endpoints of boundary edges are flagged.
    pub fn new(vertices: Vec<Vertex>, triangles: Vec<Triangle>) -> Result<Self> {
        Self::build(vertices, triangles, None, true)
    }

    /// Builds a mesh from coordinates, deriving the boundary flags from the
    /// edge topology.
    pub fn from_coordinates(points: &[Point], triangles: Vec<Triangle>) -> Result<Self> {
        let vertices = points.iter().map(|p| Vertex { x: p[0], y: p[1], on_boundary: false }).collect();
        let mut mesh = Self::build(vertices, triangles, None, false)?;
        for e in &mesh.edges {
            if e.is_boundary() {
                for &v in &e.vertices {
                    mesh.vertices[v].on_boundary = true;
                }
            }
        }
        Ok(mesh)
    }

    /// Builds a mesh from coordinates and vertex triples, choosing the longest
    /// edge of every element as its refinement edge (ties go to the edge whose
    /// opposite vertex has the smallest index). Triples are reoriented
    /// counter-clockwise.
    pub fn with_longest_edge_refinement(points: &[Point], triples: &[[usize; 3]]) -> Result<Self> {
        let mut triangles = Vec::with_capacity(triples.len());
        for (t, tri) in triples.iter().enumerate() {
            let mut v = *tri;
            for &i in &v {
                if i >= points.len() {
                    return Err(Error::InvalidVertex(i));
                }
            }
            if signed_area(points[v[0]], points[v[1]], points[v[2]]) < 0.0 {
                v.swap(1, 2);
            }
            let len = |i: usize| dist(points[v[(i + 1) % 3]], points[v[(i + 2) % 3]]);
            let mut best = 0;
            for i in 1..3 {
                let (li, lb) = (len(i), len(best));
                if li > lb * (1.0 + 1e-12) || (libm::fabs(li - lb) <= 1e-12 * lb && v[i] < v[best]) {
                    best = i;
                }
            }
            triangles.push(Triangle { vertices: v, refinement_edge: best as u8, ancestor: t });
        }
        Self::from_coordinates(points, triangles)
    }

    fn build(vertices: Vec<Vertex>, triangles: Vec<Triangle>, lineage: Option<Lineage>, check_flags: bool) -> Result<Self> {
        let nv = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if !v.x.is_finite() || !v.y.is_finite() {
                return Err(Error::Structural(format!("vertex {i} has non-finite coordinates")));
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = tri.vertices;
            if a >= nv || b >= nv || c >= nv {
                return Err(Error::Structural(format!("element {t} references a missing vertex")));
            }
            if a == b || b == c || a == c {
                return Err(Error::Structural(format!("element {t} has repeated vertices")));
            }
            if tri.refinement_edge > 2 {
                return Err(Error::Structural(format!("element {t} has refinement edge {}", tri.refinement_edge)));
            }
            let area = signed_area(vertices[a].point(), vertices[b].point(), vertices[c].point());
            if !(area > 0.0) {
                return Err(Error::Structural(format!("element {t} has non-positive signed area {area}")));
            }
        }

        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 2);
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            for (i, slot) in te.iter_mut().enumerate() {
                let [a, b] = tri.edge_vertices(i);
                let key = sorted(a, b);
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: [key.0, key.1], triangles: [None, None] });
                    edges.len() - 1
                });
                let edge = &mut edges[e];
                match edge.triangles {
                    [None, _] => edge.triangles[0] = Some(t),
                    [Some(first), None] => {
                        // Neighbors must traverse a shared edge in opposite directions.
                        let other = &triangles[first];
                        let k = (0..3).find(|&k| sorted(other.edge_vertices(k)[0], other.edge_vertices(k)[1]) == key).unwrap();
                        if other.edge_vertices(k) == [a, b] {
                            return Err(Error::Structural(format!("elements {first} and {t} are inconsistently oriented")));
                        }
                        edge.triangles[1] = Some(t);
                    }
                    _ => {
                        return Err(Error::Structural(format!("edge ({}, {}) has more than two elements", key.0, key.1)));
                    }
                }
                *slot = e;
            }
            triangle_edges.push(te);
        }

        // A boundary edge whose midpoint is a vertex is a hanging node.
        let mut by_coords: HashMap<(u64, u64), usize> = HashMap::with_capacity(nv);
        for (i, v) in vertices.iter().enumerate() {
            by_coords.insert((v.x.to_bits(), v.y.to_bits()), i);
        }
        for e in edges.iter().filter(|e| e.is_boundary()) {
            let [a, b] = e.vertices;
            let mx = 0.5 * (vertices[a].x + vertices[b].x);
            let my = 0.5 * (vertices[a].y + vertices[b].y);
            if let Some(&h) = by_coords.get(&(mx.to_bits(), my.to_bits())) {
                return Err(Error::Structural(format!("hanging vertex {h} on edge ({a}, {b})")));
            }
        }

        if check_flags {
            let mut on_bdry = vec![false; nv];
            for e in edges.iter().filter(|e| e.is_boundary()) {
                on_bdry[e.vertices[0]] = true;
                on_bdry[e.vertices[1]] = true;
            }
            for (i, v) in vertices.iter().enumerate() {
                if v.on_boundary != on_bdry[i] {
                    return Err(Error::Structural(format!("boundary flag of vertex {i} disagrees with the topology")));
                }
            }
        }

        let mut patch_ptr = vec![0usize; nv + 1];
        for tri in &triangles {
            for &v in &tri.vertices {
                patch_ptr[v + 1] += 1;
            }
        }
        for i in 0..nv {
            patch_ptr[i + 1] += patch_ptr[i];
        }
        let mut fill = patch_ptr.clone();
        let mut patch_elems = vec![0usize; patch_ptr[nv]];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in &tri.vertices {
                patch_elems[fill[v]] = t;
                fill[v] += 1;
            }
        }

        Ok(Self { id: fresh_id(), vertices, triangles, edges, triangle_edges, patch_ptr, patch_elems, lineage })
    }

    /// Unique identity used to check parent/child relations.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn lineage(&self) -> Option<&Lineage> {
        self.lineage.as_ref()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Global edge indices of the three local edges of element `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn point(&self, v: usize) -> Point {
        self.vertices[v].point()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t].vertices;
        [self.point(a), self.point(b), self.point(c)]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    /// Element size `h_T = |T|^{1/2}`.
    pub fn element_size(&self, t: usize) -> f64 {
        libm::sqrt(self.area(t))
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        dist(a, b).max(dist(b, c)).max(dist(a, c))
    }

    pub fn barycenter(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Elements containing vertex `z`, in increasing order.
    pub fn vertex_elements(&self, z: usize) -> &[usize] {
        &self.patch_elems[self.patch_ptr[z]..self.patch_ptr[z + 1]]
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn patch(&self, z: usize) -> Result<Patch> {
        if z >= self.n_vertices() {
            return Err(Error::InvalidVertex(z));
        }
        let elements = self.vertex_elements(z).to_vec();
        let domain_size = elements.iter().map(|&t| self.element_size(t)).fold(0.0, f64::max);
        Ok(Patch { center: z, elements, domain_size })
    }

    /// `max_T diam(T) / |T|^{1/2}`.
    pub fn shape_regularity(&self) -> Result<f64> {
        let mut gamma: f64 = 0.0;
        for t in 0..self.n_triangles() {
            let area = self.area(t);
            if !(area > 0.0) {
                return Err(Error::Structural(format!("element {t} is degenerate")));
            }
            gamma = gamma.max(self.diameter(t) / libm::sqrt(area));
        }
        Ok(gamma)
    }

    /// NVB refinement: every marked element is bisected at least once and the
    /// minimal closure keeps the mesh conforming.
    pub fn refine_nvb(&self, marked: &[usize]) -> Result<Mesh> {
        let mut edge_marked = vec![false; self.n_edges()];
        let mut stack = Vec::with_capacity(marked.len());
        for &t in marked {
            if t >= self.n_triangles() {
                return Err(Error::InvalidElement(t));
            }
            let e = self.triangle_edges[t][self.triangles[t].refinement_edge as usize];
            if !edge_marked[e] {
                edge_marked[e] = true;
                stack.push(e);
            }
        }
        self.close_marking(&mut edge_marked, stack);
        self.bisect_marked_edges(&edge_marked)
    }

    /// Bisects every edge once, so each element is split into four.
    pub fn refine_uniform(&self) -> Result<Mesh> {
        self.bisect_marked_edges(&vec![true; self.n_edges()])
    }

    /// Propagates edge marks: any element with a marked edge must also have
    /// its refinement edge marked. Each edge is pushed at most once.
    fn close_marking(&self, edge_marked: &mut [bool], mut stack: Vec<usize>) {
        while let Some(e) = stack.pop() {
            for t in self.edges[e].triangles.into_iter().flatten() {
                let r = self.triangle_edges[t][self.triangles[t].refinement_edge as usize];
                if !edge_marked[r] {
                    edge_marked[r] = true;
                    stack.push(r);
                }
            }
        }
    }

    fn bisect_marked_edges(&self, edge_marked: &[bool]) -> Result<Mesh> {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge_marked[e] {
                let [a, b] = edge.vertices;
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                vertices.push(Vertex {
                    x: 0.5 * (pa.x + pb.x),
                    y: 0.5 * (pa.y + pb.y),
                    on_boundary: edge.is_boundary(),
                });
                midpoint.insert((a, b), vertices.len() - 1);
            }
        }
        let mut triangles = Vec::with_capacity(self.n_triangles() + 2 * midpoint.len());
        let mut parent = Vec::with_capacity(triangles.capacity());
        for (t, tri) in self.triangles.iter().enumerate() {
            let before = triangles.len();
            bisect_recursive(*tri, &midpoint, &mut triangles);
            parent.resize(triangles.len(), t);
            debug_assert!(triangles.len() > before);
        }
        let lineage = Lineage { parent_id: self.id, parent, coarse_vertex_count: self.n_vertices() };
        Self::build(vertices, triangles, Some(lineage), false)
    }

    /// Changed-vertex set between `coarse` and its one-step refinement `fine`:
    /// new vertices plus surviving vertices whose patch subdomain shrank.
    pub fn level_delta(coarse: &Mesh, fine: &Mesh) -> Result<LevelDelta> {
        if coarse.id == fine.id {
            return Ok(LevelDelta { new_vertices: Vec::new(), shrunk_vertices: Vec::new(), changed: Vec::new() });
        }
        let lineage = fine.lineage.as_ref().filter(|l| l.parent_id == coarse.id).ok_or(Error::Lineage)?;
        let nc = coarse.n_vertices();
        let new_vertices: Vec<usize> = (nc..fine.n_vertices()).collect();
        // The fine patch of a surviving vertex z covers a coarse element T ∋ z
        // iff every descendant of T still contains z.
        let mut shrunk = vec![false; nc];
        for (f, tri) in fine.triangles.iter().enumerate() {
            let coarse_tri = &coarse.triangles[lineage.parent[f]];
            for &z in &coarse_tri.vertices {
                if !tri.contains_vertex(z) {
                    shrunk[z] = true;
                }
            }
        }
        let shrunk_vertices: Vec<usize> = (0..nc).filter(|&z| shrunk[z]).collect();
        let mut changed = shrunk_vertices.clone();
        changed.extend_from_slice(&new_vertices);
        Ok(LevelDelta { new_vertices, shrunk_vertices, changed })
    }

    /// Maps every fine element to the element of `coarse` containing it.
    /// `coarse` must be `self` or its direct parent.
    pub fn parent_map(&self, coarse: &Mesh) -> Result<Vec<usize>> {
        if coarse.id == self.id {
            return Ok((0..self.n_triangles()).collect());
        }
        match &self.lineage {
            Some(l) if l.parent_id == coarse.id => Ok(l.parent.clone()),
            _ => Err(Error::Lineage),
        }
    }

    /// Barycentric coordinates of `p` with respect to element `t`.
    pub fn barycentric(&self, t: usize, p: Point) -> [f64; 3] {
        let [a, b, c] = self.corners(t);
        let area = signed_area(a, b, c);
        let l1 = signed_area(a, p, c) / area;
        let l2 = signed_area(a, b, p) / area;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Full structural check: orientation, edge multiplicity, hanging nodes
    /// and boundary flags.
    pub fn validate(&self) -> Result<()> {
        Self::build(self.vertices.clone(), self.triangles.clone(), None, true).map(|_| ())
    }
}

fn bisect_recursive(tri: Triangle, midpoint: &HashMap<(usize, usize), usize>, out: &mut Vec<Triangle>) {
    let r = tri.refinement_edge as usize;
    let [e1, e2] = tri.edge_vertices(r);
    match midpoint.get(&sorted(e1, e2)) {
        None => out.push(tri),
        Some(&m) => {
            let n = tri.vertices[r];
            // (n, e1, e2) is a rotation of the counter-clockwise vertex list.
            let left = Triangle { vertices: [n, e1, m], refinement_edge: 2, ancestor: tri.ancestor };
            let right = Triangle { vertices: [n, m, e2], refinement_edge: 1, ancestor: tri.ancestor };
            bisect_recursive(left, midpoint, out);
            bisect_recursive(right, midpoint, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_square() -> Mesh {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        Mesh::with_longest_edge_refinement(&pts, &[[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn longest_edge_is_the_diagonal() {
        let m = unit_square();
        for t in m.triangles() {
            let [a, b] = t.edge_vertices(t.refinement_edge as usize);
            assert_eq!(sorted(a, b), (0, 2));
        }
        assert!(m.vertices().iter().all(|v| v.on_boundary));
    }

    #[test]
    fn empty_marking_keeps_the_mesh() {
        let m = unit_square();
        let f = m.refine_nvb(&[]).unwrap();
        assert_eq!(f.n_vertices(), m.n_vertices());
        assert_eq!(f.triangles(), m.triangles());
        let d = Mesh::level_delta(&m, &f).unwrap();
        assert!(d.changed.is_empty());
    }

    #[test]
    fn bisecting_one_square_half_closes_through_the_diagonal() {
        let m = unit_square();
        let f = m.refine_nvb(&[0]).unwrap();
        assert_eq!(f.n_triangles(), 4);
        assert_eq!(f.n_vertices(), 5);
        assert_eq!(f.point(4), [0.5, 0.5]);
        assert!(!f.vertices()[4].on_boundary);
        let d = Mesh::level_delta(&m, &f).unwrap();
        assert_eq!(d.new_vertices, vec![4]);
        assert_eq!(d.shrunk_vertices, vec![0, 2]);
        assert_eq!(d.changed, vec![0, 2, 4]);
    }

    #[test]
    fn delta_of_identical_mesh_is_empty() {
        let m = unit_square();
        assert!(Mesh::level_delta(&m, &m).unwrap().changed.is_empty());
    }

    #[test]
    fn delta_rejects_unrelated_meshes() {
        let a = unit_square();
        let b = unit_square().refine_nvb(&[1]).unwrap();
        assert_eq!(Mesh::level_delta(&a, &b), Err(Error::Lineage));
    }

    #[test]
    fn uniform_refinement_changes_every_vertex() {
        let m = unit_square();
        let f = m.refine_uniform().unwrap();
        assert_eq!(f.n_triangles(), 8);
        let d = Mesh::level_delta(&m, &f).unwrap();
        assert_eq!(d.changed, (0..f.n_vertices()).collect::<Vec<_>>());
    }

    #[test]
    fn patch_queries() {
        let m = unit_square();
        assert_eq!(m.patch(0).unwrap().elements, vec![0, 1]);
        assert_eq!(m.patch(1).unwrap().elements, vec![0]);
        assert!((m.patch(1).unwrap().domain_size - libm::sqrt(0.5)).abs() < 1e-15);
        assert_eq!(m.patch(7), Err(Error::InvalidVertex(7)));
    }

    #[test]
    fn shape_regularity_of_reference_triangles() {
        let right = Mesh::with_longest_edge_refinement(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[[0, 1, 2]]).unwrap();
        assert!((right.shape_regularity().unwrap() - 2.0).abs() < 1e-14);
        let s3 = libm::sqrt(3.0);
        let eq = Mesh::with_longest_edge_refinement(&[[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]], &[[0, 1, 2]]).unwrap();
        let expected = 1.0 / libm::sqrt(s3 / 4.0);
        assert!((eq.shape_regularity().unwrap() - expected).abs() < 1e-14);
        assert!((expected - 1.5197).abs() < 1e-4);
    }

    #[test]
    fn rejects_broken_input() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let cw = Triangle { vertices: [0, 2, 1], refinement_edge: 0, ancestor: 0 };
        assert!(matches!(Mesh::from_coordinates(&pts, vec![cw]), Err(Error::Structural(_))));
        let ok = Triangle { vertices: [0, 1, 2], refinement_edge: 0, ancestor: 0 };
        let bad_flags = pts.iter().map(|p| Vertex { x: p[0], y: p[1], on_boundary: false }).collect();
        assert!(matches!(Mesh::new(bad_flags, vec![ok]), Err(Error::Structural(_))));
        assert_eq!(unit_square().refine_nvb(&[5]).unwrap_err(), Error::InvalidElement(5));
    }

    #[test]
    fn rejects_hanging_vertex() {
        // Left half bisected at (0.5, 0.5), right half left intact.
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let tris = vec![
            Triangle { vertices: [0, 1, 2], refinement_edge: 1, ancestor: 0 },
            Triangle { vertices: [3, 0, 4], refinement_edge: 2, ancestor: 1 },
            Triangle { vertices: [3, 4, 2], refinement_edge: 1, ancestor: 1 },
        ];
        assert!(matches!(Mesh::from_coordinates(&pts, tris), Err(Error::Structural(_))));
    }
}
