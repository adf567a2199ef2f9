//! Continuous Lagrange spaces on a mesh, patch subspaces and prolongations
//! between nested spaces.
//!
//! Local nodes sit on the equispaced barycentric lattice `α / p` with
//! `|α| = p`. Global numbering: vertex dofs first, then `p - 1` dofs per edge
//! ordered from the smaller to the larger vertex index, then interior dofs
//! element by element.

use alloc::vec;
use alloc::vec::Vec;

use crate::mesh::Mesh;
use crate::sparse::CsrMatrix;
use crate::{Error, Point, Result};

/// Nodal Lagrange basis of degree `p` on the reference triangle.
#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    degree: usize,
    /// Lattice multi-indices in local order: vertices, edges, interior.
    nodes: Vec<[usize; 3]>,
}

/// `g(t) = Π_{m<n} (p t - m) / (n - m)` with its first two derivatives.
#[inline]
fn lattice_factor(p: usize, n: usize, t: f64) -> (f64, f64, f64) {
    let (mut g, mut d1, mut d2) = (1.0, 0.0, 0.0);
    let pf = p as f64;
    for m in 0..n {
        let denom = (n - m) as f64;
        let a = (pf * t - m as f64) / denom;
        let da = pf / denom;
        d2 = d2 * a + 2.0 * d1 * da;
        d1 = d1 * a + g * da;
        g *= a;
    }
    (g, d1, d2)
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidDegree(degree));
        }
        let p = degree;
        let mut nodes = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
        // Local edge e joins local vertices e+1 and e+2; walk from e+1 to e+2.
        for e in 0..3 {
            for t in 1..p {
                let mut a = [0; 3];
                a[(e + 1) % 3] = p - t;
                a[(e + 2) % 3] = t;
                nodes.push(a);
            }
        }
        for i in 1..p {
            for j in 1..p - i {
                let k = p - i - j;
                if k >= 1 {
                    nodes.push([i, j, k]);
                }
            }
        }
        Ok(Self { degree, nodes })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[usize; 3]] {
        &self.nodes
    }

    /// Barycentric coordinates of local node `i`.
    pub fn node_barycentric(&self, i: usize) -> [f64; 3] {
        let p = self.degree as f64;
        let a = self.nodes[i];
        [a[0] as f64 / p, a[1] as f64 / p, a[2] as f64 / p]
    }

    pub fn eval(&self, lambda: [f64; 3], out: &mut [f64]) {
        for (o, a) in out.iter_mut().zip(&self.nodes) {
            *o = (0..3).map(|k| lattice_factor(self.degree, a[k], lambda[k]).0).product();
        }
    }

    /// Derivatives with respect to the three barycentric coordinates.
    pub fn grad_barycentric(&self, lambda: [f64; 3], out: &mut [[f64; 3]]) {
        for (o, a) in out.iter_mut().zip(&self.nodes) {
            let f: [(f64, f64, f64); 3] = core::array::from_fn(|k| lattice_factor(self.degree, a[k], lambda[k]));
            *o = [f[0].1 * f[1].0 * f[2].0, f[0].0 * f[1].1 * f[2].0, f[0].0 * f[1].0 * f[2].1];
        }
    }

    /// Second derivatives with respect to the barycentric coordinates.
    pub fn hessian_barycentric(&self, lambda: [f64; 3], out: &mut [[[f64; 3]; 3]]) {
        for (o, a) in out.iter_mut().zip(&self.nodes) {
            let f: [(f64, f64, f64); 3] = core::array::from_fn(|k| lattice_factor(self.degree, a[k], lambda[k]));
            for r in 0..3 {
                for c in 0..3 {
                    o[r][c] = (0..3)
                        .map(|k| {
                            let deriv = (k == r) as usize + (k == c) as usize;
                            match deriv {
                                0 => f[k].0,
                                1 => f[k].1,
                                _ => f[k].2,
                            }
                        })
                        .product();
                }
            }
        }
    }
}

/// Gradients of the barycentric coordinates of element `t` (constant on `t`).
pub fn barycentric_gradients(mesh: &Mesh, t: usize) -> [[f64; 2]; 3] {
    let [a, b, c] = mesh.corners(t);
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    [
        [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
        [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
    ]
}

/// Degree-of-freedom map of `S^p(T)` with the homogeneous Dirichlet mask.
#[derive(Clone, Debug)]
pub struct DofMap {
    degree: usize,
    n_dofs: usize,
    per_element: usize,
    element_dofs: Vec<usize>,
    dirichlet: Vec<bool>,
    free_index: Vec<Option<usize>>,
    free_dofs: Vec<usize>,
    nodal_points: Vec<Point>,
    basis: LagrangeBasis,
}

impl DofMap {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        let basis = LagrangeBasis::new(degree)?;
        let p = degree;
        let nv = mesh.n_vertices();
        let ne = mesh.n_edges();
        let nb = if p >= 3 { (p - 1) * (p - 2) / 2 } else { 0 };
        let n_dofs = nv + (p - 1) * ne + nb * mesh.n_triangles();
        let per_element = basis.len();

        let mut element_dofs = Vec::with_capacity(per_element * mesh.n_triangles());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            element_dofs.extend_from_slice(&tri.vertices);
            let te = mesh.triangle_edges(t);
            for (e, &g) in te.iter().enumerate() {
                let [a, b] = tri.edge_vertices(e);
                for s in 1..p {
                    // Local position s counts from a; global position from min(a, b).
                    let pos = if a < b { s - 1 } else { p - 1 - s };
                    element_dofs.push(nv + g * (p - 1) + pos);
                }
            }
            for s in 0..nb {
                element_dofs.push(nv + (p - 1) * ne + t * nb + s);
            }
        }

        let mut dirichlet = vec![false; n_dofs];
        for (v, vert) in mesh.vertices().iter().enumerate() {
            dirichlet[v] = vert.on_boundary;
        }
        for (g, edge) in mesh.edges().iter().enumerate() {
            if edge.is_boundary() {
                for s in 0..p - 1 {
                    dirichlet[nv + g * (p - 1) + s] = true;
                }
            }
        }
        let mut free_index = vec![None; n_dofs];
        let mut free_dofs = Vec::new();
        for (d, &is_dir) in dirichlet.iter().enumerate() {
            if !is_dir {
                free_index[d] = Some(free_dofs.len());
                free_dofs.push(d);
            }
        }

        let mut nodal_points = vec![[0.0; 2]; n_dofs];
        for t in 0..mesh.n_triangles() {
            let x = mesh.corners(t);
            for i in 0..per_element {
                let l = basis.node_barycentric(i);
                let d = element_dofs[t * per_element + i];
                nodal_points[d] = [
                    l[0] * x[0][0] + l[1] * x[1][0] + l[2] * x[2][0],
                    l[0] * x[0][1] + l[1] * x[1][1] + l[2] * x[2][1],
                ];
            }
        }

        Ok(Self { degree, n_dofs, per_element, element_dofs, dirichlet, free_index, free_dofs, nodal_points, basis })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn dofs_per_element(&self) -> usize {
        self.per_element
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        &self.element_dofs[t * self.per_element..(t + 1) * self.per_element]
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    /// Position of a global dof among the free dofs.
    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free_index[dof]
    }

    pub fn free_index_map(&self) -> &[Option<usize>] {
        &self.free_index
    }

    /// Global dof of every free index.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn nodal_point(&self, dof: usize) -> Point {
        self.nodal_points[dof]
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    /// Free-dof vector to a full coefficient vector with zero boundary values.
    pub fn expand(&self, free: &[f64]) -> Result<Vec<f64>> {
        if free.len() != self.n_free() {
            return Err(Error::DimensionMismatch { expected: self.n_free(), found: free.len() });
        }
        let mut full = vec![0.0; self.n_dofs];
        for (&d, &v) in self.free_dofs.iter().zip(free) {
            full[d] = v;
        }
        Ok(full)
    }

    /// Free part of a full coefficient vector.
    pub fn restrict(&self, full: &[f64]) -> Result<Vec<f64>> {
        if full.len() != self.n_dofs {
            return Err(Error::DimensionMismatch { expected: self.n_dofs, found: full.len() });
        }
        Ok(self.free_dofs.iter().map(|&d| full[d]).collect())
    }

    /// Nodal interpolant of `f` (boundary dofs included).
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.nodal_points.iter().map(|&x| f(x)).collect()
    }

    /// Value of the finite element function `coeffs` at barycentric point
    /// `lambda` of element `t`.
    pub fn evaluate(&self, t: usize, coeffs: &[f64], lambda: [f64; 3]) -> f64 {
        let mut phi = vec![0.0; self.per_element];
        self.basis.eval(lambda, &mut phi);
        self.element_dofs(t).iter().zip(&phi).map(|(&d, &v)| coeffs[d] * v).sum()
    }
}

/// Linear map from the coefficients of a coarse space into a nested fine space.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub source_level: usize,
    pub target_level: usize,
    /// `n_fine_dofs × n_coarse_dofs`, all dofs.
    pub matrix: CsrMatrix,
}

impl Prolongation {
    /// Evaluates the coarse basis at the fine nodal points. The fine mesh must
    /// be the coarse mesh itself or its direct refinement, and the coarse
    /// degree may not exceed the fine degree.
    pub fn build(coarse_mesh: &Mesh, coarse: &DofMap, fine_mesh: &Mesh, fine: &DofMap) -> Result<Self> {
        if coarse.degree > fine.degree {
            return Err(Error::NotNested(alloc::format!(
                "coarse degree {} exceeds fine degree {}",
                coarse.degree,
                fine.degree
            )));
        }
        let parent = fine_mesh.parent_map(coarse_mesh).map_err(|_| Error::NotNested("meshes are not parent and child".into()))?;
        let mut done = vec![false; fine.n_dofs];
        let mut trips = Vec::with_capacity(fine.n_dofs * 3);
        let mut phi = vec![0.0; coarse.per_element];
        for (f, &c) in parent.iter().enumerate() {
            let cdofs = coarse.element_dofs(c);
            for &d in fine.element_dofs(f) {
                if done[d] {
                    continue;
                }
                done[d] = true;
                let lambda = coarse_mesh.barycentric(c, fine.nodal_points[d]);
                coarse.basis.eval(lambda, &mut phi);
                for (&cd, &v) in cdofs.iter().zip(&phi) {
                    if libm::fabs(v) > 1e-12 {
                        trips.push((d, cd, v));
                    }
                }
            }
        }
        let matrix = CsrMatrix::from_triplets(fine.n_dofs, coarse.n_dofs, trips);
        Ok(Self { source_level: 0, target_level: 0, matrix })
    }

    pub fn with_levels(mut self, source: usize, target: usize) -> Self {
        self.source_level = source;
        self.target_level = target;
        self
    }

    /// Restriction to the free dofs of both spaces. Exact on `S^p_0`:
    /// dropped coarse columns carry zero boundary coefficients.
    pub fn free_matrix(&self, coarse: &DofMap, fine: &DofMap) -> CsrMatrix {
        self.matrix.select(&fine.free_index, &coarse.free_index, fine.n_free(), coarse.n_free())
    }

    /// `P_{a→c} = P_{b→c} ∘ P_{a→b}`.
    pub fn compose(first: &Prolongation, second: &Prolongation) -> Prolongation {
        Prolongation {
            source_level: first.source_level,
            target_level: second.target_level,
            matrix: second.matrix.matmul(&first.matrix),
        }
    }
}

/// Dofs of `S^q_0(T_z)`: basis functions supported in the patch of `z` that
/// vanish on the patch boundary and on ∂Ω.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchSubspace {
    pub center: usize,
    pub degree: usize,
    /// Global dof indices, sorted.
    pub interior_dofs: Vec<usize>,
}

impl PatchSubspace {
    pub fn new(mesh: &Mesh, dofs: &DofMap, z: usize) -> Result<Self> {
        if z >= mesh.n_vertices() {
            return Err(Error::InvalidVertex(z));
        }
        let p = dofs.degree;
        let nv = mesh.n_vertices();
        let mut out = Vec::new();
        if !mesh.vertices()[z].on_boundary {
            out.push(z);
        }
        for &t in mesh.vertex_elements(z) {
            let tri = mesh.triangles()[t];
            let local_z = tri.vertices.iter().position(|&v| v == z).unwrap();
            let te = mesh.triangle_edges(t);
            for (e, &g) in te.iter().enumerate() {
                // Edges through z are the two local edges not opposite z.
                if e == local_z || mesh.edges()[g].is_boundary() {
                    continue;
                }
                out.extend((0..p - 1).map(|s| nv + g * (p - 1) + s));
            }
            let edofs = dofs.element_dofs(t);
            out.extend_from_slice(&edofs[3 + 3 * (p - 1)..]);
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { center: z, degree: p, interior_dofs: out })
    }

    pub fn dim(&self) -> usize {
        self.interior_dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior_dofs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn unit_square() -> Mesh {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        Mesh::with_longest_edge_refinement(&pts, &[[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn basis_is_nodal() {
        for p in 1..=5 {
            let b = LagrangeBasis::new(p).unwrap();
            assert_eq!(b.len(), (p + 1) * (p + 2) / 2);
            let mut v = vec![0.0; b.len()];
            for i in 0..b.len() {
                b.eval(b.node_barycentric(i), &mut v);
                for (j, &x) in v.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((x - want).abs() < 1e-12, "p={p} node {i} basis {j}: {x}");
                }
            }
        }
    }

    #[test]
    fn barycentric_derivatives_match_finite_differences() {
        let b = LagrangeBasis::new(4).unwrap();
        let l = [0.2, 0.3, 0.5];
        let n = b.len();
        let mut g = vec![[0.0; 3]; n];
        let mut h = vec![[[0.0; 3]; 3]; n];
        b.grad_barycentric(l, &mut g);
        b.hessian_barycentric(l, &mut h);
        let eps = 1e-6;
        for k in 0..3 {
            let (mut lp, mut lm) = (l, l);
            lp[k] += eps;
            lm[k] -= eps;
            let (mut vp, mut vm) = (vec![0.0; n], vec![0.0; n]);
            b.eval(lp, &mut vp);
            b.eval(lm, &mut vm);
            let (mut gp, mut gm) = (vec![[0.0; 3]; n], vec![[0.0; 3]; n]);
            b.grad_barycentric(lp, &mut gp);
            b.grad_barycentric(lm, &mut gm);
            for i in 0..n {
                assert!(((vp[i] - vm[i]) / (2.0 * eps) - g[i][k]).abs() < 1e-6);
                for r in 0..3 {
                    assert!(((gp[i][r] - gm[i][r]) / (2.0 * eps) - h[i][r][k]).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn dof_counts_on_small_meshes() {
        let m = unit_square();
        let d1 = DofMap::new(&m, 1).unwrap();
        assert_eq!(d1.n_dofs(), 4);
        assert!(d1.dirichlet_mask().iter().all(|&b| b));
        let d2 = DofMap::new(&m, 2).unwrap();
        assert_eq!(d2.n_dofs(), 9);
        assert_eq!(d2.n_free(), 1);
        assert_eq!(d2.nodal_point(d2.free_dofs()[0]), [0.5, 0.5]);
        let tri = Mesh::with_longest_edge_refinement(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[[0, 1, 2]]).unwrap();
        assert_eq!(DofMap::new(&tri, 3).unwrap().n_dofs(), 10);
        assert_eq!(DofMap::new(&tri, 0).unwrap_err(), Error::InvalidDegree(0));
    }

    #[test]
    fn shared_edge_dofs_agree() {
        let m = unit_square().refine_uniform().unwrap();
        for p in 1..=4 {
            let d = DofMap::new(&m, p).unwrap();
            for t in 0..m.n_triangles() {
                for (i, &dof) in d.element_dofs(t).iter().enumerate() {
                    let l = d.basis().node_barycentric(i);
                    let [a, b, c] = m.corners(t);
                    let x = [l[0] * a[0] + l[1] * b[0] + l[2] * c[0], l[0] * a[1] + l[1] * b[1] + l[2] * c[1]];
                    let y = d.nodal_point(dof);
                    assert!((x[0] - y[0]).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn prolongation_identity_and_midpoint() {
        let m = unit_square();
        let d = DofMap::new(&m, 1).unwrap();
        let id = Prolongation::build(&m, &d, &m, &d).unwrap();
        assert_eq!(id.matrix.to_dense(), CsrMatrix::identity(4).to_dense());

        let f = m.refine_nvb(&[0]).unwrap();
        let df = DofMap::new(&f, 1).unwrap();
        let p = Prolongation::build(&m, &d, &f, &df).unwrap();
        let (cols, vals) = p.matrix.row(4);
        assert_eq!(cols, &[0, 2]);
        for v in vals {
            assert!((v - 0.5).abs() < 1e-15);
        }
        assert!(Prolongation::build(&f, &df, &m, &d).is_err());
    }

    #[test]
    fn p1_to_p2_rows() {
        let m = unit_square();
        let d1 = DofMap::new(&m, 1).unwrap();
        let d2 = DofMap::new(&m, 2).unwrap();
        let p = Prolongation::build(&m, &d1, &m, &d2).unwrap();
        for v in 0..4 {
            assert_eq!(p.matrix.row(v), (&[v][..], &[1.0][..]));
        }
        for (g, e) in m.edges().iter().enumerate() {
            let (cols, vals) = p.matrix.row(4 + g);
            assert_eq!(cols, &e.vertices);
            assert!(vals.iter().all(|v| (v - 0.5).abs() < 1e-15));
        }
    }

    #[test]
    fn patch_subspaces() {
        let m = unit_square().refine_uniform().unwrap();
        let center = (0..m.n_vertices()).find(|&v| m.point(v) == [0.5, 0.5]).unwrap();
        let d1 = DofMap::new(&m, 1).unwrap();
        assert_eq!(PatchSubspace::new(&m, &d1, center).unwrap().interior_dofs, vec![center]);
        assert!(PatchSubspace::new(&m, &d1, 0).unwrap().is_empty());
        let d2 = DofMap::new(&m, 2).unwrap();
        let ring = m.vertex_elements(center).len();
        let s = PatchSubspace::new(&m, &d2, center).unwrap();
        assert_eq!(s.dim(), 1 + ring);
        assert!(s.interior_dofs.iter().all(|&dof| !d2.dirichlet_mask()[dof]));
        assert_eq!(PatchSubspace::new(&m, &d2, 99).unwrap_err(), Error::InvalidVertex(99));
    }
}
