//! Stiffness matrix `⟨K∇u, ∇v⟩` and load `⟨f, v⟩ + ⟨f_vec, ∇v⟩` on the free
//! dofs of a Lagrange space.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::mesh::Mesh;
use crate::quadrature::QuadratureRule;
use crate::space::{barycentric_gradients, DofMap, PatchSubspace};
use crate::sparse::{dot_compensated, CsrMatrix};
use crate::{Error, Point, Result};

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const IDENTITY: Sym2 = Sym2 { xx: 1.0, xy: 0.0, yy: 1.0 };

    pub fn scalar(c: f64) -> Self {
        Self { xx: c, xy: 0.0, yy: c }
    }

    #[inline]
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// Eigenvalues, smaller first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let r = libm::hypot(0.5 * (self.xx - self.yy), self.xy);
        (mean - r, mean + r)
    }

    pub fn is_spd(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite() && self.eigenvalues().0 > 0.0
    }
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxRegion {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl BoxRegion {
    pub fn contains(&self, p: Point) -> bool {
        self.x[0] <= p[0] && p[0] <= self.x[1] && self.y[0] <= p[1] && p[1] <= self.y[1]
    }
}

/// Diffusion coefficient, constant on every element. Piecewise values are
/// looked up at the element barycenter; the first matching region wins.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Identity,
    Piecewise(Vec<(BoxRegion, Sym2)>),
}

impl Coefficient {
    pub fn piecewise(regions: Vec<(BoxRegion, Sym2)>) -> Result<Self> {
        for (i, (_, k)) in regions.iter().enumerate() {
            if !k.is_spd() {
                return Err(Error::NonSpdCoefficient(i));
            }
        }
        Ok(Self::Piecewise(regions))
    }

    pub fn value_at(&self, p: Point) -> Result<Sym2> {
        match self {
            Self::Identity => Ok(Sym2::IDENTITY),
            Self::Piecewise(regions) => regions
                .iter()
                .find(|(r, _)| r.contains(p))
                .map(|(_, k)| *k)
                .ok_or(Error::UncoveredPoint(p[0], p[1])),
        }
    }

    pub fn on_element(&self, mesh: &Mesh, t: usize) -> Result<Sym2> {
        self.value_at(mesh.barycenter(t))
    }

    /// Smallest eigenvalue over Ω.
    pub fn lambda_min(&self) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Piecewise(r) => r.iter().map(|(_, k)| k.eigenvalues().0).fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest eigenvalue over Ω.
    pub fn lambda_max(&self) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Piecewise(r) => r.iter().map(|(_, k)| k.eigenvalues().1).fold(0.0, f64::max),
        }
    }
}

pub trait ScalarField: Sync {
    fn value(&self, p: Point) -> f64;
}

pub trait VectorField: Sync {
    fn value(&self, p: Point) -> [f64; 2];
    fn divergence(&self, p: Point) -> f64;
}

impl ScalarField for f64 {
    fn value(&self, _: Point) -> f64 {
        *self
    }
}

impl VectorField for [f64; 2] {
    fn value(&self, _: Point) -> [f64; 2] {
        *self
    }

    fn divergence(&self, _: Point) -> f64 {
        0.0
    }
}

/// Data of the model problem: coefficient `K`, source `f` and flux source `f_vec`.
pub struct ProblemData {
    pub coefficient: Coefficient,
    pub f: Box<dyn ScalarField>,
    pub f_vec: Box<dyn VectorField>,
}

impl ProblemData {
    pub fn new(coefficient: Coefficient, f: impl ScalarField + 'static, f_vec: impl VectorField + 'static) -> Self {
        Self { coefficient, f: Box::new(f), f_vec: Box::new(f_vec) }
    }
}

impl core::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ProblemData").field("coefficient", &self.coefficient).finish_non_exhaustive()
    }
}

/// Free-dof linear system of the discrete problem.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub stiffness: CsrMatrix,
    pub load: Vec<f64>,
}

/// Basis values and barycentric gradients tabulated at quadrature points.
pub(crate) struct ElementTables {
    pub rule: QuadratureRule,
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<[f64; 3]>>,
}

impl ElementTables {
    pub fn new(dofs: &DofMap, degree: usize) -> Self {
        let rule = QuadratureRule::for_degree(degree);
        let n = dofs.dofs_per_element();
        let basis = dofs.basis();
        let mut values = Vec::with_capacity(rule.len());
        let mut grads = Vec::with_capacity(rule.len());
        for &l in &rule.points {
            let mut v = vec![0.0; n];
            let mut g = vec![[0.0; 3]; n];
            basis.eval(l, &mut v);
            basis.grad_barycentric(l, &mut g);
            values.push(v);
            grads.push(g);
        }
        Self { rule, values, grads }
    }
}

#[inline]
pub(crate) fn physical_gradient(dl: &[f64; 3], gl: &[[f64; 2]; 3]) -> [f64; 2] {
    [
        dl[0] * gl[0][0] + dl[1] * gl[1][0] + dl[2] * gl[2][0],
        dl[0] * gl[0][1] + dl[1] * gl[1][1] + dl[2] * gl[2][1],
    ]
}

/// Dense element stiffness matrix (row major) for constant `k`.
pub fn element_stiffness(mesh: &Mesh, dofs: &DofMap, t: usize, k: Sym2) -> Vec<f64> {
    let tables = ElementTables::new(dofs, 2 * dofs.degree());
    element_stiffness_with(&tables, mesh, dofs.dofs_per_element(), t, k)
}

fn element_stiffness_with(tables: &ElementTables, mesh: &Mesh, n: usize, t: usize, k: Sym2) -> Vec<f64> {
    let gl = barycentric_gradients(mesh, t);
    let area = mesh.area(t);
    let mut local = vec![0.0; n * n];
    let mut g = vec![[0.0; 2]; n];
    let mut kg = vec![[0.0; 2]; n];
    for (q, &w) in tables.rule.weights.iter().enumerate() {
        for i in 0..n {
            g[i] = physical_gradient(&tables.grads[q][i], &gl);
            kg[i] = k.apply(g[i]);
        }
        let wq = w * area;
        for i in 0..n {
            for j in 0..=i {
                local[i * n + j] += wq * (kg[i][0] * g[j][0] + kg[i][1] * g[j][1]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            local[j * n + i] = local[i * n + j];
        }
    }
    local
}

/// Stiffness matrix over the free dofs.
pub fn assemble_stiffness(mesh: &Mesh, dofs: &DofMap, coefficient: &Coefficient) -> Result<CsrMatrix> {
    let n = dofs.dofs_per_element();
    let tables = ElementTables::new(dofs, 2 * dofs.degree());
    let mut trips = Vec::with_capacity(mesh.n_triangles() * n * n);
    for t in 0..mesh.n_triangles() {
        let k = coefficient.on_element(mesh, t)?;
        let local = element_stiffness_with(&tables, mesh, n, t, k);
        let ed = dofs.element_dofs(t);
        for i in 0..n {
            let Some(fi) = dofs.free_index(ed[i]) else { continue };
            for j in 0..n {
                if let Some(fj) = dofs.free_index(ed[j]) {
                    trips.push((fi, fj, local[i * n + j]));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(dofs.n_free(), dofs.n_free(), trips))
}

/// Load vector `F(φ_i) = ⟨f, φ_i⟩ + ⟨f_vec, ∇φ_i⟩` over the free dofs.
pub fn assemble_load(mesh: &Mesh, dofs: &DofMap, f: &dyn ScalarField, f_vec: &dyn VectorField) -> Vec<f64> {
    let n = dofs.dofs_per_element();
    let tables = ElementTables::new(dofs, dofs.degree() + 2);
    let mut load = vec![0.0; dofs.n_free()];
    let mut local = vec![0.0; n];
    for t in 0..mesh.n_triangles() {
        let gl = barycentric_gradients(mesh, t);
        let area = mesh.area(t);
        let x = mesh.corners(t);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in tables.rule.weights.iter().enumerate() {
            let l = tables.rule.points[q];
            let p = [
                l[0] * x[0][0] + l[1] * x[1][0] + l[2] * x[2][0],
                l[0] * x[0][1] + l[1] * x[1][1] + l[2] * x[2][1],
            ];
            let fv = f.value(p);
            let fvec = f_vec.value(p);
            for i in 0..n {
                let g = physical_gradient(&tables.grads[q][i], &gl);
                local[i] += w * area * (fv * tables.values[q][i] + fvec[0] * g[0] + fvec[1] * g[1]);
            }
        }
        for (i, &d) in dofs.element_dofs(t).iter().enumerate() {
            if let Some(fi) = dofs.free_index(d) {
                load[fi] += local[i];
            }
        }
    }
    load
}

/// Assembles the free-dof system of the discrete problem.
pub fn assemble(mesh: &Mesh, dofs: &DofMap, data: &ProblemData) -> Result<OperatorSet> {
    Ok(OperatorSet {
        stiffness: assemble_stiffness(mesh, dofs, &data.coefficient)?,
        load: assemble_load(mesh, dofs, data.f.as_ref(), data.f_vec.as_ref()),
    })
}

impl OperatorSet {
    pub fn n_free(&self) -> usize {
        self.load.len()
    }

    /// Energy inner product `uᵀ A v` of two free-dof vectors.
    pub fn energy_inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let n = self.n_free();
        for len in [u.len(), v.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        Ok(self.stiffness.bilinear(u, v))
    }

    pub fn energy_norm(&self, v: &[f64]) -> Result<f64> {
        Ok(libm::sqrt(self.energy_inner(v, v)?.max(0.0)))
    }

    /// `b - A u`, compensated against cancellation near the solution.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.stiffness.residual_compensated(&self.load, u)
    }

    /// `‖u* − v‖² − ‖u* − (v + d)‖² = 2 r(v)ᵀd − ‖d‖²` for the discrete
    /// solution `u*`, without forming `u*` or `v + d`.
    pub fn error_decrease_sq(&self, v: &[f64], d: &[f64]) -> f64 {
        let r = self.residual(v);
        let zero = vec![0.0; d.len()];
        // A d = −(0 − A d)
        let ad: Vec<f64> = self.stiffness.residual_compensated(&zero, d).into_iter().map(|x| -x).collect();
        2.0 * dot_compensated(&r, d) - dot_compensated(d, &ad)
    }

    /// Principal submatrix on the patch dofs (row major); empty for an empty
    /// subspace.
    pub fn patch_local_matrix(&self, dofs: &DofMap, sub: &PatchSubspace) -> Result<Vec<f64>> {
        let idx = free_indices(dofs, sub)?;
        Ok(self.stiffness.principal_submatrix(&idx))
    }
}

/// Free indices of the dofs of a patch subspace.
pub fn free_indices(dofs: &DofMap, sub: &PatchSubspace) -> Result<Vec<usize>> {
    sub.interior_dofs
        .iter()
        .map(|&d| dofs.free_index(d).ok_or_else(|| Error::Structural(alloc::format!("patch dof {d} is constrained"))))
        .collect()
}
