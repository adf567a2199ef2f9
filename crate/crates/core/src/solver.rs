//! Local geometric multigrid on an NVB mesh hierarchy.
//!
//! One step from an iterate `u` on the finest space:
//!
//! 1. exact lowest-order correction `ρ_0` on the initial mesh, `λ_0 = 1`;
//! 2. on every level `ℓ = 1, …, L`, additive patch corrections `ρ_ℓ = Σ_z ρ_{ℓ,z}`
//!    over the smoothing set `N_ℓ`, driven by the residual of the lifting
//!    `σ_{ℓ-1}` accumulated so far, followed by a line search `s_ℓ`;
//! 3. `Φ(u) = u + σ_L` together with the algebraic error estimate
//!    `ζ² = ‖ρ_0‖² + Σ_ℓ λ_ℓ Σ_z ‖ρ_{ℓ,z}‖²`.
//!
//! Smoothing sets: the changed vertices `V_ℓ⁺` on intermediate levels and on
//! the finest level for `p = 1`; every vertex on the finest level for `p > 1`.
//! Intermediate levels use hat functions, so every local solve is scalar.
//!
//! The lifting is carried level by level: `σ_{ℓ-1}` is prolongated to level
//! `ℓ` and its residual is formed there against the finest residual restricted
//! through the transposed prolongations. The level stiffness matrices are the
//! Galerkin restrictions of the finest one (nested spaces, exact quadrature,
//! `K` constant per element), so this equals evaluating everything on the
//! finest space.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{assemble, assemble_stiffness, free_indices, Coefficient, OperatorSet, ProblemData};
use crate::direct::Cholesky;
use crate::mesh::Mesh;
use crate::space::{DofMap, PatchSubspace, Prolongation};
use crate::sparse::{dot, CsrMatrix, DenseCholesky};
use crate::{Error, Result, DIM};

/// Upper step size before damping kicks in, `d + 1`.
pub const STEP_CAP: f64 = (DIM + 1) as f64;

/// Default bound on solver steps per level.
pub const DEFAULT_ITERATION_CAP: usize = 100;

/// Per-level telemetry of one solver step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelStats {
    /// Mesh level.
    pub level: usize,
    /// Polynomial degree of the local spaces.
    pub degree: usize,
    pub lambda: f64,
    pub s: f64,
    /// `‖ρ_ℓ‖²`.
    pub rho_norm_sq: f64,
    /// `Σ_z ‖ρ_{ℓ,z}‖²`.
    pub local_norm_sq: f64,
    /// The step was damped to `1/(d+1)`.
    pub damped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    /// `Φ(u)` on the free dofs of the finest space.
    pub iterate: Vec<f64>,
    /// The correction `σ_L`; `iterate` is `u + σ_L` rounded.
    pub correction: Vec<f64>,
    pub zeta: f64,
    pub levels: Vec<LevelStats>,
}

impl StepResult {
    pub fn damping_triggered(&self) -> bool {
        self.levels.iter().any(|l| l.damped)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub iterate: Vec<f64>,
    pub iterations: usize,
    pub zeta_history: Vec<f64>,
}

/// Lowest-order space on one mesh of the chain.
#[derive(Debug)]
struct P1Level {
    dofs: DofMap,
    stiffness: CsrMatrix,
    diag: Vec<f64>,
    /// Free indices of the smoothing vertices (empty on level 0).
    smoothing: Vec<usize>,
    /// Free-dof prolongation into the next lowest-order level; `None` on the
    /// last one, which feeds the finest space.
    to_next: Option<CsrMatrix>,
}

#[derive(Debug)]
enum FinestSmoother {
    /// `p = 1`, `L = 0`: the coarse solve is exact.
    None,
    /// `p = 1`, scalar patches with capped step size.
    Jacobi { smoothing: Vec<usize>, diag: Vec<f64> },
    /// `p > 1`, one dense block per vertex patch, uncapped step size.
    Blocks(Vec<(Vec<usize>, DenseCholesky)>),
}

/// Spaces, operators and factorizations for the meshes `T_0, …, T_L`.
#[derive(Debug)]
pub struct SolverHierarchy {
    degree: usize,
    coefficient: Coefficient,
    meshes: Vec<Mesh>,
    chain: Vec<P1Level>,
    coarse: Cholesky,
    /// Free-dof map from the last chain level into the finest space; `None`
    /// when they coincide.
    to_finest: Option<CsrMatrix>,
    finest_dofs: DofMap,
    finest: OperatorSet,
    smoother: FinestSmoother,
}

impl SolverHierarchy {
    /// Hierarchy with the single mesh `T_0`.
    pub fn new(mesh: Mesh, degree: usize, data: &ProblemData) -> Result<Self> {
        let p1 = DofMap::new(&mesh, 1)?;
        let a0 = assemble_stiffness(&mesh, &p1, &data.coefficient)?;
        let coarse = Cholesky::factor(&a0)?;
        let diag = a0.diagonal();
        let chain = vec![P1Level { dofs: p1, stiffness: a0, diag, smoothing: Vec::new(), to_next: None }];
        let meshes = vec![mesh];
        let (to_finest, finest_dofs, finest, smoother) = finest_parts(&meshes, &chain, degree, data)?;
        Ok(Self {
            degree,
            coefficient: data.coefficient.clone(),
            meshes,
            chain,
            coarse,
            to_finest,
            finest_dofs,
            finest,
            smoother,
        })
    }

    /// Hierarchy over an NVB chain `T_0, …, T_L`.
    pub fn build(meshes: Vec<Mesh>, degree: usize, data: &ProblemData) -> Result<Self> {
        let mut it = meshes.into_iter();
        let first = it.next().ok_or_else(|| Error::InvalidParameter("empty mesh chain".into()))?;
        let mut h = Self::new(first, degree, data)?;
        for m in it {
            h.push_level(m, data)?;
        }
        Ok(h)
    }

    /// Appends a refinement of the current finest mesh. Levels below the old
    /// finest one are reused.
    pub fn push_level(&mut self, mesh: Mesh, data: &ProblemData) -> Result<()> {
        let old = self.meshes.last().unwrap();
        mesh.parent_map(old)?;
        let l = self.meshes.len() - 1;
        if l >= 1 {
            // The old finest mesh joins the lowest-order chain.
            let old_mesh = &self.meshes[l];
            let dofs = DofMap::new(old_mesh, 1)?;
            let stiffness = if self.degree == 1 {
                self.finest.stiffness.clone()
            } else {
                assemble_stiffness(old_mesh, &dofs, &self.coefficient)?
            };
            let smoothing = changed_free_vertices(&self.meshes[l - 1], old_mesh, &dofs)?;
            let prev = self.chain.last_mut().unwrap();
            prev.to_next =
                Some(Prolongation::build(&self.meshes[l - 1], &prev.dofs, old_mesh, &dofs)?.free_matrix(&prev.dofs, &dofs));
            let diag = stiffness.diagonal();
            self.chain.push(P1Level { dofs, stiffness, diag, smoothing, to_next: None });
        }
        self.meshes.push(mesh);
        self.rebuild_finest(data)
    }

    fn rebuild_finest(&mut self, data: &ProblemData) -> Result<()> {
        let (to_finest, dofs, ops, smoother) = finest_parts(&self.meshes, &self.chain, self.degree, data)?;
        self.to_finest = to_finest;
        self.finest_dofs = dofs;
        self.finest = ops;
        self.smoother = smoother;
        Ok(())
    }

    /// Number of the finest level `L`.
    pub fn finest_level(&self) -> usize {
        self.meshes.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mesh(&self, level: usize) -> &Mesh {
        &self.meshes[level]
    }

    pub fn meshes(&self) -> &[Mesh] {
        &self.meshes
    }

    pub fn finest_mesh(&self) -> &Mesh {
        self.meshes.last().unwrap()
    }

    pub fn finest_dofs(&self) -> &DofMap {
        &self.finest_dofs
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.finest
    }

    pub fn n_free(&self) -> usize {
        self.finest.n_free()
    }

    /// Vertices smoothed on the levels `1, …, L` (and on the finest level
    /// when `L = 0`, `p > 1`). Boundary vertices are left out on the
    /// lowest-order levels since their patch spaces are empty.
    pub fn smoothing_sets(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for lvl in self.chain.iter().skip(1) {
            out.push(lvl.smoothing.iter().map(|&i| lvl.dofs.free_dofs()[i]).collect());
        }
        match &self.smoother {
            FinestSmoother::None => {}
            FinestSmoother::Jacobi { smoothing, .. } => {
                out.push(smoothing.iter().map(|&i| self.finest_dofs.free_dofs()[i]).collect())
            }
            FinestSmoother::Blocks(_) => out.push((0..self.finest_mesh().n_vertices()).collect()),
        }
        out
    }

    /// `b − A u` on the finest space.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(self.finest.residual(u))
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n_free() {
            return Err(Error::DimensionMismatch { expected: self.n_free(), found: u.len() });
        }
        Ok(())
    }

    /// One multigrid step `u ↦ Φ(u)` with its estimate `ζ(u)`.
    pub fn mg_step(&self, u: &[f64]) -> Result<StepResult> {
        self.check(u)?;
        let r_fine = self.finest.residual(u);

        // Restricted residuals r^(ℓ) = P_{ℓ→L}ᵀ r on every chain level.
        let nc = self.chain.len();
        let mut restricted: Vec<Vec<f64>> = vec![Vec::new(); nc];
        restricted[nc - 1] = match &self.to_finest {
            Some(q) => q.transpose_mul_vec(&r_fine),
            None => r_fine.clone(),
        };
        for l in (0..nc - 1).rev() {
            restricted[l] = self.chain[l].to_next.as_ref().unwrap().transpose_mul_vec(&restricted[l + 1]);
        }

        let mut levels = Vec::with_capacity(nc + 1);
        let mut sigma = self.coarse.solve(&restricted[0]);
        let zeta0 = dot(&sigma, &restricted[0]).max(0.0);
        levels.push(LevelStats {
            level: 0,
            degree: 1,
            lambda: 1.0,
            s: 1.0,
            rho_norm_sq: zeta0,
            local_norm_sq: zeta0,
            damped: false,
        });
        let mut zeta_sq = zeta0;

        for l in 1..nc {
            sigma = self.chain[l - 1].to_next.as_ref().unwrap().mul_vec(&sigma);
            let lvl = &self.chain[l];
            let stats = jacobi_update(&lvl.stiffness, &lvl.diag, &lvl.smoothing, &restricted[l], &mut sigma, true);
            zeta_sq += stats.0 * stats.1.local_norm_sq;
            levels.push(LevelStats { level: l, ..stats.1 });
        }

        if let Some(q) = &self.to_finest {
            sigma = q.mul_vec(&sigma);
        }
        let finest_level = self.finest_level();
        match &self.smoother {
            FinestSmoother::None => {}
            FinestSmoother::Jacobi { smoothing, diag } => {
                let (lambda, stats) = jacobi_update(&self.finest.stiffness, diag, smoothing, &r_fine, &mut sigma, true);
                zeta_sq += lambda * stats.local_norm_sq;
                levels.push(LevelStats { level: finest_level, ..stats });
            }
            FinestSmoother::Blocks(blocks) => {
                let a = &self.finest.stiffness;
                let mut res = a.mul_vec(&sigma);
                for (ri, bi) in res.iter_mut().zip(&r_fine) {
                    *ri = bi - *ri;
                }
                let mut rho = vec![0.0; sigma.len()];
                let mut local_sq = 0.0;
                let mut buf = Vec::new();
                for (idx, chol) in blocks {
                    buf.clear();
                    buf.extend(idx.iter().map(|&i| res[i]));
                    chol.solve_in_place(&mut buf);
                    for (&i, &v) in idx.iter().zip(&buf) {
                        rho[i] += v;
                        local_sq += res[i] * v;
                    }
                }
                let rho_sq = a.bilinear(&rho, &rho);
                let s = ratio(local_sq, rho_sq);
                for (si, ri) in sigma.iter_mut().zip(&rho) {
                    *si += s * ri;
                }
                zeta_sq += s * local_sq;
                levels.push(LevelStats {
                    level: finest_level,
                    degree: self.degree,
                    lambda: s,
                    s,
                    rho_norm_sq: rho_sq,
                    local_norm_sq: local_sq,
                    damped: false,
                });
            }
        }

        let mut iterate = u.to_vec();
        for (x, s) in iterate.iter_mut().zip(&sigma) {
            *x += s;
        }
        Ok(StepResult { iterate, correction: sigma, zeta: libm::sqrt(zeta_sq.max(0.0)), levels })
    }

    /// Repeats [`mg_step`](Self::mg_step) from `u0` until `stop(iterate, ζ)`
    /// holds, at most `cap` times.
    pub fn solve_to_tolerance(
        &self,
        u0: &[f64],
        mut stop: impl FnMut(&[f64], f64) -> bool,
        cap: usize,
    ) -> Result<SolveOutcome> {
        let mut u = u0.to_vec();
        let mut zeta_history = Vec::new();
        for k in 1..=cap {
            let step = self.mg_step(&u)?;
            u = step.iterate;
            zeta_history.push(step.zeta);
            if stop(&u, step.zeta) {
                return Ok(SolveOutcome { iterate: u, iterations: k, zeta_history });
            }
        }
        Err(Error::IterationCap { cap, zeta_history })
    }
}

/// `a / b` with `0/0 := 0`.
fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Scalar patch corrections on `smoothing` against the residual
/// `r − A σ`, followed by the line search. Updates `sigma` and returns the
/// step size with the level statistics.
fn jacobi_update(
    a: &CsrMatrix,
    diag: &[f64],
    smoothing: &[usize],
    r: &[f64],
    sigma: &mut [f64],
    capped: bool,
) -> (f64, LevelStats) {
    let mut rho: Vec<(usize, f64)> = Vec::with_capacity(smoothing.len());
    let mut local_sq = 0.0;
    for &z in smoothing {
        let res = r[z] - a.row_dot(z, sigma);
        let c = res / diag[z];
        local_sq += res * c;
        rho.push((z, c));
    }
    // ‖ρ‖² over the support only.
    let mut dense = vec![0.0; sigma.len()];
    for &(z, c) in &rho {
        dense[z] = c;
    }
    let rho_sq: f64 = rho.iter().map(|&(z, c)| c * a.row_dot(z, &dense)).sum();
    let s = ratio(local_sq, rho_sq);
    let damped = capped && s > STEP_CAP;
    let lambda = if damped { 1.0 / STEP_CAP } else { s };
    for &(z, c) in &rho {
        sigma[z] += lambda * c;
    }
    (
        lambda,
        LevelStats { level: 0, degree: 1, lambda, s, rho_norm_sq: rho_sq, local_norm_sq: local_sq, damped },
    )
}

/// Finest space, its operators, the transfer from the last lowest-order level
/// and the smoother.
fn finest_parts(
    meshes: &[Mesh],
    chain: &[P1Level],
    degree: usize,
    data: &ProblemData,
) -> Result<(Option<CsrMatrix>, DofMap, OperatorSet, FinestSmoother)> {
    let l = meshes.len() - 1;
    let mesh = &meshes[l];
    let dofs = DofMap::new(mesh, degree)?;
    let ops = assemble(mesh, &dofs, data)?;
    let last = chain.last().unwrap();
    let last_mesh = &meshes[chain.len() - 1];
    let to_finest = if degree == 1 && l == 0 {
        None
    } else {
        Some(Prolongation::build(last_mesh, &last.dofs, mesh, &dofs)?.free_matrix(&last.dofs, &dofs))
    };
    let smoother = if degree == 1 {
        if l == 0 {
            FinestSmoother::None
        } else {
            let smoothing = changed_free_vertices(&meshes[l - 1], mesh, &dofs)?;
            FinestSmoother::Jacobi { smoothing, diag: ops.stiffness.diagonal() }
        }
    } else {
        let mut blocks = Vec::with_capacity(mesh.n_vertices());
        for z in 0..mesh.n_vertices() {
            let sub = PatchSubspace::new(mesh, &dofs, z)?;
            if sub.is_empty() {
                continue;
            }
            let idx = free_indices(&dofs, &sub)?;
            let local = ops.stiffness.principal_submatrix(&idx);
            blocks.push((idx.clone(), DenseCholesky::factor(idx.len(), &local)?));
        }
        FinestSmoother::Blocks(blocks)
    };
    Ok((to_finest, dofs, ops, smoother))
}

/// Free indices of the interior changed vertices between two meshes.
fn changed_free_vertices(coarse: &Mesh, fine: &Mesh, p1: &DofMap) -> Result<Vec<usize>> {
    let delta = Mesh::level_delta(coarse, fine)?;
    Ok(delta.changed.iter().filter_map(|&z| p1.free_index(z)).collect())
}
