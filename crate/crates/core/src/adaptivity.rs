//! The adaptive loop: solve with the multigrid until its algebraic estimate is
//! below `μ η`, mark by Dörfler, refine by NVB, prolongate, repeat.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::direct;
use crate::sparse::dot_compensated;
use crate::estimator::estimate;
use crate::mesh::Mesh;
use crate::problems::ProblemSpec;
use crate::solver::{LevelStats, SolverHierarchy, DEFAULT_ITERATION_CAP};
use crate::space::{DofMap, Prolongation};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfemParams {
    /// Dörfler bulk parameter in `(0, 1]`.
    pub theta: f64,
    /// Solver stopping parameter, `> 0`.
    pub mu: f64,
    pub degree: usize,
    /// Stop once a solved level has more free dofs than this.
    pub max_dofs: usize,
    pub iteration_cap: usize,
    /// Direct solve on every level to record algebraic errors.
    pub validate: bool,
}

impl Default for AfemParams {
    fn default() -> Self {
        Self { theta: 0.5, mu: 0.1, degree: 1, max_dofs: 10_000, iteration_cap: DEFAULT_ITERATION_CAP, validate: false }
    }
}

impl AfemParams {
    pub fn check(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter(format!("theta = {} not in (0, 1]", self.theta)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu = {} must be positive", self.mu)));
        }
        if self.degree < 1 {
            return Err(Error::InvalidDegree(self.degree));
        }
        if self.iteration_cap == 0 {
            return Err(Error::InvalidParameter("iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// One solver step `(L, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AfemRecord {
    pub level: usize,
    /// Step counter on this level, from 1.
    pub k: usize,
    /// Free dofs.
    pub ndof: usize,
    pub nelem: usize,
    pub eta: f64,
    pub zeta: f64,
    /// `Σ #T_{L'}` over all steps so far.
    pub cum_cost: u64,
    /// Time of this step (solve and estimate).
    pub wall_ms: f64,
    pub cum_wall_ms: f64,
    /// `‖u*_L − u_L^{k-1}‖` (validation only).
    pub error_before: Option<f64>,
    /// `‖u*_L − u_L^k‖` (validation only).
    pub alg_err: Option<f64>,
    /// `alg_err / error_before`, `None` when the error before was zero.
    pub contraction: Option<f64>,
    /// `‖u*_L − u_L^{k-1}‖² − ‖u*_L − (u_L^{k-1} + σ_L)‖²` for the step's
    /// correction `σ_L`, from the residual and without rounding the sum
    /// (validation only).
    pub error_decrease_sq: Option<f64>,
    pub steps: Vec<LevelStats>,
}

impl AfemRecord {
    pub fn damping_triggered(&self) -> bool {
        self.steps.iter().any(|s| s.damped)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AfemHistory {
    pub records: Vec<AfemRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateAxis {
    Ndof,
    Cost,
    Time,
}

impl AfemHistory {
    /// Last record of every level.
    pub fn final_records(&self) -> Vec<&AfemRecord> {
        let mut out: Vec<&AfemRecord> = Vec::new();
        for r in &self.records {
            match out.last_mut() {
                Some(last) if last.level == r.level => *last = r,
                _ => out.push(r),
            }
        }
        out
    }

    /// Solver steps per level.
    pub fn iterations(&self) -> Vec<usize> {
        self.final_records().iter().map(|r| r.k).collect()
    }

    pub fn levels(&self) -> usize {
        self.records.last().map_or(0, |r| r.level + 1)
    }
}

/// Least-squares slope of `log η` over `log x` through the final iterates of
/// each level, skipping the first `skip` levels.
pub fn rate_of(history: &AfemHistory, axis: RateAxis, skip: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = history
        .final_records()
        .into_iter()
        .skip(skip)
        .map(|r| {
            let x = match axis {
                RateAxis::Ndof => r.ndof as f64,
                RateAxis::Cost => r.cum_cost as f64,
                RateAxis::Time => r.cum_wall_ms,
            };
            (x, r.eta)
        })
        .collect();
    loglog_slope(&pts)
}

/// Free-dof count from which rates are fitted by default.
pub const ASYMPTOTIC_NDOF: usize = 1000;

/// Number of leading levels with fewer than `min_ndof` free dofs, for use as
/// the `skip` argument of [`rate_of`].
pub fn levels_below(history: &AfemHistory, min_ndof: usize) -> usize {
    history.final_records().iter().take_while(|r| r.ndof < min_ndof).count()
}

/// Least-squares slope of `log y` over `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|&(x, y)| (libm::log(x), libm::log(y))).collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientRecords { needed: 2, found: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientRecords { needed: 2, found: 1 });
    }
    Ok(sxy / sxx)
}

/// Minimal set carrying `θ` of the total: indicators sorted descending (ties
/// by index), shortest prefix with sum `≥ θ Σ`. Empty if all indicators vanish.
pub fn doerfler_mark(indicators: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("theta = {theta} not in (0, 1]")));
    }
    if let Some(i) = indicators.iter().position(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("indicator {i} is negative or NaN")));
    }
    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]).then(a.cmp(&b)));
    let total: f64 = order.iter().map(|&i| indicators[i]).sum();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let goal = theta * total;
    let mut sum = 0.0;
    let mut out = Vec::new();
    for i in order {
        if sum >= goal {
            break;
        }
        sum += indicators[i];
        out.push(i);
    }
    Ok(out)
}

/// Wall clock in milliseconds; the core crate has none of its own.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}

/// Receives every mesh once its level is solved.
pub trait Observer {
    fn level_solved(&mut self, level: usize, mesh: &Mesh, dofs: &DofMap, solution: &[f64]);
}

impl Observer for () {
    fn level_solved(&mut self, _: usize, _: &Mesh, _: &DofMap, _: &[f64]) {}
}

#[derive(Debug)]
pub struct AfemOutcome {
    pub history: AfemHistory,
    pub hierarchy: SolverHierarchy,
    /// Final iterate on the finest mesh.
    pub solution: Vec<f64>,
}

/// Runs the adaptive loop without timing.
pub fn afem_run(problem: &ProblemSpec, params: &AfemParams) -> Result<AfemOutcome> {
    afem_run_with(problem, params, &NoClock, &mut ())
}

pub fn afem_run_with(
    problem: &ProblemSpec,
    params: &AfemParams,
    clock: &dyn Clock,
    observer: &mut dyn Observer,
) -> Result<AfemOutcome> {
    params.check()?;
    let data = &problem.data;
    let mut h = SolverHierarchy::new(problem.initial_mesh.clone(), params.degree, data)?;
    let mut u = vec![0.0; h.n_free()];
    let mut history = AfemHistory::default();
    let mut cum_cost = 0u64;
    let mut cum_wall = 0.0;
    loop {
        let level = h.finest_level();
        let nelem = h.finest_mesh().n_triangles();
        let ndof = h.n_free();
        let factor = if params.validate { Some(direct::Cholesky::factor(&h.operators().stiffness)?) } else { None };
        // ‖u* − v‖² = rᵀ A⁻¹ r with an accurate residual r, which stays
        // meaningful when v is much closer to u* than the rounding of u*.
        let error_of = |v: &[f64]| -> Option<f64> {
            factor.as_ref().map(|f| {
                let r = h.operators().residual(v);
                libm::sqrt(dot_compensated(&r, &f.solve(&r)).max(0.0))
            })
        };
        let mut err = error_of(&u);
        let mut zetas = Vec::new();
        let mut indicators;
        let mut k = 0;
        loop {
            k += 1;
            let t0 = clock.now_ms();
            let step = h.mg_step(&u)?;
            let decrease = factor.as_ref().map(|_| h.operators().error_decrease_sq(&u, &step.correction));
            u = step.iterate;
            let est = estimate(h.finest_mesh(), h.finest_dofs(), data, &u)?;
            let wall = clock.now_ms() - t0;
            cum_cost += nelem as u64;
            cum_wall += wall;
            let after = error_of(&u);
            let contraction = match (err, after) {
                (Some(b), Some(a)) if b > 0.0 => Some(a / b),
                _ => None,
            };
            let eta = est.eta();
            zetas.push(step.zeta);
            history.records.push(AfemRecord {
                level,
                k,
                ndof,
                nelem,
                eta,
                zeta: step.zeta,
                cum_cost,
                wall_ms: wall,
                cum_wall_ms: cum_wall,
                error_before: err,
                alg_err: after,
                contraction,
                error_decrease_sq: decrease,
                steps: step.levels,
            });
            err = after;
            indicators = est.per_element;
            if step.zeta <= params.mu * eta {
                break;
            }
            if k == params.iteration_cap {
                return Err(Error::IterationCap { cap: k, zeta_history: zetas });
            }
        }
        observer.level_solved(level, h.finest_mesh(), h.finest_dofs(), &u);
        if ndof > params.max_dofs {
            break;
        }
        let marked = doerfler_mark(&indicators, params.theta)?;
        if marked.is_empty() {
            break;
        }
        let old_mesh = h.finest_mesh();
        let new_mesh = old_mesh.refine_nvb(&marked)?;
        if new_mesh.n_triangles() == old_mesh.n_triangles() {
            return Err(Error::StalledRefinement);
        }
        let new_dofs = DofMap::new(&new_mesh, params.degree)?;
        let p = Prolongation::build(old_mesh, h.finest_dofs(), &new_mesh, &new_dofs)?.free_matrix(h.finest_dofs(), &new_dofs);
        u = p.mul_vec(&u);
        h.push_level(new_mesh, data)?;
    }
    Ok(AfemOutcome { history, hierarchy: h, solution: u })
}
