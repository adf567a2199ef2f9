//! Residual a posteriori estimator
//!
//! `η_T² = h_T² ‖f + div(K∇v − f_vec)‖²_T + h_T Σ_{E ⊂ ∂T ∩ Ω} ‖⟦(K∇v − f_vec)·n⟧‖²_E`
//!
//! with `h_T = |T|^{1/2}`. Every interior edge contributes its full jump to
//! both neighbours. `K` is taken constant per element, so the divergence is
//! `K : D²v`.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{physical_gradient, Coefficient, ProblemData, Sym2, VectorField};
use crate::mesh::Mesh;
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::space::{barycentric_gradients, DofMap};
use crate::{Error, Point, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorResult {
    /// `η_T²` per element.
    pub per_element: Vec<f64>,
    /// `η² = Σ_T η_T²`.
    pub total: f64,
}

impl EstimatorResult {
    pub fn eta(&self) -> f64 {
        libm::sqrt(self.total)
    }
}

/// Estimates the free-dof iterate `v`.
pub fn estimate(mesh: &Mesh, dofs: &DofMap, data: &ProblemData, v: &[f64]) -> Result<EstimatorResult> {
    let full = dofs.expand(v)?;
    let coeff: Vec<Sym2> =
        (0..mesh.n_triangles()).map(|t| data.coefficient.on_element(mesh, t)).collect::<Result<_>>()?;
    let p = dofs.degree();
    let n = dofs.dofs_per_element();
    let basis = dofs.basis();

    let rule = QuadratureRule::for_degree(2 * p);
    let hess: Vec<Vec<[[f64; 3]; 3]>> = rule
        .points
        .iter()
        .map(|&l| {
            let mut h = vec![[[0.0; 3]; 3]; n];
            basis.hessian_barycentric(l, &mut h);
            h
        })
        .collect();

    let mut per_element = vec![0.0; mesh.n_triangles()];
    for t in 0..mesh.n_triangles() {
        let k = coeff[t];
        let gl = barycentric_gradients(mesh, t);
        let x = mesh.corners(t);
        let area = mesh.area(t);
        let ed = dofs.element_dofs(t);
        let mut vol = 0.0;
        for (q, &w) in rule.weights.iter().enumerate() {
            // Barycentric Hessian of v at this point, then K : J^T H J.
            let mut hb = [[0.0; 3]; 3];
            if p > 1 {
                for (i, &d) in ed.iter().enumerate() {
                    let c = full[d];
                    if c != 0.0 {
                        for r in 0..3 {
                            for s in 0..3 {
                                hb[r][s] += c * hess[q][i][r][s];
                            }
                        }
                    }
                }
            }
            let mut div = 0.0;
            for r in 0..3 {
                for s in 0..3 {
                    if hb[r][s] != 0.0 {
                        let a = gl[r];
                        let b = gl[s];
                        div += hb[r][s] * (k.xx * a[0] * b[0] + k.xy * (a[0] * b[1] + a[1] * b[0]) + k.yy * a[1] * b[1]);
                    }
                }
            }
            let pt = map_point(&x, rule.points[q]);
            let res = data.f.value(pt) + div - data.f_vec.divergence(pt);
            vol += w * area * res * res;
        }
        per_element[t] = area * vol;
    }

    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.is_boundary() {
            continue;
        }
        let j = jump_with(mesh, dofs, &coeff, data.f_vec.as_ref(), &full, e)?;
        for t in edge.triangles.iter().flatten() {
            per_element[*t] += mesh.element_size(*t) * j;
        }
    }
    let total = per_element.iter().sum();
    Ok(EstimatorResult { per_element, total })
}

/// `∫_E ⟦(K∇v − f_vec)·n⟧²` on the interior edge `edge` for the full
/// coefficient vector `v`.
pub fn jump_trace(
    mesh: &Mesh,
    dofs: &DofMap,
    coefficient: &Coefficient,
    f_vec: &dyn VectorField,
    v: &[f64],
    edge: usize,
) -> Result<f64> {
    if v.len() != dofs.n_dofs() {
        return Err(Error::DimensionMismatch { expected: dofs.n_dofs(), found: v.len() });
    }
    let e = mesh.edges().get(edge).ok_or(Error::InvalidElement(edge))?;
    let mut coeff = vec![Sym2::IDENTITY; mesh.n_triangles()];
    for t in e.triangles.iter().flatten() {
        coeff[*t] = coefficient.on_element(mesh, *t)?;
    }
    jump_with(mesh, dofs, &coeff, f_vec, v, edge)
}

fn jump_with(mesh: &Mesh, dofs: &DofMap, coeff: &[Sym2], f_vec: &dyn VectorField, v: &[f64], edge: usize) -> Result<f64> {
    let e = &mesh.edges()[edge];
    let (Some(tp), Some(tm)) = (e.triangles[0], e.triangles[1]) else {
        return Err(Error::BoundaryEdge(edge));
    };
    let a = mesh.point(e.vertices[0]);
    let b = mesh.point(e.vertices[1]);
    let len = libm::hypot(b[0] - a[0], b[1] - a[1]);
    let normal = [(b[1] - a[1]) / len, (a[0] - b[0]) / len];
    let (nodes, weights) = gauss_legendre(dofs.degree() + 1);
    let n = dofs.dofs_per_element();
    let mut grad = vec![[0.0; 3]; n];
    let mut sum = 0.0;
    for (&s, &w) in nodes.iter().zip(&weights) {
        let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
        let g = f_vec.value(x);
        let mut flux = [0.0; 2];
        for (side, &t) in [tp, tm].iter().enumerate() {
            let lambda = mesh.barycentric(t, x);
            dofs.basis().grad_barycentric(lambda, &mut grad);
            let gl = barycentric_gradients(mesh, t);
            let mut dv = [0.0; 2];
            for (i, &d) in dofs.element_dofs(t).iter().enumerate() {
                let pg = physical_gradient(&grad[i], &gl);
                dv[0] += v[d] * pg[0];
                dv[1] += v[d] * pg[1];
            }
            let kg = coeff[t].apply(dv);
            flux[side] = (kg[0] - g[0]) * normal[0] + (kg[1] - g[1]) * normal[1];
        }
        let jump = flux[0] - flux[1];
        sum += w * len * jump * jump;
    }
    Ok(sum)
}

#[inline]
fn map_point(x: &[Point; 3], l: [f64; 3]) -> Point {
    [
        l[0] * x[0][0] + l[1] * x[1][0] + l[2] * x[2][0],
        l[0] * x[0][1] + l[1] * x[1][1] + l[2] * x[2][1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::BoxRegion;

    fn square() -> Mesh {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        Mesh::with_longest_edge_refinement(&pts, &[[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn zero_data_zero_iterate() {
        let m = square().refine_uniform().unwrap();
        let d = DofMap::new(&m, 2).unwrap();
        let data = ProblemData::new(Coefficient::Identity, 0.0, [0.0, 0.0]);
        let r = estimate(&m, &d, &data, &vec![0.0; d.n_free()]).unwrap();
        assert!(r.per_element.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_triangle_volume_term() {
        let m = Mesh::with_longest_edge_refinement(&[[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]], &[[0, 1, 2]]).unwrap();
        let d = DofMap::new(&m, 1).unwrap();
        let data = ProblemData::new(Coefficient::Identity, 1.0, [0.0, 0.0]);
        let r = estimate(&m, &d, &data, &[]).unwrap();
        assert!((r.total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hat_jump_across_diagonal() {
        let m = square();
        let d = DofMap::new(&m, 1).unwrap();
        // Hat at corner (0,0): gradient (-1, 0) on one side and (0, -1) on the other.
        let mut v = vec![0.0; d.n_dofs()];
        v[0] = 1.0;
        let diag = m.edges().iter().position(|e| !e.is_boundary()).unwrap();
        let j = jump_trace(&m, &d, &Coefficient::Identity, &[0.0, 0.0], &v, diag).unwrap();
        // n = ±(1,-1)/√2, gradient difference (1,-1) ⇒ jump² = 2, length √2.
        assert!((j - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn coefficient_contrast_scales_jump() {
        let m = square();
        let d = DofMap::new(&m, 1).unwrap();
        let lower = BoxRegion { x: [0.0, 1.0], y: [0.0, 1.0] };
        let v: Vec<f64> = d.interpolate(|p| p[0] + p[1]);
        let diag = m.edges().iter().position(|e| !e.is_boundary()).unwrap();
        // The element below the diagonal has its barycenter at (2/3, 1/3).
        let below = BoxRegion { x: [0.5, 1.0], y: [0.0, 0.5] };
        let k = Coefficient::piecewise(vec![(below, Sym2::scalar(10.0)), (lower, Sym2::IDENTITY)]).unwrap();
        let j = jump_trace(&m, &d, &k, &[0.0, 0.0], &v, diag).unwrap();
        // ∇v = (1,1), n = (1,-1)/√2 ⇒ both normal fluxes vanish.
        assert!(j.abs() < 1e-26);
        let v: Vec<f64> = d.interpolate(|p| p[0]);
        let j = jump_trace(&m, &d, &k, &[0.0, 0.0], &v, diag).unwrap();
        // Normal fluxes 10/√2 and 1/√2: jump² = 81/2 over length √2.
        assert!((j - 40.5 * core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn boundary_edge_is_rejected() {
        let m = square();
        let d = DofMap::new(&m, 1).unwrap();
        let b = m.edges().iter().position(|e| e.is_boundary()).unwrap();
        let v = vec![0.0; d.n_dofs()];
        assert_eq!(jump_trace(&m, &d, &Coefficient::Identity, &[0.0, 0.0], &v, b), Err(Error::BoundaryEdge(b)));
    }

    #[test]
    fn affine_quadratic_has_no_residual() {
        // p = 2, K = I, v = x² − y² is harmonic with continuous flux.
        let m = square().refine_uniform().unwrap().refine_uniform().unwrap();
        let d = DofMap::new(&m, 2).unwrap();
        let full = d.interpolate(|p| p[0] * p[0] - p[1] * p[1]);
        let free = d.restrict(&full).unwrap();
        // The boundary values are not zero, so only interior jumps are checked.
        let data = ProblemData::new(Coefficient::Identity, 0.0, [0.0, 0.0]);
        let coeff = vec![Sym2::IDENTITY; m.n_triangles()];
        for (e, edge) in m.edges().iter().enumerate() {
            if !edge.is_boundary() {
                assert!(jump_with(&m, &d, &coeff, data.f_vec.as_ref(), &full, e).unwrap() < 1e-24);
            }
        }
        assert_eq!(free.len(), d.n_free());
    }
}
