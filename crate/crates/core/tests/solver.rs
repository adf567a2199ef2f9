#![allow(clippy::needless_range_loop)]
use afem_core::adaptivity::{afem_run, AfemParams};
use afem_core::assembly::{assemble, free_indices, ProblemData};
use afem_core::direct;
use afem_core::mesh::Mesh;
use afem_core::problems::{self, ProblemSpec};
use afem_core::solver::SolverHierarchy;
use afem_core::space::{DofMap, PatchSubspace, Prolongation};
use afem_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Dense = Vec<Vec<f64>>;

fn dense_solve(mut a: Dense, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Columns of the lowest-order hat functions of `level`, written in the
/// finest free-dof basis.
fn hats_on_finest(meshes: &[Mesh], level: usize, degree: usize) -> (DofMap, Dense) {
    let dofs: Vec<DofMap> = meshes.iter().enumerate().map(|(l, m)| DofMap::new(m, if l + 1 == meshes.len() { degree } else { 1 }).unwrap()).collect();
    let p1_level = DofMap::new(&meshes[level], 1).unwrap();
    // Identity on the level's free dofs, prolongated level by level.
    let mut cols: Dense = (0..p1_level.n_free()).map(|i| {
        let mut e = vec![0.0; p1_level.n_free()];
        e[i] = 1.0;
        e
    }).collect();
    let mut current = p1_level.clone();
    for l in level + 1..meshes.len() {
        let target = if l + 1 == meshes.len() { &dofs[l] } else { &DofMap::new(&meshes[l], 1).unwrap() };
        let p = Prolongation::build(&meshes[l - 1], &current, &meshes[l], target).unwrap().free_matrix(&current, target);
        cols = cols.iter().map(|c| p.mul_vec(c)).collect();
        current = target.clone();
    }
    if level + 1 == meshes.len() && degree > 1 {
        let p = Prolongation::build(&meshes[level], &p1_level, &meshes[level], &dofs[level]).unwrap().free_matrix(&p1_level, &dofs[level]);
        cols = cols.iter().map(|c| p.mul_vec(c)).collect();
    }
    (p1_level, cols)
}

/// One step replayed with dense matrices on the finest space.
fn replay(meshes: &[Mesh], degree: usize, data: &ProblemData, u: &[f64]) -> (Vec<f64>, f64, Vec<f64>) {
    let ll = meshes.len() - 1;
    let fd = DofMap::new(&meshes[ll], degree).unwrap();
    let ops = assemble(&meshes[ll], &fd, data).unwrap();
    let a = ops.stiffness.to_dense();
    let au = matvec(&a, u);
    let r: Vec<f64> = ops.load.iter().zip(&au).map(|(b, x)| b - x).collect();
    let n = r.len();

    // (i) coarse correction.
    let (_, p0) = hats_on_finest(meshes, 0, degree);
    let a0: Dense = p0.iter().map(|ci| p0.iter().map(|cj| dot(ci, &matvec(&a, cj))).collect()).collect();
    let r0: Vec<f64> = p0.iter().map(|c| dot(c, &r)).collect();
    let c0 = if r0.is_empty() { vec![] } else { dense_solve(a0, r0) };
    let mut sigma = vec![0.0; n];
    for (c, col) in c0.iter().zip(&p0) {
        for i in 0..n {
            sigma[i] += c * col[i];
        }
    }
    let mut zeta_sq = dot(&sigma, &matvec(&a, &sigma));
    let mut lambdas = vec![1.0];

    // (ii) local corrections on levels 1..L, and on level 0 itself for L = 0, p > 1.
    let first = if ll == 0 && degree > 1 { 0 } else { 1 };
    for l in first..=ll {
        let residual: Vec<f64> = r.iter().zip(matvec(&a, &sigma)).map(|(a, b)| a - b).collect();
        let mut locals: Vec<Vec<f64>> = Vec::new();
        if l == ll && degree > 1 {
            for z in 0..meshes[l].n_vertices() {
                let sub = PatchSubspace::new(&meshes[l], &fd, z).unwrap();
                let idx = free_indices(&fd, &sub).unwrap();
                if idx.is_empty() {
                    continue;
                }
                let block: Dense = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j]).collect()).collect();
                let x = dense_solve(block, idx.iter().map(|&i| residual[i]).collect());
                let mut v = vec![0.0; n];
                for (&i, xi) in idx.iter().zip(&x) {
                    v[i] = *xi;
                }
                locals.push(v);
            }
        } else {
            let delta = Mesh::level_delta(&meshes[l - 1], &meshes[l]).unwrap();
            let (p1, cols) = hats_on_finest(meshes, l, degree);
            for &z in &delta.changed {
                let Some(fz) = p1.free_index(z) else { continue };
                let phi = &cols[fz];
                let c = dot(phi, &residual) / dot(phi, &matvec(&a, phi));
                locals.push(phi.iter().map(|v| c * v).collect());
            }
        }
        let rho: Vec<f64> = (0..n).map(|i| locals.iter().map(|v| v[i]).sum()).collect();
        let rho_sq = dot(&rho, &matvec(&a, &rho));
        let s = if rho_sq == 0.0 { 0.0 } else { dot(&residual, &rho) / rho_sq };
        let lambda = if s <= 3.0 || (l == ll && degree > 1) { s } else { 1.0 / 3.0 };
        let local_sq: f64 = locals.iter().map(|v| dot(v, &matvec(&a, v))).sum();
        zeta_sq += lambda * local_sq;
        for i in 0..n {
            sigma[i] += lambda * rho[i];
        }
        lambdas.push(lambda);
    }
    let next: Vec<f64> = u.iter().zip(&sigma).map(|(a, b)| a + b).collect();
    (next, zeta_sq.sqrt(), lambdas)
}

fn hierarchy_of(spec: &ProblemSpec, degree: usize, max_dofs: usize) -> SolverHierarchy {
    let params = AfemParams { degree, max_dofs, ..Default::default() };
    afem_run(spec, &params).unwrap().hierarchy
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn two_level_p1_step_matches_dense_replay() {
    let spec = problems::checkerboard(1).unwrap();
    let coarse = spec.initial_mesh.clone();
    let fine = coarse.refine_uniform().unwrap();
    let meshes = vec![coarse, fine];
    let h = SolverHierarchy::build(meshes.clone(), 1, &spec.data).unwrap();
    let u = vec![0.0; h.n_free()];
    let step = h.mg_step(&u).unwrap();
    let (next, zeta, _) = replay(&meshes, 1, &spec.data, &u);
    assert!((step.zeta - zeta).abs() < 1e-12 * zeta.max(1.0));
    for (a, b) in step.iterate.iter().zip(&next) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn multilevel_steps_match_dense_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases: Vec<(ProblemSpec, usize, usize)> = vec![
        (problems::l_shape(), 1, 150),
        (problems::l_shape(), 2, 250),
        (problems::checkerboard(2).unwrap(), 2, 250),
        (problems::stripes(1).unwrap(), 3, 350),
        (problems::l_shape(), 4, 350),
    ];
    for (spec, p, budget) in cases {
        let h = hierarchy_of(&spec, p, budget);
        assert!(h.finest_level() >= 2, "{} p={p} has only {} levels", spec.name, h.finest_level());
        for _ in 0..3 {
            let u = random_vector(h.n_free(), &mut rng);
            let step = h.mg_step(&u).unwrap();
            let (next, zeta, lambdas) = replay(h.meshes(), p, &spec.data, &u);
            assert!((step.zeta - zeta).abs() < 1e-9 * zeta, "{} p={p}: {} vs {zeta}", spec.name, step.zeta);
            let scale = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in step.iterate.iter().zip(&next) {
                assert!((a - b).abs() < 1e-9 * scale);
            }
            let got: Vec<f64> = step.levels.iter().map(|s| s.lambda).collect();
            assert_eq!(got.len(), lambdas.len());
            for (a, b) in got.iter().zip(&lambdas) {
                assert!((a - b).abs() < 1e-8 * b.abs().max(1.0));
            }
        }
    }
}

#[test]
fn initial_mesh_only() {
    // p = 1: the coarse solve is exact.
    let spec = problems::checkerboard(1).unwrap();
    let h = SolverHierarchy::new(spec.initial_mesh.clone(), 1, &spec.data).unwrap();
    let exact = direct::solve(&h.operators().stiffness, &h.operators().load).unwrap();
    let step = h.mg_step(&vec![0.0; h.n_free()]).unwrap();
    for (a, b) in step.iterate.iter().zip(&exact) {
        assert!((a - b).abs() < 1e-14);
    }
    // p > 1: the coarse solve is followed by patch smoothing on T_0.
    let h = SolverHierarchy::new(spec.initial_mesh.clone(), 2, &spec.data).unwrap();
    let u = vec![0.0; h.n_free()];
    let step = h.mg_step(&u).unwrap();
    let (next, zeta, _) = replay(h.meshes(), 2, &spec.data, &u);
    assert!((step.zeta - zeta).abs() < 1e-12);
    for (a, b) in step.iterate.iter().zip(&next) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn pythagoras_for_random_iterates() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let specs = [problems::l_shape(), problems::checkerboard(3).unwrap(), problems::stripes(2).unwrap()];
    for spec in &specs {
        for p in 1..=3 {
            let h = hierarchy_of(spec, p, 800);
            let ops = h.operators();
            let exact = direct::solve(&ops.stiffness, &ops.load).unwrap();
            for _ in 0..10 {
                let v: Vec<f64> = exact.iter().map(|x| x + rng.gen_range(-1.0..1.0)).collect();
                let step = h.mg_step(&v).unwrap();
                let e0: Vec<f64> = exact.iter().zip(&v).map(|(a, b)| a - b).collect();
                let e1: Vec<f64> = exact.iter().zip(&step.iterate).map(|(a, b)| a - b).collect();
                let (n0, n1) = (ops.energy_norm(&e0).unwrap().powi(2), ops.energy_norm(&e1).unwrap().powi(2));
                let z2 = step.zeta * step.zeta;
                assert!(n1 <= n0 - z2 + 1e-10 * n0, "{} p={p}", spec.name);
                if !step.damping_triggered() {
                    assert!((n1 - (n0 - z2)).abs() <= 1e-10 * n0, "{} p={p}: {n1} vs {}", spec.name, n0 - z2);
                }
            }
        }
    }
}

#[test]
fn exact_solution_is_a_fixed_point_and_direct_agrees() {
    let spec = problems::stripes(1).unwrap();
    let h = hierarchy_of(&spec, 2, 1500);
    let ops = h.operators();
    let exact = direct::solve(&ops.stiffness, &ops.load).unwrap();
    let out = h.solve_to_tolerance(&exact, |_, _| true, 5).unwrap();
    assert_eq!(out.iterations, 1);
    assert!(out.zeta_history[0] < 1e-10);
    let zero = vec![0.0; h.n_free()];
    let z0 = h.mg_step(&zero).unwrap().zeta;
    let out = h.solve_to_tolerance(&zero, |_, z| z <= 1e-10 * z0, 100).unwrap();
    let d: Vec<f64> = exact.iter().zip(&out.iterate).map(|(a, b)| a - b).collect();
    assert!(ops.energy_norm(&d).unwrap() <= 1e-8 * ops.energy_norm(&exact).unwrap());
    // ζ decreases geometrically after the first steps.
    for w in out.zeta_history[2..].windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn smoothing_set_examples() {
    let spec = problems::checkerboard(1).unwrap();
    let m0 = spec.initial_mesh.clone();
    let m1 = m0.refine_nvb(&[0]).unwrap();
    // Two meshes, p = 2: every vertex of the finest mesh.
    let h = SolverHierarchy::build(vec![m0.clone(), m1.clone()], 2, &spec.data).unwrap();
    let sets = h.smoothing_sets();
    assert_eq!(sets.len(), 1);
    assert_eq!(sets[0], (0..m1.n_vertices()).collect::<Vec<_>>());
    // Three meshes, p = 1: changed interior vertices on both levels.
    let m2 = m1.refine_nvb(&[1, 2]).unwrap();
    let h = SolverHierarchy::build(vec![m0.clone(), m1.clone(), m2.clone()], 1, &spec.data).unwrap();
    let sets = h.smoothing_sets();
    for (set, (c, f)) in sets.iter().zip([(&m0, &m1), (&m1, &m2)]) {
        let want: Vec<usize> =
            Mesh::level_delta(c, f).unwrap().changed.into_iter().filter(|&z| !f.vertices()[z].on_boundary).collect();
        assert_eq!(*set, want);
    }
}

#[test]
fn errors_are_reported() {
    let spec = problems::l_shape();
    let h = hierarchy_of(&spec, 2, 100);
    assert!(matches!(h.mg_step(&[1.0]), Err(Error::DimensionMismatch { .. })));
    let r = h.solve_to_tolerance(&vec![0.0; h.n_free()], |_, _| false, 3);
    match r {
        Err(Error::IterationCap { cap, zeta_history }) => {
            assert_eq!(cap, 3);
            assert_eq!(zeta_history.len(), 3);
        }
        other => panic!("unexpected {other:?}"),
    }
}
