//! Brute-force verifiers shared by the integration suites.
#![allow(dead_code)]

use std::collections::HashMap;

use afem_core::mesh::Mesh;
use rand::Rng;

/// Checks conformity from coordinates alone: positive orientation, no edge
/// with more than two neighbours, and no vertex inside another element's edge.
pub fn brute_force_conforming(m: &Mesh) -> Result<(), String> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in m.triangles().iter().enumerate() {
        if m.area(t) <= 0.0 {
            return Err(format!("element {t} has non-positive area"));
        }
        for i in 0..3 {
            let [a, b] = tri.edge_vertices(i);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    for (&(a, b), &c) in &count {
        if c > 2 {
            return Err(format!("edge ({a},{b}) has {c} neighbours"));
        }
        let (pa, pb) = (m.point(a), m.point(b));
        let len2 = (pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2);
        for v in 0..m.n_vertices() {
            if v == a || v == b {
                continue;
            }
            let q = m.point(v);
            let cross = (pb[0] - pa[0]) * (q[1] - pa[1]) - (pb[1] - pa[1]) * (q[0] - pa[0]);
            let along = ((q[0] - pa[0]) * (pb[0] - pa[0]) + (q[1] - pa[1]) * (pb[1] - pa[1])) / len2;
            if cross.abs() < 1e-13 * len2 && along > 1e-12 && along < 1.0 - 1e-12 {
                return Err(format!("hanging vertex {v} on edge ({a},{b})"));
            }
        }
    }
    // An edge with one neighbour must lie on the boundary of the domain.
    let total = m.total_area();
    if count.values().filter(|&&c| c == 1).count() == 0 && total > 0.0 {
        return Err("no boundary edges".into());
    }
    Ok(())
}

pub fn nested(coarse: &Mesh, fine: &Mesh) -> Result<(), String> {
    let parent = fine.parent_map(coarse).map_err(|e| e.to_string())?;
    let mut covered = vec![0.0; coarse.n_triangles()];
    for (f, &c) in parent.iter().enumerate() {
        for x in fine.corners(f) {
            let l = coarse.barycentric(c, x);
            if l.iter().any(|&v| v < -1e-12) {
                return Err(format!("fine element {f} leaves its parent {c}"));
            }
        }
        covered[c] += fine.area(f);
    }
    for (c, a) in covered.iter().enumerate() {
        if (a - coarse.area(c)).abs() > 1e-12 * coarse.area(c) {
            return Err(format!("children of {c} do not tile it"));
        }
    }
    Ok(())
}

pub fn brute_force_min_cardinality(ind: &[f64], theta: f64) -> usize {
    let total: f64 = ind.iter().sum();
    let n = ind.len();
    (0u32..1 << n)
        .filter(|mask| {
            let s: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ind[i]).sum();
            s >= theta * total
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

pub fn random_lambda(rng: &mut impl Rng) -> [f64; 3] {
    let (a, b): (f64, f64) = (rng.gen(), rng.gen());
    let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
    [1.0 - a - b, a, b]
}
