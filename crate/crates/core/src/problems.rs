//! Benchmark problems and small synthetic ones.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{BoxRegion, Coefficient, ProblemData, Sym2};
use crate::mesh::Mesh;
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    LShape,
    UnitSquare,
}

/// Known results for a benchmark, indexed by `p - 1` for `p ∈ {1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    /// Slope of `η` over the cumulative cost.
    pub rate_cost: [f64; 2],
    /// Mean and maximum number of solver steps per level.
    pub iterations: [(f64, usize); 2],
}

#[derive(Debug)]
pub struct ProblemSpec {
    pub name: String,
    /// Contrast parameter (0 for problems without one).
    pub k: u32,
    pub domain: Domain,
    pub initial_mesh: Mesh,
    pub data: ProblemData,
    pub reference: Option<Reference>,
}

/// `(−1,1)² \ ([0,1] × [−1,0])`, `f = 1`, `K = I`. Six triangles whose
/// diagonals all meet at the reentrant corner.
pub fn l_shape() -> ProblemSpec {
    let pts: [Point; 8] =
        [[0.0, 0.0], [-1.0, -1.0], [0.0, -1.0], [-1.0, 0.0], [-1.0, 1.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
    let tris = [[1, 2, 0], [1, 0, 3], [3, 0, 4], [0, 5, 4], [0, 7, 6], [0, 6, 5]];
    ProblemSpec {
        name: "l_shape".to_string(),
        k: 0,
        domain: Domain::LShape,
        initial_mesh: Mesh::with_longest_edge_refinement(&pts, &tris).expect("valid initial mesh"),
        data: ProblemData::new(Coefficient::Identity, 1.0, [0.0, 0.0]),
        reference: None,
    }
}

/// Unit square cut into `n × n` cells, each halved by a diagonal. With
/// `towards_center` the diagonals of a 2×2 grid all meet at `(1/2, 1/2)`.
fn square_grid(n: usize, towards_center: bool) -> Mesh {
    let h = 1.0 / n as f64;
    let mut pts = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            pts.push([i as f64 * h, j as f64 * h]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut tris = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            // Anti-diagonal cells: lower right and upper left of a 2×2 grid.
            if towards_center && (i + j) % 2 == 1 {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            } else {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            }
        }
    }
    Mesh::with_longest_edge_refinement(&pts, &tris).expect("valid grid")
}

fn check_contrast(k: u32) -> Result<()> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(format!("contrast parameter k = {k} outside 1..=3")));
    }
    Ok(())
}

fn pow10(e: u32) -> f64 {
    libm::pow(10.0, e as f64)
}

/// 2×2 checkerboard on the unit square: `K = 10^k I` on `[0,1/2]²` and
/// `[1/2,1]²`, `K = I` elsewhere, `f = 1`.
pub fn checkerboard(k: u32) -> Result<ProblemSpec> {
    check_contrast(k)?;
    let grey = Sym2::scalar(pow10(k));
    let coefficient = Coefficient::piecewise(vec![
        (BoxRegion { x: [0.0, 0.5], y: [0.0, 0.5] }, grey),
        (BoxRegion { x: [0.5, 1.0], y: [0.5, 1.0] }, grey),
        (BoxRegion { x: [0.0, 1.0], y: [0.0, 1.0] }, Sym2::IDENTITY),
    ])?;
    let reference = match k {
        1 => Reference { rate_cost: [-0.4961, -0.9877], iterations: [(1.0, 1), (1.0455, 2)] },
        2 => Reference { rate_cost: [-0.4960, -0.9946], iterations: [(1.0, 1), (2.3261, 5)] },
        _ => Reference { rate_cost: [-0.4960, -0.9826], iterations: [(1.0, 1), (1.1818, 3)] },
    };
    Ok(ProblemSpec {
        name: "checkerboard".to_string(),
        k,
        domain: Domain::UnitSquare,
        initial_mesh: square_grid(2, true),
        data: ProblemData::new(coefficient, 1.0, [0.0, 0.0]),
        reference: Some(reference),
    })
}

/// `2^k + 1` horizontal stripes of equal height on the unit square with
/// `K = 10^j I` on stripe `j` (counted from the bottom), `f = 1`. Neighbouring
/// stripes differ by a factor 10, the whole domain by `10^{2^k}`.
pub fn stripes(k: u32) -> Result<ProblemSpec> {
    check_contrast(k)?;
    let n = (1usize << k) + 1;
    let h = 1.0 / n as f64;
    let regions = (0..n)
        .map(|j| {
            let y = [j as f64 * h, if j + 1 == n { 1.0 } else { (j + 1) as f64 * h }];
            (BoxRegion { x: [0.0, 1.0], y }, Sym2::scalar(pow10(j as u32)))
        })
        .collect();
    let reference = match k {
        1 => Reference { rate_cost: [-0.4956, -1.0116], iterations: [(1.0, 1), (1.0455, 2)] },
        2 => Reference { rate_cost: [-0.4969, -0.9670], iterations: [(1.0, 1), (1.0417, 2)] },
        _ => Reference { rate_cost: [-0.5095, -0.9766], iterations: [(1.0, 1), (1.0833, 2)] },
    };
    Ok(ProblemSpec {
        name: "stripes".to_string(),
        k,
        domain: Domain::UnitSquare,
        initial_mesh: square_grid(n, false),
        data: ProblemData::new(Coefficient::piecewise(regions)?, 1.0, [0.0, 0.0]),
        reference: Some(reference),
    })
}

/// Unit square with `f = 0`, so the exact solution is zero.
pub fn zero_source() -> ProblemSpec {
    ProblemSpec {
        name: "zero".to_string(),
        k: 0,
        domain: Domain::UnitSquare,
        initial_mesh: square_grid(2, true),
        data: ProblemData::new(Coefficient::Identity, 0.0, [0.0, 0.0]),
        reference: None,
    }
}

/// Unit square with `f = 0` and a constant flux source `f_vec = g`.
pub fn constant_flux(g: [f64; 2]) -> ProblemSpec {
    ProblemSpec {
        name: "flux".to_string(),
        k: 0,
        domain: Domain::UnitSquare,
        initial_mesh: square_grid(2, true),
        data: ProblemData::new(Coefficient::Identity, 0.0, g),
        reference: None,
    }
}

/// Problem by name: `l_shape`, `checkerboard`, `stripes`, `zero` or `flux`.
/// `k` is only read by the two coefficient benchmarks.
pub fn by_name(name: &str, k: u32) -> Result<ProblemSpec> {
    match name {
        "l_shape" | "lshape" => Ok(l_shape()),
        "checkerboard" => checkerboard(k),
        "stripes" | "stripe" => stripes(k),
        "zero" => Ok(zero_source()),
        "flux" => Ok(constant_flux([1.0, 0.5])),
        _ => Err(Error::InvalidParameter(format!("unknown problem `{name}`"))),
    }
}

pub const PROBLEM_NAMES: [&str; 5] = ["l_shape", "checkerboard", "stripes", "zero", "flux"];
