//! Quadrature on the reference triangle and on the unit interval.

use alloc::vec::Vec;

/// Quadrature rule on a triangle in barycentric coordinates. Weights sum to 1
/// and are scaled by the element area at use.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

// Symmetric Gauss rules (Dunavant), points as (x, y) on the reference
// triangle with normalized weights, polished to full double precision.
const RULE_1: &[([f64; 2], f64)] = &[([1.0 / 3.0, 1.0 / 3.0], 1.0)];

const RULE_2: &[([f64; 2], f64)] = &[
    ([1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

const RULE_4: &[([f64; 2], f64)] = &[
    ([0.44594849091596488632, 0.44594849091596488632], 0.2233815896780114657),
    ([0.44594849091596488632, 0.10810301816807022736], 0.2233815896780114657),
    ([0.10810301816807022736, 0.44594849091596488632], 0.2233815896780114657),
    ([0.09157621350977074346, 0.09157621350977074346], 0.10995174365532186764),
    ([0.09157621350977074346, 0.81684757298045851308], 0.10995174365532186764),
    ([0.81684757298045851308, 0.09157621350977074346], 0.10995174365532186764),
];

const RULE_6: &[([f64; 2], f64)] = &[
    ([0.24928674517091042129, 0.24928674517091042129], 0.11678627572637936603),
    ([0.24928674517091042129, 0.50142650965817915742], 0.11678627572637936603),
    ([0.50142650965817915742, 0.24928674517091042129], 0.11678627572637936603),
    ([0.06308901449150222834, 0.06308901449150222834], 0.050844906370206816921),
    ([0.06308901449150222834, 0.87382197101699554332], 0.050844906370206816921),
    ([0.87382197101699554332, 0.06308901449150222834], 0.050844906370206816921),
    ([0.053145049844816947353, 0.31035245103378440542], 0.082851075618373575194),
    ([0.31035245103378440542, 0.053145049844816947353], 0.082851075618373575194),
    ([0.053145049844816947353, 0.63650249912139864723], 0.082851075618373575194),
    ([0.63650249912139864723, 0.053145049844816947353], 0.082851075618373575194),
    ([0.31035245103378440542, 0.63650249912139864723], 0.082851075618373575194),
    ([0.63650249912139864723, 0.31035245103378440542], 0.082851075618373575194),
];

const RULE_8: &[([f64; 2], f64)] = &[
    ([1.0 / 3.0, 1.0 / 3.0], 0.14431560767778716825),
    ([0.45929258829272315603, 0.45929258829272315603], 0.095091634267284624794),
    ([0.45929258829272315603, 0.081414823414553687942], 0.095091634267284624794),
    ([0.081414823414553687942, 0.45929258829272315603], 0.095091634267284624794),
    ([0.17056930775176020662, 0.17056930775176020662], 0.10321737053471825028),
    ([0.17056930775176020662, 0.65886138449647958676], 0.10321737053471825028),
    ([0.65886138449647958676, 0.17056930775176020662], 0.10321737053471825028),
    ([0.050547228317030975458, 0.050547228317030975458], 0.032458497623198080311),
    ([0.050547228317030975458, 0.89890554336593804908], 0.032458497623198080311),
    ([0.89890554336593804908, 0.050547228317030975458], 0.032458497623198080311),
    ([0.0083947774099576053372, 0.26311282963463811342], 0.027230314174434994265),
    ([0.26311282963463811342, 0.0083947774099576053372], 0.027230314174434994265),
    ([0.0083947774099576053372, 0.72849239295540428124], 0.027230314174434994265),
    ([0.72849239295540428124, 0.0083947774099576053372], 0.027230314174434994265),
    ([0.26311282963463811342, 0.72849239295540428124], 0.027230314174434994265),
    ([0.72849239295540428124, 0.26311282963463811342], 0.027230314174434994265),
];

impl QuadratureRule {
    /// Smallest tabulated symmetric rule (degrees 1, 2, 4, 6, 8) exact for
    /// polynomials of `degree`; a collapsed Gauss rule beyond that.
    pub fn for_degree(degree: usize) -> Self {
        let (table, exact) = match degree {
            0 | 1 => (RULE_1, 1),
            2 => (RULE_2, 2),
            3 | 4 => (RULE_4, 4),
            5 | 6 => (RULE_6, 6),
            7 | 8 => (RULE_8, 8),
            _ => return Self::collapsed(degree),
        };
        Self {
            degree: exact,
            points: table.iter().map(|&([x, y], _)| [1.0 - x - y, x, y]).collect(),
            weights: table.iter().map(|&(_, w)| w).collect(),
        }
    }

    /// Tensor Gauss–Legendre rule mapped onto the triangle by the Duffy
    /// transform; exact for any requested degree.
    pub fn collapsed(degree: usize) -> Self {
        let n = (degree + 2).div_ceil(2);
        let (nodes, weights) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut w = Vec::with_capacity(n * n);
        for (&u, &wu) in nodes.iter().zip(&weights) {
            for (&v, &wv) in nodes.iter().zip(&weights) {
                let x = u;
                let y = v * (1.0 - u);
                points.push([1.0 - x - y, x, y]);
                w.push(2.0 * wu * wv * (1.0 - u));
            }
        }
        Self { degree, points, weights: w }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]` (weights sum to 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Newton on P_n starting from the Chebyshev-like guess.
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if libm::fabs(dx) < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes.push(0.5 * (1.0 - x));
        weights.push(0.5 * w);
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
