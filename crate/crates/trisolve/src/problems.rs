//! Built-in benchmark problems on the unit square, each constructed by the
//! method of manufactured solutions or with a fixed forcing, plus a
//! finite-difference check for hand-derived Laplacian chains.

use std::f64::consts::PI;

use crate::grid::{Edge, Grid, GridFunction};
use crate::stencils::{second_diff_x1, second_diff_x2};
use crate::triharmonic::ProblemSpec;

type ScalarField = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A manufactured solution together with its iterated Laplacians.
pub struct ManufacturedSolution {
    pub u: ScalarField,
    pub lap_u: ScalarField,
    pub bilap_u: ScalarField,
    pub trilap_u: ScalarField,
}

/// `p(t) = t^3 (t - 1)^3` and its even derivatives; `p`, `p'` and `p''`
/// vanish at 0 and 1, which makes `p(x1) p(x2)` satisfy the homogeneous
/// boundary conditions.
fn p(t: f64) -> f64 {
    t.powi(3) * (t - 1.0).powi(3)
}

fn p2(t: f64) -> f64 {
    // 30 t^4 - 60 t^3 + 36 t^2 - 6 t
    (((30.0 * t - 60.0) * t + 36.0) * t - 6.0) * t
}

fn p4(t: f64) -> f64 {
    (360.0 * t - 360.0) * t + 72.0
}

const P6: f64 = 720.0;

/// Manufactured chain for [`example1`]: `u = p(x1) p(x2)` with the product
/// expansion of the iterated Laplacians.
pub fn example1_manufactured() -> ManufacturedSolution {
    ManufacturedSolution {
        u: Box::new(|x1, x2| p(x1) * p(x2)),
        lap_u: Box::new(|x1, x2| p2(x1) * p(x2) + p(x1) * p2(x2)),
        bilap_u: Box::new(|x1, x2| p4(x1) * p(x2) + 2.0 * p2(x1) * p2(x2) + p(x1) * p4(x2)),
        trilap_u: Box::new(|x1, x2| {
            P6 * p(x2) + 3.0 * p4(x1) * p2(x2) + 3.0 * p2(x1) * p4(x2) + P6 * p(x1)
        }),
    }
}

/// Homogeneous problem manufactured around `u* = x1^3 (x1-1)^3 x2^3 (x2-1)^3`:
/// the forcing is the exact triple Laplacian plus terms that vanish at the
/// solution.
pub fn example1() -> ProblemSpec {
    let ms = example1_manufactured();
    let (u_star, lap_star, bilap_star, trilap_star) = (ms.u, ms.lap_u, ms.bilap_u, ms.trilap_u);
    ProblemSpec::new(move |x1, x2, u, v, w| {
        trilap_star(x1, x2)
            - (w - bilap_star(x1, x2)).sin()
            - ((u - u_star(x1, x2)).cos() + 1.0) * (v - lap_star(x1, x2)).sin()
    })
    .with_exact_solution(|x1, x2| p(x1) * p(x2))
}

/// Homogeneous problem with forcing
/// `x1^6 + x2^6 + sin(v) sin(w) e^{v - 1}`; no exact solution is known.
pub fn example2() -> ProblemSpec {
    ProblemSpec::new(|x1, x2, _, v, w| x1.powi(6) + x2.powi(6) + v.sin() * w.sin() * (v - 1.0).exp())
}

/// Homogeneous problem with forcing
/// `-pi^3 sin(pi x1) sin(pi x2) + u v - w / 2`; no exact solution is known.
pub fn example3() -> ProblemSpec {
    ProblemSpec::new(|x1, x2, u, v, w| {
        -PI.powi(3) * (PI * x1).sin() * (PI * x2).sin() + u * v - w / 2.0
    })
}

/// Manufactured chain for [`example4`]: `u = e^{x1} sin(x2)` is harmonic,
/// so every Laplacian in the chain vanishes.
pub fn example4_manufactured() -> ManufacturedSolution {
    ManufacturedSolution {
        u: Box::new(|x1, x2| x1.exp() * x2.sin()),
        lap_u: Box::new(|_, _| 0.0),
        bilap_u: Box::new(|_, _| 0.0),
        trilap_u: Box::new(|_, _| 0.0),
    }
}

/// Nonhomogeneous problem manufactured around the harmonic
/// `u* = e^{x1} sin(x2)`. Boundary data are the traces of `u*`: its value,
/// its outward normal derivative (edge-dependent sign) and its vanishing
/// Laplacian.
pub fn example4() -> ProblemSpec {
    let u_star = |x1: f64, x2: f64| x1.exp() * x2.sin();
    ProblemSpec::new(move |x1, x2, u, v, w| (u - u_star(x1, x2)).sin() - v.cos() + w + 1.0)
        .with_boundary(
            u_star,
            |edge, x1, x2| match edge {
                Edge::Left => -x1.exp() * x2.sin(),
                Edge::Right => x1.exp() * x2.sin(),
                Edge::Bottom => -x1.exp() * x2.cos(),
                Edge::Top => x1.exp() * x2.cos(),
            },
            |_, _| 0.0,
        )
        .with_exact_solution(u_star)
}

pub fn example(id: u8) -> Option<ProblemSpec> {
    match id {
        1 => Some(example1()),
        2 => Some(example2()),
        3 => Some(example3()),
        4 => Some(example4()),
        _ => None,
    }
}

/// Maximum deviations between the second-order discrete Laplacian of each
/// chain member and the next member, over interior nodes.
#[derive(Debug, Clone, Copy)]
pub struct ChainDiscrepancy {
    /// `max |lap_h u - lap_u|`, `max |lap_h lap_u - bilap_u|`,
    /// `max |lap_h bilap_u - trilap_u|`.
    pub links: [f64; 3],
}

impl ChainDiscrepancy {
    pub fn worst(&self) -> f64 {
        self.links.iter().fold(0.0, |a, &b| f64::max(a, b))
    }
}

/// Checks a hand-derived Laplacian chain with the five-point discrete
/// Laplacian; each link's discrepancy is `O(h^2)`, so halving the mesh must
/// shrink it close to four-fold.
pub fn verify_manufactured(ms: &ManufacturedSolution, grid: &Grid) -> ChainDiscrepancy {
    let chain: [&ScalarField; 4] = [&ms.u, &ms.lap_u, &ms.bilap_u, &ms.trilap_u];
    let mut links = [0.0; 3];
    for (k, link) in links.iter_mut().enumerate() {
        let samples = GridFunction::sample(grid, chain[k]);
        let d1 = second_diff_x1(&samples);
        let d2 = second_diff_x2(&samples);
        let next = GridFunction::sample(grid, chain[k + 1]);
        let mut worst = 0.0_f64;
        for i in 1..grid.m() {
            for j in 1..grid.n() {
                worst = worst.max((d1.get(i, j) + d2.get(i, j) - next.get(i, j)).abs());
            }
        }
        *link = worst;
    }
    ChainDiscrepancy { links }
}
