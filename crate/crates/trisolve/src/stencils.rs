//! Difference operators on the closed grid: the second differences in each
//! direction, the fourth-order compact nine-point operator with its
//! right-hand-side correction, and the fourth-order one-sided discrete
//! normal derivative on the boundary.

use ndarray::Array2;

use crate::grid::{BoundaryFunction, Grid, GridFunction};

/// Real values at the interior nodes `i = 1..m-1`, `j = 1..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorField {
    grid: Grid,
    values: Array2<f64>,
}

impl InteriorField {
    pub fn zeros(grid: &Grid) -> Self {
        InteriorField {
            grid: *grid,
            values: Array2::zeros((grid.m() - 1, grid.n() - 1)),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Value at closed-grid node `(i, j)` with `1 <= i <= m-1`,
    /// `1 <= j <= n-1`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i - 1, j - 1]]
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, &v| f64::max(acc, v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Central second difference in `x1` at every interior node.
pub fn second_diff_x1(y: &GridFunction) -> InteriorField {
    let g = *y.grid();
    let inv = 1.0 / (g.h1() * g.h1());
    let mut out = InteriorField::zeros(&g);
    for i in 1..g.m() {
        for j in 1..g.n() {
            out.values[[i - 1, j - 1]] = (y.get(i - 1, j) - 2.0 * y.get(i, j) + y.get(i + 1, j)) * inv;
        }
    }
    out
}

/// Central second difference in `x2` at every interior node.
pub fn second_diff_x2(y: &GridFunction) -> InteriorField {
    let g = *y.grid();
    let inv = 1.0 / (g.h2() * g.h2());
    let mut out = InteriorField::zeros(&g);
    for i in 1..g.m() {
        for j in 1..g.n() {
            out.values[[i - 1, j - 1]] = (y.get(i, j - 1) - 2.0 * y.get(i, j) + y.get(i, j + 1)) * inv;
        }
    }
    out
}

/// Fourth-order compact nine-point operator: the five-point Laplacian plus
/// `(h1^2 + h2^2)/12` times the mixed fourth difference. The mixed term is
/// evaluated as the explicit tensor-product stencil over the 3x3
/// neighborhood, so only closed-grid values are read.
pub fn compact_laplacian(y: &GridFunction) -> InteriorField {
    let g = *y.grid();
    let (h1s, h2s) = (g.h1() * g.h1(), g.h2() * g.h2());
    let c = (h1s + h2s) / 12.0;
    let inv1 = 1.0 / h1s;
    let inv2 = 1.0 / h2s;
    let invc = c / (h1s * h2s);
    let mut out = InteriorField::zeros(&g);
    for i in 1..g.m() {
        for j in 1..g.n() {
            let d1 = (y.get(i - 1, j) - 2.0 * y.get(i, j) + y.get(i + 1, j)) * inv1;
            let d2 = (y.get(i, j - 1) - 2.0 * y.get(i, j) + y.get(i, j + 1)) * inv2;
            let cross = (y.get(i - 1, j - 1) - 2.0 * y.get(i, j - 1) + y.get(i + 1, j - 1))
                - 2.0 * (y.get(i - 1, j) - 2.0 * y.get(i, j) + y.get(i + 1, j))
                + (y.get(i - 1, j + 1) - 2.0 * y.get(i, j + 1) + y.get(i + 1, j + 1));
            out.values[[i - 1, j - 1]] = d1 + d2 + cross * invc;
        }
    }
    out
}

/// Right-hand-side correction that pairs with [`compact_laplacian`]:
/// `psi + (h1^2/12) * d2/dx1^2 psi + (h2^2/12) * d2/dx2^2 psi` at interior
/// nodes. Boundary values of `psi` are read at near-boundary nodes.
pub fn compact_rhs(psi: &GridFunction) -> InteriorField {
    let g = *psi.grid();
    let mut out = InteriorField::zeros(&g);
    for i in 1..g.m() {
        for j in 1..g.n() {
            let d1 = psi.get(i - 1, j) - 2.0 * psi.get(i, j) + psi.get(i + 1, j);
            let d2 = psi.get(i, j - 1) - 2.0 * psi.get(i, j) + psi.get(i, j + 1);
            out.values[[i - 1, j - 1]] = psi.get(i, j) + d1 / 12.0 + d2 / 12.0;
        }
    }
    out
}

/// Five-point one-sided derivative along increasing index, exact on
/// polynomials of degree four. `u0` is the boundary value, `u1..u4` the
/// next nodes inward.
#[inline]
fn one_sided(u0: f64, u1: f64, u2: f64, u3: f64, u4: f64, h: f64) -> f64 {
    (-25.0 * u0 + 48.0 * u1 - 36.0 * u2 + 16.0 * u3 - 3.0 * u4) / (12.0 * h)
}

/// Fourth-order approximation of the outward normal derivative on every
/// boundary node.
///
/// On each edge the five-point formula differentiates along the inward
/// grid line and the sign is flipped, so the result is the outward
/// derivative everywhere. Corner nodes carry the left/right edge value.
pub fn normal_derivative(u: &GridFunction) -> BoundaryFunction {
    let g = *u.grid();
    let (m, n) = (g.m(), g.n());
    let mut out = BoundaryFunction::zeros(&g);
    for j in 0..=n {
        // x1 = 0: inward direction is +x1, outward derivative is the negation.
        out.set(
            0,
            j,
            -one_sided(u.get(0, j), u.get(1, j), u.get(2, j), u.get(3, j), u.get(4, j), g.h1()),
        );
        // x1 = l1: inward direction is -x1.
        out.set(
            m,
            j,
            one_sided(
                u.get(m, j),
                u.get(m - 1, j),
                u.get(m - 2, j),
                u.get(m - 3, j),
                u.get(m - 4, j),
                -g.h1(),
            ),
        );
    }
    for i in 1..m {
        out.set(
            i,
            0,
            -one_sided(u.get(i, 0), u.get(i, 1), u.get(i, 2), u.get(i, 3), u.get(i, 4), g.h2()),
        );
        out.set(
            i,
            n,
            one_sided(
                u.get(i, n),
                u.get(i, n - 1),
                u.get(i, n - 2),
                u.get(i, n - 3),
                u.get(i, n - 4),
                -g.h2(),
            ),
        );
    }
    out
}

/// Sine-mode eigenvalue of [`second_diff_x1`]: `-(4/h1^2) sin^2(p pi / 2m)`.
pub fn sine_eigenvalue_x1(grid: &Grid, p: usize) -> f64 {
    let s = (p as f64 * std::f64::consts::PI / (2.0 * grid.m() as f64)).sin();
    -4.0 / (grid.h1() * grid.h1()) * s * s
}

/// Sine-mode eigenvalue of [`second_diff_x2`]: `-(4/h2^2) sin^2(q pi / 2n)`.
pub fn sine_eigenvalue_x2(grid: &Grid, q: usize) -> f64 {
    let s = (q as f64 * std::f64::consts::PI / (2.0 * grid.n() as f64)).sin();
    -4.0 / (grid.h2() * grid.h2()) * s * s
}
