//! Uniform rectangular grid, grid functions on its closed node set and
//! functions on its boundary nodes.
//!
//! The closed grid covers `[0, l1] x [0, l2]` with `m` intervals along `x1`
//! and `n` along `x2`; node `(i, j)` sits at `(i*h1, j*h2)`. Grid functions
//! store all `(m+1)*(n+1)` nodes because the difference operators read
//! boundary values at near-boundary interior nodes. Boundary functions store
//! each of the `2(m+1) + 2(n-1)` boundary nodes exactly once, with corner
//! nodes owned by the `x1 = 0` and `x1 = l1` edges.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Smallest admissible interval count per direction; the five-point
/// one-sided derivative needs five distinct nodes on every grid line.
pub const MIN_INTERVALS: usize = 5;

/// Uniform grid on the rectangle `[0, l1] x [0, l2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    l1: f64,
    l2: f64,
    m: usize,
    n: usize,
    h1: f64,
    h2: f64,
}

impl Grid {
    /// Builds the grid with `m` intervals along `x1` and `n` along `x2`.
    pub fn new(l1: f64, l2: f64, m: usize, n: usize) -> Result<Self> {
        if !(l1 > 0.0 && l2 > 0.0) || !l1.is_finite() || !l2.is_finite() {
            return Err(Error::NonPositiveLength { l1, l2 });
        }
        if m < MIN_INTERVALS || n < MIN_INTERVALS {
            return Err(Error::GridTooSmall {
                m,
                n,
                min: MIN_INTERVALS,
            });
        }
        Ok(Grid {
            l1,
            l2,
            m,
            n,
            h1: l1 / m as f64,
            h2: l2 / n as f64,
        })
    }

    /// Square grid on the unit square with `n` intervals per side.
    pub fn unit_square(n: usize) -> Result<Self> {
        Grid::new(1.0, 1.0, n, n)
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    /// Coordinate of grid line `i` along `x1`.
    pub fn x1(&self, i: usize) -> f64 {
        i as f64 * self.h1
    }

    /// Coordinate of grid line `j` along `x2`.
    pub fn x2(&self, j: usize) -> f64 {
        j as f64 * self.h2
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || i == self.m || j == 0 || j == self.n
    }

    /// Number of nodes of the closed grid.
    pub fn node_count(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }

    /// Number of boundary nodes, `2(m+1) + 2(n-1)`.
    pub fn boundary_node_count(&self) -> usize {
        2 * (self.m + self.n)
    }

    /// True if `self` refines `coarse` by exactly a factor of two in each
    /// direction on the same rectangle.
    pub fn refines(&self, coarse: &Grid) -> bool {
        self.m == 2 * coarse.m && self.n == 2 * coarse.n && self.l1 == coarse.l1 && self.l2 == coarse.l2
    }
}

/// Real values on every node of the closed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Array2<f64>,
}

impl GridFunction {
    pub fn zeros(grid: &Grid) -> Self {
        GridFunction {
            grid: *grid,
            values: Array2::zeros((grid.m + 1, grid.n + 1)),
        }
    }

    /// Samples `f(x1, x2)` at every node.
    pub fn sample(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Array2::zeros((grid.m + 1, grid.n + 1));
        for i in 0..=grid.m {
            let x1 = grid.x1(i);
            for j in 0..=grid.n {
                values[[i, j]] = f(x1, grid.x2(j));
            }
        }
        GridFunction { grid: *grid, values }
    }

    /// Wraps an existing value array; the shape must match the grid.
    pub fn from_values(grid: &Grid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (grid.m + 1, grid.n + 1) {
            return Err(Error::GridMismatch);
        }
        Ok(GridFunction { grid: *grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[[i, j]] = v;
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    /// Discrete maximum norm over all closed-grid nodes.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, &v| f64::max(acc, v.abs()))
    }

    /// `max |self - other|` over all nodes; the grids must coincide.
    pub fn diff_norm(&self, other: &GridFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut acc = 0.0_f64;
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            acc = acc.max((a - b).abs());
        }
        Ok(acc)
    }

    /// Injects the values at every second node onto the coarse grid.
    /// `self` must be an exact 2x refinement of `coarse`.
    pub fn restrict_to_coarse(&self, coarse: &Grid) -> Result<GridFunction> {
        if !self.grid.refines(coarse) {
            return Err(Error::NonNestedGrids);
        }
        let mut values = Array2::zeros((coarse.m + 1, coarse.n + 1));
        for i in 0..=coarse.m {
            for j in 0..=coarse.n {
                values[[i, j]] = self.values[[2 * i, 2 * j]];
            }
        }
        Ok(GridFunction { grid: *coarse, values })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Which edge of the rectangle a boundary node belongs to. Corner nodes
/// belong to the `Left`/`Right` edges, where the outward normal is along
/// `x1`; normal-derivative data must follow the same convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `x1 = 0`, outward normal `(-1, 0)`.
    Left,
    /// `x1 = l1`, outward normal `(1, 0)`.
    Right,
    /// `x2 = 0`, outward normal `(0, -1)`.
    Bottom,
    /// `x2 = l2`, outward normal `(0, 1)`.
    Top,
}

/// Real values on the boundary nodes, each corner stored once.
///
/// Storage order: left column `j = 0..=n`, right column `j = 0..=n`,
/// bottom row `i = 1..m`, top row `i = 1..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl BoundaryFunction {
    pub fn zeros(grid: &Grid) -> Self {
        BoundaryFunction {
            grid: *grid,
            values: vec![0.0; grid.boundary_node_count()],
        }
    }

    /// Samples an edge-aware function; corners are sampled as part of the
    /// left/right edges.
    pub fn sample_on_edges(grid: &Grid, f: impl Fn(Edge, f64, f64) -> f64) -> Self {
        let mut out = BoundaryFunction::zeros(grid);
        for k in 0..out.values.len() {
            let (i, j, edge) = out.node(k);
            out.values[k] = f(edge, grid.x1(i), grid.x2(j));
        }
        out
    }

    /// Samples the trace of a function defined on the whole boundary
    /// (edge-independent, e.g. Dirichlet data).
    pub fn sample_trace(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::sample_on_edges(grid, |_, x1, x2| f(x1, x2))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of boundary nodes stored (always `2(m+1) + 2(n-1)`).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// A boundary function is never empty for a valid grid.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinates and owning edge for flat index `k`.
    fn node(&self, k: usize) -> (usize, usize, Edge) {
        let (m, n) = (self.grid.m, self.grid.n);
        if k <= n {
            (0, k, Edge::Left)
        } else if k <= 2 * n + 1 {
            (m, k - (n + 1), Edge::Right)
        } else if k < 2 * n + 1 + m {
            (k - (2 * n + 1), 0, Edge::Bottom)
        } else {
            (k - (2 * n + m), self.grid.n, Edge::Top)
        }
    }

    fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let (m, n) = (self.grid.m, self.grid.n);
        if i == 0 && j <= n {
            Some(j)
        } else if i == m && j <= n {
            Some(n + 1 + j)
        } else if j == 0 && i >= 1 && i < m {
            Some(2 * n + 1 + i)
        } else if j == n && i >= 1 && i < m {
            Some(2 * n + m + i)
        } else {
            None
        }
    }

    /// Value at boundary node `(i, j)`. Panics if the node is not on the
    /// boundary.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let k = self
            .index_of(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) is not a boundary node"));
        self.values[k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .index_of(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) is not a boundary node"));
        self.values[k] = v;
    }

    /// Visits every boundary node exactly once.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Edge, f64)> + '_ {
        (0..self.values.len()).map(|k| {
            let (i, j, edge) = self.node(k);
            (i, j, edge, self.values[k])
        })
    }

    /// Replaces every value by `f(i, j, edge, value)`.
    pub fn update(&mut self, mut f: impl FnMut(usize, usize, Edge, f64) -> f64) {
        for k in 0..self.values.len() {
            let (i, j, edge) = self.node(k);
            self.values[k] = f(i, j, edge, self.values[k]);
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, &v| f64::max(acc, v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
