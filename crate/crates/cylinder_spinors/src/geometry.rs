use crate::CylinderError;
use serde::{Deserialize, Serialize};

/// Flat model tube `N_R` with angular/circle bands and a radial grid on `(0, R]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderGeometry {
    r_outer: f64,
    k_max: usize,
    l_max: usize,
    radial_grid: Vec<f64>,
}

/// Ratio of the outer radius to the first grid point.
pub const INNER_RATIO: f64 = 2048.0;

/// Width (relative to R) where the graded grid switches from logarithmic to uniform spacing.
const GRADING: f64 = 0.12;

impl CylinderGeometry {
    pub fn new(
        r_outer: f64,
        k_max: usize,
        l_max: usize,
        radial_grid: Vec<f64>,
    ) -> Result<Self, CylinderError> {
        if !(r_outer > 0.0 && r_outer.is_finite()) {
            return Err(CylinderError::Geometry(format!("R must be positive, got {r_outer}")));
        }
        if radial_grid.len() < 64 {
            return Err(CylinderError::Geometry(format!(
                "radial grid needs at least 64 points, got {}",
                radial_grid.len()
            )));
        }
        if !(radial_grid[0] > 0.0) || radial_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CylinderError::Geometry("grid must be positive and strictly increasing".into()));
        }
        let last = *radial_grid.last().unwrap();
        if (last - r_outer).abs() > 1e-12 * r_outer {
            return Err(CylinderError::Geometry(format!("grid ends at {last}, expected R = {r_outer}")));
        }
        Ok(Self {
            r_outer,
            k_max,
            l_max,
            radial_grid,
        })
    }

    /// `n`-point grid from `R/2048` to `R`, uniform in `x = ln r + r/(0.12 R)`.
    ///
    /// Spacing is logarithmic near the axis and close to uniform near `R`.
    pub fn graded(r_outer: f64, k_max: usize, l_max: usize, n: usize) -> Result<Self, CylinderError> {
        let grid = graded_grid(r_outer / INNER_RATIO, r_outer, n);
        Self::new(r_outer, k_max, l_max, grid)
    }

    /// Same layout with the spacing in `x` halved.
    pub fn refined(&self) -> Result<Self, CylinderError> {
        let g = &self.radial_grid;
        let mut out = Vec::with_capacity(2 * g.len() - 1);
        let delta = GRADING * self.r_outer;
        for w in g.windows(2) {
            out.push(w[0]);
            let xm = 0.5 * (map_x(w[0], delta) + map_x(w[1], delta));
            out.push(invert_x(xm, delta, w[0], w[1]));
        }
        out.push(*g.last().unwrap());
        Self::new(self.r_outer, self.k_max, self.l_max, out)
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn grid(&self) -> &[f64] {
        &self.radial_grid
    }

    /// The grid rescaled so that it ends at `r`.
    pub fn grid_to(&self, r: f64) -> Vec<f64> {
        let s = r / self.r_outer;
        self.radial_grid.iter().map(|x| x * s).collect()
    }
}

fn map_x(r: f64, delta: f64) -> f64 {
    r.ln() + r / delta
}

fn invert_x(x: f64, delta: f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut r = 0.5 * (a + b);
    for _ in 0..200 {
        let f = map_x(r, delta) - x;
        if f.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
        if f > 0.0 {
            b = r;
        } else {
            a = r;
        }
        let step = f / (1.0 / r + 1.0 / delta);
        let newton = r - step;
        r = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
    }
    r
}

pub(crate) fn graded_grid(r_inner: f64, r_outer: f64, n: usize) -> Vec<f64> {
    let delta = GRADING * r_outer;
    let x0 = map_x(r_inner, delta);
    let x1 = map_x(r_outer, delta);
    let mut g: Vec<f64> = (0..n)
        .map(|j| {
            let x = x0 + (x1 - x0) * j as f64 / (n - 1) as f64;
            invert_x(x, delta, r_inner * 0.5, r_outer * 1.5)
        })
        .collect();
    g[0] = r_inner;
    g[n - 1] = r_outer;
    g
}

/// First-derivative weights at `x0` for the nodes `xs` (Fornberg's recursion).
pub fn fd_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// Five-point derivative on an arbitrary increasing grid; one-sided near the ends.
pub fn derivative<V>(grid: &[f64], f: &[V]) -> Vec<V>
where
    V: Copy + std::ops::Mul<f64, Output = V> + std::ops::Add<Output = V> + Default,
{
    let n = grid.len();
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(2).min(n - 5);
            let w = fd_weights(grid[i], &grid[start..start + 5]);
            (0..5).fold(V::default(), |s, j| s + f[start + j] * w[j])
        })
        .collect()
}

/// `d/dr` as `(1/r) d/ds` with `s = ln r`, five-point stencils in `s`.
///
/// Power laws `r^a` are smooth in `s`, which keeps the error uniform down to the axis.
pub fn log_derivative<V>(grid: &[f64], f: &[V]) -> Vec<V>
where
    V: Copy + std::ops::Mul<f64, Output = V> + std::ops::Add<Output = V> + Default,
{
    let s: Vec<f64> = grid.iter().map(|r| r.ln()).collect();
    derivative(&s, f)
        .into_iter()
        .zip(grid)
        .map(|(d, r)| d * (1.0 / r))
        .collect()
}

/// Composite Simpson rule on a non-uniform grid (parabola through each interval pair).
pub fn simpson(grid: &[f64], f: &[f64]) -> f64 {
    let n = grid.len();
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let (h0, h1) = (grid[i + 1] - grid[i], grid[i + 2] - grid[i + 1]);
        total += (h0 + h1) / 6.0
            * ((2.0 - h1 / h0) * f[i]
                + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[i + 1]
                + (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // odd interval count: last interval from the parabola through the last three nodes
        let (h0, h1) = (grid[n - 2] - grid[n - 3], grid[n - 1] - grid[n - 2]);
        total += f[n - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
            + f[n - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
            - f[n - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    total
}
