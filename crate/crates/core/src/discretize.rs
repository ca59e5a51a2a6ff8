//! Uniform grid on [0, 1], difference operators and trapezoid quadrature.

use crate::error::{Error, Result};

/// Smallest admissible number of intervals.
pub const MIN_INTERVALS: usize = 8;

/// Uniform grid with `n` intervals and nodes `x_i = i / n`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_INTERVALS {
            return Err(Error::GridTooCoarse(n));
        }
        Ok(Self { n })
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.x(i))
    }

    pub fn check_len(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: field.len(),
            });
        }
        Ok(())
    }

    /// True when every node of `self` is also a node of `fine`.
    pub fn nests_in(&self, fine: &Grid) -> bool {
        fine.n.is_multiple_of(self.n)
    }
}

/// Prescribed slope `u_x(1)` used to eliminate the ghost node at x = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinClosure {
    pub slope: f64,
}

impl RobinClosure {
    /// Damper condition `u_x(1) = -a w(1) + d`.
    pub fn damper(a: f64, w_end: f64, d: f64) -> Self {
        Self {
            slope: -a * w_end + d,
        }
    }
}

/// Second difference with `u(0) = 0` and the ghost-node closure at x = 1.
///
/// Interior rows are second order; the closure row at x = 1 is first order.
/// The value at x = 0 is linearly extrapolated from the first two interior
/// rows so that quadratures of the output stay second order.
pub fn second_diff(grid: &Grid, field: &[f64], right: RobinClosure) -> Result<Vec<f64>> {
    grid.check_len(field)?;
    let n = grid.n();
    let h2 = grid.h() * grid.h();
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        out[i] = (field[i - 1] - 2.0 * field[i] + field[i + 1]) / h2;
    }
    out[n] = 2.0 * (field[n - 1] - field[n]) / h2 + 2.0 * right.slope / grid.h();
    out[0] = 2.0 * out[1] - out[2];
    Ok(out)
}

/// Central differences inside, second-order one-sided differences at the ends.
pub fn first_diff(grid: &Grid, field: &[f64]) -> Result<Vec<f64>> {
    grid.check_len(field)?;
    let n = grid.n();
    let h = grid.h();
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        out[i] = (field[i + 1] - field[i - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * field[0] + 4.0 * field[1] - field[2]) / (2.0 * h);
    out[n] = (3.0 * field[n] - 4.0 * field[n - 1] + field[n - 2]) / (2.0 * h);
    Ok(out)
}

/// Composite trapezoid rule over [0, 1].
pub fn trapezoid(grid: &Grid, field: &[f64]) -> f64 {
    let n = field.len() - 1;
    let interior: f64 = field[1..n].iter().sum();
    grid.h() * (interior + 0.5 * (field[0] + field[n]))
}

/// Trapezoid inner product.
pub fn inner(grid: &Grid, f: &[f64], g: &[f64]) -> f64 {
    let n = f.len() - 1;
    let interior: f64 = (1..n).map(|i| f[i] * g[i]).sum();
    grid.h() * (interior + 0.5 * (f[0] * g[0] + f[n] * g[n]))
}

/// Squared trapezoid L² norm.
pub fn norm_sq(grid: &Grid, f: &[f64]) -> f64 {
    inner(grid, f, f)
}

pub fn norm(grid: &Grid, f: &[f64]) -> f64 {
    norm_sq(grid, f).sqrt()
}

/// Edge Dirichlet form `Σ h ((f[i+1] - f[i]) / h)²`.
pub fn dirichlet_form(grid: &Grid, f: &[f64]) -> f64 {
    let h = grid.h();
    f.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum::<f64>() / h
}

/// Tridiagonal operator acting on nodal fields; row `i` reads
/// `lower[i]·f[i-1] + diag[i]·f[i] + upper[i]·f[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialOperator {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SpatialOperator {
    fn zeros(grid: &Grid) -> Self {
        let m = grid.len();
        Self {
            lower: vec![0.0; m],
            diag: vec![0.0; m],
            upper: vec![0.0; m],
        }
    }

    /// Homogeneous part of [`second_diff`]: zero row at x = 0, ghost-node row
    /// at x = 1 with the boundary slope left to the caller.
    pub fn second_difference(grid: &Grid) -> Self {
        let n = grid.n();
        let h2 = grid.h() * grid.h();
        let mut op = Self::zeros(grid);
        for i in 1..n {
            op.lower[i] = 1.0 / h2;
            op.diag[i] = -2.0 / h2;
            op.upper[i] = 1.0 / h2;
        }
        op.lower[n] = 2.0 / h2;
        op.diag[n] = -2.0 / h2;
        op
    }

    /// Summation-by-parts first derivative: central inside, one-sided
    /// first-order rows at both ends.
    pub fn coupling_derivative(grid: &Grid) -> Self {
        let n = grid.n();
        let h = grid.h();
        let mut op = Self::zeros(grid);
        for i in 1..n {
            op.lower[i] = -0.5 / h;
            op.upper[i] = 0.5 / h;
        }
        op.diag[0] = -1.0 / h;
        op.upper[0] = 1.0 / h;
        op.lower[n] = -1.0 / h;
        op.diag[n] = 1.0 / h;
        op
    }

    pub fn apply(&self, field: &[f64]) -> Vec<f64> {
        let m = field.len();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i] * field[i];
                if i > 0 {
                    s += self.lower[i] * field[i - 1];
                }
                if i + 1 < m {
                    s += self.upper[i] * field[i + 1];
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
        grid.nodes().map(f).collect()
    }

    fn slope(ns: &[usize], errs: &[f64]) -> f64 {
        let xs: Vec<f64> = ns.iter().map(|n| (1.0 / *n as f64).ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        num / den
    }

    #[test]
    fn grid_rejects_coarse() {
        assert!(matches!(Grid::new(7), Err(Error::GridTooCoarse(7))));
        let g = Grid::new(8).unwrap();
        assert_eq!(g.h() * g.n() as f64, 1.0);
        assert_eq!(g.len(), 9);
    }

    #[test]
    fn length_mismatch() {
        let g = Grid::new(8).unwrap();
        assert!(matches!(
            first_diff(&g, &[0.0; 5]),
            Err(Error::LengthMismatch { expected: 9, got: 5 })
        ));
        assert!(second_diff(&g, &[0.0; 10], RobinClosure { slope: 0.0 }).is_err());
    }

    #[test]
    fn second_diff_of_linear_is_zero_inside() {
        let g = Grid::new(8).unwrap();
        let u = sample(&g, |x| x);
        let out = second_diff(&g, &u, RobinClosure { slope: 1.0 }).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-12), "{out:?}");
    }

    #[test]
    fn second_diff_of_square_is_two() {
        let g = Grid::new(8).unwrap();
        let u = sample(&g, |x| x * x);
        let out = second_diff(&g, &u, RobinClosure { slope: 2.0 }).unwrap();
        for v in &out[1..8] {
            assert!((v - 2.0).abs() < 1e-12);
        }
        assert!((out[8] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn second_diff_sine_order_two() {
        let ns = [32, 64, 128, 256];
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let g = Grid::new(n).unwrap();
                let u = sample(&g, |x| (PI * x).sin());
                let out = second_diff(&g, &u, RobinClosure { slope: -PI }).unwrap();
                g.nodes()
                    .zip(&out)
                    .take(n)
                    .map(|(x, v)| (v + PI * PI * (PI * x).sin()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let p = slope(&ns, &errs);
        assert!((p - 2.0).abs() < 0.1, "order {p}");
    }

    #[test]
    fn closure_row_is_first_order() {
        // 2(u_{N-1} - u_N)/h² + 2u'(1)/h = u''(1) - h u'''(1)/3 + O(h²)
        for n in [64, 128, 256] {
            let g = Grid::new(n).unwrap();
            let u = sample(&g, |x| (PI * x).sin());
            let out = second_diff(&g, &u, RobinClosure { slope: -PI }).unwrap();
            let lead = g.h() * PI.powi(3) / 3.0;
            assert!((out[n] + lead).abs() < 5.0 * g.h() * g.h() * PI.powi(4));
        }
    }

    #[test]
    fn first_diff_exact_cases() {
        let g = Grid::new(8).unwrap();
        let c = first_diff(&g, &[3.0; 9]).unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-12));
        let l = first_diff(&g, &sample(&g, |x| x)).unwrap();
        assert!(l.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn first_diff_sine_order_two() {
        let ns = [32, 64, 128, 256];
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let g = Grid::new(n).unwrap();
                let out = first_diff(&g, &sample(&g, |x| (PI * x).sin())).unwrap();
                g.nodes()
                    .zip(&out)
                    .map(|(x, v)| (v - PI * (PI * x).cos()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let p = slope(&ns, &errs);
        assert!((p - 2.0).abs() < 0.1, "order {p}");
    }

    #[test]
    fn summation_by_parts_consistency() {
        // fields vanishing at both ends: <D2 u, u> = -<Du, Du> + O(h²)
        for n in [64, 128, 256] {
            let g = Grid::new(n).unwrap();
            let u = sample(&g, |x| (PI * x).sin() + 0.3 * (3.0 * PI * x).sin());
            let ux = first_diff(&g, &u).unwrap();
            let slope_end = ux[n];
            let uxx = second_diff(&g, &u, RobinClosure { slope: slope_end }).unwrap();
            let lhs = inner(&g, &uxx, &u);
            let rhs = -norm_sq(&g, &ux);
            let h = g.h();
            // measured ratio |lhs - rhs| / (h² |rhs|) stays near 8..11
            assert!((lhs - rhs).abs() <= 20.0 * h * h * rhs.abs(), "n={n}");
        }
    }

    #[test]
    fn trapezoid_exact_on_linears() {
        let g = Grid::new(16).unwrap();
        assert!((trapezoid(&g, &sample(&g, |x| 2.0 * x + 1.0)) - 2.0).abs() < 1e-14);
        let s = sample(&g, |x| (PI * x).sin());
        assert!((norm_sq(&g, &s) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn operator_matches_free_functions() {
        let g = Grid::new(16).unwrap();
        let u = sample(&g, |x| x * x * x - x);
        let op = SpatialOperator::second_difference(&g);
        let a = op.apply(&u);
        let b = second_diff(&g, &u, RobinClosure { slope: 0.0 }).unwrap();
        for i in 1..=16 {
            assert!((a[i] - b[i]).abs() < 1e-9);
        }
        let interior_sums: Vec<f64> = (1..16).map(|i| op.lower[i] + op.diag[i] + op.upper[i]).collect();
        assert!(interior_sums.iter().all(|s| s.abs() < 1e-9));
    }
}
