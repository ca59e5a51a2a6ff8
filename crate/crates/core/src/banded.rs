//! Banded matrices and LU factorization with partial pivoting.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub-diagonals and `ku` super-diagonals, stored by row.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku && i < self.n && j < self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.kl - i]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(i, j)`. Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let w = self.width();
        self.data[i * w + j + self.kl - i] += v;
    }

    /// Replaces row `i` by the identity row.
    pub fn set_identity_row(&mut self, i: usize) {
        let w = self.width();
        self.data[i * w..(i + 1) * w].fill(0.0);
        self.data[i * w + self.kl] = 1.0;
    }

    pub fn clear_row(&mut self, i: usize) {
        let w = self.width();
        self.data[i * w..(i + 1) * w].fill(0.0);
    }

    /// `alpha·self + beta·other`, both with identical shape.
    pub fn combine(&self, alpha: f64, other: &BandMatrix, beta: f64) -> BandMatrix {
        assert_eq!((self.n, self.kl, self.ku), (other.n, other.kl, other.ku));
        BandMatrix {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let w = self.width();
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi)
                    .map(|j| self.data[i * w + j + self.kl - i] * x[j])
                    .sum()
            })
            .collect()
    }

    /// Factorizes a copy of the matrix.
    pub fn factor(&self) -> Result<BandLu> {
        BandLu::new(self)
    }
}

/// LU factors of a [`BandMatrix`] with row pivoting.
///
/// `U` has up to `kl + ku` super-diagonals after pivoting; the multipliers of
/// `L` are kept per column in the order the row swaps were applied.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    uw: usize,
    upper: Vec<f64>,
    lower: Vec<f64>,
    pivots: Vec<usize>,
    pivot_ratio: f64,
}

impl BandLu {
    fn new(a: &BandMatrix) -> Result<Self> {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        // each working row covers columns [i - kl, i + kl + ku]
        let w = 2 * kl + ku + 1;
        let mut rows = vec![0.0; n * w];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                rows[i * w + j + kl - i] = a.get(i, j);
            }
        }
        let at = |i: usize, j: usize| i * w + j + kl - i;
        let scale = a.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut lower = vec![0.0; n * kl];
        let mut pivots = vec![0; n];
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0_f64);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            for r in k + 1..=last {
                if rows[at(r, k)].abs() > rows[at(p, k)].abs() {
                    p = r;
                }
            }
            pivots[k] = p;
            let cend = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=cend {
                    rows.swap(at(k, j), at(p, j));
                }
            }
            let piv = rows[at(k, k)];
            pmin = pmin.min(piv.abs());
            pmax = pmax.max(piv.abs());
            if piv.abs() <= f64::EPSILON * scale * n as f64 || !piv.is_finite() {
                return Err(Error::SingularSystem {
                    row: k,
                    pivot_ratio: pmin / pmax.max(f64::MIN_POSITIVE),
                });
            }
            for r in k + 1..=last {
                let m = rows[at(r, k)] / piv;
                lower[k * kl + (r - k - 1)] = m;
                if m != 0.0 {
                    for j in k + 1..=cend {
                        rows[at(r, j)] -= m * rows[at(k, j)];
                    }
                }
            }
        }
        let uw = kl + ku + 1;
        let mut upper = vec![0.0; n * uw];
        for i in 0..n {
            for j in i..=(i + kl + ku).min(n - 1) {
                upper[i * uw + j - i] = rows[at(i, j)];
            }
        }
        Ok(Self {
            n,
            kl,
            uw,
            upper,
            lower,
            pivots,
            pivot_ratio: pmin / pmax,
        })
    }

    /// Smallest over largest pivot magnitude; a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, uw) = (self.n, self.kl, self.uw);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                let end = (k + kl).min(n - 1);
                let multipliers = &self.lower[k * kl..k * kl + (end - k)];
                for (br, m) in b[k + 1..=end].iter_mut().zip(multipliers) {
                    *br -= m * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let row = &self.upper[i * uw..(i + 1) * uw];
            let mut s = b[i];
            for j in i + 1..=(i + uw - 1).min(n - 1) {
                s -= row[j - i] * b[j];
            }
            b[i] = s / row[0];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
