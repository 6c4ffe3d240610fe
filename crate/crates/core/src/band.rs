//! Symmetric banded storage and a banded Cholesky factorization.

use crate::error::{Error, Result};

/// Symmetric matrix stored by its lower band: `lower[i][k] = A[i, i - k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    kd: usize,
    lower: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, kd: usize) -> Self {
        Self {
            n,
            kd,
            lower: vec![0.0; n * (kd + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of sub-diagonals.
    pub fn bandwidth(&self) -> usize {
        self.kd
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = r - c;
        (k <= self.kd).then_some(r * (self.kd + 1) + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.lower[s])
    }

    /// Adds `v` to the (i, j) entry, and thereby to (j, i).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.kd));
        self.lower[s] += v;
    }

    /// Returns `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SymBand, b: f64) -> SymBand {
        assert_eq!(self.n, other.n);
        let kd = self.kd.max(other.kd);
        let mut out = SymBand::zeros(self.n, kd);
        for i in 0..self.n {
            for k in 0..=kd.min(i) {
                let j = i - k;
                let v = a * self.get(i, j) + b * other.get(i, j);
                if v != 0.0 {
                    out.add(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        let w = self.kd + 1;
        for i in 0..self.n {
            let row = &self.lower[i * w..(i + 1) * w];
            y[i] += row[0] * x[i];
            for k in 1..=self.kd.min(i) {
                let j = i - k;
                y[i] += row[k] * x[j];
                y[j] += row[k] * x[i];
            }
        }
    }

    /// xᵀ A y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.lower.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Nonzero entries of the full matrix as (row, col, value), row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kd);
            let hi = (i + self.kd).min(self.n - 1);
            for j in lo..=hi {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        BandCholesky::factor(self)
    }
}

/// Lower-triangular banded Cholesky factor L with A = L Lᵀ.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    kd: usize,
    // l[i * (kd + 1) + k] = L[i, i - k]
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &SymBand) -> Result<Self> {
        let n = a.n;
        let kd = a.kd;
        let w = kd + 1;
        let mut l = a.lower.clone();
        for i in 0..n {
            let jlo = i.saturating_sub(kd);
            for j in jlo..=i {
                let mut s = l[i * w + (i - j)];
                let klo = jlo.max(j.saturating_sub(kd));
                for k in klo..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                    }
                    l[i * w] = s.sqrt();
                } else {
                    l[i * w + (i - j)] = s / l[j * w];
                }
            }
        }
        Ok(Self { n, kd, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let w = self.kd + 1;
        for i in 0..self.n {
            let mut s = x[i];
            for k in 1..=self.kd.min(i) {
                s -= self.l[i * w + k] * x[i - k];
            }
            x[i] = s / self.l[i * w];
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for k in 1..=self.kd.min(self.n - 1 - i) {
                s -= self.l[(i + k) * w + k] * x[i + k];
            }
            x[i] = s / self.l[i * w];
        }
    }

    /// log det A, useful as a cheap conditioning indicator.
    pub fn log_det(&self) -> f64 {
        let w = self.kd + 1;
        2.0 * (0..self.n).map(|i| self.l[i * w].ln()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd_band(n: usize, kd: usize) -> SymBand {
        let mut a = SymBand::zeros(n, kd);
        for i in 0..n {
            a.add(i, i, 4.0 + i as f64 * 0.1);
            for k in 1..=kd.min(i) {
                a.add(i, i - k, -0.5 / k as f64);
            }
        }
        a
    }

    #[test]
    fn symmetric_access() {
        let mut a = SymBand::zeros(5, 2);
        a.add(3, 1, 2.5);
        assert_eq!(a.get(1, 3), 2.5);
        assert_eq!(a.get(3, 1), 2.5);
        assert_eq!(a.get(4, 0), 0.0);
    }

    #[test]
    fn cholesky_solves() {
        let a = spd_band(40, 3);
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x);
        let got = a.cholesky().unwrap().solve(&b);
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let mut a = SymBand::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, -1.0);
        a.add(2, 2, 1.0);
        assert!(matches!(
            a.cholesky(),
            Err(Error::NotPositiveDefinite { row: 1, .. })
        ));
    }

    #[test]
    fn matvec_matches_dense() {
        let a = spd_band(9, 3);
        let d = a.to_dense();
        let x: Vec<f64> = (0..9).map(|i| i as f64 - 3.0).collect();
        let y = a.mul_vec(&x);
        for i in 0..9 {
            let want: f64 = (0..9).map(|j| d[i][j] * x[j]).sum();
            assert!((y[i] - want).abs() < 1e-12);
        }
    }
}
