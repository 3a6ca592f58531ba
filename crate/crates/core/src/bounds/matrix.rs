//! Score matrices for Hoeffding's permutation statistic `S = sum_i a_{i, pi(i)}`.

use crate::error::{Error, Result};
use crate::types::Population;

/// A square matrix of scores `a_{ij}` with a sample-size scale. The
/// centered spread `sigma_A^2` and `||a||` are computed once at construction.
///
/// The scale `n` converts the standardized deviation `lambda` into the
/// statistic's own deviation `t = sqrt(n) lambda`. The Serfling matrix
/// `a_{ij} = 1[i <= n] c_j` carries its sample size; a bare matrix has scale 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    size: usize,
    values: Vec<f64>,
    scale: u64,
    sigma_a2: f64,
    sup_dev: f64,
}

impl ScoreMatrix {
    /// Row-major `size x size` matrix.
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self> {
        if size < 2 {
            return Err(Error::usage(format!("score matrix must be at least 2x2; got size {size}")));
        }
        if values.len() != size * size {
            return Err(Error::usage(format!(
                "score matrix of size {size} needs {} entries; got {}",
                size * size,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("score matrix entries must be finite"));
        }
        let mut m = ScoreMatrix { size, values, scale: 1, sigma_a2: 0.0, sup_dev: 0.0 };
        m.sigma_a2 = m.compute_sigma_a2();
        m.sup_dev = m.compute_sup_dev();
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != size) {
            return Err(Error::usage(format!("score matrix is not square: {size} rows but a row of length {}", bad.len())));
        }
        Self::new(size, rows.into_iter().flatten().collect())
    }

    /// `a_{ij} = 1[i <= n] c_j`: the permutation statistic is then the sum of
    /// a sample of size `n` drawn without replacement from `c`.
    pub fn serfling(pop: &Population, n: u64) -> Result<Self> {
        let size = pop.len();
        if n == 0 || n as usize > size {
            return Err(Error::domain(format!("Serfling matrix needs 1 <= n <= N; got n = {n}, N = {size}")));
        }
        let mut values = vec![0.0; size * size];
        for row in values.chunks_mut(size).take(n as usize) {
            row.copy_from_slice(pop.values());
        }
        Ok(ScoreMatrix { scale: n, ..Self::new(size, values)? })
    }

    pub fn with_scale(mut self, scale: u64) -> Self {
        self.scale = scale.max(1);
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    fn row_means(&self) -> Vec<f64> {
        self.values.chunks(self.size).map(|r| r.iter().sum::<f64>() / self.size as f64).collect()
    }

    fn col_means(&self) -> Vec<f64> {
        let mut cols = vec![0.0; self.size];
        for row in self.values.chunks(self.size) {
            for (c, v) in cols.iter_mut().zip(row) {
                *c += v;
            }
        }
        cols.iter().map(|c| c / self.size as f64).collect()
    }

    fn compute_sigma_a2(&self) -> f64 {
        let rows = self.row_means();
        let cols = self.col_means();
        let grand = rows.iter().sum::<f64>() / self.size as f64;
        let mut ss = 0.0;
        for (i, ri) in rows.iter().enumerate() {
            for (j, cj) in cols.iter().enumerate() {
                let r = self.get(i, j) - ri - cj + grand;
                ss += r * r;
            }
        }
        ss / (self.size - 1) as f64
    }

    fn compute_sup_dev(&self) -> f64 {
        let rows = self.row_means();
        self.values
            .chunks(self.size)
            .zip(&rows)
            .flat_map(|(row, mean)| row.iter().map(move |v| (v - mean).abs()))
            .fold(0.0, f64::max)
    }
}

/// `sigma_A^2 = (1/(N-1)) sum_{ij} (a_{ij} - a_{i.} - a_{.j} + a_{..})^2`.
pub fn sigma_a2(m: &ScoreMatrix) -> f64 {
    m.sigma_a2
}

/// `||a|| = max_{ij} |a_{ij} - a_{i.}|`.
pub fn sup_dev_matrix(m: &ScoreMatrix) -> f64 {
    m.sup_dev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matrix_has_no_spread() {
        let m = ScoreMatrix::new(3, vec![2.5; 9]).unwrap();
        assert_eq!(sigma_a2(&m), 0.0);
        assert_eq!(sup_dev_matrix(&m), 0.0);
    }

    #[test]
    fn identity_two_by_two() {
        let m = ScoreMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((sigma_a2(&m) - 1.0).abs() < 1e-15);
        assert_eq!(sup_dev_matrix(&m), 0.5);
    }

    #[test]
    fn shape_errors_are_usage_errors() {
        assert!(matches!(ScoreMatrix::new(2, vec![1.0; 3]), Err(Error::Usage(_))));
        assert!(matches!(ScoreMatrix::from_rows(vec![vec![1.0, 2.0], vec![1.0]]), Err(Error::Usage(_))));
        assert!(matches!(ScoreMatrix::new(1, vec![1.0]), Err(Error::Usage(_))));
    }

    #[test]
    fn serfling_matrix_identity() {
        let pop = Population::new(vec![0.3, 1.7, -2.0, 4.1, 0.0, 0.9, 3.3]).unwrap();
        let big_n = pop.len() as f64;
        for n in 1..pop.len() as u64 {
            let m = ScoreMatrix::serfling(&pop, n).unwrap();
            assert_eq!(m.scale(), n);
            let want = n as f64 * pop.variance() * (big_n - n as f64) / (big_n - 1.0);
            assert!((sigma_a2(&m) - want).abs() <= 1e-12 * want);
            assert!((sup_dev_matrix(&m) - pop.sup_dev()).abs() < 1e-15);
        }
    }
}
