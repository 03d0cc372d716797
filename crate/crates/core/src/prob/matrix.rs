use std::fmt;

use super::distribution::{Distribution, PROB_TOLERANCE};
use crate::error::{check_dim, Error, Result};

/// A row-stochastic matrix `W(y|x)`: row `x` is a distribution over outputs.
///
/// Stored row-major. Used for channels, jammer strategies `θ(s|x)`,
/// degrading maps and prefix channels alike.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n_in: usize,
    n_out: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows_with_tolerance(rows, PROB_TOLERANCE)
    }

    pub fn from_rows_with_tolerance(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n_in = rows.len();
        if n_in == 0 {
            return Err(Error::Empty);
        }
        let n_out = rows[0].len();
        let mut data = Vec::with_capacity(n_in * n_out);
        for (row, probs) in rows.into_iter().enumerate() {
            check_dim(n_out, probs.len(), "row length").map_err(|e| Error::InvalidRow {
                row,
                source: Box::new(e),
            })?;
            let d = Distribution::with_tolerance(probs, tol).map_err(|e| Error::InvalidRow {
                row,
                source: Box::new(e),
            })?;
            data.extend_from_slice(d.probs());
        }
        Ok(Self { n_in, n_out, data })
    }

    pub fn from_distributions(rows: &[Distribution]) -> Result<Self> {
        let n_in = rows.len();
        if n_in == 0 {
            return Err(Error::Empty);
        }
        let n_out = rows[0].len();
        let mut data = Vec::with_capacity(n_in * n_out);
        for r in rows {
            check_dim(n_out, r.len(), "row length")?;
            data.extend_from_slice(r.probs());
        }
        Ok(Self { n_in, n_out, data })
    }

    /// Row-major data already known to be stochastic.
    pub(crate) fn from_flat_unchecked(n_in: usize, n_out: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n_in * n_out);
        debug_assert!(data
            .chunks(n_out)
            .all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-9));
        Self { n_in, n_out, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            n_in: n,
            n_out: n,
            data,
        }
    }

    /// Every row equal to `row`.
    pub fn constant(n_in: usize, row: &Distribution) -> Self {
        let mut data = Vec::with_capacity(n_in * row.len());
        for _ in 0..n_in {
            data.extend_from_slice(row.probs());
        }
        Self {
            n_in,
            n_out: row.len(),
            data,
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.n_out + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.n_out..(x + 1) * self.n_out]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_out)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Matrix product `self · next`: first `self`, then `next`.
    pub fn then(&self, next: &StochasticMatrix) -> Result<StochasticMatrix> {
        check_dim(self.n_out, next.n_in, "composition inner dimension")?;
        let mut data = vec![0.0; self.n_in * next.n_out];
        for x in 0..self.n_in {
            let out = &mut data[x * next.n_out..(x + 1) * next.n_out];
            for (y, &w) in self.row(x).iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (o, &d) in out.iter_mut().zip(next.row(y)) {
                    *o += w * d;
                }
            }
        }
        Ok(StochasticMatrix {
            n_in: self.n_in,
            n_out: next.n_out,
            data,
        })
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Kronecker power over `k` uses: the channel `x^k -> y^k`, inputs and
    /// outputs indexed lexicographically (first letter most significant).
    pub fn kron_power(&self, k: usize) -> StochasticMatrix {
        let mut acc = StochasticMatrix::identity(1);
        for _ in 0..k {
            acc = acc.kron(self);
        }
        acc
    }

    pub fn kron(&self, other: &StochasticMatrix) -> StochasticMatrix {
        let n_in = self.n_in * other.n_in;
        let n_out = self.n_out * other.n_out;
        let mut data = vec![0.0; n_in * n_out];
        for a in 0..self.n_in {
            for b in 0..other.n_in {
                let x = a * other.n_in + b;
                for (ya, &wa) in self.row(a).iter().enumerate() {
                    for (yb, &wb) in other.row(b).iter().enumerate() {
                        data[x * n_out + ya * other.n_out + yb] = wa * wb;
                    }
                }
            }
        }
        StochasticMatrix { n_in, n_out, data }
    }
}

impl fmt::Display for StochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v:.6}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}
