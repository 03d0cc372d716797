use crate::error::{Error, Result};

/// Sum tolerance applied when constructing distributions.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// A probability vector over the alphabet `{0, .., len-1}`.
///
/// Entries are non-negative and sum to one. Vectors whose sum is within the
/// construction tolerance are renormalized; anything further off is rejected.
///
/// ```
/// use avwc_core::Distribution;
///
/// let p = Distribution::new(vec![0.25, 0.75]).unwrap();
/// assert_eq!(p.len(), 2);
/// assert!(Distribution::new(vec![0.5, 0.4]).is_err());
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, PROB_TOLERANCE)
    }

    /// Validates with a caller-chosen sum tolerance. Entries in `(-tol, 0)`
    /// are clamped to zero before renormalizing.
    pub fn with_tolerance(mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty);
        }
        for (index, v) in probs.iter_mut().enumerate() {
            if !v.is_finite() || *v < -tol {
                return Err(Error::NegativeProbability { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotNormalized { sum, tol });
        }
        if sum != 1.0 {
            probs.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over an empty alphabet");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on `index`.
    pub fn point(n: usize, index: usize) -> Self {
        assert!(index < n, "point mass outside alphabet");
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self { probs }
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::NegativeProbability { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotNormalized { sum, tol: 0.0 });
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / sum).collect(),
        })
    }

    /// Builds from a vector already known to lie on the simplex (optimizer
    /// output). Only debug builds check the invariant.
    pub(crate) fn from_simplex_unchecked(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!(probs.iter().all(|v| *v >= 0.0));
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    /// Indices with positive mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| i)
    }
}

impl AsRef<[f64]> for Distribution {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}
