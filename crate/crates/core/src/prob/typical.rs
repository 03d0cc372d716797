//! Sequence types and (conditional) typicality tests.

use super::{Distribution, StochasticMatrix};
use crate::error::{check_dim, Error, Result};

/// Occurrence counts `N(a|s^n)` of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceType {
    counts: Vec<usize>,
    len: usize,
}

impl SequenceType {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The empirical distribution `N(a|s^n)/n`.
    pub fn empirical(&self) -> Distribution {
        let n = self.len as f64;
        Distribution::from_simplex_unchecked(self.counts.iter().map(|&c| c as f64 / n).collect())
    }
}

/// Computes the type of `seq` over an alphabet of `alphabet` symbols.
pub fn sequence_type(seq: &[usize], alphabet: usize) -> Result<SequenceType> {
    if seq.is_empty() {
        return Err(Error::Precondition("type of an empty sequence".into()));
    }
    let mut counts = vec![0; alphabet];
    for &a in seq {
        if a >= alphabet {
            return Err(Error::SymbolOutOfRange {
                symbol: a,
                alphabet,
            });
        }
        counts[a] += 1;
    }
    Ok(SequenceType {
        counts,
        len: seq.len(),
    })
}

/// Slack and blocklength for the typicality tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalityParams {
    delta: f64,
    n: usize,
}

impl TypicalityParams {
    pub fn new(delta: f64, n: usize) -> Result<Self> {
        if delta.is_nan() || delta <= 0.0 || n == 0 {
            return Err(Error::Precondition(format!(
                "typicality needs delta > 0 and n >= 1 (got delta={delta}, n={n})"
            )));
        }
        Ok(Self { delta, n })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `x^n ∈ T^n_{p,δ}`: `|N(a|x^n)/n − p(a)| < δ` for all `a`, and symbols with
/// `p(a) = 0` absent.
pub fn is_typical(seq: &[usize], p: &Distribution, params: TypicalityParams) -> Result<bool> {
    check_dim(params.n, seq.len(), "sequence length vs blocklength")?;
    let t = sequence_type(seq, p.len())?;
    Ok(type_is_typical(
        t.counts(),
        p.probs(),
        params.n,
        params.delta,
    ))
}

pub(crate) fn type_is_typical(counts: &[usize], p: &[f64], n: usize, delta: f64) -> bool {
    let n = n as f64;
    counts.iter().zip(p).all(|(&c, &pa)| {
        if pa == 0.0 && c > 0 {
            return false;
        }
        (c as f64 / n - pa).abs() < delta
    })
}

/// `y^n ∈ T^n_{W,δ}(x^n)`: `|N(a,b)/n − W(b|a) N(a)/n| < δ` for all `(a,b)`,
/// and `N(a,b) = 0` whenever `W(b|a) = 0`.
pub fn is_cond_typical(
    y_seq: &[usize],
    x_seq: &[usize],
    w: &StochasticMatrix,
    params: TypicalityParams,
) -> Result<bool> {
    check_dim(
        params.n,
        x_seq.len(),
        "input sequence length vs blocklength",
    )?;
    check_dim(
        params.n,
        y_seq.len(),
        "output sequence length vs blocklength",
    )?;
    let (nx, ny) = (w.n_in(), w.n_out());
    let mut joint = vec![0usize; nx * ny];
    let mut marg = vec![0usize; nx];
    for (&a, &b) in x_seq.iter().zip(y_seq) {
        if a >= nx {
            return Err(Error::SymbolOutOfRange {
                symbol: a,
                alphabet: nx,
            });
        }
        if b >= ny {
            return Err(Error::SymbolOutOfRange {
                symbol: b,
                alphabet: ny,
            });
        }
        joint[a * ny + b] += 1;
        marg[a] += 1;
    }
    let bound = params.delta * params.n as f64;
    Ok((0..nx)
        .all(|a| (0..ny).all(|b| joint_count_ok(joint[a * ny + b], marg[a], w.get(a, b), bound))))
}

/// One cell of the conditional-typicality condition, scaled by `n`:
/// `|N(a,b) − W(b|a) N(a)| < nδ`, plus the zero clause.
#[inline]
pub(crate) fn joint_count_ok(nab: usize, na: usize, wba: f64, n_delta: f64) -> bool {
    if wba == 0.0 && nab > 0 {
        return false;
    }
    (nab as f64 - wba * na as f64).abs() < n_delta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64, n: usize) -> TypicalityParams {
        TypicalityParams::new(delta, n).unwrap()
    }

    #[test]
    fn type_examples() {
        assert_eq!(sequence_type(&[0, 0, 1], 2).unwrap().counts(), &[2, 1]);
        assert_eq!(sequence_type(&[1, 1, 1, 1], 2).unwrap().counts(), &[0, 4]);
        assert!(sequence_type(&[], 2).is_err());
        assert!(matches!(
            sequence_type(&[0, 2], 2),
            Err(Error::SymbolOutOfRange { symbol: 2, .. })
        ));
    }

    #[test]
    fn typicality_examples() {
        let p = Distribution::uniform(2);
        assert!(is_typical(&[0, 1, 1, 0], &p, params(1e-9, 4)).unwrap());
        assert!(is_typical(&[0, 0, 0, 1], &p, params(0.3, 4)).unwrap());
        assert!(!is_typical(&[0, 0, 0, 1], &p, params(0.25, 4)).unwrap());
        let q = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert!(!is_typical(&[0, 0, 0, 1], &q, params(10.0, 4)).unwrap());
        assert!(is_typical(&[0, 1], &p, params(0.1, 3)).is_err());
    }

    #[test]
    fn conditional_typicality() {
        let w = StochasticMatrix::from_rows(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let x = [0, 0, 1, 1];
        assert!(is_cond_typical(&[0, 1, 0, 0], &x, &w, params(0.01, 4)).unwrap());
        // W(1|1) = 0 but the pair (1,1) occurs
        assert!(!is_cond_typical(&[0, 1, 0, 1], &x, &w, params(10.0, 4)).unwrap());
        assert!(!is_cond_typical(&[0, 0, 0, 0], &x, &w, params(0.2, 4)).unwrap());
        assert!(is_cond_typical(&[0, 0, 0, 0], &x, &w, params(0.3, 4)).unwrap());
        assert!(is_cond_typical(&[0, 0, 0], &x, &w, params(0.3, 4)).is_err());
    }

    #[test]
    fn params_validate() {
        assert!(TypicalityParams::new(0.0, 3).is_err());
        assert!(TypicalityParams::new(0.1, 0).is_err());
    }
}
