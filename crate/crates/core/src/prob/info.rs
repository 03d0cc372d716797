//! Entropy, mutual information and variation distance, all in bits.
//!
//! Sums run in ascending index order; `0 · log 0` is taken as `0`.

use super::{Distribution, StochasticMatrix};
use crate::error::{check_dim, Error, Result};

#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a probability slice.
pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| plogp(p)).sum::<f64>()
}

pub fn entropy(p: &Distribution) -> f64 {
    entropy_of(p.probs())
}

/// The output law `pW`.
pub fn output_distribution(p: &Distribution, w: &StochasticMatrix) -> Result<Distribution> {
    check_dim(w.n_in(), p.len(), "input distribution vs channel rows")?;
    let mut q = vec![0.0; w.n_out()];
    output_into(p.probs(), w.as_slice(), w.n_out(), &mut q);
    Distribution::new(q)
}

pub(crate) fn output_into(p: &[f64], rows: &[f64], n_out: usize, q: &mut [f64]) {
    q.iter_mut().for_each(|v| *v = 0.0);
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (qy, &w) in q.iter_mut().zip(&rows[x * n_out..(x + 1) * n_out]) {
            *qy += px * w;
        }
    }
}

/// `H(W|p) = -Σ p(x) W(y|x) log W(y|x)`.
pub fn conditional_entropy(p: &Distribution, w: &StochasticMatrix) -> Result<f64> {
    check_dim(w.n_in(), p.len(), "input distribution vs channel rows")?;
    Ok(conditional_entropy_raw(p.probs(), w.as_slice(), w.n_out()))
}

pub(crate) fn conditional_entropy_raw(p: &[f64], rows: &[f64], n_out: usize) -> f64 {
    p.iter()
        .enumerate()
        .filter(|(_, px)| **px > 0.0)
        .map(|(x, &px)| px * entropy_of(&rows[x * n_out..(x + 1) * n_out]))
        .sum()
}

/// `I(p;W) = H(pW) - H(W|p)`.
///
/// ```
/// use avwc_core::{mutual_information, Distribution, StochasticMatrix};
///
/// let p = Distribution::uniform(2);
/// let bsc = StochasticMatrix::from_rows(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
/// let i = mutual_information(&p, &bsc).unwrap();
/// assert!((i - (1.0 + 0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2())).abs() < 1e-12);
/// ```
pub fn mutual_information(p: &Distribution, w: &StochasticMatrix) -> Result<f64> {
    check_dim(w.n_in(), p.len(), "input distribution vs channel rows")?;
    Ok(mutual_information_raw(p.probs(), w.as_slice(), w.n_out()))
}

/// Unchecked variant used on optimizer hot paths. Clamped at zero: the
/// difference of two entropies can land at `-1e-17` for independent rows.
pub(crate) fn mutual_information_raw(p: &[f64], rows: &[f64], n_out: usize) -> f64 {
    let mut q = vec![0.0; n_out];
    output_into(p, rows, n_out, &mut q);
    (entropy_of(&q) - conditional_entropy_raw(p, rows, n_out)).max(0.0)
}

/// `‖p1 − p2‖_V = Σ |p1(x) − p2(x)|`.
pub fn variation_distance(p1: &Distribution, p2: &Distribution) -> Result<f64> {
    check_dim(p1.len(), p2.len(), "variation distance operands")?;
    Ok(p1
        .probs()
        .iter()
        .zip(p2.probs())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Continuity bound `-τ log(τ/|X|)` on `|H(p1) − H(p2)|`, valid for
/// `τ = ‖p1 − p2‖_V ≤ 1/2`.
pub fn entropy_continuity_bound(p1: &Distribution, p2: &Distribution) -> Result<f64> {
    let tau = variation_distance(p1, p2)?;
    if tau > 0.5 {
        return Err(Error::Precondition(format!(
            "continuity bound needs variation distance <= 1/2, got {tau}"
        )));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(-tau * (tau / p1.len() as f64).log2())
}

/// Gradient of `W ↦ I(p;W)` at `W`: entry `(x,y)` is `p(x) log(W(y|x)/pW(y))`.
///
/// Zero entries of `W` are floored so the gradient stays finite and points
/// into the interior.
pub(crate) fn mi_channel_gradient(p: &[f64], rows: &[f64], n_out: usize, grad: &mut [f64]) {
    const FLOOR: f64 = 1e-300;
    let mut q = vec![0.0; n_out];
    output_into(p, rows, n_out, &mut q);
    for (x, &px) in p.iter().enumerate() {
        let g = &mut grad[x * n_out..(x + 1) * n_out];
        if px == 0.0 {
            g.iter_mut().for_each(|v| *v = 0.0);
            continue;
        }
        for y in 0..n_out {
            let w = rows[x * n_out + y].max(FLOOR);
            g[y] = px * (w / q[y].max(FLOOR)).log2();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    fn mat(rows: &[&[f64]]) -> StochasticMatrix {
        StochasticMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    // High-precision values from an independent 40-digit evaluation.
    const H_02_08: f64 = 0.721_928_094_887_362_3;
    const COND_H_ORACLE: f64 = 0.595_461_844_238_321_8;
    const MI_PRINTED_WBB: f64 = 0.278_071_905_112_637_65;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&dist(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy(&dist(&[1.0, 0.0])), 0.0);
        assert!((entropy(&dist(&[0.2, 0.8])) - H_02_08).abs() < 1e-15);
    }

    #[test]
    fn output_distribution_examples() {
        let u = Distribution::uniform(3);
        let q = output_distribution(&u, &StochasticMatrix::identity(3)).unwrap();
        assert!(q.probs().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));

        let row = dist(&[0.3, 0.7]);
        let c = StochasticMatrix::constant(3, &row);
        let q = output_distribution(&dist(&[0.2, 0.5, 0.3]), &c).unwrap();
        assert!((q.get(0) - 0.3).abs() < 1e-15);

        let wbb = mat(&[&[0.2, 0.8], &[0.8, 0.2], &[0.8, 0.2]]);
        let q = output_distribution(&dist(&[0.5, 0.0, 0.5]), &wbb).unwrap();
        // 0.5·0.2 + 0.5·0.8 by hand
        assert!((q.get(0) - 0.5).abs() < 1e-15);

        assert!(matches!(
            output_distribution(&Distribution::uniform(2), &wbb),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conditional_entropy_examples() {
        let p = dist(&[0.3, 0.7]);
        assert_eq!(
            conditional_entropy(&p, &StochasticMatrix::identity(2)).unwrap(),
            0.0
        );
        let unif = StochasticMatrix::constant(2, &Distribution::uniform(4));
        assert!((conditional_entropy(&p, &unif).unwrap() - 2.0).abs() < 1e-15);
        let w = mat(&[&[0.9, 0.1], &[0.2, 0.8]]);
        let h = conditional_entropy(&Distribution::uniform(2), &w).unwrap();
        assert!((h - COND_H_ORACLE).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let i = mutual_information(&Distribution::uniform(2), &StochasticMatrix::identity(2));
        assert_eq!(i.unwrap(), 1.0);
        let rank_one = StochasticMatrix::constant(3, &dist(&[0.1, 0.6, 0.3]));
        assert_eq!(
            mutual_information(&dist(&[0.2, 0.3, 0.5]), &rank_one).unwrap(),
            0.0
        );
        let wbb = mat(&[&[0.2, 0.8], &[0.8, 0.2], &[0.8, 0.2]]);
        let i = mutual_information(&dist(&[0.5, 0.0, 0.5]), &wbb).unwrap();
        assert!((i - MI_PRINTED_WBB).abs() < 1e-14);
    }

    #[test]
    fn variation_distance_examples() {
        let p = dist(&[0.3, 0.7]);
        assert_eq!(variation_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(
            variation_distance(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(),
            2.0
        );
        let d = variation_distance(&p, &dist(&[0.5, 0.5])).unwrap();
        assert!((d - 0.4).abs() < 1e-15);
    }

    #[test]
    fn continuity_bound_examples() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(entropy_continuity_bound(&p, &p).unwrap(), 0.0);
        let q = dist(&[0.6, 0.4]);
        let b = entropy_continuity_bound(&p, &q).unwrap();
        assert!((b - 0.664_385_618_977_472_5).abs() < 1e-12);
        assert!((entropy(&p) - entropy(&q)).abs() <= b);
        assert!(entropy_continuity_bound(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // On unnormalized rows the 1/ln2 terms of H(pW) and H(W|p) cancel,
        // so the extended function's partials equal the closed form.
        let p = [0.3, 0.5, 0.2];
        let rows = [0.6, 0.3, 0.1, 0.2, 0.2, 0.6, 0.1, 0.7, 0.2];
        let mut g = [0.0; 9];
        mi_channel_gradient(&p, &rows, 3, &mut g);
        let f = |r: &[f64]| {
            let mut q = [0.0; 3];
            output_into(&p, r, 3, &mut q);
            entropy_of(&q) - conditional_entropy_raw(&p, r, 3)
        };
        for i in 0..9 {
            let h = 1e-6;
            let (mut a, mut b) = (rows, rows);
            a[i] += h;
            b[i] -= h;
            let fd = (f(&a) - f(&b)) / (2.0 * h);
            assert!(
                (fd - g[i]).abs() < 1e-4 * (1.0 + fd.abs()),
                "entry {i}: {fd} vs {}",
                g[i]
            );
        }
    }
}
