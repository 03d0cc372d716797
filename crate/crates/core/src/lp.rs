//! Phase-1 simplex for tiny dense feasibility problems `A x = b, x ≥ 0`.
//!
//! Uses one artificial variable per row and Bland's rule, so it terminates on
//! degenerate problems. The problems here have at most a few hundred
//! variables.

/// Outcome of a phase-1 solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1 {
    /// The non-artificial part of the final basic solution.
    pub x: Vec<f64>,
    /// Sum of artificial variables at the optimum (zero iff feasible).
    pub infeasibility: f64,
    /// Largest `|A_i x − b_i|` for the returned `x`.
    pub residual: f64,
    pub pivots: usize,
}

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

/// Minimizes the total artificial mass for `A x = b, x ≥ 0`.
///
/// `a` is given row-major with `n` columns.
pub fn phase1(a: &[Vec<f64>], b: &[f64]) -> Phase1 {
    let m = a.len();
    assert_eq!(m, b.len());
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let rhs = n + m;

    let mut t = vec![0.0; m * width];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut t[i * width..(i + 1) * width];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = 1.0;
        row[rhs] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs for minimizing the artificial sum.
    let mut cost = vec![0.0; width];
    for i in 0..m {
        for j in 0..n {
            cost[j] -= t[i * width + j];
        }
        cost[rhs] -= t[i * width + rhs];
    }

    let mut pivots = 0;
    while pivots < MAX_PIVOTS {
        let Some(enter) = (0..n + m).find(|&j| cost[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = t[i * width + enter];
            if aij > PIVOT_EPS {
                let ratio = t[i * width + rhs] / aij;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((r, _)) = leave else {
            // Unbounded direction cannot occur for a phase-1 objective that
            // is bounded below by zero; treat as converged.
            break;
        };
        pivot(&mut t, width, m, r, enter);
        let f = cost[enter];
        for j in 0..width {
            cost[j] -= f * t[r * width + j];
        }
        basis[r] = enter;
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    let mut infeasibility = 0.0;
    for (i, &bi) in basis.iter().enumerate() {
        let v = t[i * width + rhs].max(0.0);
        if bi < n {
            x[bi] = v;
        } else {
            infeasibility += v;
        }
    }
    let residual = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let ax: f64 = row.iter().zip(&x).map(|(r, v)| r * v).sum();
            (ax - bi).abs()
        })
        .fold(0.0, f64::max);
    Phase1 {
        x,
        infeasibility,
        residual,
        pivots,
    }
}

fn pivot(t: &mut [f64], width: usize, m: usize, r: usize, c: usize) {
    let p = t[r * width + c];
    for j in 0..width {
        t[r * width + j] /= p;
    }
    for i in 0..m {
        if i == r {
            continue;
        }
        let f = t[i * width + c];
        if f == 0.0 {
            continue;
        }
        for j in 0..width {
            t[i * width + j] -= f * t[r * width + j];
        }
    }
}
