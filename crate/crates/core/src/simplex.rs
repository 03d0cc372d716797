//! Probability-simplex helpers shared by the optimizers and sweeps.

/// Euclidean projection of `v` onto the probability simplex, in place.
pub fn project_onto_simplex(v: &mut [f64]) {
    let n = v.len();
    if n == 0 {
        return;
    }
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
        sum += *x;
    }
    // Remove the last ulp-level drift so downstream sums are exactly ~1.
    if sum > 0.0 && sum != 1.0 {
        v.iter_mut().for_each(|x| *x /= sum);
    }
}

/// Number of points of the grid `{k/r : Σ k = r}` on the `dim`-simplex,
/// i.e. `C(r + dim - 1, dim - 1)`, as a float to survive huge sizes.
pub fn simplex_grid_size(dim: usize, resolution: usize) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut c = 1.0;
    for i in 1..dim {
        c *= (resolution as f64 + i as f64) / i as f64;
    }
    c.round()
}

/// All points of the simplex grid with denominator `resolution`, in
/// lexicographic order of the integer numerators (first coordinate
/// largest first).
pub fn simplex_grid(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    fn rec(
        i: usize,
        remaining: usize,
        dim: usize,
        r: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<f64>>,
    ) {
        if i == dim - 1 {
            cur[i] = remaining;
            out.push(cur.iter().map(|&k| k as f64 / r as f64).collect());
            return;
        }
        for k in (0..=remaining).rev() {
            cur[i] = k;
            rec(i + 1, remaining - k, dim, r, cur, out);
        }
    }
    if dim > 0 {
        rec(0, resolution, dim, resolution.max(1), &mut cur, &mut out);
    }
    out
}

/// Iterates all tuples in `{0..radix}^len`, last position fastest.
pub fn for_each_tuple(radix: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; len];
    if radix == 0 {
        return;
    }
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < radix {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Decodes `index` into `len` base-`radix` digits, most significant first.
pub fn index_to_tuple(mut index: usize, radix: usize, len: usize, out: &mut [usize]) {
    for i in (0..len).rev() {
        out[i] = index % radix;
        index /= radix;
    }
}

pub fn tuple_to_index(t: &[usize], radix: usize) -> usize {
    t.iter().fold(0, |acc, &d| acc * radix + d)
}

/// `radix^len` as a float (for cap checks that must not overflow).
pub fn pow_f64(radix: usize, len: usize) -> f64 {
    (radix as f64).powi(len as i32)
}
