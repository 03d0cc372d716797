//! Small-blocklength sequence bookkeeping: lexicographic indexing, typical
//! sets, and letterwise product laws.

use crate::error::{Error, Result};
use crate::prob::type_is_typical;
use crate::simplex::{for_each_tuple, pow_f64};

/// Largest `|A|^n` the simulator enumerates exactly.
pub const EXACT_CAP: usize = 4096;

pub(crate) fn checked_power(
    radix: usize,
    n: usize,
    cap: usize,
    what: &'static str,
    hint: &'static str,
) -> Result<usize> {
    let size = pow_f64(radix, n);
    if size > cap as f64 {
        return Err(Error::CapExceeded {
            what,
            needed: size,
            cap: cap as f64,
            hint,
        });
    }
    Ok(size as usize)
}

pub(crate) fn counts_of(seq: &[usize], alphabet: usize) -> Vec<usize> {
    let mut c = vec![0usize; alphabet];
    for &a in seq {
        c[a] += 1;
    }
    c
}

/// Integer compositions of `n` into `parts` nonnegative parts.
pub(crate) fn compositions(n: usize, parts: usize, mut f: impl FnMut(&[usize])) {
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if i + 1 == cur.len() {
            cur[i] = left;
            f(cur);
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, f);
        }
    }
    if parts == 0 {
        return;
    }
    let mut cur = vec![0; parts];
    rec(0, n, &mut cur, &mut f);
}

fn multinomial(counts: &[usize]) -> f64 {
    let mut total = 0usize;
    let mut acc = 1.0f64;
    for &c in counts {
        for i in 1..=c {
            total += 1;
            acc *= total as f64 / i as f64;
        }
    }
    acc
}

/// `|T^n_{P,δ}|`, counted through types (no enumeration of sequences).
pub fn typical_set_size(p: &[f64], n: usize, delta: f64) -> f64 {
    let mut total = 0.0;
    compositions(n, p.len(), |c| {
        if type_is_typical(c, p, n, delta) {
            total += multinomial(c);
        }
    });
    total
}

/// All sequences of `T^n_{P,δ}` in lexicographic order.
pub fn typical_set(p: &[f64], n: usize, delta: f64) -> Result<Vec<Vec<usize>>> {
    checked_power(
        p.len(),
        n,
        1 << 20,
        "typical-set enumeration (|X|^n)",
        "use a smaller blocklength",
    )?;
    let mut out = Vec::new();
    for_each_tuple(p.len(), n, |t| {
        if type_is_typical(&counts_of(t, p.len()), p, n, delta) {
            out.push(t.to_vec());
        }
    });
    Ok(out)
}

/// `Π_i M(y_i | x_i)` over all `y^n`, as a dense vector in lexicographic
/// order of `y^n`. `rows(i)` is the row used at position `i`.
pub(crate) fn product_law<'a>(
    n: usize,
    n_out: usize,
    rows: impl Fn(usize) -> &'a [f64],
) -> Vec<f64> {
    let mut cur = vec![1.0];
    for i in 0..n {
        let r = rows(i);
        let mut next = Vec::with_capacity(cur.len() * n_out);
        for &c in &cur {
            next.extend(r.iter().map(|&w| c * w));
        }
        cur = next;
    }
    cur
}
