//! Exact Euclidean squared-distance transform (two-pass lower-envelope
//! method, separable over axes). Distances are in index units; callers
//! multiply by `dx`.

/// 1D squared-distance transform of a sampled cost `f` (∞ where no source).
fn dt1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let mut started = f[0].is_finite();
    if !started {
        // skip leading infinite parabolas
        let first = f.iter().position(|x| x.is_finite());
        match first {
            Some(i) => {
                v[0] = i;
                started = true;
            }
            None => {
                out.fill(f64::INFINITY);
                return;
            }
        }
    }
    let _ = started;
    for q in (v[0] + 1)..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        out[q] = d * d + f[p];
    }
}

/// Squared distance (index units) from every node to the nearest `true` node
/// of `mask` on an `n0 x n1` grid (row-major, row length `n0`).
/// All-∞ when the mask is empty.
pub fn edt_sq(mask: &[bool], n0: usize, n1: usize) -> Vec<f64> {
    assert_eq!(mask.len(), n0 * n1);
    let mut g = vec![f64::INFINITY; n0 * n1];
    // pass 1: along axis 0 within each row
    let mut f = vec![0.0f64; n0.max(n1)];
    let mut out = vec![0.0f64; n0.max(n1)];
    let mut v = vec![0usize; n0.max(n1)];
    let mut z = vec![0.0f64; n0.max(n1) + 1];
    for j in 0..n1 {
        for i in 0..n0 {
            f[i] = if mask[j * n0 + i] { 0.0 } else { f64::INFINITY };
        }
        dt1d(&f[..n0], &mut out[..n0], &mut v, &mut z);
        g[j * n0..(j + 1) * n0].copy_from_slice(&out[..n0]);
    }
    if n1 == 1 {
        return g;
    }
    // pass 2: along axis 1 within each column
    let mut res = vec![0.0f64; n0 * n1];
    for i in 0..n0 {
        for j in 0..n1 {
            f[j] = g[j * n0 + i];
        }
        dt1d(&f[..n1], &mut out[..n1], &mut v, &mut z);
        for j in 0..n1 {
            res[j * n0 + i] = out[j];
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_force(mask: &[bool], n0: usize, _n1: usize) -> Vec<f64> {
        let sources: Vec<(f64, f64)> = (0..mask.len())
            .filter(|&k| mask[k])
            .map(|k| ((k % n0) as f64, (k / n0) as f64))
            .collect();
        (0..mask.len())
            .map(|k| {
                let (x, y) = ((k % n0) as f64, (k / n0) as f64);
                sources
                    .iter()
                    .map(|&(sx, sy)| (x - sx) * (x - sx) + (y - sy) * (y - sy))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_on_random_masks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for &(n0, n1) in &[(17usize, 13usize), (32, 32), (40, 1), (1, 25)] {
            for density in [0.02, 0.3, 0.9] {
                let mask: Vec<bool> = (0..n0 * n1).map(|_| rng.gen_bool(density)).collect();
                let fast = edt_sq(&mask, n0, n1);
                let slow = brute_force(&mask, n0, n1);
                for (a, b) in fast.iter().zip(&slow) {
                    if a.is_finite() || b.is_finite() {
                        assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn empty_mask_is_all_infinite() {
        let d = edt_sq(&[false; 12], 4, 3);
        assert!(d.iter().all(|x| x.is_infinite()));
    }

    #[test]
    fn full_mask_is_zero() {
        let d = edt_sq(&[true; 12], 4, 3);
        assert!(d.iter().all(|&x| x == 0.0));
    }
}
