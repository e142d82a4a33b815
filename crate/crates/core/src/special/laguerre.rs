//! Laguerre recurrences for Fock-basis matrix elements.
//!
//! The displacement operator and its normally ordered form have Fock
//! elements built from associated Laguerre polynomials `L_n^{(k)}(|β|²)`.
//! Raw factorial ratios overflow long before the dimensions used here, so
//! everything is generated by the three-term recurrence in `n` at fixed
//! order `k`, on the normalised sequence
//!
//! `h_n^{(k)}(r) = r^k √(n!/(n+k)!) L_n^{(k)}(r²)`.

/// Fills `out[n] = h_n^{(k)}(r)` for `n = 0..out.len()`.
///
/// `⟨n+k| e^{βa†} e^{-β*a} |n⟩ = e^{ikθ} h_n^{(k)}(|β|)` for `β = |β| e^{iθ}`.
pub fn laguerre_band(k: usize, r: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let x = r * r;
    let mut h0 = 1.0;
    for j in 1..=k {
        h0 *= r / (j as f64).sqrt();
    }
    out[0] = h0;
    if out.len() == 1 {
        return;
    }
    let kf = k as f64;
    let mut prev = 0.0;
    let mut cur = h0;
    for n in 0..out.len() - 1 {
        let nf = n as f64;
        let next = ((2.0 * nf + kf + 1.0 - x) * cur - (nf * (nf + kf)).sqrt() * prev)
            / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
        out[n + 1] = next;
        prev = cur;
        cur = next;
    }
}

/// Fills `out[n] = L_n(x)` (ordinary Laguerre polynomials).
pub fn laguerre_sequence(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 1.0 - x;
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = ((2.0 * nf + 1.0 - x) * out[n] - nf * out[n - 1]) / (nf + 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit_laguerre(n: usize, k: usize, x: f64) -> f64 {
        // Σ_j (-1)^j C(n+k, n-j) x^j / j!, fine for small n.
        let mut sum = 0.0;
        for j in 0..=n {
            let mut c = 1.0;
            for i in 0..(n - j) {
                c *= (n + k - i) as f64 / (i + 1) as f64;
            }
            let mut p = 1.0;
            for i in 1..=j {
                p *= x / i as f64;
            }
            sum += if j % 2 == 0 { c * p } else { -c * p };
        }
        sum
    }

    #[test]
    fn band_matches_explicit_polynomials() {
        let r: f64 = 0.8;
        for k in 0..5 {
            let mut out = vec![0.0; 8];
            laguerre_band(k, r, &mut out);
            for (n, &h) in out.iter().enumerate() {
                let mut fact = 1.0;
                for i in (n + 1)..=(n + k) {
                    fact *= i as f64;
                }
                let want = r.powi(k as i32) / fact.sqrt() * explicit_laguerre(n, k, r * r);
                assert!((h - want).abs() < 1e-13, "k={k} n={n} {h} {want}");
            }
        }
    }

    #[test]
    fn plain_sequence_is_band_zero() {
        let mut a = vec![0.0; 20];
        let mut b = vec![0.0; 20];
        laguerre_sequence(2.3, &mut a);
        laguerre_band(0, 2.3f64.sqrt(), &mut b);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn large_orders_do_not_overflow() {
        let mut out = vec![0.0; 600];
        laguerre_band(400, 3.0, &mut out);
        assert!(out.iter().all(|v| v.is_finite()));
        laguerre_band(0, 6.0, &mut out);
        assert!(out.iter().all(|v| v.is_finite()));
    }
}
