//! Chebyshev polynomials of the first and second kind by three-term recurrence.

use num_complex::Complex64;

/// V_n(z) for n >= -1, with V_{-1} = 0 and V_0 = 1.
pub fn chebyshev_v(n: i64, z: Complex64) -> Complex64 {
    assert!(n >= -1, "chebyshev_v needs n >= -1");
    if n == -1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let next = 2.0 * z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// T_n(z) for n >= 0.
pub fn chebyshev_t(n: i64, z: Complex64) -> Complex64 {
    assert!(n >= 0, "chebyshev_t needs n >= 0");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = z;
    for _ in 1..n {
        let next = 2.0 * z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of V_{-1}, V_0, ..., V_{max} at z. Entry k holds V_{k-1}.
pub fn chebyshev_v_table(max: i64, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity((max + 2).max(1) as usize);
    out.push(Complex64::new(0.0, 0.0));
    if max < 0 {
        return out;
    }
    out.push(Complex64::new(1.0, 0.0));
    for k in 1..=max as usize {
        let next = 2.0 * z * out[k] - out[k - 1];
        out.push(next);
    }
    out
}

/// Derivative of V_n at z, from the recurrence V'_{k+1} = 2V_k + 2zV'_k - V'_{k-1}.
pub fn chebyshev_v_prime(n: i64, z: Complex64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    if n <= 0 {
        return zero;
    }
    let (mut vp, mut v) = (zero, Complex64::new(1.0, 0.0));
    let (mut dp, mut d) = (zero, zero);
    for _ in 0..n {
        let vn = 2.0 * z * v - vp;
        let dn = 2.0 * v + 2.0 * z * d - dp;
        vp = v;
        v = vn;
        dp = d;
        d = dn;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn small_values() {
        assert_eq!(chebyshev_v(0, c(0.7)), c(1.0));
        assert!((chebyshev_v(2, c(1.0)) - c(3.0)).norm() < 1e-15);
        assert!((chebyshev_t(3, c(0.5)) - c(-1.0)).norm() < 1e-15);
        assert_eq!(chebyshev_v(-1, c(0.3)), c(0.0));
    }

    #[test]
    fn table_matches_single() {
        let z = Complex64::new(0.3, -0.8);
        let t = chebyshev_v_table(12, z);
        for n in -1..=12 {
            assert!((t[(n + 1) as usize] - chebyshev_v(n, z)).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let z = Complex64::new(0.41, 0.2);
        let h = 1e-6;
        for n in 0..10 {
            let fd = (chebyshev_v(n, z + h) - chebyshev_v(n, z - h)) / (2.0 * h);
            assert!((fd - chebyshev_v_prime(n, z)).norm() < 1e-6 * (1.0 + fd.norm()));
        }
    }

    #[test]
    fn trig_form_on_interval() {
        let th: f64 = 0.77;
        for n in 0..30 {
            let v = chebyshev_v(n, c(th.cos()));
            let want = ((n + 1) as f64 * th).sin() / th.sin();
            assert!((v.re - want).abs() < 1e-11);
            let t = chebyshev_t(n, c(th.cos()));
            assert!((t.re - (n as f64 * th).cos()).abs() < 1e-11);
        }
    }
}
