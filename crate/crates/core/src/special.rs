//! Special functions: Bessel/Hankel values on the real axis and the Hurwitz
//! zeta function used for exact lattice sums.

use num_complex::Complex64;

/// `J_n(x)` for integer order and real argument.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let sign = if n < 0 && n % 2 != 0 { -1.0 } else { 1.0 };
    let v = complex_bessel::besselj(n.unsigned_abs() as f64, Complex64::new(x, 0.0))
        .map(|z| z.re)
        .unwrap_or(0.0);
    sign * v
}

/// `H_n^{(1)}(x)` for integer order and real positive argument. `None` when
/// the value overflows (very large order relative to `x`).
pub fn hankel1(n: i64, x: f64) -> Option<Complex64> {
    let sign = if n < 0 && n % 2 != 0 { -1.0 } else { 1.0 };
    complex_bessel::hankel1(n.unsigned_abs() as f64, Complex64::new(x, 0.0))
        .ok()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .map(|z| z * sign)
}

/// `H_0^{(1)}(x)`, `x > 0`.
#[inline]
pub fn hankel1_0(x: f64) -> Complex64 {
    complex_bessel::hankel1(0.0, Complex64::new(x, 0.0)).expect("H0 on the positive axis")
}

/// `H_1^{(1)}(x)`, `x > 0`.
#[inline]
pub fn hankel1_1(x: f64) -> Complex64 {
    complex_bessel::hankel1(1.0, Complex64::new(x, 0.0)).expect("H1 on the positive axis")
}

/// `J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2`.
pub fn bessel_j_prime(n: i64, x: f64) -> f64 {
    0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
}

/// `H_n'(x) = (H_{n-1}(x) - H_{n+1}(x)) / 2`.
pub fn hankel1_prime(n: i64, x: f64) -> Option<Complex64> {
    Some(0.5 * (hankel1(n - 1, x)? - hankel1(n + 1, x)?))
}

/// Products of `J_m`, `Y_m` and their derivatives at a real argument,
/// finite for every order even where `Y_m` alone overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselProducts {
    /// `J_m²`
    pub jj: f64,
    /// `J_m Y_m`
    pub jy: f64,
    /// `J_m' J_m`
    pub jpj: f64,
    /// `J_m' Y_m`
    pub jpy: f64,
    /// `J_m Y_m'`
    pub jyp: f64,
}

impl BesselProducts {
    /// `J_m H_m`
    pub fn jh(&self) -> Complex64 {
        Complex64::new(self.jj, self.jy)
    }

    /// `J_m' H_m`
    pub fn jph(&self) -> Complex64 {
        Complex64::new(self.jpj, self.jpy)
    }

    /// `J_m H_m'`
    pub fn jhp(&self) -> Complex64 {
        Complex64::new(self.jpj, self.jyp)
    }
}

/// Products for order `|m|` at `x > 0`. Below the overflow range they are
/// formed directly; above it `P_m = J_m Y_m` is advanced by the ratios
/// `J_m / J_{m-1}` (backward recurrence) and `Y_m / Y_{m-1}` (forward
/// recurrence), both stable for `m > x`.
pub fn bessel_products(m: i64, x: f64) -> BesselProducts {
    let m = m.unsigned_abs();
    let direct = |n: u64| -> Option<BesselProducts> {
        let h = hankel1(n as i64, x)?;
        let hp = hankel1_prime(n as i64, x)?;
        if h.im.abs() > 1e250 || hp.im.abs() > 1e250 {
            return None;
        }
        let (j, jp) = (bessel_j(n as i64, x), bessel_j_prime(n as i64, x));
        Some(BesselProducts { jj: j * j, jy: j * h.im, jpj: jp * j, jpy: jp * h.im, jyp: j * hp.im })
    };
    if let Some(p) = direct(m) {
        return p;
    }
    // largest directly computable order below m
    let mut m0 = (x.ceil() as u64).max(1).min(m);
    while m0 < m && direct(m0 + 1).is_some() {
        m0 = (m0 * 2).min(m);
        if direct(m0).is_none() {
            m0 /= 2;
            break;
        }
    }
    while direct(m0 + 1).is_some() {
        m0 += 1;
    }
    let start = direct(m0).expect("order below the overflow range");
    // r_n = J_n / J_{n-1} for n ≤ top, by backward recurrence
    let top = m + 64 + (x as u64);
    let mut r = x / (2.0 * top as f64);
    let mut ratios_j = vec![0.0; (m - m0) as usize + 1];
    for n in (m0 + 1..=top).rev() {
        r = 1.0 / (2.0 * n as f64 / x - r);
        if n <= m {
            ratios_j[(n - m0) as usize] = r;
        }
    }
    // s_n = Y_n / Y_{n-1}
    let y0 = hankel1(m0 as i64, x).expect("direct range").im;
    let y_prev = hankel1(m0 as i64 - 1, x).expect("direct range").im;
    let mut s = y0 / y_prev;
    let mut p = start.jy;
    for n in m0 + 1..=m {
        s = 2.0 * (n - 1) as f64 / x - 1.0 / s;
        p *= ratios_j[(n - m0) as usize] * s;
    }
    let r_m = ratios_j[(m - m0) as usize];
    let mx = m as f64 / x;
    // J' = J_{m-1} - (m/x) J_m = J (1/r - m/x); Y' = Y (1/s - m/x)
    let jp_over_j = 1.0 / r_m - mx;
    let yp_over_y = 1.0 / s - mx;
    BesselProducts { jj: 0.0, jy: p, jpj: 0.0, jpy: p * jp_over_j, jyp: p * yp_over_y }
}

/// Even Bernoulli numbers `B_2 .. B_24`.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{q ≥ 0} (q + a)^{-s}` for real `s > 1`, `a > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta needs s > 1, got {s}");
    assert!(a > 0.0, "hurwitz_zeta needs a > 0, got {a}");
    const DIRECT: usize = 16;
    let mut sum = 0.0;
    for q in (0..DIRECT).rev() {
        sum += (q as f64 + a).powf(-s);
    }
    let x = DIRECT as f64 + a;
    let xs = x.powf(-s);
    sum += x * xs / (s - 1.0) + 0.5 * xs;
    // Σ B_2j / (2j)! · s(s+1)···(s+2j-2) · x^{-s-2j+1}
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut fact = 2.0; // (2j)!
    let mut xpow = xs / x; // x^{-s-2j+1}
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * xpow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let k = 2.0 * (j as f64 + 1.0);
        rising *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
        xpow /= x * x;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Power series `J_n(x) = Σ (-1)^k (x/2)^{2k+n} / (k! (k+n)!)`.
    fn series_j(n: u32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for k in 1..60 {
            term *= -(0.25 * x * x) / (k as f64 * (k + n) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn bessel_against_series_and_tables() {
        assert_relative_eq!(bessel_j(0, 1.0), 0.7651976866, epsilon = 1e-10);
        // Y0(1) from standard tables
        assert_relative_eq!(hankel1_0(1.0).im, 0.088256964215677, epsilon = 1e-14);
        assert_relative_eq!(hankel1_1(1.0).im, -0.7812128213002887, epsilon = 1e-14);
        for n in 0..8u32 {
            for x in [0.1, 1.0, 4.2, 7.5] {
                assert_relative_eq!(bessel_j(n as i64, x), series_j(n, x), epsilon = 1e-14, max_relative = 1e-12);
            }
        }
        assert_relative_eq!(bessel_j(-3, 2.0), -bessel_j(3, 2.0), epsilon = 1e-16);
    }

    #[test]
    fn wronskian() {
        // J_n H_n' - J_n' H_n = 2i / (π x)
        for n in [0i64, 1, 5, 12] {
            let x = 4.2;
            let w = bessel_j(n, x) * hankel1_prime(n, x).unwrap()
                - bessel_j_prime(n, x) * hankel1(n, x).unwrap();
            assert!((w - Complex64::new(0.0, 2.0 / (PI * x))).norm() < 1e-13);
        }
    }

    #[test]
    fn products_continue_past_overflow() {
        let x = 4.2;
        // in the direct range the ratio recurrence must agree with the direct product
        for m in [20i64, 60, 120] {
            let d = bessel_j(m, x) * hankel1(m, x).unwrap().im;
            let p = bessel_products(m, x);
            assert_relative_eq!(p.jy, d, max_relative = 1e-12);
        }
        // J_m Y_m → -1 / (π sqrt(m² - x²)) for large m
        for m in [400i64, 2000, 10000] {
            let p = bessel_products(m, x);
            let asym = -1.0 / (PI * ((m * m) as f64 - x * x).sqrt());
            assert_relative_eq!(p.jy, asym, max_relative = 1e-5);
            // Wronskian J Y' - J' Y = 2 / (π x)
            assert_relative_eq!(p.jyp - p.jpy, 2.0 / (PI * x), max_relative = 1e-10);
        }
    }

    #[test]
    fn hurwitz_known_values() {
        assert_relative_eq!(hurwitz_zeta(2.0, 1.0), PI * PI / 6.0, epsilon = 1e-15);
        let zeta3 = 1.2020569031595942;
        assert_relative_eq!(hurwitz_zeta(3.0, 1.0), zeta3, epsilon = 1e-15);
        assert_relative_eq!(hurwitz_zeta(3.0, 0.5), 7.0 * zeta3, epsilon = 1e-14);
        // shift identity ζ(s, a) = a^{-s} + ζ(s, a + 1)
        for (s, a) in [(3.0, 0.125), (4.0, 0.9), (2.000001, 0.3), (5.5, 1.7)] {
            assert_relative_eq!(
                hurwitz_zeta(s, a),
                a.powf(-s) + hurwitz_zeta(s, a + 1.0),
                max_relative = 1e-14
            );
        }
    }
}
