//! Continued-fraction rational approximation and small integer arithmetic.

/// Convergents `p/q` of the continued fraction of `x`, in order, stopping
/// once the denominator would exceed `q_max` or the expansion terminates.
pub fn convergents(x: f64, q_max: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    // p_{-1}/q_{-1} = 1/0, p_{-2}/q_{-2} = 0/1
    let (mut p_prev, mut q_prev): (i128, i128) = (1, 0);
    let (mut p_prev2, mut q_prev2): (i128, i128) = (0, 1);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let p = ai * p_prev + p_prev2;
        let q = ai * q_prev + q_prev2;
        if q > q_max as i128 || p.abs() > i64::MAX as i128 {
            break;
        }
        out.push((p as i64, q as u64));
        p_prev2 = p_prev;
        q_prev2 = q_prev;
        p_prev = p;
        q_prev = q;
        let frac = rem - a;
        if frac.abs() < 1e-300 {
            break;
        }
        rem = 1.0 / frac;
    }
    out
}

/// Smallest-denominator integer relation `q·g ≈ p·a` with `q ≤ q_max` and
/// residual `|q·g − p·a| ≤ tol`. `a` must be nonzero.
pub fn integer_relation(g: f64, a: f64, tol: f64, q_max: u64) -> Option<(i64, u64)> {
    convergents(g / a, q_max)
        .into_iter()
        .find(|&(p, q)| (q as f64 * g - p as f64 * a).abs() <= tol)
}

/// Nearest rational `p/q` to `x` with `q ≤ q_max`, in lowest terms, taken
/// from the convergents (best approximations of the second kind).
pub fn best_rational(x: f64, q_max: u64) -> Option<(i64, u64)> {
    convergents(x, q_max).into_iter().min_by(|a, b| {
        let ea = (x - a.0 as f64 / a.1 as f64).abs();
        let eb = (x - b.0 as f64 / b.1 as f64).abs();
        ea.total_cmp(&eb).then(a.1.cmp(&b.1))
    })
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization of a positive integer by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents_of_golden_ratio_are_fibonacci() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let c = convergents(phi, 100);
        let qs: Vec<u64> = c.iter().map(|x| x.1).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
    }

    #[test]
    fn exact_ratio_found() {
        let a = 0.9f64.ln();
        assert_eq!(
            integer_relation(3.0 * a, 2.0 * a, 1e-9, 1_000_000),
            Some((3, 2))
        );
    }

    #[test]
    fn log_two_three_incommensurate() {
        assert_eq!(
            integer_relation(3f64.ln(), 2f64.ln(), 1e-9, 1_000_000),
            None
        );
    }

    #[test]
    fn best_rational_quarter() {
        assert_eq!(best_rational(0.25 + 1e-13, 8), Some((1, 4)));
        assert_eq!(best_rational(-0.5, 8), Some((-1, 2)));
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }
}
