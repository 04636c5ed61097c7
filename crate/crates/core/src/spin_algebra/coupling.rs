//! Clebsch–Gordan coefficients, 3j and 6j symbols.
//!
//! All three use Racah's closed-form alternating sums; every term is built
//! from log-factorials so intermediate values stay in range for the spins
//! used here (a few tens at most).

use std::sync::OnceLock;

use super::HalfInt;

const LN_FACT_TABLE: usize = 1024;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        t.push(0.0);
        for n in 1..LN_FACT_TABLE {
            t.push(t[n - 1] + (n as f64).ln());
        }
        t
    })
}

/// `ln(n!)` for `0 ≤ n < 1024`.
pub fn ln_factorial(n: i32) -> f64 {
    assert!(
        n >= 0 && (n as usize) < LN_FACT_TABLE,
        "ln_factorial argument {n} outside the supported range"
    );
    ln_fact_table()[n as usize]
}

/// `(twice / 2)!` in log form; `twice` must be even and non-negative.
fn lnf(twice: i32) -> f64 {
    debug_assert!(twice % 2 == 0 && twice >= 0);
    ln_factorial(twice / 2)
}

fn sign(twice_exponent: i32) -> f64 {
    debug_assert!(twice_exponent % 2 == 0);
    if (twice_exponent / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Condon–Shortley coefficient `⟨j1 m1 j2 m2 | J M⟩`.
///
/// Returns `0` for any selection-rule violation (triangle, `M ≠ m1 + m2`,
/// `|m| > j`, non-integral `j − m`).
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> f64 {
    if j1.twice() < 0 || j2.twice() < 0 || j.twice() < 0 {
        return 0.0;
    }
    if m1 + m2 != m
        || !m1.is_projection_of(j1)
        || !m2.is_projection_of(j2)
        || !m.is_projection_of(j)
        || !HalfInt::triangle(j1, j2, j)
    {
        return 0.0;
    }
    let (j1, m1, j2, m2, j, m) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        j.twice(),
        m.twice(),
    );

    let ln_pref = 0.5
        * (((j + 1) as f64).ln() + lnf(j + j1 - j2) + lnf(j - j1 + j2) + lnf(j1 + j2 - j)
            - lnf(j1 + j2 + j + 2)
            + lnf(j + m)
            + lnf(j - m)
            + lnf(j1 - m1)
            + lnf(j1 + m1)
            + lnf(j2 - m2)
            + lnf(j2 + m2));

    // k runs over integers (in twice units: even) keeping all factorials ≥ 0.
    let kmin = 0.max(j2 - j - m1).max(j1 + m2 - j);
    let kmax = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    let mut k = kmin;
    while k <= kmax {
        let ln_den = lnf(k)
            + lnf(j1 + j2 - j - k)
            + lnf(j1 - m1 - k)
            + lnf(j2 + m2 - k)
            + lnf(j - j2 + m1 + k)
            + lnf(j - j1 - m2 + k);
        sum += sign(k) * (ln_pref - ln_den).exp();
        k += 2;
    }
    sum
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn wigner_3j(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j3: HalfInt,
    m3: HalfInt,
) -> f64 {
    if m1 + m2 + m3 != HalfInt::ZERO {
        return 0.0;
    }
    let cg = clebsch_gordan(j1, m1, j2, m2, j3, -m3);
    if cg == 0.0 {
        return 0.0;
    }
    sign((j1 - j2 - m3).twice()) * cg / ((j3.twice() + 1) as f64).sqrt()
}

fn ln_triangle_delta(a: i32, b: i32, c: i32) -> f64 {
    0.5 * (lnf(a + b - c) + lnf(a - b + c) + lnf(-a + b + c) - lnf(a + b + c + 2))
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner_6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> f64 {
    if !(HalfInt::triangle(j1, j2, j3)
        && HalfInt::triangle(j1, j5, j6)
        && HalfInt::triangle(j4, j2, j6)
        && HalfInt::triangle(j4, j5, j3))
    {
        return 0.0;
    }
    let (a, b, c, d, e, f) = (
        j1.twice(),
        j2.twice(),
        j3.twice(),
        j4.twice(),
        j5.twice(),
        j6.twice(),
    );
    let ln_pref = ln_triangle_delta(a, b, c)
        + ln_triangle_delta(a, e, f)
        + ln_triangle_delta(d, b, f)
        + ln_triangle_delta(d, e, c);
    let tmin = (a + b + c).max(a + e + f).max(d + b + f).max(d + e + c);
    let tmax = (a + b + d + e).min(b + c + e + f).min(c + a + f + d);
    let mut sum = 0.0;
    let mut t = tmin;
    while t <= tmax {
        let ln_num = lnf(t + 2);
        let ln_den = lnf(t - a - b - c)
            + lnf(t - a - e - f)
            + lnf(t - d - b - f)
            + lnf(t - d - e - c)
            + lnf(a + b + d + e - t)
            + lnf(b + c + e + f - t)
            + lnf(c + a + f + d - t);
        sum += sign(t) * (ln_pref + ln_num - ln_den).exp();
        t += 2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn singlet_and_stretched() {
        let v = clebsch_gordan(h(1), h(1), h(1), h(-1), h(0), h(0));
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        for a in 0..8 {
            for b in 0..8 {
                let v = clebsch_gordan(h(a), h(a), h(b), h(b), h(a + b), h(a + b));
                assert!((v - 1.0).abs() < 1e-12, "stretched {a} {b}: {v}");
            }
        }
    }

    #[test]
    fn one_one_to_two() {
        let v = clebsch_gordan(h(2), h(0), h(2), h(0), h(4), h(0));
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn selection_rules_give_zero() {
        assert_eq!(clebsch_gordan(h(2), h(2), h(2), h(0), h(2), h(0)), 0.0);
        assert_eq!(clebsch_gordan(h(2), h(4), h(2), h(0), h(2), h(4)), 0.0);
        assert_eq!(clebsch_gordan(h(2), h(0), h(2), h(0), h(6), h(0)), 0.0);
    }

    #[test]
    fn known_six_j() {
        // {1 1 1; 1 1 1} = 1/6, {1/2 1/2 1; 1/2 1/2 0} = 1/2
        assert!((wigner_6j(h(2), h(2), h(2), h(2), h(2), h(2)) - 1.0 / 6.0).abs() < 1e-14);
        assert!((wigner_6j(h(1), h(1), h(2), h(1), h(1), h(0)) - 0.5).abs() < 1e-14);
    }
}
