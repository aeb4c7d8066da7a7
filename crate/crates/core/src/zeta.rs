//! Hurwitz zeta function `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for real `s > 1`,
//! `a > 0`, used to sum power-law tails in closed form.

/// `B_{2j} / (2j)!` for `j = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Direct terms summed before switching to Euler–Maclaurin.
const DIRECT_TERMS: usize = 12;

/// Hurwitz zeta via Euler–Maclaurin summation; accurate to a few ulps for
/// `s > 1` and `a > 0`. Returns `+∞` for `s ≤ 1`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(a > 0.0, "hurwitz_zeta requires a > 0, got {a}");
    if s <= 1.0 {
        return f64::INFINITY;
    }
    let mut sum = 0.0;
    for k in 0..DIRECT_TERMS {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + DIRECT_TERMS as f64;
    let x_pow = x.powf(-s);
    sum += x * x_pow / (s - 1.0) + 0.5 * x_pow;

    // Rising factorial s(s+1)…(s+2j−2) times x^{-s-2j+1}.
    let mut rising = s;
    let mut power = x_pow / x;
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = coeff * rising * power;
        sum += term;
        if term.abs() < f64::EPSILON * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power /= x * x;
    }
    sum
}
