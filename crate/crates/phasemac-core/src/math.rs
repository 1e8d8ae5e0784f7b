//! Deterministic float helpers usable without `std`.
//!
//! The simulator must produce byte-identical results across runs and hosts, so
//! the few transcendental operations the crate needs are implemented here as
//! plain f64 arithmetic instead of relying on platform libm.

/// |x| via sign-bit clear.
#[inline]
pub fn fabs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & !(1u64 << 63))
}

/// 2^e for e in [-1022, 1023], built directly from the exponent field.
#[inline]
const fn pow2(e: i64) -> f64 {
    f64::from_bits(((e + 1023) as u64) << 52)
}

#[inline]
pub fn fmax(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

#[inline]
pub fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

/// Round half away from zero: 0.5 -> 1, -0.5 -> -1, 63.5 -> 64.
///
/// Valid for |x| < 2^52 (all quantizer inputs by construction).
pub fn round_half_away(x: f64) -> f64 {
    let t = (x as i64) as f64; // trunc toward zero
    let f = x - t;
    if f >= 0.5 {
        t + 1.0
    } else if f <= -0.5 {
        t - 1.0
    } else {
        t
    }
}

/// Square root by exponent halving plus Newton iterations.
///
/// Accurate to ~1 ulp over the normal range; returns NaN for negative input
/// and 0 for +0. Used for weight-init scales and test metrics only.
pub fn sqrt(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < 0.0 || x.is_nan() {
        return f64::NAN;
    }
    if x.is_infinite() {
        return x;
    }
    // Rescale subnormals/tiny values into the comfortable range.
    let (x, post) = if x < 1e-280 {
        (x * pow2(200), pow2(-100))
    } else {
        (x, 1.0)
    };
    let bits = x.to_bits();
    let mut e = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1023u64 << 52)); // [1,2)
    if e & 1 != 0 {
        m *= 2.0;
        e -= 1;
    }
    // m in [1,4), e even; seed linear in m then Newton.
    let mut y = 0.5 * (m + 1.0);
    for _ in 0..5 {
        y = 0.5 * (y + m / y);
    }
    let scale = f64::from_bits(((e / 2 + 1023) as u64) << 52);
    y * scale * post
}

// Two-part ln(2): the f64 rounding of the constant plus its residual, so
// the range reduction stays accurate for large |k|.
const LN2_HI: f64 = core::f64::consts::LN_2;
const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;
const INV_LN2: f64 = core::f64::consts::LOG2_E;

/// e^x via range reduction to |r| <= ln2/2 and a Taylor polynomial.
///
/// Relative error below 1e-15 across the normal range; deterministic.
pub fn exp(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x > 709.8 {
        return f64::INFINITY;
    }
    if x < -745.0 {
        return 0.0;
    }
    let k = round_half_away(x * INV_LN2);
    let r = (x - k * LN2_HI) - k * LN2_LO;
    // Taylor series at 0, degree 13: the tail is ~1e-16 for |r| <= 0.347.
    // Cascade form: 1 + r/1*(1 + r/2*(1 + ... (1 + r/13))).
    let mut er = 1.0;
    for d in (1..=13u32).rev() {
        er = 1.0 + er * r / d as f64;
    }
    let ki = k as i64;
    if ki >= -1021 {
        er * pow2(ki)
    } else {
        // Subnormal result range: split the scaling.
        er * pow2(ki + 512) * pow2(-512)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_half_away_ties_and_interior() {
        assert_eq!(round_half_away(0.5), 1.0);
        assert_eq!(round_half_away(-0.5), -1.0);
        assert_eq!(round_half_away(63.5), 64.0);
        assert_eq!(round_half_away(63.49), 63.0);
        assert_eq!(round_half_away(-2.5), -3.0);
        assert_eq!(round_half_away(-2.49), -2.0);
        assert_eq!(round_half_away(0.0), 0.0);
    }

    #[test]
    fn sqrt_matches_std() {
        let cases = [
            1.0,
            2.0,
            0.5,
            3.0,
            4.0,
            100.0,
            1e-12,
            1e12,
            6.0 / 784.0,
            0.3333,
        ];
        for &c in &cases {
            let got = sqrt(c);
            let want = c.sqrt();
            assert!(
                (got - want).abs() <= want * 1e-14,
                "sqrt({c}): {got} vs {want}"
            );
        }
        assert_eq!(sqrt(0.0), 0.0);
        assert!(sqrt(-1.0).is_nan());
    }

    #[test]
    fn exp_matches_std() {
        let mut x = -30.0;
        while x < 30.0 {
            let got = exp(x);
            let want = x.exp();
            assert!(
                (got - want).abs() <= want * 1e-13,
                "exp({x}): {got} vs {want}"
            );
            x += 0.37;
        }
        assert_eq!(exp(0.0), 1.0);
        assert_eq!(exp(-1000.0), 0.0);
        assert!(exp(1000.0).is_infinite());
    }
}
