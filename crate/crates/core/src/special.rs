//! Bessel function of the first kind of order one and the shrinkage ratio
//! `2J₁(x)/x` built on it.
//!
//! Two regimes:
//!
//! - `|x| < 20`: the ascending power series, summed in double-double
//!   arithmetic so the cancellation between terms (up to ~4e7 at `x = 20`)
//!   does not eat the result. This keeps high *relative* accuracy even next to
//!   the zeros of `J₁`.
//! - `|x| ≥ 20`: the Hankel asymptotic expansion in amplitude/phase form,
//!   truncated at its smallest term (below 1e-18 for `x ≥ 20`).
//!
//! The phase `cos(x − 3π/4)` is expanded into `sin x` and `cos x` so that no
//! rounding is introduced by forming `x − 3π/4` for large `x`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this the power series is used.
const SERIES_LIMIT: f64 = 20.0;
/// Below this `j1_ratio` uses its Taylor polynomial.
const RATIO_TAYLOR_LIMIT: f64 = 1e-4;

/// `J₁(x)`, odd in `x`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("bessel_j1: non-finite argument {x}")));
    }
    Ok(j1(x))
}

/// `2J₁(x)/x` for `x > 0`, and `1` at `x = 0`.
pub fn j1_ratio(x: f64) -> Result<f64> {
    check_ratio_arg(x)?;
    Ok(ratio(x))
}

/// `1 − 2J₁(x)/x`, accurate in the relative sense as `x → 0`
/// (where it behaves like `x²/8`).
pub fn j1_ratio_complement(x: f64) -> Result<f64> {
    check_ratio_arg(x)?;
    Ok(ratio_complement(x))
}

fn check_ratio_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "j1_ratio: argument must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

pub(crate) fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        let (hi, lo) = ratio_series_rest(ax);
        // J₁ = (x/2)(1 + rest)
        let h = 0.5 * ax;
        let one_plus = Dd::from(1.0).add(Dd { hi, lo });
        one_plus.mul_f64(h).to_f64()
    } else {
        hankel_j1(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub(crate) fn ratio(x: f64) -> f64 {
    if x < RATIO_TAYLOR_LIMIT {
        let x2 = x * x;
        return 1.0 - x2 / 8.0 + x2 * x2 / 192.0 - x2 * x2 * x2 / 9216.0;
    }
    if x < SERIES_LIMIT {
        let (hi, lo) = ratio_series_rest(x);
        Dd::from(1.0).add(Dd { hi, lo }).to_f64()
    } else {
        2.0 * hankel_j1(x) / x
    }
}

pub(crate) fn ratio_complement(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        let (hi, lo) = ratio_series_rest(x);
        -(hi + lo)
    } else {
        1.0 - 2.0 * hankel_j1(x) / x
    }
}

/// Sum of the `k ≥ 1` terms of `2J₁(x)/x = Σ (−1)^k (x²/4)^k / (k!(k+1)!)`,
/// returned as an unevaluated double-double pair.
fn ratio_series_rest(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let h = 0.5 * x;
    let q = Dd::prod(h, h);
    let mut term = Dd::from(1.0);
    let mut rest = Dd::from(0.0);
    for k in 1..120u32 {
        term = term.mul(q).div_f64(f64::from(k * (k + 1))).neg();
        rest = rest.add(term);
        if f64::from(k) > q.hi && term.hi.abs() <= 1e-34 * rest.hi.abs() {
            break;
        }
    }
    (rest.hi, rest.lo)
}

fn hankel_j1(x: f64) -> f64 {
    // a_k = Π_{j≤k} (4 − (2j−1)²) / (k! 8^k); term_k = a_k / x^k
    let mut p = 1.0_f64;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..200u32 {
        let odd = f64::from(2 * k - 1);
        term *= (4.0 - odd * odd) / (8.0 * f64::from(k) * x);
        let mag = term.abs();
        if mag > prev || mag < 1e-18 * p.abs() {
            break;
        }
        prev = mag;
        // even k feed P with sign (−1)^{k/2}, odd k feed Q with sign (−1)^{(k−1)/2}
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
    }
    let (s, c) = x.sin_cos();
    (p * (s - c) + q * (s + c)) / (PI * x).sqrt()
}

/// Double-double value `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Dd {
    fn quick(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let s = Dd::quick(s.hi, s.lo + t.hi);
        Dd::quick(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::prod(self.hi, o.hi);
        Dd::quick(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = Dd::prod(self.hi, b);
        Dd::quick(p.hi, p.lo + self.lo * b)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = Dd::prod(q1, d);
        let s = Dd::two_sum(self.hi, -p.hi);
        let r = s.hi + (s.lo - p.lo + self.lo);
        Dd::quick(q1, r / d)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain 30-term series, used only as a cross-check away from the zeros.
    fn series30(x: f64) -> f64 {
        let h = 0.5 * x;
        let mut term = h;
        let mut sum = h;
        for k in 1..30 {
            term *= -h * h / (k as f64 * (k + 1) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn values_at_reference_points() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!((bessel_j1(1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-12);
        assert!(bessel_j1(3.831_705_970_207_512_3).unwrap().abs() < 1e-10);
        // odd symmetry
        assert_eq!(bessel_j1(-2.5).unwrap(), -bessel_j1(2.5).unwrap());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(j1_ratio(0.0).unwrap(), 1.0);
        assert!((j1_ratio(2.0).unwrap() - 0.576_724_807_8).abs() < 1e-9);
        assert!((j1_ratio(1e-8).unwrap() - 1.0).abs() < 1e-15);
        assert!(j1_ratio(-1.0).is_err());
        assert!(bessel_j1(f64::NAN).is_err());
        assert!(bessel_j1(f64::INFINITY).is_err());
    }

    #[test]
    fn complement_small_argument_is_relative_accurate() {
        for &x in &[1e-8, 1e-6, 1e-3, 1e-2] {
            let c = j1_ratio_complement(x).unwrap();
            let x2 = x * x;
            let taylor = x2 / 8.0 - x2 * x2 / 192.0 + x2 * x2 * x2 / 9216.0;
            assert!(((c - taylor) / taylor).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn ratio_switch_is_continuous() {
        let below = ratio(RATIO_TAYLOR_LIMIT * (1.0 - 1e-12));
        let above = ratio(RATIO_TAYLOR_LIMIT);
        assert!((below - above).abs() < 1e-16);
        let below = j1(SERIES_LIMIT * (1.0 - 1e-15));
        let above = j1(SERIES_LIMIT);
        assert!((below - above).abs() < 1e-14);
    }

    #[test]
    fn matches_plain_series_away_from_zeros() {
        for i in 1..=200 {
            let x = 0.02 * i as f64;
            let v = j1(x);
            if v.abs() > 0.05 {
                assert!(((v - series30(x)) / v).abs() < 1e-13, "x = {x}");
            }
        }
    }

    #[test]
    fn hankel_matches_reference_values() {
        // J₁ values from a 50-digit reference evaluation
        let refs = [
            (20.0, 0.066_833_124_175_850_05),
            (25.0, -0.125_350_249_580_289_9),
            (50.0, -0.097_511_828_125_175_14),
            (1000.0, 0.004_728_311_907_089_523),
        ];
        for (x, v) in refs {
            assert!(((j1(x) - v) / v).abs() < 1e-12, "x = {x}: {} vs {v}", j1(x));
        }
    }

    #[test]
    fn ratio_bounded_by_one() {
        for i in 1..20_000 {
            let x = i as f64 * 0.01;
            let r = ratio(x);
            assert!(r < 1.0 && r.abs() <= 1.0, "x = {x}");
        }
    }

    #[test]
    fn bessel_ode_residual() {
        let h = 1e-2;
        let mut x = 0.1;
        while x <= 50.0 {
            let f = |u: f64| j1(u);
            let (m2, m1, z, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
            let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
            let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
            let res = x * x * d2 + x * d1 + (x * x - 1.0) * z;
            assert!(res.abs() <= 1e-8 * (1.0 + x * x), "x = {x}: residual {res}");
            x += 0.0937;
        }
    }
}
