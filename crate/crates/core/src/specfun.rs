//! Special functions used by the form factors, closed-form diffusion
//! coefficients and the planar-rotor kernel.
//!
//! Modified Bessel functions are only exposed in exponentially scaled form,
//! `e^{-|x|} I_n(x)`. Downstream formulas are arranged so that every
//! intermediate stays of order one even when `I_n` itself would overflow.

use crate::error::{Error, Result};
use crate::num::{from_usize, lit, Real};

/// Power series of `J_n(x)` (`n` = 0, 1, 2), accurate while `|x| ≲ 4`.
fn bessel_j_series<T: Real>(n: usize, x: T) -> T {
    let q = -(x * x) / lit(4.0);
    let mut term = (0..n).fold(T::one(), |t, k| t * (x / lit(2.0)) / from_usize(k + 1));
    let mut sum = term;
    for k in 1..60 {
        term = term * q / (from_usize::<T>(k) * from_usize::<T>(k + n));
        sum += term;
        if term.abs() <= T::epsilon() * lit(0.25) * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion of `J_n(x)` for `x ≥ 25`.
fn bessel_j_asymptotic<T: Real>(n: usize, x: T) -> T {
    let mu = lit::<T>(4.0) * from_usize::<T>(n * n);
    let eight_x = lit::<T>(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..80 {
        let odd = from_usize::<T>(2 * k - 1);
        term = term * (mu - odd * odd) / (from_usize::<T>(k) * eight_x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // k odd feeds Q, k even feeds P, signs alternate in pairs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < T::epsilon() * lit(1e-2) {
            break;
        }
    }
    // χ = x - (n/2 + 1/4)π, expanded to keep the phase exact for large x
    let phase = (from_usize::<T>(2 * n + 1)) * T::FRAC_PI_4();
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (lit::<T>(2.0) / (T::PI() * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Miller backward recurrence for `(J_0, J_1, J_2)`, normalised with
/// `J_0 + 2 Σ J_{2k} = 1`.
fn bessel_j_miller<T: Real>(x: T) -> [T; 3] {
    let start = 2 * ((x.to_f64().unwrap_or(0.0) as usize + 40) / 2) + 2;
    let big = T::max_value().sqrt();
    let two_over_x = lit::<T>(2.0) / x;
    let mut next = T::zero(); // J_{k+1}
    let mut cur = lit::<T>(1e-30); // J_k
    let mut norm = T::zero();
    let mut out = [T::zero(); 3];
    for k in (1..=start).rev() {
        let prev = from_usize::<T>(k) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        let km1 = k - 1;
        if km1 <= 2 {
            out[km1] = cur;
        }
        if km1 % 2 == 0 && km1 > 0 {
            norm += lit::<T>(2.0) * cur;
        }
        if cur.abs() > big {
            let s = T::one() / big;
            cur = cur * s;
            next = next * s;
            norm = norm * s;
            out.iter_mut().for_each(|v| *v = *v * s);
        }
    }
    norm += out[0];
    out.map(|v| v / norm)
}

fn check_nan<T: Real>(x: T, name: &'static str) -> Result<()> {
    if x.is_nan() {
        Err(Error::NotANumber(name))
    } else {
        Ok(())
    }
}

fn bessel_j_small_order<T: Real>(n: usize, x: T) -> T {
    let ax = x.abs();
    let sign = if n % 2 == 1 && x < T::zero() { -T::one() } else { T::one() };
    let v = if ax < lit(4.0) {
        bessel_j_series(n, ax)
    } else if ax < lit(25.0) {
        bessel_j_miller(ax)[n]
    } else {
        bessel_j_asymptotic(n, ax)
    };
    sign * v
}

/// Bessel function of the first kind `J_0(x)`.
pub fn bessel_j0<T: Real>(x: T) -> Result<T> {
    check_nan(x, "bessel_j0")?;
    Ok(bessel_j_small_order(0, x))
}

/// Bessel function of the first kind `J_1(x)`.
pub fn bessel_j1<T: Real>(x: T) -> Result<T> {
    check_nan(x, "bessel_j1")?;
    Ok(bessel_j_small_order(1, x))
}

/// `2 J_1(x) / x`, equal to 1 at the origin. This is the transverse profile
/// of the uniform-cylinder form factor.
pub(crate) fn jinc<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < lit(4.0) {
        // 2 J1(x)/x = Σ (-x²/4)^k / (k! (k+1)!)
        let q = -(x * x) / lit(4.0);
        let mut term = T::one();
        let mut sum = T::one();
        for k in 1..60 {
            term = term * q / (from_usize::<T>(k) * from_usize::<T>(k + 1));
            sum += term;
            if term.abs() <= T::epsilon() * lit(0.25) * sum.abs() {
                break;
            }
        }
        sum
    } else {
        lit::<T>(2.0) * bessel_j_small_order(1, ax) / ax
    }
}

/// `J_2(x) / x²`, equal to 1/8 at the origin.
pub(crate) fn bessel_j2_over_x2<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < lit(4.0) {
        // J2(x)/x² = (1/8) Σ (-x²/4)^k · 2 / (k! (k+2)!)
        let q = -(x * x) / lit(4.0);
        let mut term = lit::<T>(0.125);
        let mut sum = term;
        for k in 1..60 {
            term = term * q / (from_usize::<T>(k) * from_usize::<T>(k + 2));
            sum += term;
            if term.abs() <= T::epsilon() * lit(0.25) * sum.abs() {
                break;
            }
        }
        sum
    } else if ax < lit(25.0) {
        bessel_j_miller(ax)[2] / (ax * ax)
    } else {
        bessel_j_asymptotic(2, ax) / (ax * ax)
    }
}

/// Series `Σ_k (-x²/2)^k / (k! (2n+2k+1)!!)`, i.e. `j_n(x) / x^n` for the
/// spherical Bessel function of order `n`.
fn spherical_j_reduced_series<T: Real>(n: usize, x: T) -> T {
    let dfact = (0..=n).fold(T::one(), |acc, k| acc * from_usize::<T>(2 * k + 1));
    let q = -(x * x) / lit(2.0);
    let mut term = T::one() / dfact;
    let mut sum = term;
    for k in 1..60 {
        term = term * q / (from_usize::<T>(k) * from_usize::<T>(2 * n + 2 * k + 1));
        sum += term;
        if term.abs() <= T::epsilon() * lit(0.25) * sum.abs() {
            break;
        }
    }
    sum
}

/// `j_1(x) / x` for the spherical Bessel function `j_1`; equals 1/3 at 0.
pub(crate) fn spherical_j1_over_x<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < lit(2.0) {
        spherical_j_reduced_series(1, ax)
    } else {
        let (s, c) = ax.sin_cos();
        (s / ax - c) / (ax * ax)
    }
}

/// `j_2(x) / x²`; equals 1/15 at 0.
pub(crate) fn spherical_j2_over_x2<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < lit(2.0) {
        spherical_j_reduced_series(2, ax)
    } else {
        let (s, c) = ax.sin_cos();
        let x2 = ax * ax;
        ((lit::<T>(3.0) / x2 - T::one()) * s / ax - lit::<T>(3.0) * c / x2) / x2
    }
}

/// `J_{3/2}(x)` for `x ≥ 0`, through `√(2/πx) (sin x / x − cos x)` with a
/// series branch near the origin.
pub fn bessel_j_3half<T: Real>(x: T) -> Result<T> {
    check_nan(x, "bessel_j_3half")?;
    if x < T::zero() {
        return Err(crate::error::invalid("x", "J_{3/2} needs a non-negative argument"));
    }
    // J_{3/2}(x) = √(2x/π) j_1(x) = √(2x/π) · x · (j_1(x)/x)
    Ok((lit::<T>(2.0) * x / T::PI()).sqrt() * x * spherical_j1_over_x(x))
}

/// Sinc with `sinc(0) = 1`.
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < lit(0.1) {
        let x2 = x * x;
        // 1 - x²/6 + x⁴/120 - x⁶/5040 + x⁸/362880
        T::one()
            + x2 * (lit::<T>(-1.0 / 6.0)
                + x2 * (lit::<T>(1.0 / 120.0) + x2 * (lit::<T>(-1.0 / 5040.0) + x2 * lit(1.0 / 362880.0))))
    } else {
        x.sin() / x
    }
}

/// `sinc'(x) / x`; equals −1/3 at 0.
pub(crate) fn sinc_prime_over_x<T: Real>(x: T) -> T {
    -spherical_j1_over_x(x)
}

/// Error function.
pub fn erf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    if ax >= lit(6.0) {
        return x.signum();
    }
    if ax >= lit(3.0) {
        // erfc by its continued fraction, 1/(x + ½/(x + 1/(x + 3/2/(x + …))))
        let mut tail = ax;
        for n in (1..=120).rev() {
            tail = ax + lit::<T>(0.5 * n as f64) / tail;
        }
        let erfc = (-ax * ax).exp() / (T::PI().sqrt() * tail);
        return x.signum() * (T::one() - erfc);
    }
    // erf(x) = 2/√π e^{-x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!, all terms positive
    let x2 = ax * ax;
    let mut term = ax;
    let mut sum = ax;
    for n in 1..400 {
        term = term * lit::<T>(2.0) * x2 / from_usize::<T>(2 * n + 1);
        sum += term;
        if term <= T::epsilon() * lit(0.25) * sum {
            break;
        }
    }
    x.signum() * lit::<T>(2.0) / T::PI().sqrt() * (-x2).exp() * sum
}

/// Scaled `e^{-x} I_n(x)` for `x ≥ 0` by power series; only used while
/// `x ≤ 20` where `I_n` is far from overflow.
fn bessel_i_series_scaled<T: Real>(n: usize, x: T) -> T {
    let half = x / lit(2.0);
    let q = half * half;
    // (x/2)^n / n! via logs to stay finite for large n
    let lead = if x == T::zero() {
        if n == 0 {
            T::one()
        } else {
            T::zero()
        }
    } else {
        let ln_fact = (1..=n).fold(T::zero(), |acc, k| acc + from_usize::<T>(k).ln());
        (from_usize::<T>(n) * half.ln() - ln_fact - x).exp()
    };
    if lead == T::zero() {
        return lead;
    }
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..500 {
        term = term * q / (from_usize::<T>(k) * from_usize::<T>(k + n));
        sum += term;
        if term <= T::epsilon() * lit(0.25) * sum {
            break;
        }
    }
    lead * sum
}

/// Asymptotic expansion `e^{-x} I_n(x) ~ (2πx)^{-1/2} Σ (-1)^k a_k(n) / x^k`.
/// Returns `None` when the series does not reach working precision.
fn bessel_i_asymptotic_scaled<T: Real>(n: usize, x: T) -> Option<T> {
    let mu = lit::<T>(4.0) * from_usize::<T>(n * n);
    let eight_x = lit::<T>(8.0) * x;
    let mut term = T::one();
    let mut sum = T::one();
    let mut last = T::infinity();
    for k in 1..200 {
        let odd = from_usize::<T>(2 * k - 1);
        term = -term * (mu - odd * odd) / (from_usize::<T>(k) * eight_x);
        if term.abs() > last {
            return None;
        }
        last = term.abs();
        sum += term;
        if term.abs() <= T::epsilon() * lit(0.25) * sum.abs() {
            return Some(sum / (lit::<T>(2.0) * T::PI() * x).sqrt());
        }
    }
    None
}

fn bessel_i01_scaled<T: Real>(n: usize, ax: T) -> T {
    if ax <= lit(20.0) {
        bessel_i_series_scaled(n, ax)
    } else {
        bessel_i_asymptotic_scaled(n, ax).unwrap_or_else(|| bessel_i_series_scaled(n, ax))
    }
}

/// Exponentially scaled modified Bessel function `e^{-|x|} I_n(x)`.
///
/// Uses the parity `I_n(-x) = (-1)^n I_n(x)`.
pub fn bessel_i_scaled<T: Real>(n: usize, x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let v = if n <= 1 {
        bessel_i01_scaled(n, ax)
    } else if ax > lit::<T>(30.0).max(lit::<T>(4.0) * from_usize::<T>(n * n)) {
        bessel_i_asymptotic_scaled(n, ax).unwrap_or_else(|| bessel_i_scaled_seq(n, ax)[n])
    } else {
        *bessel_i_scaled_seq(n, ax).last().unwrap()
    };
    if n % 2 == 1 && x < T::zero() {
        -v
    } else {
        v
    }
}

/// `e^{-|x|} I_n(x)` for every order `n = 0..=n_max` in one pass.
///
/// Backward recurrence `I_{k-1} = (2k/x) I_k + I_{k+1}` started far enough
/// above `max(n_max, √x)` that the start error is negligible, normalised by
/// the directly evaluated `e^{-|x|} I_0(x)`.
pub fn bessel_i_scaled_seq<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); n_max + 1];
    if x.is_nan() {
        out.fill(x);
        return out;
    }
    let ax = x.abs();
    if ax == T::zero() {
        out[0] = T::one();
        return out;
    }
    if n_max <= 1 {
        for (n, o) in out.iter_mut().enumerate() {
            *o = bessel_i01_scaled(n, ax);
        }
    } else {
        let axf = ax.to_f64().unwrap_or(0.0);
        let reach = (80.0 * axf.max(n_max as f64)).sqrt().ceil() as usize;
        let start = n_max + reach + 20;
        let big = T::max_value().sqrt();
        let two_over_x = lit::<T>(2.0) / ax;
        let mut next = T::zero();
        let mut cur = T::min_positive_value().sqrt();
        for k in (1..=start).rev() {
            let prev = from_usize::<T>(k) * two_over_x * cur + next;
            next = cur;
            cur = prev;
            if k - 1 <= n_max {
                out[k - 1] = cur;
            }
            if cur > big {
                let s = T::one() / big;
                cur = cur * s;
                next = next * s;
                let lo = k.saturating_sub(1);
                for o in out.iter_mut().skip(lo) {
                    *o = *o * s;
                }
            }
        }
        let scale = bessel_i01_scaled(0, ax) / out[0];
        out.iter_mut().for_each(|o| *o = *o * scale);
    }
    if x < T::zero() {
        out.iter_mut().skip(1).step_by(2).for_each(|o| *o = -*o);
    }
    out
}

/// Coefficients `c_j` of `e^{-x} I_n(x) = Σ_j c_j x^{n+j}`, from Kummer's
/// transformation `e^{-x} I_n(x) = (x/2)^n/n! · M(n+½, 2n+1, −2x)`.
pub(crate) fn scaled_i_taylor<T: Real>(n: usize, terms: usize) -> Vec<T> {
    let lead = (0..n).fold(T::one(), |acc, k| acc / (lit::<T>(2.0) * from_usize::<T>(k + 1)));
    let a = from_usize::<T>(n) + lit(0.5);
    let b = from_usize::<T>(2 * n + 1);
    let mut c = lead;
    let mut out = Vec::with_capacity(terms);
    for j in 0..terms {
        out.push(c);
        let jj = from_usize::<T>(j);
        c = c * (a + jj) * lit(-2.0) / ((b + jj) * (jj + T::one()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn j1_at_origin_and_slope() {
        assert_eq!(bessel_j1(0.0f64).unwrap(), 0.0);
        let x = 1e-8f64;
        assert!((bessel_j1(x).unwrap() / x - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nan_is_rejected() {
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j1(f64::NAN).is_err());
        assert!(bessel_j_3half(f64::NAN).is_err());
        assert!(bessel_j_3half(-1.0f64).is_err());
    }

    #[test]
    fn j_3half_limits() {
        let x = 1e-6f64;
        let lead = (2.0 / std::f64::consts::PI).sqrt() / 3.0;
        assert!(rel(bessel_j_3half(x).unwrap() / x.powf(1.5), lead) < 1e-10);
        // sin π = 0, cos π = -1  =>  √(2/π²) = √2/π
        let want = 2f64.sqrt() / std::f64::consts::PI;
        assert!(rel(bessel_j_3half(std::f64::consts::PI).unwrap(), want) < 1e-14);
    }

    #[test]
    fn i_scaled_basic() {
        assert_eq!(bessel_i_scaled(0, 0.0f64), 1.0);
        let a = bessel_i_scaled(3, 2.0f64);
        let b = bessel_i_scaled(3, -2.0f64);
        assert!(a > 0.0 && (a + b).abs() < 1e-17);
        let lead = 1.0 / (2.0 * std::f64::consts::PI * 100.0f64).sqrt();
        assert!(rel(bessel_i_scaled(0, 100.0f64), lead) < 5e-3);
    }

    #[test]
    fn erf_and_sinc() {
        assert_eq!(erf(0.0f64), 0.0);
        assert_eq!(sinc(0.0f64), 1.0);
        assert!(sinc(std::f64::consts::PI).abs() < 1e-16);
        assert!(rel(erf(1.0f64), 0.8427007929497149) < 1e-15);
        assert_eq!(erf(7.0f64), 1.0);
        assert_eq!(erf(-7.0f64), -1.0);
    }

    #[test]
    fn sequence_matches_single_order() {
        for &x in &[0.3f64, 5.0, 62.8, -17.0, 900.0] {
            let seq = bessel_i_scaled_seq(40, x);
            for n in [0usize, 1, 2, 7, 40] {
                let single = bessel_i_scaled(n, x);
                let tol = 1e-13 * single.abs().max(1e-300);
                assert!((seq[n] - single).abs() <= tol, "n={n} x={x}: {} vs {}", seq[n], single);
            }
        }
    }

    #[test]
    fn taylor_coefficients_reproduce_function() {
        let c0 = scaled_i_taylor::<f64>(0, 40);
        let c1 = scaled_i_taylor::<f64>(1, 40);
        let x = 0.3f64;
        let s0: f64 = c0.iter().enumerate().map(|(j, c)| c * x.powi(j as i32)).sum();
        let s1: f64 = c1.iter().enumerate().map(|(j, c)| c * x.powi(j as i32 + 1)).sum();
        assert!(rel(s0, bessel_i_scaled(0, x)) < 1e-15);
        assert!(rel(s1, bessel_i_scaled(1, x)) < 1e-15);
    }

    #[test]
    fn f32_paths_work() {
        let v: f32 = bessel_j0(2.0f32).unwrap();
        assert!((v - 0.223_890_78).abs() < 1e-6);
        let i: f32 = bessel_i_scaled(1, 3.0f32);
        assert!((i as f64 - bessel_i_scaled(1, 3.0f64)).abs() < 1e-6);
    }
}
