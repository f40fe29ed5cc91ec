//! Root-of-unity arithmetic, derived constants, and Chebyshev polynomials.
//!
//! The quantum parameter is always an exact root of unity `q = exp(2πi a/m)`.
//! Powers of `q` are recomputed from the reduced exponent rather than by
//! repeated multiplication, so long products stay at unit modulus to machine
//! precision.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Result, SkeinError};

/// Default absolute tolerance on residuals of matrices with entries of
/// magnitude O(10^2).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Threshold below which a denominator is treated as singular.
pub const DENOM_TOL: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surface {
    PuncturedTorus,
    FourHoledSphere,
}

impl std::fmt::Display for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Surface::PuncturedTorus => write!(f, "ptorus"),
            Surface::FourHoledSphere => write!(f, "hsphere"),
        }
    }
}

/// The root of unity q = exp(2πi a/m) together with the constants derived
/// from it: n = order(q^2), N = order(q^4), the sign ε = q^{N^2}, and the
/// PI degree D of the chosen surface.
#[derive(Clone, Debug)]
pub struct RootContext {
    pub a: i64,
    pub m: i64,
    /// order of q^2
    pub n: i64,
    /// order of q^4
    pub big_n: i64,
    /// ε = q^{N^2}, always a 4th root of unity
    pub epsilon: Complex64,
    /// exact exponent k with ε = i^k, k in 0..4
    pub eps_quarter: u8,
    /// exact sign of ε^2
    pub eps_sq: i64,
    pub surface: Surface,
    /// PI degree: n for the punctured torus, N for the four-holed sphere
    pub dim: usize,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Multiplicative order of q^j, i.e. the smallest k >= 1 with (q^j)^k = 1.
fn order_of_power(a: i64, m: i64, j: i64) -> i64 {
    let mut k = 1;
    loop {
        if (a * j * k).rem_euclid(m) == 0 {
            return k;
        }
        k += 1;
    }
}

impl RootContext {
    /// Build the context for q = exp(2πi a/m) on the given surface.
    ///
    /// Fails with `BadInput` unless gcd(a, m) = 1, and with `DisallowedRoot`
    /// when the surface-specific exclusion is violated: the punctured torus
    /// requires q^4 ≠ 1 and the four-holed sphere requires q^8 ≠ 1.
    pub fn new(a: i64, m: i64, surface: Surface) -> Result<Self> {
        if m < 1 {
            return Err(SkeinError::BadInput(format!("order m = {m} must be >= 1")));
        }
        if gcd(a, m) != 1 {
            return Err(SkeinError::BadInput(format!(
                "gcd({a}, {m}) != 1; the fraction a/m must be reduced"
            )));
        }
        let a = a.rem_euclid(m);
        match surface {
            Surface::PuncturedTorus => {
                if (4 * a).rem_euclid(m) == 0 {
                    return Err(SkeinError::DisallowedRoot(format!(
                        "q = exp(2πi {a}/{m}) has q^4 = 1, excluded for the punctured torus"
                    )));
                }
            }
            Surface::FourHoledSphere => {
                if (8 * a).rem_euclid(m) == 0 {
                    return Err(SkeinError::DisallowedRoot(format!(
                        "q = exp(2πi {a}/{m}) has q^8 = 1, excluded for the four-holed sphere"
                    )));
                }
            }
        }
        let n = order_of_power(a, m, 2);
        let big_n = order_of_power(a, m, 4);
        // ε = q^{N^2} is an exact 4th root of unity: 4·(a N^2 mod m) is a
        // multiple of m because (q^4)^{N^2} = 1.
        let t = (a * big_n * big_n).rem_euclid(m);
        debug_assert_eq!((4 * t) % m, 0);
        let eps_quarter = ((4 * t) / m) as u8;
        let epsilon = match eps_quarter {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            3 => Complex64::new(0.0, -1.0),
            _ => unreachable!(),
        };
        let eps_sq = if eps_quarter % 2 == 0 { 1 } else { -1 };
        let dim = match surface {
            Surface::PuncturedTorus => n as usize,
            Surface::FourHoledSphere => big_n as usize,
        };
        Ok(RootContext {
            a,
            m,
            n,
            big_n,
            epsilon,
            eps_quarter,
            eps_sq,
            surface,
            dim,
        })
    }

    /// q^k, recomputed from the reduced exponent k·a mod m.
    pub fn q(&self, k: i64) -> Complex64 {
        let r = (self.a.wrapping_mul(k)).rem_euclid(self.m);
        Complex64::from_polar(1.0, TAU * (r as f64) / (self.m as f64))
    }

    /// true when n = order(q^2) is odd
    pub fn n_odd(&self) -> bool {
        self.n % 2 == 1
    }

    /// ε^2 as a complex number (exactly ±1).
    pub fn eps_sq_c(&self) -> Complex64 {
        Complex64::new(self.eps_sq as f64, 0.0)
    }

    /// T_N at the context's N.
    pub fn cheb_n(&self, x: Complex64) -> Complex64 {
        cheb(self.big_n as u32, x)
    }

    /// T'_N at the context's N.
    pub fn cheb_n_derivative(&self, x: Complex64) -> Complex64 {
        cheb_derivative(self.big_n as u32, x)
    }

    /// T_D at the PI degree.
    pub fn cheb_d(&self, x: Complex64) -> Complex64 {
        cheb(self.dim as u32, x)
    }
}

/// Chebyshev polynomial T_k normalized by T_k(t + t^{-1}) = t^k + t^{-k},
/// so T_0(x) = 2 and T_1(x) = x.
pub fn cheb(k: u32, x: Complex64) -> Complex64 {
    match k {
        0 => Complex64::new(2.0, 0.0),
        1 => x,
        _ => {
            let mut prev = Complex64::new(2.0, 0.0);
            let mut cur = x;
            for _ in 2..=k {
                let next = x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Derivative T'_k, by differentiating the three-term recurrence.
pub fn cheb_derivative(k: u32, x: Complex64) -> Complex64 {
    match k {
        0 => Complex64::new(0.0, 0.0),
        1 => Complex64::new(1.0, 0.0),
        _ => {
            let mut t_prev = Complex64::new(2.0, 0.0);
            let mut t_cur = x;
            let mut d_prev = Complex64::new(0.0, 0.0);
            let mut d_cur = Complex64::new(1.0, 0.0);
            for _ in 2..=k {
                let t_next = x * t_cur - t_prev;
                let d_next = t_cur + x * d_cur - d_prev;
                t_prev = t_cur;
                t_cur = t_next;
                d_prev = d_cur;
                d_cur = d_next;
            }
            d_cur
        }
    }
}

/// Both sides of the cyclotomic product identity
/// ∏_{i=1}^{D} (ω^i t − ω^{-i} t^{-1}) with ω a primitive D-th root of unity,
/// against t^D − t^{-D} for odd D and 2 − t^D − t^{-D} for even D.
pub fn cheb_product_check(d: u32, t: Complex64) -> Result<(Complex64, Complex64)> {
    if t.norm() < DENOM_TOL {
        return Err(SkeinError::BadInput("t = 0 in cheb_product_check".into()));
    }
    let mut lhs = Complex64::new(1.0, 0.0);
    let tinv = t.inv();
    for i in 1..=d {
        let w = Complex64::from_polar(1.0, TAU * (i as f64) / (d as f64));
        lhs *= w * t - w.conj() * tinv;
    }
    let td = t.powi(d as i32);
    let tdinv = td.inv();
    let rhs = if d % 2 == 1 {
        td - tdinv
    } else {
        Complex64::new(2.0, 0.0) - td - tdinv
    };
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn context_m6_torus() {
        let ctx = RootContext::new(1, 6, Surface::PuncturedTorus).unwrap();
        assert_eq!(ctx.n, 3);
        assert_eq!(ctx.big_n, 3);
        assert!((ctx.epsilon - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(ctx.dim, 3);
    }

    #[test]
    fn context_m5_sphere() {
        let ctx = RootContext::new(1, 5, Surface::FourHoledSphere).unwrap();
        assert_eq!(ctx.n, 5);
        assert_eq!(ctx.big_n, 5);
        assert!((ctx.epsilon - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(ctx.dim, 5);
    }

    #[test]
    fn fourth_root_rejected_for_torus() {
        assert!(matches!(
            RootContext::new(1, 2, Surface::PuncturedTorus),
            Err(SkeinError::DisallowedRoot(_))
        ));
        assert!(matches!(
            RootContext::new(1, 4, Surface::PuncturedTorus),
            Err(SkeinError::DisallowedRoot(_))
        ));
        assert!(matches!(
            RootContext::new(1, 8, Surface::FourHoledSphere),
            Err(SkeinError::DisallowedRoot(_))
        ));
        // m = 8 is fine for the torus (q^4 = -1).
        assert!(RootContext::new(1, 8, Surface::PuncturedTorus).is_ok());
    }

    #[test]
    fn unreduced_fraction_rejected() {
        assert!(matches!(
            RootContext::new(2, 6, Surface::PuncturedTorus),
            Err(SkeinError::BadInput(_))
        ));
    }

    #[test]
    fn zeta_identity_many_roots() {
        // (-q^2)^N = -ε^2 for every admissible context.
        for m in [3, 5, 6, 7, 8, 10, 12, 14, 16, 20] {
            for a in 1..m {
                if gcd(a, m) != 1 {
                    continue;
                }
                let Ok(ctx) = RootContext::new(a, m, Surface::PuncturedTorus) else {
                    continue;
                };
                let lhs = (-ctx.q(2)).powi(ctx.big_n as i32);
                let rhs = -ctx.eps_sq_c();
                assert!(
                    (lhs - rhs).norm() < 1e-12,
                    "zeta identity fails at a={a} m={m}: {lhs} vs {rhs}"
                );
                // ε agrees with its exact label
                assert!((ctx.q(ctx.big_n * ctx.big_n) - ctx.epsilon).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cheb_small_values() {
        assert!((cheb(0, c(5.0, 0.0)) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((cheb(3, c(2.0, 0.0)) - c(2.0, 0.0)).norm() < 1e-12);
        // T_5(2 + 1/2) = 2^5 + 2^{-5}
        assert!((cheb(5, c(2.5, 0.0)) - c(32.03125, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn cheb_defining_identity_on_annulus() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let r = 0.5 + 1.5 * next();
            let th = TAU * next();
            let t = Complex64::from_polar(r, th);
            let x = t + t.inv();
            for k in [0u32, 1, 2, 3, 7, 20, 50] {
                let want = t.powi(k as i32) + t.powi(-(k as i32));
                let got = cheb(k, x);
                assert!(
                    (got - want).norm() < 1e-10 * want.norm().max(1.0),
                    "T_{k} identity fails at t={t}"
                );
            }
        }
    }

    #[test]
    fn cheb_derivative_matches_finite_differences() {
        let h = 1e-6;
        for k in [1u32, 2, 3, 5, 11] {
            for x0 in [c(0.0, 0.0), c(0.7, 0.3), c(-2.5, 0.1), c(3.0, 0.0)] {
                let fd = (cheb(k, x0 + c(h, 0.0)) - cheb(k, x0 - c(h, 0.0))) / c(2.0 * h, 0.0);
                let an = cheb_derivative(k, x0);
                assert!(
                    (fd - an).norm() <= 1e-5 * an.norm().max(1.0),
                    "T'_{k} at {x0}: fd={fd} analytic={an}"
                );
            }
        }
    }

    #[test]
    fn cheb_derivative_examples() {
        // T_1 = x
        assert!((cheb_derivative(1, c(42.0, 1.0)) - c(1.0, 0.0)).norm() < 1e-15);
        // T_3 = x^3 - 3x, so T'_3(0) = -3
        assert!((cheb_derivative(3, c(0.0, 0.0)) - c(-3.0, 0.0)).norm() < 1e-13);
        // T'_N(2) = N^2 (the t -> 1 limit of N(t^N - t^-N)/(t - t^-1))
        for n in [2u32, 3, 5, 8] {
            let want = (n * n) as f64;
            assert!((cheb_derivative(n, c(2.0, 0.0)) - c(want, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn product_identity_small_cases() {
        // D = 1, t = 3: single factor with ω = 1
        let (lhs, rhs) = cheb_product_check(1, c(3.0, 0.0)).unwrap();
        assert!((lhs - c(3.0 - 1.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((lhs - rhs).norm() < 1e-14);
        // D = 2, t = 2: 2 - 4 - 1/4
        let (lhs, rhs) = cheb_product_check(2, c(2.0, 0.0)).unwrap();
        assert!((lhs - c(2.0 - 4.0 - 0.25, 0.0)).norm() < 1e-13);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn product_identity_complex_argument() {
        let (lhs, rhs) = cheb_product_check(5, c(1.3, 0.2)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn product_identity_all_degrees() {
        let mut state = 0xc0ffee123456789u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for d in 1..=12u32 {
            for _ in 0..20 {
                let t = Complex64::from_polar(0.5 + 1.5 * next(), TAU * next());
                let (lhs, rhs) = cheb_product_check(d, t).unwrap();
                assert!(
                    (lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0),
                    "product identity fails for D={d}, t={t}"
                );
            }
        }
    }
}
