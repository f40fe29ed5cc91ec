//! Closed-form representations at exceptional central characters of the
//! one-punctured torus.
//!
//! For odd n the dimension-N construction lives on a basis indexed by
//! −N̄..N̄ with N̄ = (N−1)/2 and clamped indices at the ends. For even n
//! there are three families: a type-0 representation at z0 = −2, a type-0
//! representation at σ = q^{-1} with palindromic fiber data, and a
//! 2N-dimensional construction on indices −N..N−1.

use num_complex::Complex64;

use crate::error::{Result, SkeinError};
use crate::linalg::CMatrix;
use crate::scalars::RootContext;

use super::{
    build_type0, fiber_solve, PtProvenance, PtRepresentation, PtTypeZeroParams,
};

/// α1 recovered from the slope-(0,∞) commutator:
/// α1 = (q α0 α∞ − q^{-1} α∞ α0)/(q^2 − q^{-2}).
pub(crate) fn alpha1_from(ctx: &RootContext, m0: &CMatrix, minf: &CMatrix) -> CMatrix {
    let q = ctx.q(1);
    let qi = ctx.q(-1);
    let denom = ctx.q(2) - ctx.q(-2);
    m0.mul(minf)
        .scale(q)
        .sub(&minf.mul(m0).scale(qi))
        .scale(denom.inv())
}

/// Exceptional representation for odd n with classical shadow
/// (2, 2ε^k, 2ε^{k-1}, −q^{2k} − q^{-2k}).
pub fn build_exceptional_odd(ctx: &RootContext, k: i64) -> Result<PtRepresentation> {
    if !ctx.n_odd() {
        return Err(SkeinError::BadCase("odd-n builder on an even-n root".into()));
    }
    let n = ctx.big_n; // = n = D here
    let nbar = (n - 1) / 2;
    let d = ctx.dim;
    let idx = |i: i64| -> usize { (i + nbar) as usize };
    let q = |j: i64| ctx.q(j);
    let two = Complex64::new(2.0, 0.0);

    let s = |i: i64| -> Complex64 {
        debug_assert!(i % n != 0);
        (q(2 * i - k + 1) - q(-2 * i + k - 1)) / (q(2 * i) - q(-2 * i))
    };
    let sprime = |i: i64| -> Complex64 {
        (q(2 * i + 2) - q(-2 * i - 2)) / (q(2 * i) - q(-2 * i)) * s(i)
    };
    let beta = |i: i64| -> Complex64 {
        let denom = q(2 * i) - q(-2 * i);
        two * (q(k - 1) - q(-k + 1)) / (denom * denom * denom)
    };

    let mut m0 = CMatrix::zero(d);
    let mut minf = CMatrix::zero(d);
    for i in -nbar..=nbar {
        let lam = q(2 * i) + q(-2 * i);
        m0[(idx(i), idx(i))] = lam;
        if i > 0 {
            m0[(idx(-i), idx(i))] = Complex64::new(1.0, 0.0);
        }
    }
    let clamp = |i: i64| -> i64 { i.clamp(-nbar, nbar) };
    for i in -nbar..=nbar {
        let col = idx(i);
        if i < 0 {
            minf[(idx(i + 1), col)] += s(i);
            minf[(idx(clamp(i - 1)), col)] += s(-i);
        } else if i == 0 {
            minf[(idx(-1), col)] += q(k - 1) + q(-k + 1);
            minf[(idx(1), col)] += (q(2) - q(-2)) * (q(-k + 1) - q(k - 1));
        } else {
            minf[(idx(clamp(-i - 1)), col)] += beta(i);
            minf[(idx(-i + 1), col)] += -beta(i);
            minf[(idx(i - 1), col)] += sprime(-i);
            minf[(idx(clamp(i + 1)), col)] += sprime(i);
        }
    }
    let m1 = alpha1_from(ctx, &m0, &minf);
    let w = -q(2 * k) - q(-2 * k);
    let rep = PtRepresentation {
        ctx: ctx.clone(),
        m0,
        m1,
        minf,
        w,
        provenance: PtProvenance::ExceptionalOdd { k },
    };
    let res = rep.relation_residual();
    if res > 1e-6 {
        return Err(SkeinError::BadCase(format!(
            "odd exceptional build at k={k} has residual {res:.3e}"
        )));
    }
    Ok(rep)
}

/// Shadow of the odd builder without constructing matrices.
pub fn exceptional_odd_shadow(ctx: &RootContext, k: i64) -> super::PtCharacter {
    let eps = ctx.epsilon.re; // ±1 for odd n
    let epk = if k.rem_euclid(2) == 0 { 1.0 } else { eps };
    let epk1 = if (k - 1).rem_euclid(2) == 0 { 1.0 } else { eps };
    super::PtCharacter::new(
        Complex64::new(2.0, 0.0),
        Complex64::new(2.0 * epk, 0.0),
        Complex64::new(2.0 * epk1, 0.0),
        -ctx.q(2 * k) - ctx.q(-2 * k),
    )
}

/// Exceptional family for even n at (−2,−2,−2): the type-0 representation
/// at z0 = −2 with (Π_s, Π_t) = (0, 0) and w = ε²(q^{4k} + q^{-4k}).
pub fn build_even_all_minus2(ctx: &RootContext, k: i64) -> Result<PtRepresentation> {
    if ctx.n_odd() {
        return Err(SkeinError::BadCase("even-n builder on an odd-n root".into()));
    }
    let d = ctx.dim;
    let sigma = Complex64::from_polar(1.0, std::f64::consts::PI / d as f64);
    let w = ctx.eps_sq_c() * (ctx.q(4 * k) + ctx.q(-4 * k));
    let params = fiber_solve(ctx, sigma, w, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))?;
    let mut rep = build_type0(ctx, params.clone())?;
    rep.provenance = PtProvenance::ExceptionalEvenM2 { k, params };
    Ok(rep)
}

/// Exceptional family for even n at (−2,−2,2): the type-0 representation at
/// σ = q^{-1} with s_i = (q^{2i-2k-1} − q^{-2i+2k+1})/(q^{2i-1} − q^{-2i+1})
/// and t_i = s_{-i}; w = −q^{4k+2} − q^{-4k-2}.
pub fn build_even_mix(ctx: &RootContext, k: i64) -> Result<PtRepresentation> {
    if ctx.n_odd() {
        return Err(SkeinError::BadCase("even-n builder on an odd-n root".into()));
    }
    let d = ctx.dim;
    let sigma = ctx.q(-1);
    let w = -ctx.q(4 * k + 2) - ctx.q(-4 * k - 2);
    let s_at = |i: i64| -> Complex64 {
        (ctx.q(2 * i - 2 * k - 1) - ctx.q(-2 * i + 2 * k + 1)) / (ctx.q(2 * i - 1) - ctx.q(-2 * i + 1))
    };
    let mut s = Vec::with_capacity(d);
    let mut t = Vec::with_capacity(d);
    let mut r = Vec::with_capacity(d);
    for i in 0..d as i64 {
        s.push(s_at(i));
        t.push(s_at(-i));
        r.push(super::r_coeff(ctx, sigma, w, i)?);
    }
    for i in 0..d {
        let gap = (s[i] * t[i] - r[i]).norm();
        if gap > 1e-8 * r[i].norm().max(1.0) {
            return Err(SkeinError::BadCase(format!(
                "palindromic fiber data violates s_i t_i = r_i at {i} (gap {gap:.3e})"
            )));
        }
    }
    let params = PtTypeZeroParams { sigma, w, s, t, r };
    let mut rep = build_type0(ctx, params.clone())?;
    rep.provenance = PtProvenance::ExceptionalEvenMix { k, params };
    Ok(rep)
}

/// Witness subspaces V± for the mix family: u±_i = v_i ± v_{−i+1}.
pub fn even_mix_witness(ctx: &RootContext, plus: bool) -> Vec<Vec<Complex64>> {
    let d = ctx.dim;
    let n = ctx.big_n;
    let sign = if plus { 1.0 } else { -1.0 };
    let mut basis = Vec::new();
    for i in 1..=n {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        let a = (i as usize) % d;
        let b = ((-(i as i64) + 1).rem_euclid(d as i64)) as usize;
        v[a] += Complex64::new(1.0, 0.0);
        v[b] += Complex64::new(sign, 0.0);
        if v.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        basis.push(v);
    }
    basis
}

/// Exceptional family for even n at (2,2,2): the 2N-dimensional
/// construction with w = −q^{4k+2} − q^{-4k-2}.
pub fn build_even_all2(ctx: &RootContext, k: i64) -> Result<PtRepresentation> {
    if ctx.n_odd() {
        return Err(SkeinError::BadCase("even-n builder on an odd-n root".into()));
    }
    let n = ctx.big_n;
    let d = ctx.dim; // 2N
    debug_assert_eq!(d as i64, 2 * n);
    let idx = |i: i64| -> usize { (i + n) as usize };
    let q = |j: i64| ctx.q(j);

    let s = |i: i64| -> Complex64 {
        debug_assert!(i.rem_euclid(n) != 0);
        (q(2 * i - 2 * k) - q(-2 * i + 2 * k)) / (q(2 * i) - q(-2 * i))
    };
    let sprime = |i: i64| -> Complex64 {
        (q(2 * i + 2) - q(-2 * i - 2)) / (q(2 * i) - q(-2 * i)) * s(i)
    };
    let beta = |i: i64| -> Complex64 {
        let denom = q(2 * i) - q(-2 * i);
        (q(2 * k) - q(-2 * k)) / (denom * denom * denom)
    };

    let mut m0 = CMatrix::zero(d);
    let mut minf = CMatrix::zero(d);
    for i in -n..n {
        m0[(idx(i), idx(i))] = q(2 * i) + q(-2 * i);
        if i > 0 {
            m0[(idx(-i), idx(i))] = Complex64::new(1.0, 0.0);
        }
    }
    for i in -n..n {
        let col = idx(i);
        if i == -n {
            minf[(idx(-n + 1), col)] += q(2 * k) + q(-2 * k);
            minf[(idx(n - 1), col)] += (q(2) - q(-2)) * (q(2 * k) - q(-2 * k));
        } else if i < 0 {
            minf[(idx(i + 1), col)] += s(i);
            minf[(idx(i - 1), col)] += s(-i);
        } else if i == 0 {
            minf[(idx(-1), col)] += q(2 * k) + q(-2 * k);
            minf[(idx(1), col)] += -(q(2) - q(-2)) * (q(2 * k) - q(-2 * k));
        } else {
            minf[(idx(-i - 1), col)] += beta(i);
            minf[(idx(-i + 1), col)] += -beta(i);
            minf[(idx(i - 1), col)] += sprime(-i);
            if i + 1 < n {
                minf[(idx(i + 1), col)] += sprime(i);
            }
            // at i = N−1 the coefficient s'_{N-1} vanishes identically
        }
    }
    let m1 = alpha1_from(ctx, &m0, &minf);
    let w = -q(4 * k + 2) - q(-4 * k - 2);
    let rep = PtRepresentation {
        ctx: ctx.clone(),
        m0,
        m1,
        minf,
        w,
        provenance: PtProvenance::ExceptionalEven222 { k },
    };
    let res = rep.relation_residual();
    if res > 1e-6 {
        return Err(SkeinError::BadCase(format!(
            "even (2,2,2) build at k={k} has residual {res:.3e}"
        )));
    }
    Ok(rep)
}
