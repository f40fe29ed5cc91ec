//! The one-punctured torus: center relations, type-0 and exceptional
//! representation builders, reducibility, and the singular/exceptional
//! classification of central characters.
//!
//! The skein algebra is presented by three curves (slopes 0, 1, ∞) with
//! q-commutator relations and one boundary polynomial; the center at a
//! root of unity is generated by Chebyshev images A_m of the curves and
//! the peripheral p, subject to one relation that depends on the parity
//! of n = order(q^2).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeinError};
use crate::linalg::CMatrix;
use crate::scalars::{RootContext, DENOM_TOL};

pub mod dispatch;
pub mod exceptional;
pub mod limit;

pub use dispatch::{is_reducible, represent, ReducibilityReport};

/// Tolerance used when matching a character against the finite singular and
/// exceptional patterns.
pub const CLASSIFY_TOL: f64 = 1e-7;

/// A point of MaxSpec Z: values of (A_0, A_1, A_inf) and the peripheral p.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PtCharacter {
    pub z0: Complex64,
    pub z1: Complex64,
    pub zinf: Complex64,
    pub w: Complex64,
}

impl PtCharacter {
    pub fn new(z0: Complex64, z1: Complex64, zinf: Complex64, w: Complex64) -> Self {
        PtCharacter { z0, z1, zinf, w }
    }

    pub fn max_diff(&self, other: &PtCharacter) -> f64 {
        [
            (self.z0 - other.z0).norm(),
            (self.z1 - other.z1).norm(),
            (self.zinf - other.zinf).norm(),
            (self.w - other.w).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Fiber data of a type-0 representation: s_i t_i = r_i(σ, w).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PtTypeZeroParams {
    pub sigma: Complex64,
    pub w: Complex64,
    pub s: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub r: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub enum PtProvenance {
    TypeZero(PtTypeZeroParams),
    ExceptionalOdd { k: i64 },
    ExceptionalEvenM2 { k: i64, params: PtTypeZeroParams },
    ExceptionalEvenMix { k: i64, params: PtTypeZeroParams },
    ExceptionalEven222 { k: i64 },
}

impl PtProvenance {
    pub fn label(&self) -> String {
        match self {
            PtProvenance::TypeZero(_) => "type0".into(),
            PtProvenance::ExceptionalOdd { k } => format!("exceptional-odd(k={k})"),
            PtProvenance::ExceptionalEvenM2 { k, .. } => format!("exceptional-even-m2(k={k})"),
            PtProvenance::ExceptionalEvenMix { k, .. } => format!("exceptional-even-mix(k={k})"),
            PtProvenance::ExceptionalEven222 { k } => format!("exceptional-even-222(k={k})"),
        }
    }
}

/// A D-dimensional representation given by the images of the three curves.
#[derive(Clone, Debug)]
pub struct PtRepresentation {
    pub ctx: RootContext,
    pub m0: CMatrix,
    pub m1: CMatrix,
    pub minf: CMatrix,
    pub w: Complex64,
    pub provenance: PtProvenance,
}

impl PtRepresentation {
    /// Max residual over the three q-commutator relations and the boundary
    /// polynomial acting as w.
    pub fn relation_residual(&self) -> f64 {
        relation_residuals(&self.ctx, &self.m0, &self.m1, &self.minf, self.w)
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Residuals of the three defining relations and the boundary relation.
pub fn relation_residuals(
    ctx: &RootContext,
    m0: &CMatrix,
    m1: &CMatrix,
    minf: &CMatrix,
    w: Complex64,
) -> [f64; 4] {
    let q = ctx.q(1);
    let qi = ctx.q(-1);
    let coef = ctx.q(2) - ctx.q(-2);
    let rel = |a: &CMatrix, b: &CMatrix, c: &CMatrix| -> f64 {
        a.mul(b)
            .scale(q)
            .sub(&b.mul(a).scale(qi))
            .sub(&c.scale(coef))
            .max_abs()
    };
    let r1 = rel(m0, minf, m1);
    let rinf = rel(m1, m0, minf);
    let r0 = rel(minf, m1, m0);
    let boundary = boundary_matrix(ctx, m0, m1, minf)
        .sub(&CMatrix::scalar(m0.dim, w))
        .max_abs();
    [r1, rinf, r0, boundary]
}

/// Image of the peripheral curve:
/// p = q α0 α∞ α1 − q^2 α0^2 − q^2 α1^2 − q^{-2} α∞^2 + q^2 + q^{-2}.
pub fn boundary_matrix(
    ctx: &RootContext,
    m0: &CMatrix,
    m1: &CMatrix,
    minf: &CMatrix,
) -> CMatrix {
    let q = ctx.q(1);
    let q2 = ctx.q(2);
    let q2i = ctx.q(-2);
    m0.mul(minf)
        .mul(m1)
        .scale(q)
        .sub(&m0.mul(m0).scale(q2))
        .sub(&m1.mul(m1).scale(q2))
        .sub(&minf.mul(minf).scale(q2i))
        .add(&CMatrix::scalar(m0.dim, q2 + q2i))
}

/// Absolute value of the defining relation of the center evaluated at the
/// point; the relation is cubic for odd n and quartic for even n.
pub fn central_relation_residual(ctx: &RootContext, ch: &PtCharacter) -> f64 {
    let t = ctx.cheb_n(ch.w);
    if ctx.n_odd() {
        let eps = ctx.epsilon;
        (ch.z0 * ch.z0 + ch.z1 * ch.z1 + ch.zinf * ch.zinf - eps * ch.z0 * ch.zinf * ch.z1 + t
            - Complex64::new(2.0, 0.0))
        .norm()
    } else {
        let two = Complex64::new(2.0, 0.0);
        let lhs = (ch.z0 + two) * (ch.z1 + two) * (ch.zinf + two);
        let s = ch.z0 + ch.z1 + ch.zinf + ctx.eps_sq_c() * t + Complex64::new(4.0, 0.0);
        (lhs - s * s).norm()
    }
}

pub fn lambda(ctx: &RootContext, sigma: Complex64, i: i64) -> Complex64 {
    ctx.q(2 * i) * sigma + ctx.q(-2 * i) * sigma.inv()
}

pub fn lambda_hat(ctx: &RootContext, sigma: Complex64, i: i64) -> Complex64 {
    ctx.q(2 * i) * sigma - ctx.q(-2 * i) * sigma.inv()
}

/// Numerator of r_i, kept separate so zero detection can use its own scale.
fn r_numerator(ctx: &RootContext, sigma: Complex64, w: Complex64, i: i64) -> (Complex64, f64) {
    let s2 = sigma * sigma;
    let a = ctx.q(4 * i + 2) * s2;
    let b = ctx.q(-4 * i - 2) * s2.inv();
    (w + a + b, w.norm() + a.norm() + b.norm())
}

/// r_i(σ, w) = (w + q^{4i+2} σ^2 + q^{-4i-2} σ^{-2}) / (λ̂_i λ̂_{i+1}).
pub fn r_coeff(ctx: &RootContext, sigma: Complex64, w: Complex64, i: i64) -> Result<Complex64> {
    let lh_i = lambda_hat(ctx, sigma, i);
    let lh_i1 = lambda_hat(ctx, sigma, i + 1);
    if lh_i.norm() < DENOM_TOL || lh_i1.norm() < DENOM_TOL {
        return Err(SkeinError::SingularDenominator(format!(
            "lambda-hat at index {i} for sigma = {sigma}"
        )));
    }
    let (num, _) = r_numerator(ctx, sigma, w, i);
    Ok(num / (lh_i * lh_i1))
}

/// R(z_0, w): product of the r_i over one period, in closed form.
pub fn big_r(ctx: &RootContext, z0: Complex64, w: Complex64) -> Result<Complex64> {
    let t = ctx.cheb_n(w);
    let two = Complex64::new(2.0, 0.0);
    if ctx.n_odd() {
        let denom = z0 * z0 - Complex64::new(4.0, 0.0);
        if denom.norm() < DENOM_TOL {
            return Err(SkeinError::SingularDenominator("R at z0 = ±2".into()));
        }
        Ok((t + z0 * z0 - two) / denom)
    } else {
        let denom = z0 - two;
        if denom.norm() < DENOM_TOL {
            return Err(SkeinError::SingularDenominator("R at z0 = 2".into()));
        }
        let u = (t + ctx.eps_sq_c() * z0) / denom;
        Ok(u * u)
    }
}

/// f(z_0, w) = (2 ε^2 T_N(w) + 4)/(z_0 − 2); only defined when n is even.
pub fn f_shift(ctx: &RootContext, z0: Complex64, w: Complex64) -> Result<Complex64> {
    if ctx.n_odd() {
        return Err(SkeinError::BadCase("f is only defined for even n".into()));
    }
    let denom = z0 - Complex64::new(2.0, 0.0);
    if denom.norm() < DENOM_TOL {
        return Err(SkeinError::SingularDenominator("f at z0 = 2".into()));
    }
    Ok((Complex64::new(2.0, 0.0) * ctx.eps_sq_c() * ctx.cheb_n(w) + Complex64::new(4.0, 0.0))
        / denom)
}

/// Whether z_0 = σ^D + σ^{-D} admits a type-0 representation:
/// z_0 ≠ ±2, or z_0 = −2 with n even.
pub fn is_general(ctx: &RootContext, z0: Complex64) -> bool {
    let two = Complex64::new(2.0, 0.0);
    if (z0 - two).norm() < CLASSIFY_TOL {
        return false;
    }
    if (z0 + two).norm() < CLASSIFY_TOL {
        return !ctx.n_odd();
    }
    true
}

/// Solve the fiber: find (s⃗, t⃗) with s_i t_i = r_i, ∏ s_i = x, ∏ t_i = y.
/// Requires x·y = ∏ r_i within tolerance.
pub fn fiber_solve(
    ctx: &RootContext,
    sigma: Complex64,
    w: Complex64,
    x: Complex64,
    y: Complex64,
) -> Result<PtTypeZeroParams> {
    let d = ctx.dim;
    let mut r = Vec::with_capacity(d);
    let mut r_is_zero = Vec::with_capacity(d);
    for i in 0..d {
        let (num, scale) = r_numerator(ctx, sigma, w, i as i64);
        r_is_zero.push(num.norm() <= 1e-9 * scale.max(1.0));
        r.push(r_coeff(ctx, sigma, w, i as i64)?);
    }
    let r_prod: Complex64 = r.iter().product();
    let gap = (x * y - r_prod).norm();
    if gap > 1e-7 * r_prod.norm().max(1.0) {
        return Err(SkeinError::NotOnCurve(gap));
    }

    let zero_idx: Vec<usize> = (0..d).filter(|&i| r_is_zero[i]).collect();
    let treat_x_as_zero = x.norm() <= 1e-10 * (1.0 + y.norm()) && !zero_idx.is_empty();
    if x.norm() == 0.0 && zero_idx.is_empty() {
        return Err(SkeinError::Infeasible);
    }

    let one = Complex64::new(1.0, 0.0);
    let mut s = vec![one; d];
    let mut t = vec![one; d];
    if !treat_x_as_zero {
        s[0] = x;
        for i in 0..d {
            t[i] = r[i] / s[i];
        }
    } else {
        // Zero out s at the vanishing r's; the t's there are free, so put
        // the whole product y on the first one.
        let mut fixed_prod = one;
        for i in 0..d {
            if r_is_zero[i] {
                s[i] = Complex64::new(0.0, 0.0);
            } else {
                s[i] = one;
                t[i] = r[i];
                fixed_prod *= t[i];
            }
        }
        t[zero_idx[0]] = y / fixed_prod;
        for &i in zero_idx.iter().skip(1) {
            t[i] = one;
        }
    }
    Ok(PtTypeZeroParams { sigma, w, s, t, r })
}

/// Build the type-0 representation over the cyclic basis indexed by Z/D.
pub fn build_type0(ctx: &RootContext, params: PtTypeZeroParams) -> Result<PtRepresentation> {
    let d = ctx.dim;
    if params.s.len() != d || params.t.len() != d {
        return Err(SkeinError::BadInput("fiber vectors of wrong length".into()));
    }
    let sigma = params.sigma;
    let sinv = sigma.inv();
    let mut m0 = CMatrix::zero(d);
    let mut m1 = CMatrix::zero(d);
    let mut minf = CMatrix::zero(d);
    for i in 0..d {
        let ii = i as i64;
        m0[(i, i)] = lambda(ctx, sigma, ii);
        let up = (i + 1) % d;
        let down = (i + d - 1) % d;
        minf[(up, i)] = params.s[i];
        minf[(down, i)] = params.t[down];
        m1[(up, i)] = ctx.q(2 * ii + 1) * sigma * params.s[i];
        m1[(down, i)] = ctx.q(-2 * ii + 1) * sinv * params.t[down];
    }
    let rep = PtRepresentation {
        ctx: ctx.clone(),
        m0,
        m1,
        minf,
        w: params.w,
        provenance: PtProvenance::TypeZero(params),
    };
    let res = rep.relation_residual();
    if res > 1e-6 {
        return Err(SkeinError::BadCase(format!(
            "type-0 build has relation residual {res:.3e}"
        )));
    }
    Ok(rep)
}

/// Compute the classical shadow by applying T_D to each curve image and
/// reading the boundary scalar; errors if any central image is not scalar.
pub fn classical_shadow(rep: &PtRepresentation) -> Result<PtCharacter> {
    let ctx = &rep.ctx;
    let d = ctx.dim as u32;
    let mut vals = Vec::with_capacity(4);
    let mut worst: f64 = 0.0;
    for m in [&rep.m0, &rep.m1, &rep.minf] {
        let (mean, dev) = m.cheb(d).scalar_deviation();
        worst = worst.max(dev);
        vals.push(mean);
    }
    let (wmean, wdev) = boundary_matrix(ctx, &rep.m0, &rep.m1, &rep.minf).scalar_deviation();
    worst = worst.max(wdev);
    if worst > 1e-6 {
        return Err(SkeinError::NotScalar(worst));
    }
    Ok(PtCharacter::new(vals[0], vals[1], vals[2], wmean))
}

/// Largest deviation of the central images from scalars (for reporting).
pub fn shadow_scalar_deviation(rep: &PtRepresentation) -> f64 {
    let d = rep.ctx.dim as u32;
    let mut worst: f64 = 0.0;
    for m in [&rep.m0, &rep.m1, &rep.minf] {
        worst = worst.max(m.cheb(d).scalar_deviation().1);
    }
    worst.max(
        boundary_matrix(&rep.ctx, &rep.m0, &rep.m1, &rep.minf)
            .scalar_deviation()
            .1,
    )
}

/// Closed-form shadow of a type-0 representation, for cross-checking the
/// matrix computation.
pub fn type0_shadow_formula(ctx: &RootContext, params: &PtTypeZeroParams) -> Result<PtCharacter> {
    let sigma = params.sigma;
    let d = ctx.dim as i32;
    let sd = sigma.powi(d);
    let z0 = sd + sd.inv();
    let ps: Complex64 = params.s.iter().product();
    let pt: Complex64 = params.t.iter().product();
    let (z1, zinf) = if ctx.n_odd() {
        let eps = ctx.epsilon;
        (eps * sd * ps + eps * sd.inv() * pt, ps + pt)
    } else {
        let f = f_shift(ctx, z0, params.w)?;
        (sd * ps + sd.inv() * pt + f, ps + pt + f)
    };
    Ok(PtCharacter::new(z0, z1, zinf, params.w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeMove {
    SwapZeroInf,
    TwistOnce,
    TwistInverse,
}

/// A_{-1} from the product-to-sum identity at the central level.
pub fn a_minus_one(ctx: &RootContext, ch: &PtCharacter) -> Complex64 {
    if ctx.n_odd() {
        ctx.epsilon.inv() * ch.z0 * ch.zinf - ch.z1
    } else {
        ch.z0 * ch.zinf
            - ch.z1
            - Complex64::new(2.0, 0.0) * ctx.eps_sq_c() * ctx.cheb_n(ch.w)
            - Complex64::new(4.0, 0.0)
    }
}

/// Mapping-class action on central coordinates. The twist replaces the
/// slope-∞ value with A_{-1}; its inverse undoes that. The output satisfies
/// the central relation whenever the input does.
pub fn slope_move(ctx: &RootContext, ch: &PtCharacter, mv: SlopeMove) -> PtCharacter {
    match mv {
        SlopeMove::SwapZeroInf => PtCharacter::new(ch.zinf, ch.z1, ch.z0, ch.w),
        SlopeMove::TwistOnce => {
            let am1 = a_minus_one(ctx, ch);
            PtCharacter::new(ch.z0, ch.zinf, am1, ch.w)
        }
        SlopeMove::TwistInverse => {
            // product identity applied to the pair (z0, z1) instead
            let p = if ctx.n_odd() {
                ctx.epsilon.inv() * ch.z0 * ch.z1
            } else {
                ch.z0 * ch.z1
                    - Complex64::new(2.0, 0.0) * ctx.eps_sq_c() * ctx.cheb_n(ch.w)
                    - Complex64::new(4.0, 0.0)
            };
            PtCharacter::new(ch.z0, p - ch.zinf, ch.z1, ch.w)
        }
    }
}

fn near(a: Complex64, b: f64) -> bool {
    (a - Complex64::new(b, 0.0)).norm() < CLASSIFY_TOL
}

fn is_pm2(z: Complex64) -> bool {
    near(z, 2.0) || near(z, -2.0)
}

/// Exceptional characters have A_m = ±2 at every slope. On the finite list
/// of candidate sign patterns this reduces to explicit conditions; points
/// with any |z_m| ≠ 2 are never exceptional.
pub fn is_exceptional(ctx: &RootContext, ch: &PtCharacter) -> bool {
    if !(is_pm2(ch.z0) && is_pm2(ch.z1) && is_pm2(ch.zinf)) {
        return false;
    }
    if ctx.n_odd() {
        let prod = ch.z0 * ch.z1 * ch.zinf;
        (prod - Complex64::new(8.0, 0.0) * ctx.epsilon).norm() < CLASSIFY_TOL
    } else {
        let minus_count = [ch.z0, ch.z1, ch.zinf]
            .iter()
            .filter(|z| near(**z, -2.0))
            .count();
        if minus_count >= 2 {
            return true;
        }
        let all_plus = [ch.z0, ch.z1, ch.zinf].iter().all(|z| near(*z, 2.0));
        all_plus
            && (ctx.cheb_n(ch.w) + Complex64::new(2.0, 0.0) * ctx.eps_sq_c()).norm() < CLASSIFY_TOL
    }
}

/// Validation-only: scan the slope orbit of the character to the given
/// depth and report whether every reachable coordinate is ±2.
pub fn is_exceptional_by_orbit(ctx: &RootContext, ch: &PtCharacter, depth: usize) -> bool {
    let mut frontier = vec![*ch];
    let mut seen: Vec<PtCharacter> = vec![*ch];
    for _ in 0..depth {
        let mut next = Vec::new();
        for c in &frontier {
            if !(is_pm2(c.z0) && is_pm2(c.z1) && is_pm2(c.zinf)) {
                return false;
            }
            for mv in [SlopeMove::SwapZeroInf, SlopeMove::TwistOnce, SlopeMove::TwistInverse] {
                let c2 = slope_move(ctx, c, mv);
                if !seen.iter().any(|s| s.max_diff(&c2) < 1e-9) {
                    seen.push(c2);
                    next.push(c2);
                }
            }
        }
        frontier = next;
    }
    seen.iter()
        .all(|c| is_pm2(c.z0) && is_pm2(c.z1) && is_pm2(c.zinf))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularFlags {
    pub slice_singular: bool,
    pub variety_singular: bool,
}

/// Classify the character against the finite lists of slice-singular and
/// variety-singular patterns.
pub fn classify_singular(ctx: &RootContext, ch: &PtCharacter) -> Result<SingularFlags> {
    let res = central_relation_residual(ctx, ch);
    if res > 1e-6 {
        return Err(SkeinError::NotACharacter(res));
    }
    let tnp = ctx.cheb_n_derivative(ch.w);
    let tnp_zero = tnp.norm() < CLASSIFY_TOL;
    if ctx.n_odd() {
        let all_zero = ch.z0.norm() < CLASSIFY_TOL
            && ch.z1.norm() < CLASSIFY_TOL
            && ch.zinf.norm() < CLASSIFY_TOL;
        let central = is_pm2(ch.z0)
            && is_pm2(ch.z1)
            && is_pm2(ch.zinf)
            && (ch.z0 * ch.z1 * ch.zinf - Complex64::new(8.0, 0.0) * ctx.epsilon).norm()
                < CLASSIFY_TOL;
        let slice = all_zero || central;
        Ok(SingularFlags {
            slice_singular: slice,
            variety_singular: slice && tnp_zero,
        })
    } else {
        let t = ctx.cheb_n(ch.w);
        let zs = [ch.z0, ch.z1, ch.zinf];
        let minus_count = zs.iter().filter(|z| near(**z, -2.0)).count();
        // two coordinates at -2 force the third to -ε² T_N(w)
        let case1 = minus_count >= 2
            && zs
                .iter()
                .any(|z| (*z + ctx.eps_sq_c() * t).norm() < CLASSIFY_TOL);
        let case2 = zs.iter().all(|z| near(*z, 2.0))
            && (t + Complex64::new(2.0, 0.0) * ctx.eps_sq_c()).norm() < CLASSIFY_TOL;
        Ok(SingularFlags {
            slice_singular: case1 || case2,
            variety_singular: case1 || (case2 && tnp_zero),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Surface;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx_odd() -> RootContext {
        RootContext::new(1, 6, Surface::PuncturedTorus).unwrap()
    }

    fn ctx_even() -> RootContext {
        RootContext::new(1, 12, Surface::PuncturedTorus).unwrap()
    }

    /// Random character: draw z0, z1, w and solve the (quadratic) central
    /// relation for zinf.
    pub(crate) fn random_character(ctx: &RootContext, rng: &mut StdRng) -> PtCharacter {
        let mut draw = |r: f64| {
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let rad = r * rng.gen_range(0.0f64..1.0).sqrt();
            Complex64::from_polar(rad, th)
        };
        let z0 = draw(3.0);
        let z1 = draw(3.0);
        let w = draw(3.0);
        let t = ctx.cheb_n(w);
        let (b, c0) = if ctx.n_odd() {
            // zinf^2 - ε z0 z1 zinf + (z0^2 + z1^2 + T - 2) = 0
            (
                -ctx.epsilon * ch_prod(z0, z1),
                z0 * z0 + z1 * z1 + t - Complex64::new(2.0, 0.0),
            )
        } else {
            // zinf^2 + (2S0 - L) zinf + S0^2 - 2L = 0 with
            // L = (z0+2)(z1+2), S0 = z0 + z1 + ε^2 T + 4
            let two = Complex64::new(2.0, 0.0);
            let l = (z0 + two) * (z1 + two);
            let s0 = z0 + z1 + ctx.eps_sq_c() * t + Complex64::new(4.0, 0.0);
            (two * s0 - l, s0 * s0 - l * two)
        };
        let disc = (b * b - Complex64::new(4.0, 0.0) * c0).sqrt();
        let pick = rng.gen_bool(0.5);
        let zinf = if pick { (-b + disc) / 2.0 } else { (-b - disc) / 2.0 };
        PtCharacter::new(z0, z1, zinf, w)
    }

    fn ch_prod(a: Complex64, b: Complex64) -> Complex64 {
        a * b
    }

    #[test]
    fn central_relation_examples() {
        let ctx = ctx_odd();
        // (0,0,0,w) with T_N(w) = 2: w = 2 works for any N
        let ch = PtCharacter::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        assert!(central_relation_residual(&ctx, &ch) < 1e-12);
        // n odd, ε = 1 context: (2,2,2,w) with T_N(w) = -2
        let ctx5 = RootContext::new(1, 5, Surface::PuncturedTorus).unwrap();
        assert!((ctx5.epsilon - c(1.0, 0.0)).norm() < 1e-15);
        let w = -ctx5.q(2) - ctx5.q(-2); // T_N(w) = -2 since (-q^2)^N = -1
        let ch = PtCharacter::new(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), w);
        assert!(central_relation_residual(&ctx5, &ch) < 1e-12);
    }

    #[test]
    fn central_relation_even_factor_vanishes() {
        let ctx = ctx_even();
        // (-2, -2, ·, ·): left side is 0, so residual = (sum + ε²T + 4)²
        let ch = PtCharacter::new(c(-2.0, 0.0), c(-2.0, 0.0), c(1.0, 1.0), c(0.3, 0.1));
        let t = ctx.cheb_n(ch.w);
        let s = ch.z0 + ch.z1 + ch.zinf + ctx.eps_sq_c() * t + c(4.0, 0.0);
        let want = (s * s).norm();
        assert!((central_relation_residual(&ctx, &ch) - want).abs() < 1e-12);
    }

    #[test]
    fn r_coeff_vanishing_numerator() {
        let ctx = ctx_odd();
        let sigma = c(1.3, 0.4);
        let i = 1i64;
        let w = -ctx.q(4 * i + 2) * sigma * sigma - ctx.q(-4 * i - 2) * (sigma * sigma).inv();
        let r = r_coeff(&ctx, sigma, w, i).unwrap();
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn r_product_equals_big_r() {
        let mut rng = StdRng::seed_from_u64(7);
        for ctx in [ctx_odd(), ctx_even(), RootContext::new(2, 7, Surface::PuncturedTorus).unwrap()]
        {
            for _ in 0..50 {
                let sigma = Complex64::from_polar(
                    rng.gen_range(0.6..1.7),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let d = ctx.dim as i32;
                let z0 = sigma.powi(d) + sigma.powi(-d);
                if !is_general(&ctx, z0) || (z0 * z0 - c(4.0, 0.0)).norm() < 1e-3 {
                    continue;
                }
                let w = Complex64::from_polar(
                    rng.gen_range(0.0..2.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let mut prod = c(1.0, 0.0);
                for i in 0..ctx.dim {
                    prod *= r_coeff(&ctx, sigma, w, i as i64).unwrap();
                }
                let r = big_r(&ctx, z0, w).unwrap();
                assert!(
                    (prod - r).norm() < 1e-9 * r.norm().max(1.0),
                    "∏ r_i = {prod} but R = {r} (ctx m={}, σ={sigma})",
                    ctx.m
                );
            }
        }
    }

    #[test]
    fn r_coeff_independent_recomputation() {
        // second code path: assemble from polar pieces
        let ctx = ctx_odd();
        let sigma = c(2.0, 0.0);
        let w = c(0.0, 0.0);
        for i in 0..3i64 {
            let direct = r_coeff(&ctx, sigma, w, i).unwrap();
            let q = |k: i64| {
                Complex64::from_polar(
                    1.0,
                    std::f64::consts::TAU * ((k * ctx.a).rem_euclid(ctx.m) as f64)
                        / (ctx.m as f64),
                )
            };
            let num = w + q(4 * i + 2) * sigma.powi(2) + q(-4 * i - 2) * sigma.powi(-2);
            let lh = |j: i64| q(2 * j) * sigma - q(-2 * j) / sigma;
            let indep = num / (lh(i) * lh(i + 1));
            assert!((direct - indep).norm() < 1e-12 * indep.norm().max(1.0));
        }
    }

    #[test]
    fn lamhat_product_squared() {
        // ∏ λ̂_i² = z0² − 4 (n odd) or (z0 − 2)² (n even)
        let mut rng = StdRng::seed_from_u64(11);
        for ctx in [ctx_odd(), ctx_even()] {
            for _ in 0..50 {
                let sigma = Complex64::from_polar(
                    rng.gen_range(0.5..2.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let d = ctx.dim as i32;
                let z0 = sigma.powi(d) + sigma.powi(-d);
                let mut prod = c(1.0, 0.0);
                for i in 0..ctx.dim {
                    let lh = lambda_hat(&ctx, sigma, i as i64);
                    prod *= lh * lh;
                }
                let want = if ctx.n_odd() {
                    z0 * z0 - c(4.0, 0.0)
                } else {
                    (z0 - c(2.0, 0.0)) * (z0 - c(2.0, 0.0))
                };
                assert!(
                    (prod - want).norm() < 1e-10 * want.norm().max(1.0),
                    "λ̂ product fails for m={} σ={sigma}",
                    ctx.m
                );
            }
        }
    }

    #[test]
    fn big_r_and_f_examples() {
        let ctx = ctx_even();
        // n even, T_N(w) = -ε² z0 → R = 0 and f = -2
        let z0 = c(0.7, 0.2);
        // pick w with T_N(w) = -ε² z0: T_N(w) = u requires solving; instead
        // verify the algebra directly on the closed forms.
        let t = -ctx.eps_sq_c() * z0;
        let r = {
            let u = (t + ctx.eps_sq_c() * z0) / (z0 - c(2.0, 0.0));
            u * u
        };
        assert!(r.norm() < 1e-15);
        let f = (c(2.0, 0.0) * ctx.eps_sq_c() * t + c(4.0, 0.0)) / (z0 - c(2.0, 0.0));
        assert!((f - c(-2.0, 0.0)).norm() < 1e-12);

        // n odd, T_N(w) = 2, z0 = 0 → R = 0
        let ctx = ctx_odd();
        let r = big_r(&ctx, c(0.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!(r.norm() < 1e-14);

        // n even, z0 = -2, T_N(w) = -2ε² → R = 1, f = 0
        let ctx = ctx_even();
        let w = -ctx.q(2) - ctx.q(-2); // T_N(-q^{4k+2}-q^{-4k-2}) = -2ε² at k=0
        let tw = ctx.cheb_n(w);
        assert!((tw + c(2.0, 0.0) * ctx.eps_sq_c()).norm() < 1e-12);
        let r = big_r(&ctx, c(-2.0, 0.0), w).unwrap();
        assert!((r - c(1.0, 0.0)).norm() < 1e-10);
        let f = f_shift(&ctx, c(-2.0, 0.0), w).unwrap();
        assert!(f.norm() < 1e-10);
    }

    #[test]
    fn fiber_solve_nonzero_x() {
        let ctx = ctx_odd();
        let sigma = c(1.2, 0.3);
        let w = c(0.4, -0.2);
        let d = ctx.dim as i32;
        let z0 = sigma.powi(d) + sigma.powi(-d);
        let r = big_r(&ctx, z0, w).unwrap();
        let p = fiber_solve(&ctx, sigma, w, r, c(1.0, 0.0)).unwrap();
        assert!((p.s[0] - r).norm() < 1e-14);
        let ps: Complex64 = p.s.iter().product();
        let pt: Complex64 = p.t.iter().product();
        assert!((ps - r).norm() < 1e-12 * r.norm().max(1.0));
        assert!((pt - c(1.0, 0.0)).norm() < 1e-10);
        for i in 0..ctx.dim {
            assert!((p.s[i] * p.t[i] - p.r[i]).norm() < 1e-12 * p.r[i].norm().max(1.0));
        }
    }

    #[test]
    fn fiber_solve_zero_x() {
        // Arrange two vanishing r_i: n odd singular slice (0,0,0,w).
        let ctx = ctx_odd();
        let sigma = c(0.0, 1.0); // σ = i so z0 = σ^3 + σ^-3 = 0
        let d = ctx.dim as i32;
        let z0 = sigma.powi(d) + sigma.powi(-d);
        assert!(z0.norm() < 1e-12);
        // T_N(w) = 2 with w = q^2 + q^-2 (k = 1, not divisible by N)
        let w = ctx.q(2) + ctx.q(-2);
        assert!((ctx.cheb_n(w) - c(2.0, 0.0)).norm() < 1e-12);
        let p = fiber_solve(&ctx, sigma, w, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let zeros_s = p.s.iter().filter(|s| s.norm() < 1e-12).count();
        assert!(zeros_s >= 2, "expected two vanishing s_i, got {zeros_s}");

        // x = 0, y = 5, exactly one free slot consumes y
        let p2 = fiber_solve(&ctx, sigma, w, c(0.0, 0.0), c(5.0, 0.0)).unwrap();
        let pt: Complex64 = p2.t.iter().product();
        assert!((pt - c(5.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn fiber_solve_infeasible() {
        let ctx = ctx_odd();
        let sigma = c(1.2, 0.3);
        let w = c(10.0, 3.0); // far from any root: no r_i vanishes
        let err = fiber_solve(&ctx, sigma, w, c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            err,
            Err(SkeinError::NotOnCurve(_)) | Err(SkeinError::Infeasible)
        ));
    }

    #[test]
    fn type0_relations_and_shadow() {
        let mut rng = StdRng::seed_from_u64(3);
        for ctx in [ctx_odd(), ctx_even()] {
            for _ in 0..20 {
                let sigma = Complex64::from_polar(
                    rng.gen_range(0.7..1.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let d = ctx.dim as i32;
                let z0 = sigma.powi(d) + sigma.powi(-d);
                if !is_general(&ctx, z0) || (z0 * z0 - c(4.0, 0.0)).norm() < 1e-2 {
                    continue;
                }
                let w = Complex64::from_polar(
                    rng.gen_range(0.0..2.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let r = big_r(&ctx, z0, w).unwrap();
                let x = c(rng.gen_range(0.3..1.5), rng.gen_range(-0.5..0.5));
                let y = r / x;
                let params = fiber_solve(&ctx, sigma, w, x, y).unwrap();
                let rep = build_type0(&ctx, params.clone()).unwrap();
                assert!(rep.relation_residual() < 1e-8, "residual too large");
                // ρ(A_0) = T_D(ρ(α_0)) = z0 · I
                let (mean, dev) = rep.m0.cheb(ctx.dim as u32).scalar_deviation();
                assert!(dev < 1e-8);
                assert!((mean - z0).norm() < 1e-8);
                // matrix shadow equals the closed form
                let sh = classical_shadow(&rep).unwrap();
                let formula = type0_shadow_formula(&ctx, &params).unwrap();
                assert!(sh.max_diff(&formula) < 1e-8);
                // shadow satisfies the central relation
                assert!(central_relation_residual(&ctx, &sh) < 1e-8);
            }
        }
    }

    #[test]
    fn relabeling_sigma_preserves_shadow() {
        // replacing σ by q^2 σ relabels the basis cyclically: equal shadow
        let ctx = ctx_odd();
        let sigma = c(1.1, 0.2);
        let w = c(0.5, 0.1);
        let d = ctx.dim as i32;
        let z0 = sigma.powi(d) + sigma.powi(-d);
        let r = big_r(&ctx, z0, w).unwrap();
        let p1 = fiber_solve(&ctx, sigma, w, r, c(1.0, 0.0)).unwrap();
        let sh1 = classical_shadow(&build_type0(&ctx, p1).unwrap()).unwrap();
        let sigma2 = ctx.q(2) * sigma;
        let p2 = fiber_solve(&ctx, sigma2, w, r, c(1.0, 0.0)).unwrap();
        let sh2 = classical_shadow(&build_type0(&ctx, p2).unwrap()).unwrap();
        assert!(sh1.max_diff(&sh2) < 1e-8);
    }

    #[test]
    fn slope_moves_preserve_relation() {
        let mut rng = StdRng::seed_from_u64(42);
        for ctx in [ctx_odd(), ctx_even()] {
            for _ in 0..100 {
                let ch = random_character(&ctx, &mut rng);
                assert!(central_relation_residual(&ctx, &ch) < 1e-8);
                for mv in [SlopeMove::SwapZeroInf, SlopeMove::TwistOnce, SlopeMove::TwistInverse]
                {
                    let moved = slope_move(&ctx, &ch, mv);
                    assert!(
                        central_relation_residual(&ctx, &moved) < 1e-7,
                        "move {mv:?} broke the relation for m={}",
                        ctx.m
                    );
                }
                // involution / inverse checks
                let s2 = slope_move(
                    &ctx,
                    &slope_move(&ctx, &ch, SlopeMove::SwapZeroInf),
                    SlopeMove::SwapZeroInf,
                );
                assert!(s2.max_diff(&ch) < 1e-10);
                let ti = slope_move(
                    &ctx,
                    &slope_move(&ctx, &ch, SlopeMove::TwistOnce),
                    SlopeMove::TwistInverse,
                );
                assert!(ti.max_diff(&ch) < 1e-9);
            }
        }
    }

    #[test]
    fn twist_fixes_quaternion_point() {
        let ctx = ctx_odd();
        let ch = PtCharacter::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        let moved = slope_move(&ctx, &ch, SlopeMove::TwistOnce);
        assert!(moved.max_diff(&ch) < 1e-12);
    }

    #[test]
    fn exceptional_detection_odd() {
        let ctx = ctx_odd(); // ε = -1
        let w = -ctx.q(2) - ctx.q(-2);
        // product must be 8ε = -8: e.g. (2, 2, -2)
        let ch = PtCharacter::new(c(2.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), w);
        assert!(is_exceptional(&ctx, &ch));
        assert!(is_exceptional_by_orbit(&ctx, &ch, 6));
        // wrong product: not exceptional
        let ch2 = PtCharacter::new(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(-18.0, 0.0));
        assert!(!is_exceptional(&ctx, &ch2));
        // something with |z| != 2
        let ch3 = PtCharacter::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        assert!(!is_exceptional(&ctx, &ch3));
    }

    #[test]
    fn exceptional_detection_even() {
        let ctx = ctx_even(); // m = 12: ε² = -1
        // two -2's: exceptional
        let t_for = |z: Complex64| -ctx.eps_sq_c().inv() * z; // third = -ε²T ⇒ T = -ε²z... (ε²=±1)
        let _ = t_for;
        let w = ctx.q(4) + ctx.q(-4); // some w; T_N(w) value then fixes zinf
        let t = ctx.cheb_n(w);
        let zinf = -ctx.eps_sq_c() * t;
        let ch = PtCharacter::new(c(-2.0, 0.0), c(-2.0, 0.0), zinf, w);
        // zinf must be ±2 for exceptionality; here T_N(w) = T_3 of a root arg
        if is_pm2(zinf) {
            assert!(is_exceptional(&ctx, &ch));
        }
        // all 2 with T_N(w) = -2ε²
        let w = -ctx.q(2) - ctx.q(-2);
        assert!((ctx.cheb_n(w) + c(2.0, 0.0) * ctx.eps_sq_c()).norm() < 1e-12);
        let ch = PtCharacter::new(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), w);
        assert!(is_exceptional(&ctx, &ch));
        assert!(is_exceptional_by_orbit(&ctx, &ch, 6));
        // all 2 with T_N(w) = -18ε²: A_{-1} = 34, not exceptional
        // (solve T_N(w) = -18ε² is awkward; check the pattern test only on
        // the forced value)
        let ch2 = PtCharacter::new(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(0.9, 0.7));
        if (ctx.cheb_n(ch2.w) + c(2.0, 0.0) * ctx.eps_sq_c()).norm() > 1e-3 {
            assert!(!is_exceptional(&ctx, &ch2));
        }
    }

    #[test]
    fn slope_moves_preserve_exceptional_flag() {
        let ctx = ctx_odd();
        let w = -ctx.q(2) - ctx.q(-2);
        let ch = PtCharacter::new(c(2.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), w);
        assert!(is_exceptional(&ctx, &ch));
        for mv in [SlopeMove::SwapZeroInf, SlopeMove::TwistOnce, SlopeMove::TwistInverse] {
            let moved = slope_move(&ctx, &ch, mv);
            assert!(is_exceptional(&ctx, &moved), "{mv:?} broke exceptionality");
        }
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let ch = random_character(&ctx, &mut rng);
            if !is_exceptional(&ctx, &ch) {
                for mv in [SlopeMove::SwapZeroInf, SlopeMove::TwistOnce] {
                    let moved = slope_move(&ctx, &ch, mv);
                    assert!(!is_exceptional(&ctx, &moved));
                }
            }
        }
    }

    #[test]
    fn classify_singular_odd() {
        let ctx = ctx_odd();
        // (0,0,0,2): T_N(2) = 2, T'_N(2) = N² ≠ 0: slice only
        let ch = PtCharacter::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        let f = classify_singular(&ctx, &ch).unwrap();
        assert!(f.slice_singular && !f.variety_singular);
        // (0,0,0,w) with w = q^2 + q^-2 ≠ 2: T'_N(w) = 0: variety singular
        let w = ctx.q(2) + ctx.q(-2);
        let ch = PtCharacter::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), w);
        let f = classify_singular(&ctx, &ch).unwrap();
        assert!(f.slice_singular && f.variety_singular);
        // generic random point: not singular
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..20 {
            let ch = random_character(&ctx, &mut rng);
            let f = classify_singular(&ctx, &ch).unwrap();
            assert!(!f.slice_singular && !f.variety_singular);
        }
    }

    #[test]
    fn classify_singular_even() {
        let ctx = ctx_even();
        // (-2, -2, -ε²T, w): variety singular for any w
        let w = c(0.83, -0.4);
        let t = ctx.cheb_n(w);
        let ch = PtCharacter::new(c(-2.0, 0.0), c(-2.0, 0.0), -ctx.eps_sq_c() * t, w);
        assert!(central_relation_residual(&ctx, &ch) < 1e-9);
        let f = classify_singular(&ctx, &ch).unwrap();
        assert!(f.slice_singular && f.variety_singular);
        // (2,2,2, w) with T_N(w) = -2ε² and T'_N(w) ≠ 0: slice only
        let w = -ctx.q(2) - ctx.q(-2);
        let ch = PtCharacter::new(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), w);
        let f = classify_singular(&ctx, &ch).unwrap();
        assert!(f.slice_singular);
        let expected_variety = ctx.cheb_n_derivative(w).norm() < CLASSIFY_TOL;
        assert_eq!(f.variety_singular, expected_variety);
    }
}
