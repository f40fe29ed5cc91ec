//! Dispatcher from central characters to representations, and the
//! reducibility decision with its independent closure oracle.
//!
//! Characters whose slope-0 value is not general are first moved by a
//! mapping class; the inverse move is then applied to the constructed
//! matrices, so the returned representation has the requested shadow.

use num_complex::Complex64;

use crate::error::{Result, SkeinError};
use crate::linalg::{
    algebra_closure_dim, associated_graph, coordinate_invariant_subspace, CMatrix, CLOSURE_TOL,
};
use crate::scalars::RootContext;

use super::exceptional::{
    build_even_all2, build_even_all_minus2, build_even_mix, build_exceptional_odd,
    even_mix_witness, exceptional_odd_shadow,
};
use super::{
    a_minus_one, big_r, build_type0, central_relation_residual, classical_shadow, f_shift,
    fiber_solve, is_exceptional, is_general, PtCharacter, PtProvenance, PtRepresentation,
    PtTypeZeroParams, CLASSIFY_TOL,
};

/// Generator permutations and twists at the matrix level. Each is
/// precomposition with an algebra automorphism, so the image algebra (and
/// hence reducibility) is unchanged while the shadow moves.
#[derive(Clone, Copy, Debug)]
pub(crate) enum MatrixMove {
    /// α0 ↦ α1 ↦ α∞ ↦ α0
    Cyc,
    /// the inverse cycle
    Cyc2,
    /// α0 ↦ α∞, α∞ ↦ α0, α1 ↦ α_{-1}
    Rot,
}

pub(crate) fn apply_move(rep: PtRepresentation, mv: MatrixMove) -> PtRepresentation {
    let PtRepresentation {
        ctx,
        m0,
        m1,
        minf,
        w,
        provenance,
    } = rep;
    let (m0, m1, minf) = match mv {
        MatrixMove::Cyc => (m1, minf, m0),
        MatrixMove::Cyc2 => (minf, m0, m1),
        MatrixMove::Rot => {
            let q = ctx.q(1);
            let qi = ctx.q(-1);
            let denom = ctx.q(2) - ctx.q(-2);
            let am1 = minf
                .mul(&m0)
                .scale(q)
                .sub(&m0.mul(&minf).scale(qi))
                .scale(denom.inv());
            (minf, am1, m0)
        }
    };
    PtRepresentation {
        ctx,
        m0,
        m1,
        minf,
        w,
        provenance,
    }
}

/// Sign action: flip exactly two of the three generators (or none).
pub(crate) fn apply_sign_flips(rep: PtRepresentation, flips: [f64; 3]) -> PtRepresentation {
    debug_assert!((flips[0] * flips[1] * flips[2] - 1.0).abs() < 1e-12);
    let PtRepresentation {
        ctx,
        m0,
        m1,
        minf,
        w,
        provenance,
    } = rep;
    let f = |m: CMatrix, s: f64| {
        if s < 0.0 {
            m.neg()
        } else {
            m
        }
    };
    PtRepresentation {
        ctx,
        m0: f(m0, flips[0]),
        m1: f(m1, flips[1]),
        minf: f(minf, flips[2]),
        w,
        provenance,
    }
}

/// Principal D-th root of the larger quadratic solution of σ^D + σ^{-D} = z0.
fn sigma_from_z0(ctx: &RootContext, z0: Complex64) -> Complex64 {
    let two = Complex64::new(2.0, 0.0);
    let y = (z0 + (z0 * z0 - two * two).sqrt()) / two;
    let d = ctx.dim as f64;
    // principal branch of y^{1/D}
    Complex64::from_polar(y.norm().powf(1.0 / d), y.arg() / d)
}

/// Type-0 representation at a character whose slope-0 value is general.
fn build_at_general(ctx: &RootContext, ch: &PtCharacter) -> Result<PtRepresentation> {
    let two = Complex64::new(2.0, 0.0);
    if !ctx.n_odd() && (ch.z0 + two).norm() < CLASSIFY_TOL {
        // z0 = -2 branch: x + y = zinf - f, xy = R
        let z0 = -two;
        let sigma = Complex64::from_polar(1.0, std::f64::consts::PI / ctx.dim as f64);
        let f = f_shift(ctx, z0, ch.w)?;
        let r = big_r(ctx, z0, ch.w)?;
        let sum = ch.zinf - f;
        let disc = (sum * sum - Complex64::new(4.0, 0.0) * r).sqrt();
        let u1 = (sum + disc) / two;
        let u2 = (sum - disc) / two;
        // deterministic branch: larger imaginary part, ties by real part
        let x = if u1.im > u2.im || (u1.im == u2.im && u1.re >= u2.re) {
            u1
        } else {
            u2
        };
        let y = sum - x;
        let params = fiber_solve(ctx, sigma, ch.w, x, y)?;
        build_type0(ctx, params)
    } else {
        let sigma = sigma_from_z0(ctx, ch.z0);
        let d = ctx.dim as i32;
        let sd = sigma.powi(d);
        let sdi = sd.inv();
        let denom = sd - sdi;
        if denom.norm() < 1e-9 {
            return Err(SkeinError::SingularDenominator(
                "sigma^D - sigma^-D in the existence solve".into(),
            ));
        }
        let (zp1, zpinf) = if ctx.n_odd() {
            (ctx.epsilon * ch.z1, ch.zinf)
        } else {
            let f = f_shift(ctx, ch.z0, ch.w)?;
            (ch.z1 - f, ch.zinf - f)
        };
        let x = (zp1 - sdi * zpinf) / denom;
        let y = (sd * zpinf - zp1) / denom;
        let params = fiber_solve(ctx, sigma, ch.w, x, y)?;
        build_type0(ctx, params)
    }
}

fn find_k(w: Complex64, cands: impl Iterator<Item = (i64, Complex64)>) -> Result<i64> {
    let mut best: Option<(i64, f64)> = None;
    for (k, wk) in cands {
        let d = (w - wk).norm();
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((k, d));
        }
    }
    match best {
        Some((k, d)) if d < 1e-6 => Ok(k),
        _ => Err(SkeinError::BadCase(format!(
            "peripheral value {w} does not match any exceptional family"
        ))),
    }
}

fn represent_exceptional(ctx: &RootContext, ch: &PtCharacter) -> Result<PtRepresentation> {
    if ctx.n_odd() {
        let k = find_k(
            ch.w,
            (0..2 * ctx.big_n).map(|k| (k, -ctx.q(2 * k) - ctx.q(-2 * k))),
        )?;
        let base = build_exceptional_odd(ctx, k)?;
        let bsh = exceptional_odd_shadow(ctx, k);
        let sgn = |z: Complex64| if z.re >= 0.0 { 1.0 } else { -1.0 };
        let flips = [
            sgn(ch.z0) * sgn(bsh.z0),
            sgn(ch.z1) * sgn(bsh.z1),
            sgn(ch.zinf) * sgn(bsh.zinf),
        ];
        if (flips[0] * flips[1] * flips[2] - 1.0).abs() > 1e-9 {
            return Err(SkeinError::BadCase(
                "sign pattern not reachable by the sign action".into(),
            ));
        }
        Ok(apply_sign_flips(base, flips))
    } else {
        let minus_count = [ch.z0, ch.z1, ch.zinf]
            .iter()
            .filter(|z| (*z + Complex64::new(2.0, 0.0)).norm() < CLASSIFY_TOL)
            .count();
        match minus_count {
            3 => {
                let k = find_k(
                    ch.w,
                    (0..ctx.big_n).map(|k| (k, ctx.eps_sq_c() * (ctx.q(4 * k) + ctx.q(-4 * k)))),
                )?;
                build_even_all_minus2(ctx, k)
            }
            2 => {
                let k = find_k(
                    ch.w,
                    (0..2 * ctx.big_n).map(|k| (k, -ctx.q(4 * k + 2) - ctx.q(-4 * k - 2))),
                )?;
                let base = build_even_mix(ctx, k)?; // shadow (-2, -2, 2)
                let two = Complex64::new(2.0, 0.0);
                if (ch.zinf - two).norm() < CLASSIFY_TOL {
                    Ok(base)
                } else if (ch.z1 - two).norm() < CLASSIFY_TOL {
                    Ok(apply_move(base, MatrixMove::Cyc))
                } else {
                    Ok(apply_move(base, MatrixMove::Cyc2))
                }
            }
            0 => {
                let k = find_k(
                    ch.w,
                    (0..2 * ctx.big_n).map(|k| (k, -ctx.q(4 * k + 2) - ctx.q(-4 * k - 2))),
                )?;
                build_even_all2(ctx, k)
            }
            _ => Err(SkeinError::BadCase(
                "exceptional pattern with exactly one -2 is impossible".into(),
            )),
        }
    }
}

/// Construct a D-dimensional representation with classical shadow `ch`.
pub fn represent(ctx: &RootContext, ch: &PtCharacter) -> Result<PtRepresentation> {
    let res = central_relation_residual(ctx, ch);
    if res > 1e-6 {
        return Err(SkeinError::NotACharacter(res));
    }
    let rep = if is_exceptional(ctx, ch) {
        represent_exceptional(ctx, ch)?
    } else if is_general(ctx, ch.z0) {
        build_at_general(ctx, ch)?
    } else if is_general(ctx, ch.z1) {
        let moved = PtCharacter::new(ch.z1, ch.zinf, ch.z0, ch.w);
        apply_move(build_at_general(ctx, &moved)?, MatrixMove::Cyc2)
    } else if is_general(ctx, ch.zinf) {
        let moved = PtCharacter::new(ch.zinf, ch.z0, ch.z1, ch.w);
        apply_move(build_at_general(ctx, &moved)?, MatrixMove::Cyc)
    } else {
        // all three slots non-general but not exceptional: the slope -1
        // value is general, build there and rotate back
        let am1 = a_minus_one(ctx, ch);
        if !is_general(ctx, am1) {
            return Err(SkeinError::NoGeneralSlope(format!("{ch:?}")));
        }
        let moved = PtCharacter::new(am1, ch.z0, ch.zinf, ch.w);
        let rep = build_at_general(ctx, &moved)?;
        apply_move(apply_move(rep, MatrixMove::Cyc2), MatrixMove::Rot)
    };
    let got = classical_shadow(&rep)?;
    let diff = got.max_diff(ch);
    if diff > 1e-5 {
        return Err(SkeinError::BadCase(format!(
            "constructed shadow is off by {diff:.3e} from the request"
        )));
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct ReducibilityReport {
    pub reducible: bool,
    pub witness: Option<Vec<Vec<Complex64>>>,
    pub oracle_dim: usize,
    pub fast_path_reducible: bool,
    pub graph_reducible: Option<bool>,
    pub disagreement: bool,
}

fn type0_criterion(p: &PtTypeZeroParams) -> bool {
    let ps: Complex64 = p.s.iter().product();
    let pt: Complex64 = p.t.iter().product();
    let r_scale = p.r.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let zeros = p.r.iter().filter(|r| r.norm() < 1e-8 * r_scale).count();
    ps.norm() < 1e-8 && pt.norm() < 1e-8 && zeros >= 2
}

fn type0_witness(p: &PtTypeZeroParams, d: usize) -> Option<Vec<Vec<Complex64>>> {
    let s_scale = p.s.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let t_scale = p.t.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let s0: Vec<usize> = (0..d).filter(|&j| p.s[j].norm() < 1e-9 * s_scale).collect();
    let t0: Vec<usize> = (0..d).filter(|&i| p.t[i].norm() < 1e-9 * t_scale).collect();
    for &j in &s0 {
        for &i in &t0 {
            if i != j {
                // arc (i, j]: indices i+1, ..., j cyclically
                let mut arc = Vec::new();
                let mut v = (i + 1) % d;
                loop {
                    arc.push(v);
                    if v == j {
                        break;
                    }
                    v = (v + 1) % d;
                }
                return Some(coordinate_vectors(&arc, d));
            }
        }
    }
    None
}

fn coordinate_vectors(idxs: &[usize], d: usize) -> Vec<Vec<Complex64>> {
    idxs.iter()
        .map(|&i| {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[i] = Complex64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Witness for the odd exceptional family, following the explicit invariant
/// index sets of the reducibility analysis.
fn odd_exceptional_witness(ctx: &RootContext, k: i64) -> Option<Vec<Vec<Complex64>>> {
    let n = ctx.big_n;
    let nbar = (n - 1) / 2;
    let d = ctx.dim;
    let idx = |i: i64| (i + nbar) as usize;
    let mut kr = k.rem_euclid(n);
    if kr > nbar {
        kr -= n;
    }
    if kr == 0 {
        return None;
    }
    let range: Vec<usize> = if kr == 1 {
        (-nbar..=0).map(idx).collect()
    } else if kr == -1 {
        (-nbar..=-1).map(idx).collect()
    } else {
        let ka = kr.abs();
        let l = if ka % 2 == 0 { nbar - ka / 2 } else { (ka - 1) / 2 };
        // one of s_l, s_{-l-1} vanishes; test which
        let s_num =
            |i: i64| -> Complex64 { ctx.q(2 * i - k + 1) - ctx.q(-2 * i + k - 1) };
        if s_num(l).norm() < 1e-9 {
            (-nbar..=l).map(idx).collect()
        } else {
            (-nbar..=(-l - 1)).map(idx).collect()
        }
    };
    Some(coordinate_vectors(&range, d))
}

fn even222_witness(ctx: &RootContext, k: i64) -> Option<Vec<Vec<Complex64>>> {
    let n = ctx.big_n;
    let d = ctx.dim;
    let idx = |i: i64| (i + n) as usize;
    let kr = k.rem_euclid(n);
    if n % 2 == 1 && kr == (n - 1) / 2 {
        return None;
    }
    let range: Vec<usize> = if kr == 0 {
        (-n..=0).map(idx).collect()
    } else if kr == n - 1 {
        ((-n + 1)..=-1).map(idx).collect()
    } else if 2 * kr < n - 1 {
        (-n..=kr).chain(n - kr..n).map(idx).collect()
    } else {
        (-kr..=(kr - n)).map(idx).collect()
    };
    Some(coordinate_vectors(&range, d))
}

/// Decide reducibility: a provenance-specific fast path, the coordinate
/// graph method when a generator is diagonal with separated eigenvalues,
/// and the algebra-closure oracle. The oracle verdict wins; any mismatch
/// is reported as a disagreement.
pub fn is_reducible(rep: &PtRepresentation) -> Result<ReducibilityReport> {
    let ctx = &rep.ctx;
    let d = ctx.dim;
    let n = ctx.big_n;
    let (fast, witness) = match &rep.provenance {
        PtProvenance::TypeZero(p) => (type0_criterion(p), type0_witness(p, d)),
        PtProvenance::ExceptionalEvenM2 { params, .. } => {
            (type0_criterion(params), type0_witness(params, d))
        }
        PtProvenance::ExceptionalEvenMix { .. } => (true, Some(even_mix_witness(ctx, true))),
        PtProvenance::ExceptionalOdd { k } => (
            k.rem_euclid(n) != 0,
            odd_exceptional_witness(ctx, *k),
        ),
        PtProvenance::ExceptionalEven222 { k } => (
            !(n % 2 == 1 && k.rem_euclid(n) == (n - 1) / 2),
            even222_witness(ctx, *k),
        ),
    };
    let oracle_dim = algebra_closure_dim(
        &[rep.m0.clone(), rep.minf.clone()],
        CLOSURE_TOL,
    )?;
    let oracle_reducible = oracle_dim < d * d;

    // Graph fast path: applicable when some generator is diagonal with
    // eigenvalue gaps above 1e-6.
    let graph_reducible = [&rep.m0, &rep.m1, &rep.minf]
        .into_iter()
        .find(|m| {
            let off = (0..d)
                .flat_map(|r| (0..d).map(move |c| (r, c)))
                .filter(|(r, c)| r != c)
                .map(|(r, c)| m[(r, c)].norm())
                .fold(0.0, f64::max);
            if off > 1e-12 {
                return false;
            }
            let mut gap = f64::INFINITY;
            for i in 0..d {
                for j in i + 1..d {
                    gap = gap.min((m[(i, i)] - m[(j, j)]).norm());
                }
            }
            gap > 1e-6
        })
        .map(|_| {
            let gs = [
                associated_graph(&rep.m0, 1e-9),
                associated_graph(&rep.m1, 1e-9),
                associated_graph(&rep.minf, 1e-9),
            ];
            coordinate_invariant_subspace(&gs).is_some()
        });

    let disagreement = fast != oracle_reducible
        || graph_reducible.is_some_and(|g| g != oracle_reducible);
    Ok(ReducibilityReport {
        reducible: oracle_reducible,
        witness: if oracle_reducible { witness } else { None },
        oracle_dim,
        fast_path_reducible: fast,
        graph_reducible,
        disagreement,
    })
}
