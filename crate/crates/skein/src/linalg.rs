//! Small dense complex matrices, associated graphs, and two independent
//! irreducibility deciders.
//!
//! Matrices here are tiny (dimension bounded by the PI degree, so ~50 at
//! most); everything is row-major `Vec<Complex64>` with no blocking.

use num_complex::Complex64;

use crate::error::{Result, SkeinError};

/// Rank threshold for the algebra closure: components below
/// `CLOSURE_TOL * scale` are treated as zero.
pub const CLOSURE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub dim: usize,
    /// row-major entries, `entries[r * dim + c]`
    pub entries: Vec<Complex64>,
}

impl CMatrix {
    pub fn zero(dim: usize) -> Self {
        CMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn scalar(dim: usize, z: Complex64) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zero(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = CMatrix::zero(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (x, y) in out.entries.iter_mut().zip(&other.entries) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (x, y) in out.entries.iter_mut().zip(&other.entries) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        let mut out = self.clone();
        for x in out.entries.iter_mut() {
            *x *= z;
        }
        out
    }

    pub fn neg(&self) -> CMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest off-diagonal magnitude plus spread of the diagonal: how far
    /// the matrix is from a scalar multiple of the identity.
    pub fn scalar_deviation(&self) -> (Complex64, f64) {
        let d = self.dim;
        let mut mean = Complex64::new(0.0, 0.0);
        for i in 0..d {
            mean += self.entries[i * d + i];
        }
        mean /= d as f64;
        let mut dev: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let e = self.entries[r * d + c];
                let target = if r == c { mean } else { Complex64::new(0.0, 0.0) };
                dev = dev.max((e - target).norm());
            }
        }
        (mean, dev)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        assert_eq!(v.len(), d);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for r in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..d {
                acc += self.entries[r * d + c] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Chebyshev polynomial of the matrix, T_k(A), by the recurrence.
    pub fn cheb(&self, k: u32) -> CMatrix {
        let two_i = CMatrix::scalar(self.dim, Complex64::new(2.0, 0.0));
        match k {
            0 => two_i,
            1 => self.clone(),
            _ => {
                let mut prev = two_i;
                let mut cur = self.clone();
                for _ in 2..=k {
                    let next = self.mul(&cur).sub(&prev);
                    prev = cur;
                    cur = next;
                }
                cur
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.dim + c]
    }
}

/// Max-entry absolute difference.
pub fn residual(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    assert_eq!(lhs.dim, rhs.dim);
    lhs.entries
        .iter()
        .zip(&rhs.entries)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Weighted digraph of the nonzero entries of a matrix in a fixed basis.
/// The edge j→i carries the v_i-component of A v_j, so it corresponds to
/// the entry A_{ij}.
#[derive(Clone, Debug)]
pub struct WeightedDigraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, Complex64)>,
}

pub fn associated_graph(a: &CMatrix, tol: f64) -> WeightedDigraph {
    let d = a.dim;
    let mut edges = Vec::new();
    for j in 0..d {
        for i in 0..d {
            let w = a[(i, j)];
            if w.norm() > tol {
                edges.push((j, i, w));
            }
        }
    }
    WeightedDigraph {
        vertices: d,
        edges,
    }
}

/// Matrix whose associated graph is the given one (weights placed back at
/// A_{ij} for each edge j→i).
pub fn graph_matrix(g: &WeightedDigraph) -> CMatrix {
    let mut m = CMatrix::zero(g.vertices);
    for &(j, i, w) in &g.edges {
        m[(i, j)] += w;
    }
    m
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], st: &mut TarjanState) {
    st.idx[v] = Some(st.index);
    st.low[v] = st.index;
    st.index += 1;
    st.stack.push(v);
    st.on_stack[v] = true;

    for &w in &adj[v] {
        if st.idx[w].is_none() {
            strongconnect(w, adj, st);
            st.low[v] = st.low[v].min(st.low[w]);
        } else if st.on_stack[w] {
            st.low[v] = st.low[v].min(st.idx[w].unwrap());
        }
    }

    if st.low[v] == st.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = st.stack.pop().expect("tarjan stack underflow");
            st.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        comp.sort_unstable();
        st.comps.push(comp);
    }
}

/// Tarjan strongly connected components of an adjacency list.
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut st = TarjanState {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            strongconnect(v, adj, &mut st);
        }
    }
    st.comps
}

/// Proper nonempty vertex set with no edge leaving it in the union of the
/// graphs, if one exists. Such a set spans a coordinate invariant subspace
/// when one of the generators is diagonal with distinct eigenvalues.
pub fn coordinate_invariant_subspace(graphs: &[WeightedDigraph]) -> Option<Vec<usize>> {
    let n = graphs.first().map(|g| g.vertices)?;
    let mut adj = vec![Vec::new(); n];
    for g in graphs {
        assert_eq!(g.vertices, n, "graphs must share the vertex set");
        for &(j, i, _) in &g.edges {
            if i != j {
                adj[j].push(i);
            }
        }
    }
    let comps = tarjan_scc(&adj);
    if comps.len() <= 1 {
        return None;
    }
    // Membership map, then pick the first component that is a sink in the
    // condensation (no edges leaving it); a sink always exists.
    let mut comp_of = vec![0usize; n];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut is_sink = vec![true; comps.len()];
    for (j, outs) in adj.iter().enumerate() {
        for &i in outs {
            if comp_of[j] != comp_of[i] {
                is_sink[comp_of[j]] = false;
            }
        }
    }
    let mut sinks: Vec<&Vec<usize>> = comps
        .iter()
        .enumerate()
        .filter(|(ci, _)| is_sink[*ci])
        .map(|(_, c)| c)
        .collect();
    sinks.sort_by_key(|c| c[0]);
    sinks.first().map(|c| (*c).clone())
}

/// Dimension of the unital algebra generated by the matrices, found by
/// growing an orthonormal basis (Frobenius inner product) under repeated
/// right-multiplication by the generators. The representation is
/// irreducible over C iff the result equals dim^2.
pub fn algebra_closure_dim(generators: &[CMatrix], tol: f64) -> Result<usize> {
    let d = generators
        .first()
        .ok_or_else(|| SkeinError::BadInput("no generators".into()))?
        .dim;
    for g in generators {
        if g.dim != d {
            return Err(SkeinError::BadInput("generators of mixed dimension".into()));
        }
    }
    let vec_of = |m: &CMatrix| m.entries.clone();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut basis_mats: Vec<CMatrix> = Vec::new();
    // Orthonormalize a candidate against the basis; returns true if added.
    // Two projection passes keep the basis orthonormal to machine precision.
    let mut try_add = |basis: &mut Vec<Vec<Complex64>>,
                       basis_mats: &mut Vec<CMatrix>,
                       m: &CMatrix|
     -> bool {
        let mut v = vec_of(m);
        let scale = norm(&v);
        if scale == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let r = norm(&v);
        if r > tol * scale {
            let inv = 1.0 / r;
            for x in v.iter_mut() {
                *x *= inv;
            }
            basis.push(v.clone());
            basis_mats.push(CMatrix {
                dim: d,
                entries: v,
            });
            true
        } else {
            false
        }
    };

    try_add(&mut basis, &mut basis_mats, &CMatrix::identity(d));
    for g in generators {
        try_add(&mut basis, &mut basis_mats, g);
    }

    let max_sweeps = d * d + 2;
    let mut frontier_start = 0;
    for _ in 0..max_sweeps {
        let end = basis_mats.len();
        if frontier_start == end {
            return Ok(basis.len());
        }
        let mut added_any = false;
        for bi in frontier_start..end {
            for g in generators {
                let prod = basis_mats[bi].mul(g);
                if try_add(&mut basis, &mut basis_mats, &prod) {
                    added_any = true;
                }
            }
        }
        frontier_start = end;
        if !added_any && basis_mats.len() == end {
            return Ok(basis.len());
        }
    }
    // The fixpoint is reached after at most d^2 sweeps mathematically; not
    // getting there signals numerical breakdown.
    Err(SkeinError::NoConvergence)
}

/// Max over witness vectors of the residual of M·v against the span of the
/// witness set; near zero iff the span is invariant under every matrix.
pub fn invariance_residual(mats: &[&CMatrix], span: &[Vec<Complex64>]) -> f64 {
    if span.is_empty() {
        return 0.0;
    }
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    // Orthonormalize the span.
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in span {
        let mut v = v.clone();
        for b in &basis {
            let c = dot(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let r = norm(&v);
        if r > 1e-12 {
            for x in v.iter_mut() {
                *x /= r;
            }
            basis.push(v);
        }
    }
    let mut worst: f64 = 0.0;
    for m in mats {
        for v in &basis {
            let mut w = m.mul_vec(v);
            let scale = norm(&w).max(1.0);
            for b in &basis {
                let c = dot(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
            worst = worst.max(norm(&w) / scale);
        }
    }
    worst
}
