//! Sparse storage, products, effective-matrix assembly and direct solvers for
//! real and complex systems.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::io::{BufRead, Write};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::path::Path;

use num::complex::Complex64;

use crate::error::{Error, Result};

/// Field scalar used by the solvers (`f64` or `Complex64`).
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Square compressed-sparse-row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T: Scalar> {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

pub type SparseRealMatrix = SparseMatrix<f64>;

impl<T: Scalar> SparseMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// resulting zeros dropped.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut t: Vec<(usize, usize, T)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::Dimension(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            t.push((i, j, v));
        }
        t.sort_by_key(|e| (e.0, e.1));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<T> = Vec::with_capacity(t.len());
        let mut k = 0;
        while k < t.len() {
            let (i, j, mut v) = t[k];
            k += 1;
            while k < t.len() && t[k].0 == i && t[k].1 == j {
                v += t[k].2;
                k += 1;
            }
            if v != T::zero() {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Ok(Self { n, indptr, indices, values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, indptr: vec![0; n + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn from_dense(n: usize, dense: &[T]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::Dimension(format!("dense buffer of {} for n = {n}", dense.len())));
        }
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = dense[i * n + j];
                if v != T::zero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out.push((i, j, v));
            }
        }
        out
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n * self.n];
        for (i, j, v) in self.triplets() {
            d[i * self.n + j] = v;
        }
        d
    }

    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!("vector of {} for n = {}", x.len(), self.n)));
        }
        let mut y = vec![T::zero(); self.n];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x`. Lengths are the caller's responsibility.
    pub fn spmv_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = T::zero();
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yi = s;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.triplets()
            .iter()
            .all(|&(i, j, v)| (v - self.get(j, i)).modulus() <= tol * scale)
    }

    /// Symmetric sparsity graph (pattern of `A + A^T` without the diagonal).
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, j, _) in self.triplets() {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

impl SparseMatrix<f64> {
    /// Linear combination `sum_k w_k A_k` of real matrices with scalar weights
    /// of type `T`, on the union pattern.
    pub fn combine<T: Scalar>(terms: &[(T, &SparseMatrix<f64>)]) -> Result<SparseMatrix<T>> {
        let n = terms.first().map(|t| t.1.n).unwrap_or(0);
        let mut t = Vec::new();
        for (w, m) in terms {
            if m.n != n {
                return Err(Error::Dimension(format!("{} vs {}", m.n, n)));
            }
            for (i, j, v) in m.triplets() {
                t.push((i, j, *w * v));
            }
        }
        SparseMatrix::<T>::from_triplets(n, &t)
    }

    /// `y = A x` for a complex vector.
    pub fn spmv_complex_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += x[self.indices[k]] * self.values[k];
            }
            *yi = s;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= a);
        m
    }
}

/// Effective matrix `r^2 M + r dt C + dt^2 K`, real when `r` is real.
#[derive(Debug, Clone, PartialEq)]
pub enum EffectiveMatrix {
    Real(SparseMatrix<f64>),
    Complex(SparseMatrix<Complex64>),
}

pub fn assemble_effective(
    m: &SparseRealMatrix,
    c: &SparseRealMatrix,
    k: &SparseRealMatrix,
    r: Complex64,
    dt: f64,
) -> Result<EffectiveMatrix> {
    if !(dt > 0.0) {
        return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
    }
    if m.dim() != c.dim() || m.dim() != k.dim() {
        return Err(Error::Dimension(format!(
            "M is {}, C is {}, K is {}",
            m.dim(),
            c.dim(),
            k.dim()
        )));
    }
    if r.im == 0.0 {
        let s = r.re;
        Ok(EffectiveMatrix::Real(SparseMatrix::combine(&[
            (s * s, m),
            (s * dt, c),
            (dt * dt, k),
        ])?))
    } else {
        Ok(EffectiveMatrix::Complex(SparseMatrix::combine(&[
            (r * r, m),
            (r * dt, c),
            (Complex64::new(dt * dt, 0.0), k),
        ])?))
    }
}

/// Matrices up to this size are factorized densely.
pub const DENSE_LIMIT: usize = 64;

/// Dense LU with partial pivoting, row-major.
#[derive(Debug, Clone)]
pub struct DenseLu<T: Scalar> {
    n: usize,
    lu: Vec<T>,
    piv: Vec<usize>,
}

fn singular_threshold(scale: f64, n: usize) -> f64 {
    scale * f64::EPSILON * (n.max(1) as f64) * 1e-2
}

impl<T: Scalar> DenseLu<T> {
    pub fn new(n: usize, mut a: Vec<T>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Dimension(format!("dense buffer of {} for n = {n}", a.len())));
        }
        let scale = a.iter().map(|v| v.modulus()).fold(0.0, f64::max);
        let tiny = singular_threshold(scale, n);
        let mut piv = vec![0; n];
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].modulus();
            for i in k + 1..n {
                let v = a[i * n + k].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::Singular(format!("zero pivot in column {k} of {n}")));
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            let d = a[k * n + k];
            for i in k + 1..n {
                let l = a[i * n + k] / d;
                a[i * n + k] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, lu: a, piv })
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
    }
}

/// Banded LU with partial pivoting on a symmetric reordering that reduces
/// bandwidth. Row `i` keeps columns `i - kl ..= i + ku + kl`.
#[derive(Debug, Clone)]
pub struct BandLu<T: Scalar> {
    n: usize,
    kl: usize,
    ku: usize,
    /// Column `k` of `L` below the diagonal, `kl` entries per column.
    lower: Vec<T>,
    /// Row `i` of `U` from the diagonal on, `kl + ku + 1` entries per row.
    upper: Vec<T>,
    /// Entries of each `U` row up to its last nonzero; pivoting rarely fills
    /// the full width.
    upper_len: Vec<usize>,
    piv: Vec<usize>,
    /// `perm[new] = old`.
    perm: Vec<usize>,
}

/// Dot product with four independent accumulators.
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        s += *x * *y;
    }
    s
}

fn band_extent<T: Scalar>(a: &SparseMatrix<T>, perm: &[usize]) -> usize {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut kl = 0;
    let mut ku = 0;
    for i in 0..a.dim() {
        for &j in a.row(i).0 {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
    }
    2 * kl + ku
}

impl<T: Scalar> BandLu<T> {
    /// Factors with whichever of the natural and the reverse Cuthill-McKee
    /// orderings gives the narrower band.
    pub fn new(a: &SparseMatrix<T>) -> Result<Self> {
        let natural: Vec<usize> = (0..a.dim()).collect();
        let rcm = reverse_cuthill_mckee(&a.adjacency());
        let perm = if band_extent(a, &rcm) < band_extent(a, &natural) { rcm } else { natural };
        Self::with_ordering(a, perm)
    }

    pub fn with_ordering(a: &SparseMatrix<T>, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let (mut kl, mut ku) = (0usize, 0usize);
        for (i, j, _) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
        let width = 2 * kl + ku + 1;
        let mut ab = vec![T::zero(); n * width];
        for (i, j, v) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            ab[pi * width + (pj + kl - pi)] = v;
        }
        let scale = a.max_abs();
        let tiny = singular_threshold(scale, n);
        let mut piv = vec![0; n];
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = ab[idx(k, k)].modulus();
            for i in k + 1..=last {
                let v = ab[idx(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::Singular(format!("zero pivot in column {k} of {n}")));
            }
            piv[k] = p;
            let jend = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=jend {
                    ab.swap(idx(k, j), idx(p, j));
                }
            }
            let d = ab[idx(k, k)];
            for i in k + 1..=last {
                let l = ab[idx(i, k)] / d;
                ab[idx(i, k)] = l;
                if l != T::zero() {
                    for j in k + 1..=jend {
                        let u = ab[idx(k, j)];
                        ab[idx(i, j)] -= l * u;
                    }
                }
            }
        }
        let uw = kl + ku + 1;
        let mut lower = vec![T::zero(); n * kl];
        let mut upper = vec![T::zero(); n * uw];
        for k in 0..n {
            for i in k + 1..=(k + kl).min(n - 1) {
                lower[k * kl + (i - k - 1)] = ab[idx(i, k)];
            }
            for j in k..=(k + uw - 1).min(n - 1) {
                upper[k * uw + (j - k)] = ab[idx(k, j)];
            }
        }
        let upper_len = (0..n)
            .map(|i| {
                let row = &upper[i * uw..(i + 1) * uw];
                row.iter().rposition(|v| *v != T::zero()).map_or(1, |p| p + 1)
            })
            .collect();
        Ok(Self { n, kl, ku, lower, upper, upper_len, piv, perm })
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    pub fn storage(&self) -> usize {
        self.lower.len() + self.upper.len()
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        let kl = self.kl;
        let uw = kl + self.ku + 1;
        let mut x: Vec<T> = self.perm.iter().map(|&o| b[o]).collect();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != T::zero() {
                let len = kl.min(n - 1 - k);
                let col = &self.lower[k * kl..k * kl + len];
                for (xi, l) in x[k + 1..k + 1 + len].iter_mut().zip(col) {
                    *xi -= *l * xk;
                }
            }
        }
        for i in (0..n).rev() {
            let len = self.upper_len[i].min(n - i);
            let row = &self.upper[i * uw..i * uw + len];
            let s = x[i] - dot(&row[1..], &x[i + 1..i + len]);
            x[i] = s / row[0];
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = x[new];
        }
    }
}

/// Reverse Cuthill-McKee ordering of a symmetric graph; returns `perm[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs_levels = |start: usize, seen: &mut Vec<bool>| -> Vec<usize> {
        let mut out = vec![start];
        seen[start] = true;
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&u| !seen[u]).collect();
            nb.sort_by_key(|&u| (adj[u].len(), u));
            for u in nb {
                seen[u] = true;
                out.push(u);
                q.push_back(u);
            }
        }
        out
    };
    for s in 0..n {
        if visited[s] {
            continue;
        }
        // Pseudo-peripheral start: repeat BFS from the last reached node.
        let mut start = s;
        let mut reach = 0;
        for _ in 0..4 {
            let mut seen = visited.clone();
            let comp = bfs_levels(start, &mut seen);
            let far = *comp.last().unwrap();
            let mut seen2 = visited.clone();
            let depth = bfs_levels(far, &mut seen2).len();
            if far == start || depth <= reach {
                break;
            }
            reach = depth;
            start = far;
        }
        let comp = bfs_levels(start, &mut visited);
        order.extend(comp);
    }
    order.reverse();
    order
}

/// Direct factorization, dense or banded.
#[derive(Debug, Clone)]
pub enum Factorization<T: Scalar> {
    Dense(DenseLu<T>),
    Band(BandLu<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Dense,
    Band,
}

impl<T: Scalar> Factorization<T> {
    pub fn new(a: &SparseMatrix<T>) -> Result<Self> {
        Self::with_method(a, Method::Auto)
    }

    pub fn with_method(a: &SparseMatrix<T>, method: Method) -> Result<Self> {
        let dense = match method {
            Method::Auto => a.dim() <= DENSE_LIMIT,
            Method::Dense => true,
            Method::Band => false,
        };
        if dense {
            Ok(Self::Dense(DenseLu::new(a.dim(), a.to_dense())?))
        } else {
            Ok(Self::Band(BandLu::new(a)?))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(f) => f.n,
            Self::Band(f) => f.n,
        }
    }

    /// Stored factor entries.
    pub fn fill(&self) -> usize {
        match self {
            Self::Dense(f) => f.n * f.n,
            Self::Band(f) => f.storage(),
        }
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        match self {
            Self::Dense(f) => f.solve_in_place(b),
            Self::Band(f) => f.solve_in_place(b),
        }
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        if rhs.len() != self.dim() {
            return Err(Error::Dimension(format!("rhs of {} for n = {}", rhs.len(), self.dim())));
        }
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }
}

/// Factorized effective matrix together with its shift and step size.
#[derive(Debug, Clone)]
pub struct EffectiveFactorization {
    pub shift: Complex64,
    pub dt: f64,
    pub kind: ShiftedFactor,
}

#[derive(Debug, Clone)]
pub enum ShiftedFactor {
    Real(Factorization<f64>),
    Complex(Factorization<Complex64>),
}

impl EffectiveFactorization {
    pub fn new(
        m: &SparseRealMatrix,
        c: &SparseRealMatrix,
        k: &SparseRealMatrix,
        r: Complex64,
        dt: f64,
    ) -> Result<Self> {
        let kind = match assemble_effective(m, c, k, r, dt)? {
            EffectiveMatrix::Real(a) => ShiftedFactor::Real(Factorization::new(&a)?),
            EffectiveMatrix::Complex(a) => ShiftedFactor::Complex(Factorization::new(&a)?),
        };
        Ok(Self { shift: r, dt, kind })
    }

    pub fn fill(&self) -> usize {
        match &self.kind {
            ShiftedFactor::Real(f) => f.fill(),
            ShiftedFactor::Complex(f) => f.fill(),
        }
    }
}

/// Writes a real matrix in MatrixMarket coordinate format.
pub fn write_matrix_market<W: Write>(a: &SparseRealMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.dim(), a.dim(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Reads a real square matrix in MatrixMarket coordinate format
/// (`general` or `symmetric`).
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<SparseRealMatrix> {
    let mut symmetric = false;
    let mut header: Option<(usize, usize)> = None;
    let mut t = Vec::new();
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.starts_with("%%") {
            let lower = s.to_ascii_lowercase();
            if !lower.contains("coordinate") || lower.contains("complex") {
                return Err(Error::Parse(format!("unsupported header: {s}")));
            }
            symmetric = lower.contains("symmetric");
            continue;
        }
        if s.is_empty() || s.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: {s}", ln + 1));
        match header {
            None => {
                if f.len() < 2 {
                    return Err(bad());
                }
                let rows: usize = f[0].parse().map_err(|_| bad())?;
                let cols: usize = f[1].parse().map_err(|_| bad())?;
                if rows != cols {
                    return Err(Error::Dimension(format!("{rows}x{cols} is not square")));
                }
                header = Some((rows, cols));
            }
            Some((n, _)) => {
                if f.len() < 3 {
                    return Err(bad());
                }
                let i: usize = f[0].parse().map_err(|_| bad())?;
                let j: usize = f[1].parse().map_err(|_| bad())?;
                let v: f64 = f[2].parse().map_err(|_| bad())?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(bad());
                }
                t.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    t.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (n, _) = header.ok_or_else(|| Error::Parse("missing size line".into()))?;
    SparseMatrix::from_triplets(n, &t)
}

pub fn load_matrix_market(path: &Path) -> Result<SparseRealMatrix> {
    let f = std::fs::File::open(path)?;
    read_matrix_market(std::io::BufReader::new(f))
}

pub fn save_matrix_market(a: &SparseRealMatrix, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_matrix_market(a, std::io::BufWriter::new(f))
}

/// Euclidean norm of a real slice.
pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean norm of a generic slice.
pub fn norm2_s<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.modulus().powi(2)).sum::<f64>().sqrt()
}
