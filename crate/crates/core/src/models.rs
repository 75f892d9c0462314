//! Benchmark problems: the six single-degree-of-freedom cases with closed-form
//! solutions, the plane-stress rod and a small plane-strain half-space.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::exec;
use crate::forcing::Signal;
use crate::linalg::{SparseMatrix, SparseRealMatrix};
use crate::system::{Force, SecondOrderSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdofLoad {
    None,
    F1,
    F2,
}

/// One row of the SDOF parameter table (`m = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdofCase {
    pub id: usize,
    pub omega: f64,
    pub zeta: f64,
    pub load: SdofLoad,
    pub u0: f64,
    pub v0: f64,
}

impl SdofCase {
    pub fn table(id: usize) -> Result<Self> {
        let w = 2.0 * PI;
        let (zeta, load, u0, v0) = match id {
            1 => (0.0, SdofLoad::None, 1.0, 0.0),
            2 => (0.0, SdofLoad::None, 0.0, 2.0 * PI),
            3 => (0.05, SdofLoad::None, 1.0, 0.0),
            4 => (0.05, SdofLoad::None, 0.0, 2.0 * PI),
            5 => (0.0, SdofLoad::F1, 2.0, PI / 3.0),
            6 => (0.0, SdofLoad::F2, 2.0, PI / 3.0),
            _ => return Err(Error::Invalid(format!("SDOF case must be 1..=6, got {id}"))),
        };
        Ok(Self { id, omega: w, zeta, load, u0, v0 })
    }

    pub fn all() -> Vec<Self> {
        (1..=6).map(|i| Self::table(i).unwrap()).collect()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn signal(&self) -> Option<Signal> {
        match self.load {
            SdofLoad::None => None,
            SdofLoad::F1 => Some(Signal::f1()),
            SdofLoad::F2 => Some(Signal::Triangle),
        }
    }
}

/// Free undamped or underdamped response `(u, u')`.
pub fn free_response(omega: f64, zeta: f64, u0: f64, v0: f64, t: f64) -> (f64, f64) {
    let wd = omega * (1.0 - zeta * zeta).sqrt();
    let a = u0;
    let b = (v0 + zeta * omega * u0) / wd;
    let (s, c) = (wd * t).sin_cos();
    let e = (-zeta * omega * t).exp();
    let u = e * (a * c + b * s);
    let du = e * (-a * wd * s + b * wd * c) - zeta * omega * u;
    (u, du)
}

pub fn sdof_system(case: &SdofCase) -> Result<SecondOrderSystem> {
    let m = SparseMatrix::from_triplets(1, &[(0, 0, 1.0)])?;
    let c = SparseMatrix::from_triplets(1, &[(0, 0, 2.0 * case.zeta * case.omega)])?;
    let k = SparseMatrix::from_triplets(1, &[(0, 0, case.omega * case.omega)])?;
    let force = match case.signal() {
        None => Force::None,
        Some(signal) => Force::Separable { load: vec![1.0], signal },
    };
    SecondOrderSystem::new(m, c, k, force, vec![case.u0], vec![case.v0])
}

/// Closed-form `(u, u')`; case 6 is assembled piecewise over the load ramps.
pub fn sdof_analytic(case: &SdofCase, t: f64) -> (f64, f64) {
    match case.load {
        SdofLoad::None => free_response(case.omega, case.zeta, case.u0, case.v0, t),
        SdofLoad::F1 => {
            let Signal::Harmonic { a1, w1, a2, w2 } = Signal::f1() else { unreachable!() };
            let w = case.omega;
            let c1 = a1 / (w * w - w1 * w1);
            let c2 = a2 / (w * w - w2 * w2);
            let (uh, vh) = free_response(w, 0.0, case.u0 - c1, case.v0 - c2 * w2, t);
            let u = uh + c1 * (w1 * t).cos() + c2 * (w2 * t).sin();
            let v = vh - c1 * w1 * (w1 * t).sin() + c2 * w2 * (w2 * t).cos();
            (u, v)
        }
        SdofLoad::F2 => sdof_case6_reference(t),
    }
}

/// Response of case 6 from the exact solution of each linear load segment:
/// on `f = a + b t` the motion is `(a + b t)/w^2` plus free vibration.
pub fn sdof_case6_reference(t: f64) -> (f64, f64) {
    let case = SdofCase::table(6).unwrap();
    let w2 = case.omega * case.omega;
    // (start, a, b) for f = a + b t on [start, next start).
    let segs = [(0.0, 0.0, 4.0), (0.25, 2.0, -4.0), (0.75, -4.0, 4.0), (1.0, 0.0, 0.0)];
    let (mut u, mut v) = (case.u0, case.v0);
    for (i, &(t0, a, b)) in segs.iter().enumerate() {
        let t1 = segs.get(i + 1).map_or(f64::INFINITY, |s| s.0);
        let tau = t.min(t1) - t0;
        let up = |s: f64| (a + b * s) / w2;
        let (uh, vh) = free_response(case.omega, 0.0, u - up(t0), v - b / w2, tau);
        u = uh + up(t0 + tau);
        v = vh + b / w2;
        if t <= t1 {
            break;
        }
    }
    (u, v)
}

/// Dense random SPD system of size `n`: `M = B B^T + n I`, `K = G G^T + I`,
/// optional Rayleigh damping `C = 0.02 M + 0.001 K`, random initial state.
/// The same seed always gives the same system.
pub fn random_system(n: usize, damped: bool, seed: u64) -> Result<SecondOrderSystem> {
    if n == 0 {
        return Err(Error::Invalid("random system needs n >= 1".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut draw = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.random_range(-1.0..1.0)).collect() };
    let gram = |a: &[f64], shift: f64| -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut v: f64 = (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum();
                if i == j {
                    v += shift;
                }
                t.push((i, j, v));
            }
        }
        t
    };
    let m = SparseMatrix::from_triplets(n, &gram(&draw(n * n), n as f64))?;
    let k = SparseMatrix::from_triplets(n, &gram(&draw(n * n), 1.0))?;
    let c = if damped {
        SparseMatrix::combine(&[(0.02, &m), (0.001, &k)])?
    } else {
        SparseMatrix::zeros(n)
    };
    let u0 = draw(n);
    let v0 = draw(n);
    SecondOrderSystem::new(m, c, k, Force::None, u0, v0)
}

/// Courant number `c dt / dx`.
pub fn cfl_number(c: f64, dt: f64, dx: f64) -> f64 {
    c * dt / dx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Stress,
    Strain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub e: f64,
    pub nu: f64,
    pub rho: f64,
    pub plane: Plane,
    pub thickness: f64,
}

impl Material {
    /// Row-major 3x3 constitutive matrix for `[e_xx, e_yy, g_xy]`.
    pub fn elasticity(&self) -> [[f64; 3]; 3] {
        let (e, nu) = (self.e, self.nu);
        match self.plane {
            Plane::Stress => {
                let f = e / (1.0 - nu * nu);
                [[f, f * nu, 0.0], [f * nu, f, 0.0], [0.0, 0.0, f * (1.0 - nu) / 2.0]]
            }
            Plane::Strain => {
                let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
                [
                    [f * (1.0 - nu), f * nu, 0.0],
                    [f * nu, f * (1.0 - nu), 0.0],
                    [0.0, 0.0, f * (1.0 - 2.0 * nu) / 2.0],
                ]
            }
        }
    }
}

/// Bilinear quadrilateral with counterclockwise nodes; dofs `[u1x, u1y, u2x, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadElement {
    pub nodes: [[f64; 2]; 4],
    /// Row-major 8x8.
    pub stiffness: Vec<f64>,
    pub mass: Vec<f64>,
}

const XI: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

/// Element stiffness and consistent mass by 2x2 Gauss quadrature.
pub fn quad_element(nodes: [[f64; 2]; 4], mat: &Material) -> QuadElement {
    let d = mat.elasticity();
    let g = 1.0 / 3f64.sqrt();
    let mut k = vec![0.0; 64];
    let mut m = vec![0.0; 64];
    for &(xi, eta) in &[(-g, -g), (g, -g), (g, g), (-g, g)] {
        let mut n = [0.0; 4];
        let mut dn = [[0.0; 2]; 4];
        for a in 0..4 {
            n[a] = 0.25 * (1.0 + XI[a] * xi) * (1.0 + ETA[a] * eta);
            dn[a] = [0.25 * XI[a] * (1.0 + ETA[a] * eta), 0.25 * ETA[a] * (1.0 + XI[a] * xi)];
        }
        let mut j = [[0.0; 2]; 2];
        for a in 0..4 {
            for r in 0..2 {
                for c in 0..2 {
                    j[r][c] += dn[a][r] * nodes[a][c];
                }
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
        let mut b = [[0.0; 8]; 3];
        for a in 0..4 {
            let dx = inv[0][0] * dn[a][0] + inv[0][1] * dn[a][1];
            let dy = inv[1][0] * dn[a][0] + inv[1][1] * dn[a][1];
            b[0][2 * a] = dx;
            b[1][2 * a + 1] = dy;
            b[2][2 * a] = dy;
            b[2][2 * a + 1] = dx;
        }
        let w = det * mat.thickness;
        for r in 0..8 {
            for c in 0..8 {
                let mut s = 0.0;
                for p in 0..3 {
                    for q in 0..3 {
                        s += b[p][r] * d[p][q] * b[q][c];
                    }
                }
                k[r * 8 + c] += w * s;
            }
        }
        for a in 0..4 {
            for bb in 0..4 {
                let v = w * mat.rho * n[a] * n[bb];
                m[(2 * a) * 8 + 2 * bb] += v;
                m[(2 * a + 1) * 8 + 2 * bb + 1] += v;
            }
        }
    }
    QuadElement { nodes, stiffness: k, mass: m }
}

/// Assembled finite-element model with constrained dofs eliminated.
#[derive(Debug, Clone)]
pub struct FeModel {
    pub sys: SecondOrderSystem,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    /// Node coordinates, node `i * (ny + 1) + j` at column `i`, row `j`.
    pub nodes: Vec<[f64; 2]>,
    /// Global dof `2 * node + comp` to free dof.
    pub free_index: Vec<Option<usize>>,
    pub material: Material,
}

impl FeModel {
    /// Dofs before constraints are eliminated.
    pub fn n_dof_total(&self) -> usize {
        self.free_index.len()
    }

    pub fn n_free(&self) -> usize {
        self.sys.dim()
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 1) + j
    }

    /// Free dof of component `comp` at the node nearest `(x, y)`, with the
    /// snapped coordinates.
    pub fn nearest_dof(&self, x: f64, y: f64, comp: usize) -> Result<(usize, [f64; 2])> {
        let i = ((x / self.lx) * self.nx as f64).round().clamp(0.0, self.nx as f64) as usize;
        let j = ((y / self.ly) * self.ny as f64).round().clamp(0.0, self.ny as f64) as usize;
        let node = self.node(i, j);
        let dof = self.free_index[2 * node + comp]
            .ok_or_else(|| Error::Invalid(format!("dof {comp} of node ({i}, {j}) is constrained")))?;
        Ok((dof, self.nodes[node]))
    }
}

/// Structured `nx x ny` mesh on `[0, lx] x [0, ly]`.
#[derive(Debug, Clone)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub material: Material,
}

impl MeshSpec {
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let mut v = Vec::with_capacity((self.nx + 1) * (self.ny + 1));
        for i in 0..=self.nx {
            for j in 0..=self.ny {
                v.push([self.lx * i as f64 / self.nx as f64, self.ly * j as f64 / self.ny as f64]);
            }
        }
        v
    }

    /// Full (unconstrained) stiffness and mass as triplet lists.
    pub fn assemble_full(&self) -> (Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>) {
        let nodes = self.nodes();
        let ny1 = self.ny + 1;
        let elems: Vec<(usize, usize)> =
            (0..self.nx).flat_map(|i| (0..self.ny).map(move |j| (i, j))).collect();
        let mat = self.material;
        let computed = exec::map(&elems, |&(i, j)| {
            let ids = [i * ny1 + j, (i + 1) * ny1 + j, (i + 1) * ny1 + j + 1, i * ny1 + j + 1];
            let xy = [nodes[ids[0]], nodes[ids[1]], nodes[ids[2]], nodes[ids[3]]];
            (ids, quad_element(xy, &mat))
        });
        let mut kt = Vec::with_capacity(computed.len() * 64);
        let mut mt = Vec::with_capacity(computed.len() * 64);
        for (ids, el) in &computed {
            for a in 0..8 {
                for b in 0..8 {
                    let ga = 2 * ids[a / 2] + a % 2;
                    let gb = 2 * ids[b / 2] + b % 2;
                    kt.push((ga, gb, el.stiffness[a * 8 + b]));
                    mt.push((ga, gb, el.mass[a * 8 + b]));
                }
            }
        }
        (kt, mt)
    }

    /// Eliminates the dofs flagged in `fixed` and attaches `load * signal(t)`.
    pub fn build(&self, fixed: &[bool], load: &[f64], signal: Signal) -> Result<FeModel> {
        let nodes = self.nodes();
        let ntot = 2 * nodes.len();
        if fixed.len() != ntot || load.len() != ntot {
            return Err(Error::Dimension(format!("expected {ntot} dof flags and loads")));
        }
        let mut free_index = vec![None; ntot];
        let mut nf = 0;
        for (g, f) in fixed.iter().enumerate() {
            if !f {
                free_index[g] = Some(nf);
                nf += 1;
            }
        }
        let (kt, mt) = self.assemble_full();
        let reduce = |t: &[(usize, usize, f64)]| -> Result<SparseRealMatrix> {
            let r: Vec<(usize, usize, f64)> = t
                .iter()
                .filter_map(|&(i, j, v)| Some((free_index[i]?, free_index[j]?, v)))
                .collect();
            SparseMatrix::from_triplets(nf, &r)
        };
        let k = reduce(&kt)?;
        let m = reduce(&mt)?;
        let c = SparseMatrix::zeros(nf);
        let mut f = vec![0.0; nf];
        for (g, l) in load.iter().enumerate() {
            if let Some(i) = free_index[g] {
                f[i] = *l;
            }
        }
        let force = if f.iter().all(|v| *v == 0.0) { Force::None } else { Force::Separable { load: f, signal } };
        let sys = SecondOrderSystem::new(m, c, k, force, vec![0.0; nf], vec![0.0; nf])?;
        Ok(FeModel {
            sys,
            nx: self.nx,
            ny: self.ny,
            lx: self.lx,
            ly: self.ly,
            nodes,
            free_index,
            material: self.material,
        })
    }
}

/// Plane-stress rod with `E = 100`, `nu = 0`, `rho = 1`, `L = 1`, `h = 0.2`,
/// loaded on its right edge by a sine burst.
#[derive(Debug, Clone)]
pub struct RodModel {
    pub nx: usize,
    pub ny: usize,
    pub signal: Signal,
    /// Also fixes the vertical dof at the origin, removing the rigid mode.
    pub anchor_y: bool,
}

pub const ROD_LENGTH: f64 = 1.0;
pub const ROD_HEIGHT: f64 = 0.2;
pub const ROD_WAVE_SPEED: f64 = 10.0;
/// Observation point on the rod centerline.
pub const ROD_OBSERVATION: [f64; 2] = [0.5, 0.1];

impl RodModel {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nx * 2 != ny * 10 {
            return Err(Error::Invalid(format!(
                "rod mesh must have square elements (nx = 5 ny), got {nx}x{ny}"
            )));
        }
        Ok(Self { nx, ny, signal: Signal::sine_burst(), anchor_y: false })
    }

    pub fn material() -> Material {
        Material { e: 100.0, nu: 0.0, rho: 1.0, plane: Plane::Stress, thickness: 1.0 }
    }

    pub fn spec(&self) -> MeshSpec {
        MeshSpec { nx: self.nx, ny: self.ny, lx: ROD_LENGTH, ly: ROD_HEIGHT, material: Self::material() }
    }

    /// Edge load of unit resultant, distributed consistently on the right edge.
    pub fn edge_load(&self) -> Vec<f64> {
        let ny1 = self.ny + 1;
        let mut load = vec![0.0; 2 * (self.nx + 1) * ny1];
        let q = 1.0 / ROD_HEIGHT;
        let le = ROD_HEIGHT / self.ny as f64;
        for j in 0..self.ny {
            for node in [self.nx * ny1 + j, self.nx * ny1 + j + 1] {
                load[2 * node] += 0.5 * q * le;
            }
        }
        load
    }

    pub fn build(&self) -> Result<FeModel> {
        let ny1 = self.ny + 1;
        let mut fixed = vec![false; 2 * (self.nx + 1) * ny1];
        for j in 0..=self.ny {
            fixed[2 * j] = true;
        }
        if self.anchor_y {
            fixed[1] = true;
        }
        self.spec().build(&fixed, &self.edge_load(), self.signal.clone())
    }
}

pub fn build_rod(nx: usize, ny: usize) -> Result<FeModel> {
    RodModel::new(nx, ny)?.build()
}

/// Square plane-strain block, clamped at bottom and right, `u_x = 0` on the
/// left, with a vertical Ricker point load at the top-left corner.
pub fn build_lamb_reduced(ne: usize) -> Result<FeModel> {
    if ne == 0 {
        return Err(Error::Invalid("mesh must have at least one element".into()));
    }
    let l = 320.0;
    let spec = MeshSpec {
        nx: ne,
        ny: ne,
        lx: l,
        ly: l,
        material: Material { e: 20e9, nu: 0.33, rho: 2200.0, plane: Plane::Strain, thickness: 1.0 },
    };
    let ny1 = ne + 1;
    let ntot = 2 * (ne + 1) * ny1;
    let mut fixed = vec![false; ntot];
    for i in 0..=ne {
        for j in 0..=ne {
            let node = i * ny1 + j;
            if j == 0 || i == ne {
                fixed[2 * node] = true;
                fixed[2 * node + 1] = true;
            }
            if i == 0 {
                fixed[2 * node] = true;
            }
        }
    }
    let mut load = vec![0.0; ntot];
    load[2 * ne + 1] = -1.0;
    spec.build(&fixed, &load, Signal::ricker())
}
