//! Exact diagonalization of the finite-N Dicke Hamiltonian
//!
//! ```text
//! H/ħ = ω_a a†a + ω_b (S_z + N/2) + (2g/√N)(a† + a) S_x
//! ```
//!
//! in the product basis `|n⟩ ⊗ |k⟩`, where `n < M` counts photons and
//! `k = S_z + N/2 ∈ 0..=N` counts atomic excitations. The ground state is
//! found with Lanczos (full reorthogonalization, restarted from the Ritz
//! vector). Quadrature variances use `a` for the photon and `S₋/√N` for
//! the collective atomic mode, the leading-order Holstein–Primakoff
//! image of `b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bogoliubov::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg::{dot, jacobi_eigen, norm};
use crate::model::ModelParams;
use crate::scalar::Real;
use crate::squeezing::minimize;

pub const DEFAULT_MAX_DIM: usize = 200_000;
/// Largest population allowed in the two highest Fock layers.
pub const CUTOFF_POPULATION_TOL: f64 = 1e-8;

const PARALLEL_MATVEC_DIM: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdConfig {
    pub n_atoms: usize,
    /// Fock states `0..photon_cutoff`.
    pub photon_cutoff: usize,
    pub lanczos_dim: usize,
    /// Bound on the Ritz residual `‖H x − θ x‖`.
    pub tol: f64,
    pub max_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl EdConfig {
    pub fn new(n_atoms: usize, photon_cutoff: usize) -> Result<Self> {
        let cfg = Self {
            n_atoms,
            photon_cutoff,
            lanczos_dim: 120,
            tol: 1e-10,
            max_dim: DEFAULT_MAX_DIM,
            max_restarts: 60,
            seed: 0x5eed,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        self.photon_cutoff * (self.n_atoms + 1)
    }

    fn check(&self) -> Result<()> {
        if self.n_atoms < 1 {
            return Err(Error::InvalidParameter("n_atoms must be at least 1".into()));
        }
        if self.photon_cutoff < 2 {
            return Err(Error::InvalidParameter(
                "photon_cutoff must be at least 2".into(),
            ));
        }
        if !(2..=200).contains(&self.lanczos_dim) {
            return Err(Error::InvalidParameter(
                "lanczos_dim must lie in 2..=200".into(),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if self.dim() > self.max_dim {
            return Err(Error::DimensionCap {
                dim: self.dim(),
                cap: self.max_dim,
            });
        }
        Ok(())
    }

    fn index(&self, n: usize, k: usize) -> usize {
        n * (self.n_atoms + 1) + k
    }
}

/// Real symmetric matrix in compressed sparse row form.
#[derive(Debug, Clone)]
pub struct SparseSymmetric<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseSymmetric<T> {
    fn from_rows(rows: Vec<Vec<(usize, T)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => T::zero(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .all(|i| self.get(self.cols[i], r) == self.values[i])
        })
    }

    fn row_dot(&self, r: usize, x: &[T]) -> T {
        (self.row_ptr[r]..self.row_ptr[r + 1])
            .fold(T::zero(), |s, i| s + self.values[i] * x[self.cols[i]])
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        if self.dim >= PARALLEL_MATVEC_DIM {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(r, out)| *out = self.row_dot(r, x));
        } else {
            for (r, out) in y.iter_mut().enumerate() {
                *out = self.row_dot(r, x);
            }
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.dim * self.dim];
        for r in 0..self.dim {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                d[r * self.dim + self.cols[i]] = self.values[i];
            }
        }
        d
    }
}

/// `⟨k+1|S₊|k⟩ = √((N − k)(k + 1))`.
fn raise_element<T: Real>(n_atoms: usize, k: usize) -> T {
    T::lit(((n_atoms - k) * (k + 1)) as f64).sqrt()
}

pub fn build_hamiltonian<T: Real>(
    p: &ModelParams<T>,
    cfg: &EdConfig,
) -> Result<SparseSymmetric<T>> {
    cfg.check()?;
    let (m, n_atoms) = (cfg.photon_cutoff, cfg.n_atoms);
    let coupling = p.g() / T::lit(n_atoms as f64).sqrt();
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::with_capacity(5); cfg.dim()];
    for n in 0..m {
        for k in 0..=n_atoms {
            let i = cfg.index(n, k);
            let diag = p.omega_a() * T::lit(n as f64) + p.omega_b() * T::lit(k as f64);
            rows[i].push((i, diag));
            if n + 1 == m {
                continue;
            }
            // (g/√N)(a + a†)(S₊ + S₋): couple |n,k⟩ with |n+1,k±1⟩
            let photon = T::lit((n + 1) as f64).sqrt();
            let mut link = |k2: usize, spin: T| {
                let j = cfg.index(n + 1, k2);
                let v = coupling * photon * spin;
                if v == T::zero() {
                    return;
                }
                rows[i].push((j, v));
                rows[j].push((i, v));
            };
            if k < n_atoms {
                link(k + 1, raise_element(n_atoms, k));
            }
            if k > 0 {
                link(k - 1, raise_element(n_atoms, k - 1));
            }
        }
    }
    Ok(SparseSymmetric::from_rows(rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct EdResult<T> {
    /// Ground-state energy per atom.
    pub energy: T,
    /// Covariance of `(x_a, p_a, x_b, p_b)` with `b → S₋/√N`.
    pub covariance: CovarianceMatrix<T>,
    /// `⟨a⟩/√N`.
    pub mean_a: T,
    /// `⟨S_x⟩/N`.
    pub mean_sx: T,
    /// Population of the two highest photon layers.
    pub cutoff_population: T,
    pub restarts: usize,
    pub residual: T,
}

impl<T: Real> EdResult<T> {
    /// Minimum quadrature variance over the two-mode family.
    pub fn var_min(&self) -> T {
        minimize(&self.covariance).var_min
    }
}

struct GroundPair<T> {
    value: T,
    vector: Vec<T>,
    residual: T,
    restarts: usize,
}

fn lanczos_ground<T: Real>(h: &SparseSymmetric<T>, cfg: &EdConfig) -> Result<GroundPair<T>> {
    let dim = h.dim();
    let krylov = cfg.lanczos_dim.min(dim);
    let tol = T::lit(cfg.tol);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start: Vec<T> = (0..dim).map(|_| T::lit(rng.gen::<f64>() - 0.5)).collect();
    let mut last_residual = T::infinity();

    for restart in 0..=cfg.max_restarts {
        let n0 = norm(&start);
        start.iter_mut().for_each(|x| *x = *x / n0);
        let mut basis: Vec<Vec<T>> = vec![start.clone()];
        let mut alphas: Vec<T> = Vec::with_capacity(krylov);
        let mut betas: Vec<T> = Vec::with_capacity(krylov);
        let mut w = vec![T::zero(); dim];
        let mut exhausted = false;

        for j in 0..krylov {
            h.matvec(&basis[j], &mut w);
            let a = dot(&basis[j], &w);
            alphas.push(a);
            // two passes of Gram–Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(wi, &vi)| *wi = *wi - c * vi);
                }
            }
            let b = norm(&w);
            if b <= T::epsilon() * T::lit(100.0) * a.abs().max(T::one()) {
                exhausted = true;
                break;
            }
            if j + 1 == krylov {
                betas.push(b);
                break;
            }
            let next: Vec<T> = w.iter().map(|&x| x / b).collect();
            if dot(&next, &basis[0]).abs() > T::lit(1e-8) {
                // orthogonality lost; restart from the current Ritz vector
                betas.push(b);
                break;
            }
            betas.push(b);
            basis.push(next);
        }

        let m = alphas.len();
        let mut tri = vec![T::zero(); m * m];
        for i in 0..m {
            tri[i * m + i] = alphas[i];
            if i + 1 < m {
                tri[i * m + i + 1] = betas[i];
                tri[(i + 1) * m + i] = betas[i];
            }
        }
        let eig = jacobi_eigen(&tri, m);
        let theta = eig.values[0];
        let y = &eig.vectors[0];
        let mut ritz = vec![T::zero(); dim];
        for (coef, v) in y.iter().zip(&basis) {
            ritz.iter_mut()
                .zip(v)
                .for_each(|(r, &vi)| *r = *r + *coef * vi);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x = *x / rn);

        h.matvec(&ritz, &mut w);
        let residual = w
            .iter()
            .zip(&ritz)
            .fold(T::zero(), |s, (&hx, &x)| {
                let r = hx - theta * x;
                s + r * r
            })
            .sqrt();
        last_residual = residual;
        if residual < tol || (exhausted && residual < T::lit(1e3) * tol) {
            return Ok(GroundPair {
                value: theta,
                vector: ritz,
                residual,
                restarts: restart,
            });
        }
        start = ritz;
    }
    Err(Error::NotConverged {
        restarts: cfg.max_restarts,
        residual: last_residual.to_f64_lossy(),
    })
}

/// Lowest eigenpair of `h` and the fluctuation observables on it.
pub fn ground_state<T: Real>(h: &SparseSymmetric<T>, cfg: &EdConfig) -> Result<EdResult<T>> {
    cfg.check()?;
    if h.dim() != cfg.dim() {
        return Err(Error::InvalidParameter(format!(
            "matrix dimension {} does not match config dimension {}",
            h.dim(),
            cfg.dim()
        )));
    }
    let pair = lanczos_ground(h, cfg)?;
    let psi = &pair.vector;
    let (m, n_atoms) = (cfg.photon_cutoff, cfg.n_atoms);
    let big_n = T::lit(n_atoms as f64);
    let root_n = big_n.sqrt();

    let top: T = (m - 2..m)
        .flat_map(|n| (0..=n_atoms).map(move |k| (n, k)))
        .fold(T::zero(), |s, (n, k)| {
            let v = psi[cfg.index(n, k)];
            s + v * v
        });
    if top > T::lit(CUTOFF_POPULATION_TOL) {
        return Err(Error::CutoffInadequate(top.to_f64_lossy()));
    }

    // Real-valued images: x_a = (a + a†)/2, P_a = (a − a†)/2 so that
    // p_a = P_a / i; likewise for S₋/√N.
    let dim = cfg.dim();
    let mut xa = vec![T::zero(); dim];
    let mut pa = vec![T::zero(); dim];
    let mut xb = vec![T::zero(); dim];
    let mut pb = vec![T::zero(); dim];
    let half = T::half();
    for n in 0..m {
        for k in 0..=n_atoms {
            let i = cfg.index(n, k);
            let c = psi[i];
            if c == T::zero() {
                continue;
            }
            // a|n⟩ = √n |n−1⟩, a†|n⟩ = √(n+1) |n+1⟩
            if n > 0 {
                let v = half * T::lit(n as f64).sqrt() * c;
                let j = cfg.index(n - 1, k);
                xa[j] = xa[j] + v;
                pa[j] = pa[j] + v;
            }
            if n + 1 < m {
                let v = half * T::lit((n + 1) as f64).sqrt() * c;
                let j = cfg.index(n + 1, k);
                xa[j] = xa[j] + v;
                pa[j] = pa[j] - v;
            }
            if k > 0 {
                let v = half * raise_element::<T>(n_atoms, k - 1) / root_n * c;
                let j = cfg.index(n, k - 1);
                xb[j] = xb[j] + v;
                pb[j] = pb[j] + v;
            }
            if k < n_atoms {
                let v = half * raise_element::<T>(n_atoms, k) / root_n * c;
                let j = cfg.index(n, k + 1);
                xb[j] = xb[j] + v;
                pb[j] = pb[j] - v;
            }
        }
    }
    let mean_xa = dot(psi, &xa);
    let mean_xb = dot(psi, &xb);
    // ⟨p_i p_j⟩ = ⟨P_i ψ, P_j ψ⟩ for real ψ; ⟨{x, p}⟩ vanishes.
    let mut sigma = [[T::zero(); 4]; 4];
    let xs = [(&xa, mean_xa), (&xb, mean_xb)];
    let ps = [&pa, &pb];
    for i in 0..2 {
        for j in 0..2 {
            sigma[2 * i][2 * j] = dot(xs[i].0, xs[j].0) - xs[i].1 * xs[j].1;
            sigma[2 * i + 1][2 * j + 1] = dot(ps[i], ps[j]);
        }
    }
    // ⟨S_x⟩/N = ⟨x_b⟩/√N
    Ok(EdResult {
        energy: pair.value / big_n,
        covariance: CovarianceMatrix { sigma },
        mean_a: mean_xa / root_n,
        mean_sx: mean_xb / root_n,
        cutoff_population: top,
        restarts: pair.restarts,
        residual: pair.residual,
    })
}

/// Builds and solves in one call.
pub fn solve<T: Real>(p: &ModelParams<T>, cfg: &EdConfig) -> Result<EdResult<T>> {
    let h = build_hamiltonian(p, cfg)?;
    ground_state(&h, cfg)
}
