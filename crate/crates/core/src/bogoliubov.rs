//! Bogoliubov diagonalization of the two-mode fluctuation Hamiltonian.
//!
//! An eigenmode `p = w a + x b + y a† + z b†` obeys `[p, H] = Ω p`, which
//! is the 4×4 problem `M (w, x, y, z)ᵀ = Ω (w, x, y, z)ᵀ` with
//!
//! ```text
//!     ⎡ ω_a   g̃        0     −g̃        ⎤
//! M = ⎢ g̃     ω̃_b+2D̃   −g̃    −2D̃       ⎥  =  ⎡  A   B ⎤
//!     ⎢ 0     g̃        −ω_a  −g̃        ⎥     ⎣ −B  −A ⎦
//!     ⎣ g̃     2D̃       −g̃    −ω̃_b−2D̃   ⎦
//! ```
//!
//! Writing `s = (w + y, x + z)` and `d = (w − y, x − z)` the block form
//! reduces to `(A − B)(A + B) s = Ω² s` and `d = (A + B) s / Ω`, so the
//! spectrum is `{±Ω₋, ±Ω₊}` by construction and the squared frequencies
//! are the roots of a real quadratic.
//!
//! The vectors `s` and `d` are also the quadrature weights of the mode:
//! `p = s·(x_a, x_b) + i d·(p_a, p_b)` with `x = (a + a†)/2`,
//! `p = (a − a†)/(2i)`. The ground-state covariance follows directly,
//! `Σ_xx = Σ_k d_k d_kᵀ / 4` and `Σ_pp = Σ_k s_k s_kᵀ / 4`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, mat4_mul, transpose4, SymEigen};
use crate::meanfield::MeanField;
use crate::model::ModelParams;
use crate::scalar::Real;

/// `Ω₋ < DEFAULT_OMEGA_CRIT · ω_a` marks the lower mode as critical.
pub const DEFAULT_OMEGA_CRIT: f64 = 1e-9;

pub type BogoliubovMatrix<T> = [[T; 4]; 4];

/// Coefficients of `p = w a + x b + y a† + z b†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCoefficients<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> ModeCoefficients<T> {
    /// `|w|² + |x|² − |y|² − |z|²`, equal to `[p, p†]`.
    pub fn symplectic_norm(&self) -> T {
        self.w * self.w + self.x * self.x - self.y * self.y - self.z * self.z
    }

    /// `w w' + x x' − y y' − z z'`, equal to `[p, p'†]`.
    pub fn symplectic_product(&self, other: &Self) -> T {
        self.w * other.w + self.x * other.x - self.y * other.y - self.z * other.z
    }

    /// Position weights `s = (w + y, x + z)`.
    pub fn position_weights(&self) -> [T; 2] {
        [self.w + self.y, self.x + self.z]
    }

    /// Momentum weights `d = (w − y, x − z)`.
    pub fn momentum_weights(&self) -> [T; 2] {
        [self.w - self.y, self.x - self.z]
    }

    fn from_weights(s: [T; 2], d: [T; 2]) -> Self {
        let h = T::half();
        let mut c = Self {
            w: h * (s[0] + d[0]),
            x: h * (s[1] + d[1]),
            y: h * (s[0] - d[0]),
            z: h * (s[1] - d[1]),
        };
        if c.w < T::zero() || (c.w == T::zero() && c.x < T::zero()) {
            c = Self {
                w: -c.w,
                x: -c.x,
                y: -c.y,
                z: -c.z,
            };
        }
        c
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogoliubovModes<T> {
    pub omega_minus: T,
    pub omega_plus: T,
    pub coeffs_minus: ModeCoefficients<T>,
    pub coeffs_plus: ModeCoefficients<T>,
    /// `Ω₋` vanished; `coeffs_minus` then holds the unit-norm zero mode
    /// `(d, −d)` and is not symplectically normalized.
    pub critical_flag: bool,
}

/// The eigenvalue matrix for the fluctuation Hamiltonian of `mf`.
pub fn build_matrix<T: Real>(mf: &MeanField<T>, p: &ModelParams<T>) -> BogoliubovMatrix<T> {
    let c = &mf.coeffs;
    let wa = p.omega_a();
    let g = c.g_tilde;
    let d2 = T::two() * c.d_tilde;
    let wb = c.omega_b_tilde + d2;
    let z = T::zero();
    [
        [wa, g, z, -g],
        [g, wb, -g, -d2],
        [z, g, -wa, -g],
        [g, d2, -g, -wb],
    ]
}

type Mat2<T> = [[T; 2]; 2];

fn mat2_vec<T: Real>(m: &Mat2<T>, v: [T; 2]) -> [T; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn dot2<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

/// Null vector of the 2×2 matrix `k − λ I`, or `None` when it vanishes.
fn null_vector<T: Real>(k: &Mat2<T>, lambda: T) -> Option<[T; 2]> {
    let r0 = [k[0][1], -(k[0][0] - lambda)];
    let r1 = [-(k[1][1] - lambda), k[1][0]];
    let (n0, n1) = (dot2(r0, r0), dot2(r1, r1));
    let v = if n0 >= n1 { r0 } else { r1 };
    let n = dot2(v, v).sqrt();
    (n > T::zero()).then(|| [v[0] / n, v[1] / n])
}

/// Solves the eigenvalue problem in closed form.
///
/// Returns `Ω₋ ≤ Ω₊` with symplectically normalized coefficients. When
/// `Ω₋ < eps_crit · M[0][0]` the lower mode is flagged critical.
pub fn diagonalize<T: Real>(m: &BogoliubovMatrix<T>, eps_crit: T) -> Result<BogoliubovModes<T>> {
    let scale = m
        .iter()
        .flatten()
        .fold(T::zero(), |acc, v| acc.max(v.abs()));
    if !scale.is_finite() {
        return Err(Error::MalformedMatrix("non-finite entries".into()));
    }
    let tol = T::lit(1e-12) * scale;
    let a: Mat2<T> = [[m[0][0], m[0][1]], [m[1][0], m[1][1]]];
    let b: Mat2<T> = [[m[0][2], m[0][3]], [m[1][2], m[1][3]]];
    for i in 0..2 {
        for j in 0..2 {
            let paired =
                (m[i + 2][j] + b[i][j]).abs() <= tol && (m[i + 2][j + 2] + a[i][j]).abs() <= tol;
            let symmetric = (a[i][j] - a[j][i]).abs() <= tol && (b[i][j] - b[j][i]).abs() <= tol;
            if !paired || !symmetric {
                return Err(Error::MalformedMatrix(
                    "eigenvalues do not come in ± pairs (block structure [[A, B], [-B, -A]] violated)"
                        .into(),
                ));
            }
        }
    }

    let sum: Mat2<T> = [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ];
    let diff: Mat2<T> = [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ];
    let det_sum = sum[0][0] * sum[1][1] - sum[0][1] * sum[1][0];
    if !(sum[0][0] > T::zero() && det_sum > T::zero()) {
        return Err(Error::MalformedMatrix(
            "A + B is not positive definite".into(),
        ));
    }
    // K = (A − B)(A + B)
    let mut k: Mat2<T> = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            k[i][j] = diff[i][0] * sum[0][j] + diff[i][1] * sum[1][j];
        }
    }
    let det_diff = diff[0][0] * diff[1][1] - diff[0][1] * diff[1][0];
    let det_k = det_diff * det_sum;
    let trace = k[0][0] + k[1][1];
    let split = k[0][0] - k[1][1];
    let disc = split * split + T::lit(4.0) * k[0][1] * k[1][0];
    let sq_tol = T::lit(1e-12) * trace.abs().max(T::one()) * trace.abs().max(T::one());
    if disc < -sq_tol {
        return Err(Error::MalformedMatrix("complex eigenfrequencies".into()));
    }
    let root = disc.max(T::zero()).sqrt();
    let upper_sq = T::half() * (trace + root);
    if !(upper_sq > T::zero()) {
        return Err(Error::MalformedMatrix("no positive eigenfrequency".into()));
    }
    // product-over-sum keeps Ω₋² accurate as it approaches zero
    let mut lower_sq = det_k / upper_sq;
    if lower_sq < T::zero() {
        if lower_sq < -sq_tol {
            return Err(Error::MalformedMatrix(
                "negative squared eigenfrequency (unstable quadratic form)".into(),
            ));
        }
        lower_sq = T::zero();
    }
    let omega_plus = upper_sq.sqrt();
    let omega_minus = lower_sq.sqrt();

    // Eigenvectors of K; in the degenerate case take a basis orthogonal
    // with respect to A + B.
    let degenerate = root <= T::epsilon() * trace.abs();
    let (s_minus, s_plus) = match (
        null_vector(&k, lower_sq).filter(|_| !degenerate),
        null_vector(&k, upper_sq).filter(|_| !degenerate),
    ) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            let e0 = [T::one(), T::zero()];
            let e1 = [T::zero(), T::one()];
            let proj = dot2(e0, mat2_vec(&sum, e1)) / dot2(e0, mat2_vec(&sum, e0));
            (e0, [e1[0] - proj * e0[0], e1[1] - proj * e0[1]])
        }
    };

    let normalized = |s: [T; 2], omega: T| -> ModeCoefficients<T> {
        let ss = mat2_vec(&sum, s);
        let q = dot2(s, ss);
        let fs = (omega / q).sqrt();
        let fd = T::one() / (omega * q).sqrt();
        ModeCoefficients::from_weights([s[0] * fs, s[1] * fs], [ss[0] * fd, ss[1] * fd])
    };

    let coeffs_plus = normalized(s_plus, omega_plus);
    let critical_flag = omega_minus < eps_crit * m[0][0].abs();
    let coeffs_minus = if critical_flag {
        let d = mat2_vec(&sum, s_minus);
        let n = (T::two() * dot2(d, d)).sqrt();
        ModeCoefficients::from_weights(
            [T::zero(), T::zero()],
            [T::two() * d[0] / n, T::two() * d[1] / n],
        )
    } else {
        normalized(s_minus, omega_minus)
    };

    Ok(BogoliubovModes {
        omega_minus,
        omega_plus,
        coeffs_minus,
        coeffs_plus,
        critical_flag,
    })
}

/// Ground-state covariance `Σ_ij = ⟨0|(v_i v_j + v_j v_i)/2|0⟩` over the
/// quadratures `v = (x_a, p_a, x_b, p_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceMatrix<T> {
    pub sigma: [[T; 4]; 4],
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn vacuum() -> Self {
        let mut sigma = [[T::zero(); 4]; 4];
        for (i, row) in sigma.iter_mut().enumerate() {
            row[i] = T::quarter();
        }
        Self { sigma }
    }

    pub fn quadratic_form(&self, u: &[T; 4]) -> T {
        let mut acc = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                acc = acc + u[i] * self.sigma[i][j] * u[j];
            }
        }
        acc
    }

    pub fn eigen(&self) -> SymEigen<T> {
        let flat: Vec<T> = self.sigma.iter().flatten().copied().collect();
        jacobi_eigen(&flat, 4)
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.sigma[i][j] - self.sigma[j][i]).abs() <= tol))
    }

    pub fn determinant(&self) -> T {
        det4(&self.sigma)
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)`; both are `1/4` for a pure state.
    ///
    /// `ν²` are the eigenvalues of `Σ^{1/2} Jᵀ Σ J Σ^{1/2}`, each twice.
    pub fn symplectic_eigenvalues(&self) -> (T, T) {
        let e = self.eigen();
        let mut root = [[T::zero(); 4]; 4];
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            let w = lam.max(T::zero()).sqrt();
            for i in 0..4 {
                for j in 0..4 {
                    root[i][j] = root[i][j] + w * v[i] * v[j];
                }
            }
        }
        let mut j = [[T::zero(); 4]; 4];
        for k in [0, 2] {
            j[k][k + 1] = T::one();
            j[k + 1][k] = -T::one();
        }
        let inner = mat4_mul(&transpose4(&j), &mat4_mul(&self.sigma, &j));
        let mut m = mat4_mul(&root, &mat4_mul(&inner, &root));
        for r in 0..4 {
            for c in 0..r {
                let avg = T::half() * (m[r][c] + m[c][r]);
                m[r][c] = avg;
                m[c][r] = avg;
            }
        }
        let flat: Vec<T> = m.iter().flatten().copied().collect();
        let nu2 = jacobi_eigen(&flat, 4).values;
        let lo = T::half() * (nu2[0] + nu2[1]);
        let hi = T::half() * (nu2[2] + nu2[3]);
        (lo.max(T::zero()).sqrt(), hi.max(T::zero()).sqrt())
    }

    pub fn is_pure(&self, tol: T) -> bool {
        let (lo, hi) = self.symplectic_eigenvalues();
        (lo - T::quarter()).abs() <= tol && (hi - T::quarter()).abs() <= tol
    }

    /// `(⟨0|p p†|0⟩, ⟨0|p† p|0⟩)` for the mode with the given coefficients.
    pub fn mode_occupations(&self, c: &ModeCoefficients<T>) -> (T, T) {
        let s = c.position_weights();
        let d = c.momentum_weights();
        let re = [s[0], T::zero(), s[1], T::zero()];
        let im = [T::zero(), d[0], T::zero(), d[1]];
        let sym = self.quadratic_form(&re) + self.quadratic_form(&im);
        let comm = T::half() * dot2(s, d);
        (sym + comm, sym - comm)
    }
}

fn det4<T: Real>(m: &[[T; 4]; 4]) -> T {
    let mut a = *m;
    let mut det = T::one();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = det * a[col][col];
        for r in (col + 1)..4 {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] = a[r][c] - f * a[col][c];
            }
        }
    }
    det
}

/// Ground-state covariance from the eigenmodes and `p±|0⟩ = 0`.
pub fn covariance<T: Real>(modes: &BogoliubovModes<T>) -> Result<CovarianceMatrix<T>> {
    if modes.critical_flag {
        return Err(Error::CriticalPoint);
    }
    let q = T::quarter();
    let mut sigma = [[T::zero(); 4]; 4];
    for c in [&modes.coeffs_minus, &modes.coeffs_plus] {
        let s = c.position_weights();
        let d = c.momentum_weights();
        for i in 0..2 {
            for j in 0..2 {
                sigma[2 * i][2 * j] = sigma[2 * i][2 * j] + q * d[i] * d[j];
                sigma[2 * i + 1][2 * j + 1] = sigma[2 * i + 1][2 * j + 1] + q * s[i] * s[j];
            }
        }
    }
    Ok(CovarianceMatrix { sigma })
}

/// Momentum block `Σ_pp` over `(p_a, p_b)` in the limit `Ω₋ → 0`.
///
/// The position block diverges there, while the momentum block stays
/// finite and becomes rank one: only the upper mode contributes.
pub fn critical_momentum_covariance<T: Real>(modes: &BogoliubovModes<T>) -> [[T; 2]; 2] {
    let s = modes.coeffs_plus.position_weights();
    let q = T::quarter();
    [
        [q * s[0] * s[0], q * s[0] * s[1]],
        [q * s[1] * s[0], q * s[1] * s[1]],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::solve_mean_field;
    use crate::model::{validate, DEFAULT_EPS_CRIT};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn modes_for(wa: f64, wb: f64, g: f64) -> BogoliubovModes<f64> {
        let p = validate(wa, wb, g).unwrap();
        let mf = solve_mean_field(&p, DEFAULT_EPS_CRIT);
        diagonalize(&build_matrix(&mf, &p), DEFAULT_OMEGA_CRIT).unwrap()
    }

    // Eigenvalues of a 4×4 matrix from its characteristic polynomial
    // (Faddeev–LeVerrier coefficients) and bisection on λ ≥ 0.
    fn char_poly_positive_roots(m: &BogoliubovMatrix<f64>) -> Vec<f64> {
        let n = 4;
        let mut coeffs = vec![1.0];
        let mut mk = [[0.0; 4]; 4];
        let mut c_prev = 1.0;
        for k in 1..=n {
            // M_k = M (M_{k-1} + c_{k-1} I)
            let mut mkk = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = 0.0;
                    for l in 0..4 {
                        acc += m[i][l] * (mk[l][j] + if l == j { c_prev } else { 0.0 });
                    }
                    mkk[i][j] = acc;
                }
            }
            let trace: f64 = (0..4).map(|i| mkk[i][i]).sum();
            let c = -trace / k as f64;
            coeffs.push(c);
            mk = mkk;
            c_prev = c;
        }
        let poly = |x: f64| coeffs.iter().fold(0.0, |acc, &c| acc * x + c);
        let mut roots = vec![];
        let bound = 1.0 + m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max) * 4.0;
        let steps = 200_000;
        let mut prev_x = 0.0;
        let mut prev = poly(prev_x);
        for i in 1..=steps {
            let x = bound * i as f64 / steps as f64;
            let v = poly(x);
            if prev == 0.0 {
                roots.push(prev_x);
            } else if prev.signum() != v.signum() {
                let (mut lo, mut hi) = (prev_x, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if poly(lo).signum() == poly(mid).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev = v;
        }
        roots
    }

    #[test]
    fn normal_phase_matrix() {
        let p = validate(1.0, 1.2, 0.3).unwrap();
        let mf = solve_mean_field(&p, DEFAULT_EPS_CRIT);
        let m = build_matrix(&mf, &p);
        assert_eq!(
            m,
            [
                [1.0, 0.3, 0.0, -0.3],
                [0.3, 1.2, -0.3, 0.0],
                [0.0, 0.3, -1.0, -0.3],
                [0.3, 0.0, -0.3, -1.2]
            ]
        );
        let p = validate(1.0, 1.2, 0.0).unwrap();
        let m = build_matrix(&solve_mean_field(&p, DEFAULT_EPS_CRIT), &p);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j {
                    [1.0, 1.2, -1.0, -1.2][i]
                } else {
                    0.0
                };
                assert_eq!(m[i][j], expect);
            }
        }
    }

    #[test]
    fn superradiant_matrix_entries() {
        let p = validate(1.0, 1.0, 1.0).unwrap();
        let m = build_matrix(&solve_mean_field(&p, DEFAULT_EPS_CRIT), &p);
        let gt = 0.316227766016838;
        assert_relative_eq!(m[0][1], gt, epsilon = 1e-12);
        assert_relative_eq!(m[1][1], 4.0, epsilon = 1e-12);
        assert_relative_eq!(m[1][3], -1.5, epsilon = 1e-12);
        assert_relative_eq!(m[3][3], -4.0, epsilon = 1e-12);
    }

    #[test]
    fn resonant_closed_form_frequencies() {
        let m = modes_for(1.0, 1.0, 0.3);
        assert_relative_eq!(m.omega_minus, 0.4f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(m.omega_plus, 1.6f64.sqrt(), max_relative = 1e-14);
        assert!(!m.critical_flag);
    }

    #[test]
    fn critical_point_flagged() {
        let m = modes_for(1.0, 1.0, 0.5);
        assert_eq!(m.omega_minus, 0.0);
        assert!(m.critical_flag);
        let c = m.coeffs_minus;
        assert_relative_eq!(c.w / c.y, -1.0, epsilon = 1e-14);
        assert_relative_eq!(c.x / c.z, -1.0, epsilon = 1e-14);
        assert_eq!(covariance(&m).unwrap_err(), Error::CriticalPoint);
    }

    #[test]
    fn superradiant_frequencies_match_char_poly() {
        let p = validate(1.0, 1.0, 1.0).unwrap();
        let mat = build_matrix(&solve_mean_field(&p, DEFAULT_EPS_CRIT), &p);
        let roots = char_poly_positive_roots(&mat);
        assert_eq!(roots.len(), 2);
        let m = diagonalize(&mat, DEFAULT_OMEGA_CRIT).unwrap();
        assert_relative_eq!(m.omega_minus, roots[0], max_relative = 1e-9);
        assert_relative_eq!(m.omega_plus, roots[1], max_relative = 1e-9);
        assert!((m.omega_minus - 0.9602).abs() < 1e-4);
        assert!((m.omega_plus - 3.7186).abs() < 1e-4);
    }

    #[test]
    fn eigenvectors_satisfy_problem() {
        for (wa, wb, g) in [
            (1.0, 1.0, 0.3),
            (1.0, 2.0, 1.3),
            (1.0, 0.5, 0.2),
            (2.0, 1.0, 3.0),
        ] {
            let p = validate(wa, wb, g).unwrap();
            let mat = build_matrix(&solve_mean_field(&p, DEFAULT_EPS_CRIT), &p);
            let m = diagonalize(&mat, DEFAULT_OMEGA_CRIT).unwrap();
            for (om, c) in [
                (m.omega_minus, m.coeffs_minus),
                (m.omega_plus, m.coeffs_plus),
            ] {
                let v = c.as_array();
                for i in 0..4 {
                    let mv: f64 = (0..4).map(|j| mat[i][j] * v[j]).sum();
                    assert!((mv - om * v[i]).abs() < 1e-12, "{wa} {wb} {g}");
                }
                assert!(c.w >= 0.0);
            }
        }
    }

    #[test]
    fn decoupled_vacuum() {
        for wb in [0.5, 1.0, 2.0] {
            let m = modes_for(1.0, wb, 0.0);
            let sigma = covariance(&m).unwrap();
            assert_eq!(sigma, CovarianceMatrix::vacuum());
            let (lo, hi) = (m.omega_minus, m.omega_plus);
            assert_eq!((lo, hi), (wb.min(1.0), wb.max(1.0)));
        }
    }

    #[test]
    fn resonant_covariance_smallest_eigenvalue() {
        let sigma = covariance(&modes_for(1.0, 1.0, 0.3)).unwrap();
        let e = sigma.eigen();
        // e^{2r₋}/4 with e^{4r₋} = 0.4
        assert_relative_eq!(e.values[0], 0.4f64.sqrt() / 4.0, max_relative = 1e-13);
        assert_relative_eq!(e.values[0], 0.158113883008419, epsilon = 1e-12);
    }

    #[test]
    fn malformed_matrix_rejected() {
        let mut mat = build_matrix(
            &solve_mean_field(&validate(1.0, 1.0, 0.3).unwrap(), DEFAULT_EPS_CRIT),
            &validate(1.0, 1.0, 0.3).unwrap(),
        );
        mat[2][2] = 0.5;
        assert!(matches!(
            diagonalize(&mat, DEFAULT_OMEGA_CRIT),
            Err(Error::MalformedMatrix(_))
        ));
    }

    #[test]
    fn near_critical_ratios() {
        for wb in [1.0, 2.0] {
            let gc = validate(1.0, wb, 0.0).unwrap().critical_coupling();
            for f in [1.0 - 1e-6, 1.0 + 1e-6] {
                let m = modes_for(1.0, wb, gc * f);
                let c = m.coeffs_minus;
                assert!((c.w / c.y + 1.0).abs() < 1e-2);
                assert!((c.x / c.z + 1.0).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn critical_momentum_block_is_limit() {
        let lim = critical_momentum_covariance(&modes_for(1.0, 1.0, 0.5));
        let near = covariance(&modes_for(1.0, 1.0, 0.5 * (1.0 - 1e-10))).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((lim[i][j] - near.sigma[2 * i + 1][2 * j + 1]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn f32_instantiation() {
        let p = ModelParams::<f32>::new(1.0, 1.0, 0.3).unwrap();
        let mf = solve_mean_field(&p, 1e-6);
        let m = diagonalize(&build_matrix(&mf, &p), 1e-5).unwrap();
        assert!((m.omega_minus - 0.4f32.sqrt()).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn mode_invariants(wb in 0.2f64..3.0, rel in 0.0f64..3.0) {
            let gc = validate(1.0, wb, 0.0).unwrap().critical_coupling();
            let g = gc * rel;
            prop_assume!((rel - 1.0).abs() > 1e-3);
            let m = modes_for(1.0, wb, g);
            prop_assert!(0.0 <= m.omega_minus && m.omega_minus <= m.omega_plus);
            prop_assert!((m.coeffs_minus.symplectic_norm() - 1.0).abs() < 1e-9);
            prop_assert!((m.coeffs_plus.symplectic_norm() - 1.0).abs() < 1e-9);
            prop_assert!(m.coeffs_minus.symplectic_product(&m.coeffs_plus).abs() < 1e-9);
            let sigma = covariance(&m).unwrap();
            prop_assert!(sigma.is_symmetric(0.0));
            prop_assert!(sigma.eigen().values[0] > 0.0);
            prop_assert!(sigma.is_pure(1e-9), "{:?}", sigma.symplectic_eigenvalues());
            for c in [m.coeffs_minus, m.coeffs_plus] {
                let (ppd, pdp) = sigma.mode_occupations(&c);
                prop_assert!((ppd - 1.0).abs() < 1e-9);
                prop_assert!(pdp.abs() < 1e-9);
            }
        }
    }
}
