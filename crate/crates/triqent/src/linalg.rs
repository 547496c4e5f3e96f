//! Closed-form 2×2 complex linear algebra.
//!
//! Everything here works on `Matrix2<Complex64>`. The routines favour
//! formulas whose small outputs keep full relative precision (for example the
//! smaller singular value is recovered from the determinant, not from a
//! square root of a difference).

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Vec2 = Vector2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const TINY: f64 = 1e-300;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn mat2(a: C64, b: C64, c: C64, d: C64) -> Mat2 {
    Mat2::new(a, b, c, d)
}

pub fn identity() -> Mat2 {
    Mat2::identity()
}

/// Pauli matrix σ_k with σ_0 = 1, σ_1 = σx, σ_2 = σy, σ_3 = σz.
pub fn pauli(k: usize) -> Mat2 {
    match k {
        0 => identity(),
        1 => mat2(ZERO, ONE, ONE, ZERO),
        2 => mat2(ZERO, -I, I, ZERO),
        3 => mat2(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {k} out of range"),
    }
}

/// Z(ξ) = diag(e^{iξ}, e^{−iξ}).
pub fn z_rot(xi: f64) -> Mat2 {
    mat2(C64::from_polar(1.0, xi), ZERO, ZERO, C64::from_polar(1.0, -xi))
}

/// Y(β) = [[cos β, sin β], [−sin β, cos β]].
pub fn y_rot(beta: f64) -> Mat2 {
    let (s, co) = beta.sin_cos();
    mat2(c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0))
}

pub fn phase_diag(theta0: f64, theta1: f64) -> Mat2 {
    mat2(C64::from_polar(1.0, theta0), ZERO, ZERO, C64::from_polar(1.0, theta1))
}

pub fn det(m: &Mat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn frobenius_sq(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Frobenius norm of U†U − 1.
pub fn unitarity_defect(m: &Mat2) -> f64 {
    let d = m.adjoint() * m - identity();
    frobenius_sq(&d).sqrt()
}

/// Vector orthogonal to `v` with the same norm: (−v₁*, v₀*).
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v[1].conj(), v[0].conj())
}

fn normalized(v: Vec2) -> Vec2 {
    let n = v.norm();
    if n < TINY {
        Vec2::new(ONE, ZERO)
    } else {
        v / c(n, 0.0)
    }
}

fn from_columns(a: &Vec2, b: &Vec2) -> Mat2 {
    mat2(a[0], b[0], a[1], b[1])
}

/// Eigen-decomposition of a 2×2 Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermEig2 {
    pub values: [f64; 2],
    /// Columns are the eigenvectors.
    pub vectors: Mat2,
}

pub fn herm_eig2(m: &Mat2) -> HermEig2 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    let hi = mean + r;
    let lo = mean - r;
    let v0 = if b.norm() <= 1e-300 {
        if a >= d {
            Vec2::new(ONE, ZERO)
        } else {
            Vec2::new(ZERO, ONE)
        }
    } else if a >= d {
        normalized(Vec2::new(c(hi - d, 0.0), b.conj()))
    } else {
        normalized(Vec2::new(b, c(hi - a, 0.0)))
    };
    let v1 = perp(&v0);
    HermEig2 { values: [hi, lo], vectors: from_columns(&v0, &v1) }
}

/// Singular value decomposition m = u · diag(s) · v†, s descending.
#[derive(Clone, Debug)]
pub struct Svd2 {
    pub u: Mat2,
    pub s: [f64; 2],
    pub v: Mat2,
}

/// Singular values from the Frobenius norm and |det|.
pub fn singular_values(m: &Mat2) -> [f64; 2] {
    let f = frobenius_sq(m);
    let d = det(m).norm();
    let s0 = 0.5 * ((f + 2.0 * d).sqrt() + (f - 2.0 * d).max(0.0).sqrt());
    let s1 = if s0 > TINY { d / s0 } else { 0.0 };
    [s0, s1]
}

pub fn svd2(m: &Mat2) -> Svd2 {
    let s = singular_values(m);
    let eig = herm_eig2(&(m.adjoint() * m));
    let v0 = eig.vectors.column(0).into_owned();
    let v1 = perp(&v0);
    let u0 = if s[0] > TINY { normalized(m * v0) } else { Vec2::new(ONE, ZERO) };
    let mut u1 = perp(&u0);
    let z = (u1.adjoint() * m * v1)[(0, 0)];
    if z.norm() > TINY {
        u1 *= z / z.norm();
    }
    Svd2 { u: from_columns(&u0, &u1), s, v: from_columns(&v0, &v1) }
}

/// Takagi factorization of a complex symmetric 2×2 matrix: returns unitary
/// `v` and s (descending) with v · t · vᵀ = diag(s).
pub fn takagi2(t: &Mat2) -> (Mat2, [f64; 2]) {
    let s = singular_values(t);
    if s[0] <= 1e-14 {
        return (identity(), s);
    }
    let (u0, u1) = if s[0] - s[1] > 1e-8 {
        let eig = herm_eig2(&(t * t.conjugate()));
        let mut u0 = eig.vectors.column(0).into_owned();
        let mut u1 = eig.vectors.column(1).into_owned();
        for u in [&mut u0, &mut u1] {
            let lam = (u.adjoint() * t * u.conjugate())[(0, 0)];
            if lam.norm() > TINY {
                *u *= C64::from_polar(1.0, 0.5 * lam.arg());
            }
        }
        (u0, u1)
    } else {
        // Near-equal singular values: v ↦ t v*/s is an antiunitary involution
        // and its fixed points give the Takagi vectors.
        let sm = 0.5 * (s[0] + s[1]);
        let k = |v: &Vec2| (t * v.conjugate()) / c(sm, 0.0);
        let e0 = Vec2::new(ONE, ZERO);
        let mut w = e0 + k(&e0);
        if w.norm() < 1e-6 {
            let ie0 = Vec2::new(I, ZERO);
            w = ie0 + k(&ie0);
        }
        let u0 = normalized(w);
        let mut u1 = perp(&u0);
        let ku1 = k(&u1);
        let chi = (u1.adjoint() * ku1)[(0, 0)].arg();
        u1 *= C64::from_polar(1.0, 0.5 * chi);
        (u0, u1)
    };
    (from_columns(&u0, &u1).adjoint(), s)
}

/// Split a unitary into e^{iφ} · S with det S = 1.
pub fn to_special(m: &Mat2) -> (Mat2, f64) {
    let phi = 0.5 * det(m).arg();
    (m * C64::from_polar(1.0, -phi), phi)
}

/// Euler angles (a, b, c) with s = Z(a) Y(b) Z(c), for s special unitary.
/// b lies in [0, π/2]; when one of a ± c is undefined the other is used and c
/// absorbs nothing.
pub fn zyz(s: &Mat2) -> (f64, f64, f64) {
    let u = s[(0, 0)];
    let v = s[(0, 1)];
    let b = v.norm().atan2(u.norm());
    const EPS: f64 = 1e-14;
    let (sum, diff) = match (u.norm() > EPS, v.norm() > EPS) {
        (true, true) => (u.arg(), v.arg()),
        (true, false) => (u.arg(), u.arg()),
        (false, _) => (v.arg(), v.arg()),
    };
    (0.5 * (sum + diff), b, 0.5 * (sum - diff))
}

/// Reduce `x` into (−π/2, π/2]; returns the reduced angle and the number of
/// π shifts applied modulo 2.
pub fn reduce_half_turn(x: f64) -> (f64, bool) {
    use std::f64::consts::{FRAC_PI_2, PI};
    let k = (x / PI).round();
    let mut r = x - k * PI;
    let mut parity = (k as i64).rem_euclid(2) == 1;
    if r <= -FRAC_PI_2 + 1e-13 {
        r += PI;
        parity = !parity;
    }
    if r > FRAC_PI_2 {
        r = FRAC_PI_2;
    }
    (r, parity)
}

/// Binary entropy in bits, with 0·log 0 = 0.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let term = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.log2() };
    term(x) + term(1.0 - x)
}

/// Inverse of the binary entropy on [1/2, 1].
pub fn binary_entropy_inv(e: f64) -> f64 {
    if e >= 1.0 {
        return 0.5;
    }
    if e <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.5_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_entropy(mid) > e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
