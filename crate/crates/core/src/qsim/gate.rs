//! Gate matrices and constructors.
//!
//! Single-qubit gates are parameterized in the three-angle form
//!
//! ```text
//! u3(theta, phi, lambda) = [ cos(theta/2)              -e^{i lambda} sin(theta/2)      ]
//!                          [ e^{i phi} sin(theta/2)     e^{i (lambda+phi)} cos(theta/2) ]
//! ```
//!
//! so that `u3(theta, phi, _)|0> = (cos(theta/2), e^{i phi} sin(theta/2))`,
//! i.e. `theta` and `phi` are the polar and azimuthal Bloch angles of the
//! state prepared from |0>. Z rotations are `u3(0, lambda, 0)` (the global
//! phase differs from `exp(-i lambda Z/2)` but is irrelevant for density
//! matrices), Y rotations are `u3(theta, 0, 0)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// 2x2 complex matrix in row-major order.
pub type Mat2<R> = [Complex<R>; 4];
/// 4x4 complex matrix in row-major order.
pub type Mat4<R> = [Complex<R>; 16];

/// `e^{i angle}` as a complex scalar.
#[inline]
pub fn cis<R: Real>(angle: R) -> Complex<R> {
    Complex::new(angle.cos(), angle.sin())
}

/// A single-qubit unitary with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary1Q<R: Real> {
    pub matrix: Mat2<R>,
    pub label: String,
}

/// A two-qubit unitary with a display label.
///
/// The matrix acts on the local basis `|ab>` where `a` is the first target
/// passed to `apply_gate` and forms the more significant local bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary2Q<R: Real> {
    pub matrix: Mat4<R>,
    pub label: String,
}

/// Either arity of gate, as built by action sets and circuit builders.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<R: Real> {
    One(Unitary1Q<R>),
    Two(Unitary2Q<R>),
}

impl<R: Real> Gate<R> {
    pub fn label(&self) -> &str {
        match self {
            Gate::One(g) => &g.label,
            Gate::Two(g) => &g.label,
        }
    }

    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Gate::One(_) => 1,
            Gate::Two(_) => 2,
        }
    }
}

/// General single-qubit rotation; see the module docs for the convention.
pub fn u3<R: Real>(theta: R, phi: R, lambda: R) -> Unitary1Q<R> {
    let half = theta / real::<R>(2.0);
    let (c, s) = (half.cos(), half.sin());
    let matrix = [
        Complex::new(c, R::zero()),
        -cis(lambda) * s,
        cis(phi) * s,
        cis(lambda + phi) * c,
    ];
    Unitary1Q {
        matrix,
        label: format!("U3({theta},{phi},{lambda})"),
    }
}

/// Identity gate (used for no-op bookkeeping in tests).
pub fn identity_1q<R: Real>() -> Unitary1Q<R> {
    let o = Complex::new(R::one(), R::zero());
    let z = Complex::new(R::zero(), R::zero());
    Unitary1Q {
        matrix: [o, z, z, o],
        label: "I".to_string(),
    }
}

/// Rotation mapping the X basis onto the computational basis
/// (the Hadamard, expressed as `u3(pi/2, 0, pi)`).
pub fn x_basis_rotation<R: Real>() -> Unitary1Q<R> {
    let pi = real::<R>(std::f64::consts::PI);
    let mut g = u3(pi / real::<R>(2.0), R::zero(), pi);
    g.label = "H".to_string();
    g
}

/// Rotation mapping the Y basis onto the computational basis
/// (`H * S-dagger`, expressed as `u3(pi/2, 0, pi/2)`).
pub fn y_basis_rotation<R: Real>() -> Unitary1Q<R> {
    let pi = real::<R>(std::f64::consts::PI);
    let mut g = u3(pi / real::<R>(2.0), R::zero(), pi / real::<R>(2.0));
    g.label = "HSdg".to_string();
    g
}

/// Controlled-NOT. The control is the *first* target index passed to
/// `apply_gate`, the flipped qubit the second.
pub fn cnot<R: Real>() -> Unitary2Q<R> {
    let o = Complex::new(R::one(), R::zero());
    let z = Complex::new(R::zero(), R::zero());
    Unitary2Q {
        matrix: [
            o, z, z, z, //
            z, o, z, z, //
            z, z, z, o, //
            z, z, o, z,
        ],
        label: "CNOT".to_string(),
    }
}

/// Validates `U U^dagger = I` within `tol` and wraps the matrix.
pub fn unitary_1q_from_matrix<R: Real>(
    matrix: Mat2<R>,
    label: impl Into<String>,
    tol: R,
) -> Result<Unitary1Q<R>> {
    check_unitary(&matrix, 2, tol)?;
    Ok(Unitary1Q {
        matrix,
        label: label.into(),
    })
}

/// Validates `U U^dagger = I` within `tol` and wraps the matrix.
pub fn unitary_2q_from_matrix<R: Real>(
    matrix: Mat4<R>,
    label: impl Into<String>,
    tol: R,
) -> Result<Unitary2Q<R>> {
    check_unitary(&matrix, 4, tol)?;
    Ok(Unitary2Q {
        matrix,
        label: label.into(),
    })
}

fn check_unitary<R: Real>(m: &[Complex<R>], dim: usize, tol: R) -> Result<()> {
    for r in 0..dim {
        for c in 0..dim {
            // (U U^dagger)[r][c] = sum_k U[r][k] * conj(U[c][k])
            let mut acc = Complex::new(R::zero(), R::zero());
            for k in 0..dim {
                acc = acc + m[r * dim + k] * m[c * dim + k].conj();
            }
            let expect = if r == c { R::one() } else { R::zero() };
            if ((acc.re - expect).abs() > tol) || (acc.im.abs() > tol) {
                return Err(Error::NotUnitary {
                    tol: tol.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn u3_columns_match_the_three_angle_form() {
        let t = 1.1;
        let p = -0.7;
        let l = 2.3;
        let g = u3::<f64>(t, p, l);
        let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
        assert!(close(g.matrix[0], Complex::new(c, 0.0)));
        assert!(close(g.matrix[1], -Complex::new(0.0, l).exp() * s));
        assert!(close(g.matrix[2], Complex::new(0.0, p).exp() * s));
        assert!(close(g.matrix[3], Complex::new(0.0, l + p).exp() * c));
    }

    #[test]
    fn u3_is_unitary_for_arbitrary_angles() {
        for (t, p, l) in [(0.0, 0.0, 0.0), (2.1862, -2.3562, 0.4), (3.14159, 1.0, -1.0)] {
            let g = u3::<f64>(t, p, l);
            assert!(unitary_1q_from_matrix(g.matrix, "x", 1e-12).is_ok());
        }
    }

    #[test]
    fn basis_rotations_are_the_expected_matrices() {
        let h = x_basis_rotation::<f64>();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // H = (1/sqrt2) [[1, 1], [1, -1]]
        assert!(close(h.matrix[0], Complex::new(r, 0.0)));
        assert!(close(h.matrix[1], Complex::new(r, 0.0)));
        assert!(close(h.matrix[2], Complex::new(r, 0.0)));
        assert!(close(h.matrix[3], Complex::new(-r, 0.0)));

        // H * S-dagger = (1/sqrt2) [[1, -i], [1, i]]
        let g = y_basis_rotation::<f64>();
        assert!(close(g.matrix[0], Complex::new(r, 0.0)));
        assert!(close(g.matrix[1], Complex::new(0.0, -r)));
        assert!(close(g.matrix[2], Complex::new(r, 0.0)));
        assert!(close(g.matrix[3], Complex::new(0.0, r)));
    }

    #[test]
    fn cnot_flips_second_local_bit_when_first_is_set() {
        let g = cnot::<f64>();
        // |10> -> |11>, |11> -> |10>, |00> and |01> unchanged.
        let col = |j: usize| (0..4).map(|i| g.matrix[i * 4 + j].re).collect::<Vec<_>>();
        assert_eq!(col(0), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(col(1), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(col(2), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(col(3), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let z = Complex::new(0.0, 0.0);
        let m = [Complex::new(2.0, 0.0), z, z, Complex::new(1.0, 0.0)];
        assert!(matches!(
            unitary_1q_from_matrix::<f64>(m, "bad", 1e-12),
            Err(Error::NotUnitary { .. })
        ));
    }
}
