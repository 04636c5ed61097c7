//! Collective ladder operators in the coupled basis.
//!
//! Matrix elements come from the Wigner–Eckart theorem: each `j_x^±` is the
//! `q = ±1` spherical component of a rank-1 tensor acting on one factor of
//! the `(j_A ⊗ j_B) ⊗ j_β` coupling, so its reduced matrix element
//! factorises into 6j recoupling coefficients.

use num_complex::Complex64 as C64;

use super::basis::{CoupledBasis, Sense};
use super::coupling::{wigner_3j, wigner_6j};
use super::HalfInt;
use crate::sparse::SparseOp;

fn phase(twice_exponent: i32) -> f64 {
    debug_assert!(twice_exponent % 2 == 0, "phase exponent must be integral");
    if (twice_exponent / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn reduced_spin(j: HalfInt) -> f64 {
    let v = j.value();
    (v * (v + 1.0) * (2.0 * v + 1.0)).sqrt()
}

fn dim_factor(a: HalfInt, b: HalfInt) -> f64 {
    (((a.twice() + 1) * (b.twice() + 1)) as f64).sqrt()
}

/// Which subsystem a single-spin operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    A,
    B,
    Beta,
}

/// Reduced matrix element `⟨(j_A j_B)λ', j_β; J' ‖ j_x ‖ (j_A j_B)λ, j_β; J⟩`.
fn reduced_element(
    basis: &CoupledBasis,
    part: Part,
    lambda_p: HalfInt,
    total_p: HalfInt,
    lambda: HalfInt,
    total: HalfInt,
) -> f64 {
    let (ja, jb, jc) = (basis.j_a(), basis.j_b(), basis.j_beta());
    let one = HalfInt::ONE;
    match part {
        Part::Beta => {
            if lambda_p != lambda {
                return 0.0;
            }
            phase((lambda + jc + total_p + one).twice())
                * dim_factor(total, total_p)
                * wigner_6j(jc, total_p, lambda, total, jc, one)
                * reduced_spin(jc)
        }
        Part::A | Part::B => {
            let outer = phase((lambda_p + jc + total + one).twice())
                * dim_factor(total, total_p)
                * wigner_6j(lambda_p, total_p, jc, total, lambda, one);
            if outer == 0.0 {
                return 0.0;
            }
            let inner = if part == Part::A {
                phase((ja + jb + lambda + one).twice())
                    * dim_factor(lambda, lambda_p)
                    * wigner_6j(ja, lambda_p, jb, lambda, ja, one)
                    * reduced_spin(ja)
            } else {
                phase((ja + jb + lambda_p + one).twice())
                    * dim_factor(lambda, lambda_p)
                    * wigner_6j(jb, lambda_p, ja, lambda, jb, one)
                    * reduced_spin(jb)
            };
            outer * inner
        }
    }
}

/// `c_A j_A^± + c_B j_B^± + c_β j_β^±` in the coupled basis.
pub fn collective_operator(
    basis: &CoupledBasis,
    c_a: C64,
    c_b: C64,
    c_beta: C64,
    sense: Sense,
) -> SparseOp {
    let (q, s_q) = match sense {
        Sense::Raise => (HalfInt::ONE, -std::f64::consts::SQRT_2),
        Sense::Lower => (-HalfInt::ONE, std::f64::consts::SQRT_2),
    };
    let parts = [(Part::A, c_a), (Part::B, c_b), (Part::Beta, c_beta)];
    let mut trip = Vec::new();
    for (col, s) in basis.states().iter().enumerate() {
        let mu_p = s.mu + q;
        for dl in [-2, 0, 2] {
            let lambda_p = HalfInt::from_twice(s.lambda.twice() + dl);
            if lambda_p.twice() < 0 || !HalfInt::triangle(basis.j_a(), basis.j_b(), lambda_p) {
                continue;
            }
            for dj in [-2, 0, 2] {
                let total_p = HalfInt::from_twice(s.total.twice() + dj);
                if total_p.twice() < 0
                    || !mu_p.is_projection_of(total_p)
                    || !HalfInt::triangle(lambda_p, basis.j_beta(), total_p)
                {
                    continue;
                }
                let geometric = s_q
                    * phase((total_p - mu_p).twice())
                    * wigner_3j(total_p, -mu_p, HalfInt::ONE, q, s.total, s.mu);
                if geometric == 0.0 {
                    continue;
                }
                let mut amp = C64::new(0.0, 0.0);
                for (part, c) in parts {
                    if c == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let r = reduced_element(basis, part, lambda_p, total_p, s.lambda, s.total);
                    amp += c * (geometric * r);
                }
                if amp.norm() > 1e-15 {
                    let row = basis
                        .index_of(&super::BasisState::new(lambda_p, total_p, mu_p))
                        .expect("selection rules keep the target inside the basis");
                    trip.push((row, col, amp));
                }
            }
        }
    }
    SparseOp::from_triplets(basis.id(), basis.dim(), trip).expect("indices come from the basis")
}

/// Homogeneous total-spin ladder `J_T^±`.
pub fn total_ladder(basis: &CoupledBasis, sense: Sense) -> SparseOp {
    let one = C64::new(1.0, 0.0);
    collective_operator(basis, one, one, one, sense)
}

/// Diagonal `J_T²` in the coupled basis.
pub fn total_spin_squared(basis: &CoupledBasis) -> SparseOp {
    let diag: Vec<C64> = basis
        .states()
        .iter()
        .map(|s| {
            let j = s.total.value();
            C64::new(j * (j + 1.0), 0.0)
        })
        .collect();
    SparseOp::diagonal(basis.id(), &diag)
}

/// Diagonal `J_Tᶻ` in the coupled basis.
pub fn total_spin_z(basis: &CoupledBasis) -> SparseOp {
    let diag: Vec<C64> = basis
        .states()
        .iter()
        .map(|s| C64::new(s.mu.value(), 0.0))
        .collect();
    SparseOp::diagonal(basis.id(), &diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::{build_coupled_basis, BasisState};

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn homogeneous_lowering_is_ladder() {
        let b = build_coupled_basis(h(2), h(2), h(2)).unwrap();
        let op = total_ladder(&b, Sense::Lower);
        for (col, s) in b.states().iter().enumerate() {
            let image: Vec<(usize, C64)> = (0..b.dim())
                .map(|r| (r, op.get(r, col)))
                .filter(|(_, v)| v.norm() > 1e-14)
                .collect();
            if s.is_extremal() {
                assert!(image.is_empty(), "{s:?} not annihilated");
                continue;
            }
            assert_eq!(image.len(), 1);
            let (row, v) = image[0];
            assert_eq!(b.state(row), BasisState::new(s.lambda, s.total, s.mu - HalfInt::ONE));
            let (j, m) = (s.total.value(), s.mu.value());
            assert!((v.re - (j * (j + 1.0) - m * (m - 1.0)).sqrt()).abs() < 1e-12);
            assert!(v.im.abs() < 1e-14);
        }
    }
}
