use crate::error::{Error, Result};
use nalgebra::{DMatrix, Dyn, LU};
use num_complex::Complex64;

/// Pivots with modulus below this (relative to the largest entry) are treated as zero.
pub const PIVOT_FLOOR: f64 = 1e-13;

/// Condition numbers above this are flagged as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e8;

pub type CMatrix = DMatrix<Complex64>;

fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting plus its 1-norm condition number.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: LU<Complex64, Dyn, Dyn>,
    dim: usize,
    condition: f64,
}

impl DenseLu {
    pub fn factor(a: &CMatrix) -> Result<DenseLu> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let dim = a.nrows();
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let lu = a.clone().lu();
        let u = lu.u();
        for k in 0..dim {
            let pivot = u[(k, k)].norm();
            // NaN pivots fail this comparison too
            if !(pivot >= PIVOT_FLOOR * scale) {
                return Err(Error::SingularSystem { pivot, column: k });
            }
        }
        let condition = if dim == 0 {
            1.0
        } else {
            let inv = lu.try_inverse().ok_or(Error::SingularSystem {
                pivot: 0.0,
                column: 0,
            })?;
            norm1(a) * norm1(&inv)
        };
        Ok(DenseLu { lu, dim, condition })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `||A||_1 ||A^{-1}||_1`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn is_ill_conditioned(&self) -> bool {
        !(self.condition <= CONDITION_WARNING)
    }

    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        if b.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: b.nrows(),
            });
        }
        if self.dim == 0 {
            return Ok(b.clone());
        }
        self.lu.solve(b).ok_or(Error::SingularSystem {
            pivot: 0.0,
            column: 0,
        })
    }
}

#[derive(Clone, Debug)]
pub struct DenseSolution {
    pub x: CMatrix,
    /// `||Ax - b||_F / ||b||_F` (zero when `b = 0`).
    pub relative_residual: f64,
    pub condition: f64,
    /// Set when the condition number exceeds [`CONDITION_WARNING`].
    pub warning: Option<String>,
}

/// Solves `A x = b` for one or several right-hand sides.
pub fn solve_complex_dense(a: &CMatrix, b: &CMatrix) -> Result<DenseSolution> {
    let lu = DenseLu::factor(a)?;
    let x = lu.solve(b)?;
    let bn = b.norm();
    let relative_residual = if bn == 0.0 {
        (a * &x).norm()
    } else {
        (a * &x - b).norm() / bn
    };
    let warning = lu
        .is_ill_conditioned()
        .then(|| format!("ill-conditioned system: condition estimate {:.3e}", lu.condition()));
    Ok(DenseSolution {
        x,
        relative_residual,
        condition: lu.condition(),
        warning,
    })
}
