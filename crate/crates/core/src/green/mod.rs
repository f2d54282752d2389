//! Free Green kernels, the boundary values `R0(θ±i0)` and the perturbed
//! resolvent `R(θ±i0)` reduced to a dense system on the range of `V`.

mod boundary;
mod dense;
mod free;
mod kernel;

pub use boundary::{
    apply_r, assemble_boundary_system, v_range_basis, BoundarySystem, ResolventField,
};
pub use dense::{
    solve_complex_dense, CMatrix, DenseLu, DenseSolution, CONDITION_WARNING, PIVOT_FLOOR,
};
pub use free::{apply_r0, apply_r0_grid, FreeResolvent};
pub use kernel::{green0, green0_entry, GreenKernel, KernelColumn};

/// Which boundary value of the resolvent: `θ + i0` (approached from inside
/// the unit circle) or `θ - i0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "+i0",
            Side::Minus => "-i0",
        }
    }
}
