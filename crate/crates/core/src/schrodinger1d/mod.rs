//! Schrödinger operators `-d^2/dx^2 + V` on the line with complex integrable
//! potentials: Nyström Birman-Schwinger matrices, determinant root hunting,
//! a finite-difference oracle and the disk enclosure `|lambda| <= ||V||_1^2 / 4`.

mod fd;
mod hunt;
mod kernel;
mod potential;

pub use fd::{fd_oracle, FdOptions};
pub(crate) use hunt::hunt_with;
pub use hunt::{davies_search, disk_search, find_eigenvalues_bs, BsOptions, CUT_MARGIN};
pub use kernel::{
    assemble_k, davies_containment, davies_disk, davies_radius, green1d, hs_bound_check, HsCheck, DISK_SLACK, HS_SLACK,
};
pub use potential::{Family, PotentialSpec, TAIL_TOL};
