//! Computable loop-space models: tensor-algebra Hilbert series, graded Witt
//! dimensions, and word-metric balls of free and surface groups together with
//! their truncated group algebras.

mod algebra;
mod groups;
mod hilbert;

pub use algebra::{group_algebra_as_filtered_category, GroupAlgebraModel};
pub use groups::{
    free_group_ball, free_reduce, surface_group_ball, BallTable, GroupBall, GroupSpec, Letter, Presentation, BFS_BUDGET_VAR,
    DEFAULT_BFS_BUDGET,
};
pub use hilbert::{graded_witt_dims, pbw_check, rational_hyperbolicity, tensor_hilbert, HilbertSeries, WittTable};
