//! Covering monodromy of `Y`, the wreath recursion, and free-group subgroup tools.

use thiserror::Error;

use crate::correspondence::CorrError;
use crate::numeric::NumericError;

pub mod lift;
pub mod offset;
pub mod star;
pub mod subgroup;
pub mod table;
pub mod wreath;

pub use lift::{compute_fiber, lift_closed, lift_loop, lift_polyline, monodromy_center, LoopLift};
pub use offset::Walk;
pub use star::{CutStar, Puncture, PunctureKind, StarArc};
pub use subgroup::{act_word, hf_subgroup, stallings_index, Perm, SubgroupData};
pub use table::MonodromyReport;
pub use table::{monodromy_table, MonodromyTable};
pub use wreath::{
    build_recursion, normal_form, path_word, peripheral, wreath_recursion, x_star_project, CycleProduct, PLetter,
    PWord, WreathRecursion,
};

#[derive(Debug, Error)]
pub enum MonodromyError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Corr(#[from] CorrError),
    #[error("fiber over the basepoint is degenerate: {0}")]
    FiberDegenerate(String),
    #[error("continuation stalled: {0}")]
    ContinuationStall(String),
    #[error("lifted paths collide on sheet {0}")]
    SheetCollision(usize),
    #[error("crossing within tolerance of an arc endpoint ({0})")]
    CrossingAmbiguous(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("cannot build a cut star: {0}")]
    Star(String),
}
