pub mod cli;
pub mod error;
pub mod factors;
pub mod grcf;
pub mod grcfid;
pub mod gsorsf;
pub mod io;
pub mod linalg;
pub mod postproc;
pub mod region;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use factors::{
    DislocationLog, LeftFactorRealization, StackedFactorRealization, StepKind, StepRecord,
};
pub use grcf::{grcf, grcf_with, GrcfOptions};
pub use grcfid::{grcfid, grcfid_with};
pub use gsorsf::{gsorsf, GrsfDims, OrderedGrsf};
pub use postproc::{eliminate_nondynamic, minimal_denominator, to_left_factorization, LeftMethod};
pub use region::{PoleMode, RegionSpec, Tolerances};
pub use system::{DescriptorSystem, Domain, RealMatrix};
pub use verify::{check_inner, check_rcf, eval_tfm, pole_report, PoleReport, RcfReport};
