mod eval;
mod synth;
mod sweep;
mod train;
mod verify;

pub use eval::{eval, EvalReport};
pub use sweep::{sweep, Cell, STUCK_MARGIN};
pub use synth::synth;
pub use train::train;
pub use verify::verify;
