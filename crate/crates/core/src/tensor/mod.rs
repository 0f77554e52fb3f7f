//! Dense tensors, CSR sparse matrices, and a tape-based reverse-mode
//! autodiff engine with the sparse and segment kernels the models need.

mod dense;
mod edges;
mod gradcheck;
pub mod kernels;
mod sparse;
mod tape;

pub use dense::Tensor;
pub use edges::{EdgeIndex, Segments};
pub use gradcheck::{finite_difference_check, finite_difference_check_many};
pub use sparse::SparseMatrix;
pub use tape::{Activation, Tape, Var, LEAKY_RELU_SLOPE};
