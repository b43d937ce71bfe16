//! File formats shared by the library, the CLI and the Python bindings.

pub mod manifest;
pub mod matrix;
pub mod pairs;
pub mod poses;
pub mod tensor;
