pub mod flux;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod schemes;
pub mod vem;
