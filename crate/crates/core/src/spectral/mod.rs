//! Periodic grids, Fourier transforms, smoothing and data preparation.

mod fft;
mod field;
mod grid;
mod layered;
mod mollifier;
mod prepare;
mod random;

pub use field::{PhysField2D, SpectralField2D};
pub use grid::{SlabGrid, TorusGrid};
pub use layered::{lq_norm_phys, LayeredField3D};
pub use mollifier::{bump, Mollifier};
pub use prepare::prepare_data;
pub use random::random_field;
pub use rustfft::num_complex::Complex64;
