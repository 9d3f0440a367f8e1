//! Numerical building blocks: scalar root finding, adaptive quadrature,
//! Chebyshev interpolation, uniform-grid Fourier transforms, monotone
//! interpolation and lineshape measurements.

pub mod chebyshev;
pub mod fourier;
pub mod grid;
pub mod interp;
pub mod peaks;
pub mod quad;
pub mod roots;
pub mod stats;

pub use chebyshev::Chebyshev;
pub use fourier::{forward_transform, inverse_transform, FourierGrid};
pub use grid::UniformGrid;
pub use interp::{linear_interp, Pchip};
pub use peaks::{fwhm_of_fn, fwhm_sampled, local_maxima, parabolic_peak};
pub use quad::{integrate, QuadSpec};
pub use roots::{bracketed_root, expand_bracket, RootOptions};
pub use stats::{mean_std, median};
