//! Numerical kernels shared by the rest of the crate.

pub mod bessel;
pub mod eig;
pub mod quad;
pub mod rng;
pub mod roots;

pub use bessel::{bessel_j0, bessel_j1};
pub use eig::{hermitian_eig, HermitianEigen};
pub use quad::{
    integrate, integrate_checked, integrate_semi_infinite_oscillatory,
    integrate_semi_infinite_oscillatory_with, GaussLegendre, OscillatoryTail, QuadEstimate,
    Quadrature,
};
pub use rng::{gaussian_pair, RandomSource};
pub use roots::bisect;
