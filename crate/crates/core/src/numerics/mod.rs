//! Special functions, quadrature and symmetric eigensolvers.

mod bessel;
mod eigen;
mod quadrature;
mod zernike;

pub use bessel::{bessel_j, bessel_j_all};
pub use eigen::{
    jacobi_eigen, symmetric_eigen, tridiagonal_eigen, Eigen, SymMatrix, SymmetricTridiagonal,
};
pub use quadrature::{gauss_legendre, QuadratureRule, Rule1d};
pub use zernike::{
    jacobi_all, zernike_norm, zernike_radial, zernike_radial_all, zernike_reduced_all,
};
