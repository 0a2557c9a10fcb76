#pragma once

#include <Eigen/Dense>

#include <complex>

namespace aaw {

/// Dense dynamic-size types, templated on the scalar so the numerical
/// kernels stay scalar-generic. Double precision is the working type
/// everywhere in the domain layer.
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatX<double>;
using Vector = VecX<double>;

using Complex = std::complex<double>;
using ComplexMatrix = MatX<Complex>;
using ComplexVector = VecX<Complex>;

}  // namespace aaw
