#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace prony {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Dense complex matrix. Column-major; assembly partitions by block columns.
using DenseMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Distance between two points of the unit circle parametrised by [0,1).
double mod1_distance(double a, double b);

}  // namespace prony
