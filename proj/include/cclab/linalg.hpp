#pragma once

#include <utility>
#include <vector>

#include "cclab/cone.hpp"

namespace cclab {

/// Relative singular-value threshold shared by every rank decision.
inline constexpr double kRankTol = 1e-10;

/// A^T y.
Vec adjoint_apply(const Mat& A, const Vec& y);

/// Orthonormal basis of the numerical kernel of M (columns of the result).
/// Singular values below tol * sigma_max count as zero.
Mat null_space_basis(const Mat& M, double tol = kRankTol);

struct LeastSquares {
    Vec solution;     // minimum-norm minimizer
    double residual;  // ||M x - v||_2
};

LeastSquares least_squares_solve(const Mat& M, const Vec& v, double tol = kRankTol);

/// Parses a row-major data array into an rows x cols matrix.
Mat from_row_major(int rows, int cols, const std::vector<double>& data);
std::vector<double> to_row_major(const Mat& M);

}  // namespace cclab
