#include "cclab/linalg.hpp"

#include <cmath>

#include "cclab/error.hpp"

namespace cclab {

Vec adjoint_apply(const Mat& A, const Vec& y) {
    if (y.size() != A.rows())
        throw ModelError("adjoint_apply: y has length " + std::to_string(y.size()) + ", expected " +
                         std::to_string(A.rows()));
    return A.transpose() * y;
}

namespace {

struct Svd {
    Eigen::JacobiSVD<Mat> svd;
    int rank;
};

// JacobiSVD wants at least one row and column; callers handle the empty cases.
Svd rank_revealing(const Mat& M, double tol) {
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (smax > 0 && s(i) > tol * smax) ++rank;
    return {std::move(svd), rank};
}

}  // namespace

Mat null_space_basis(const Mat& M, double tol) {
    const int n = static_cast<int>(M.cols());
    if (n == 0) return Mat(0, 0);
    if (M.rows() == 0) return Mat::Identity(n, n);
    auto r = rank_revealing(M, tol);
    return r.svd.matrixV().rightCols(n - r.rank);
}

LeastSquares least_squares_solve(const Mat& M, const Vec& v, double tol) {
    if (v.size() != M.rows())
        throw ModelError("least_squares_solve: rhs length does not match matrix rows");
    if (M.cols() == 0) return {Vec(0), v.norm()};
    if (M.rows() == 0) return {Vec::Zero(M.cols()), 0.0};
    auto r = rank_revealing(M, tol);
    const auto& U = r.svd.matrixU();
    const auto& V = r.svd.matrixV();
    const Vec& s = r.svd.singularValues();
    Vec x = Vec::Zero(M.cols());
    for (int i = 0; i < r.rank; ++i) x += (U.col(i).dot(v) / s(i)) * V.col(i);
    return {x, (M * x - v).norm()};
}

Mat from_row_major(int rows, int cols, const std::vector<double>& data) {
    if (rows < 0 || cols < 0 || static_cast<long>(data.size()) != static_cast<long>(rows) * cols)
        throw ModelError("matrix data has " + std::to_string(data.size()) + " entries, shape says " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    Mat M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double v = data[static_cast<size_t>(i) * cols + j];
            if (!std::isfinite(v)) throw ModelError("matrix entry is not finite");
            M(i, j) = v;
        }
    return M;
}

std::vector<double> to_row_major(const Mat& M) {
    std::vector<double> out;
    out.reserve(M.size());
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) out.push_back(M(i, j));
    return out;
}

}  // namespace cclab
