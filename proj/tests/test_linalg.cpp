#include <doctest.h>

#include "cclab/linalg.hpp"
#include "helpers.hpp"

using namespace cclab;

TEST_SUITE("linalg") {

TEST_CASE("null space of a rank-deficient matrix") {
    Mat M(2, 3);
    M << 1, 2, 3, 2, 4, 6;
    Mat N = null_space_basis(M);
    CHECK(N.cols() == 2);
    CHECK((M * N).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((N.transpose() * N - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(null_space_basis(Mat(0, 3)).cols() == 3);
    CHECK(null_space_basis(Mat::Identity(3, 3)).cols() == 0);
}

TEST_CASE("least squares returns the minimum-norm minimizer") {
    Mat M(1, 2);
    M << 1, 1;
    LeastSquares ls = least_squares_solve(M, testing::vec({2}));
    CHECK(ls.solution(0) == doctest::Approx(1));
    CHECK(ls.solution(1) == doctest::Approx(1));
    CHECK(ls.residual <= 1e-12);
    Mat T(2, 1);
    T << 1, 1;
    LeastSquares inc = least_squares_solve(T, testing::vec({0, 2}));
    CHECK(inc.solution(0) == doctest::Approx(1));
    CHECK(inc.residual == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("row-major round trip") {
    Mat M = from_row_major(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(M(1, 0) == 4);
    CHECK(to_row_major(M) == std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("property: adjoint identity, null space, least squares optimality") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> dim(1, 6);
    for (int t = 0; t < 120; ++t) {
        int m = dim(rng), n = dim(rng);
        Mat A = Mat::NullaryExpr(m, n, [&]() { return std::normal_distribution<>()(rng); });
        Vec x = testing::gaussian(rng, n), y = testing::gaussian(rng, m);
        double scale = 1 + A.norm() * x.norm() * y.norm();
        CHECK(std::abs(y.dot(A * x) - adjoint_apply(A, y).dot(x)) <= 1e-12 * scale);

        Mat Mr = A.topRows(std::max(1, m - 1)) * Mat::Identity(n, n);
        if (m > 1) Mr.conservativeResize(m, n), Mr.row(m - 1) = Mr.row(0) * 2.0;
        Mat N = null_space_basis(Mr);
        if (N.cols() > 0) {
            CHECK((Mr * N).cwiseAbs().maxCoeff() <= 1e-10 * (1 + Mr.norm()));
            CHECK((N.transpose() * N - Mat::Identity(N.cols(), N.cols())).cwiseAbs().maxCoeff() <= 1e-10);
        }

        LeastSquares ls = least_squares_solve(A, y);
        for (int k = 0; k < 100; ++k) {
            Vec cand = ls.solution + 0.1 * testing::gaussian(rng, n);
            CHECK(ls.residual <= (A * cand - y).norm() + 1e-12);
        }
    }
}

}
