#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cclab/analysis.hpp"

namespace testing {

using cclab::ConeBlock;
using cclab::ConeKind;
using cclab::ConeProduct;
using cclab::Mat;
using cclab::Vec;

inline Vec vec(std::initializer_list<double> xs) {
    Vec r(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) r(i++) = x;
    return r;
}

inline Vec gaussian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> N;
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = N(rng);
    return v;
}

inline ConeProduct random_cone(std::mt19937_64& rng, int max_blocks = 2) {
    std::uniform_int_distribution<int> nb(1, max_blocks), kind(0, 1), nd(1, 3), ld(2, 4);
    std::vector<ConeBlock> blocks;
    int count = nb(rng);
    for (int i = 0; i < count; ++i) {
        if (kind(rng) == 0)
            blocks.push_back({ConeKind::Nonneg, nd(rng)});
        else
            blocks.push_back({ConeKind::Lorentz, ld(rng)});
    }
    return ConeProduct(blocks);
}

/// Random point of K; strictly interior unless `boundary` is set.
inline Vec random_in_cone(std::mt19937_64& rng, const ConeProduct& K, bool boundary = false) {
    std::exponential_distribution<double> E(1.0);
    Vec x(K.total_dim());
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i];
        if (b.kind == ConeKind::Nonneg) {
            for (int j = 0; j < b.dim; ++j) x(off + j) = E(rng);
        } else {
            Vec bar = gaussian(rng, b.dim - 1);
            x.segment(off, b.dim - 1) = bar;
            x(off + b.dim - 1) = bar.norm() + (boundary ? 0.0 : E(rng));
        }
    }
    return x;
}

/// Nonnegative combination of sampled extreme rays.
inline Vec random_ray_combination(std::mt19937_64& rng, const ConeProduct& K, int picks = 3) {
    auto rays = cclab::sample_extreme_rays(K, 16, rng());
    std::uniform_int_distribution<size_t> pick(0, rays.size() - 1);
    std::exponential_distribution<double> E(1.0);
    Vec z = Vec::Zero(K.total_dim());
    for (int i = 0; i < picks; ++i) z += E(rng) * rays[pick(rng)];
    return z;
}

/// Random S(A,K,B) whose right-hand sides are all feasible.
inline cclab::DisjunctiveSet random_set(std::mt19937_64& rng, const ConeProduct& K, int m, int nb) {
    cclab::DisjunctiveSet s;
    s.K = K;
    s.A = Mat::NullaryExpr(m, K.total_dim(), [&]() { return std::round(4 * std::normal_distribution<>()(rng)) / 2; });
    for (int k = 0; k < nb; ++k) s.B.explicit_rhs.push_back(s.A * random_in_cone(rng, K));
    return s;
}

/// mu = A^T lambda + gamma with gamma in int(K*), so D_mu is nonempty.
inline Vec random_mu(std::mt19937_64& rng, const cclab::DisjunctiveSet& s) {
    return s.A.transpose() * gaussian(rng, s.m()) + random_in_cone(rng, cclab::dual(s.K));
}

inline bool close(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

/// min c.x over {Ax = b, x >= 0} by enumerating basic solutions; +inf if infeasible.
/// Assumes the minimum is attained (e.g. c > 0).
inline double lp_vertex_oracle(const Vec& c, const Mat& A, const Vec& b) {
    const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(n, 0);
    std::fill(pick.end() - m, pick.end(), 1);
    do {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (pick[j]) cols.push_back(j);
        Mat B(m, m);
        for (int k = 0; k < m; ++k) B.col(k) = A.col(cols[k]);
        Eigen::FullPivLU<Mat> lu(B);
        if (!lu.isInvertible()) continue;
        Vec xb = lu.solve(b);
        if (xb.minCoeff() < -1e-9) continue;
        double v = 0;
        for (int k = 0; k < m; ++k) v += c(cols[k]) * xb(k);
        best = std::min(best, v);
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

}  // namespace testing
