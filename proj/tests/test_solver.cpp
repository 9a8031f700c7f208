#include <doctest.h>

#include "cclab/solver.hpp"
#include "helpers.hpp"

using namespace cclab;
using testing::vec;

namespace {

ConicProgram prog(Vec c, Mat A, Vec b, ConeProduct K) { return ConicProgram{std::move(c), std::move(A), std::move(b), K}; }

Mat row(std::initializer_list<double> xs) { return vec(xs).transpose(); }

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("small LP") {
    ConicProgram p = prog(vec({1, 0}), row({1, 1}), vec({1}), ConeProduct::nonneg(2));
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0).epsilon(1e-7));
    CHECK(s.x(1) == doctest::Approx(1).epsilon(1e-7));
    CHECK(check_kkt(p, s, 1e-7).passed);
}

TEST_CASE("second-order cone optimum") {
    // min t s.t. (1, sqrt2, t) in L3
    Mat A(2, 3);
    A << 1, 0, 0, 0, 1, 0;
    ConicProgram p = prog(vec({0, 0, 1}), A, vec({1, std::sqrt(2.0)}), ConeProduct::lorentz(3));
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(std::sqrt(3.0)).epsilon(1e-7));

    ConicProgram q = prog(vec({1, 0, -1}), row({-1, 0, 1}), vec({2}), ConeProduct::lorentz(3));
    Solution t = solve(q);
    REQUIRE(t.status == SolveStatus::Optimal);
    CHECK(t.objective == doctest::Approx(-2).epsilon(1e-7));
}

TEST_CASE("infeasibility certificate") {
    ConicProgram p = prog(vec({0, 0, 1}), row({0, 1, 1}), vec({-1}), ConeProduct::lorentz(3));
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::PrimalInfeasible);
    CHECK(p.b.dot(s.certificate) == doctest::Approx(1));
    CHECK(check_certificate(p, s, 1e-7));
}

TEST_CASE("unboundedness certificate") {
    ConicProgram p = prog(vec({-1, 0}), row({1, -1}), vec({0}), ConeProduct::nonneg(2));
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::DualInfeasible);
    CHECK(p.c.dot(s.certificate) == doctest::Approx(-1));
    CHECK(check_certificate(p, s, 1e-7));
}

TEST_CASE("free variables and builder") {
    // min -l s.t. l + g = 2, g >= 0, l free  ->  -2
    ProgramBuilder pb;
    int l = pb.add_block(ConeKind::Free, 1);
    int g = pb.add_block(ConeKind::Nonneg, 1);
    pb.set_cost(l, -1);
    pb.add_row({{l, 1.0}, {g, 1.0}}, 2.0);
    ConicProgram p = pb.build();
    CHECK(p.A.rows() == 1);
    CHECK(p.K.total_dim() == 2);
    Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-2).epsilon(1e-7));
}

TEST_CASE("zero blocks and empty rows") {
    ProgramBuilder pb;
    int z = pb.add_block(ConeKind::Zero, 1);
    int x = pb.add_block(ConeKind::Nonneg, 2);
    pb.set_cost(x, 1);
    pb.set_cost(x + 1, 2);
    pb.add_row({{z, 1.0}, {x, 1.0}, {x + 1, 1.0}}, 3.0);
    pb.add_row({}, 0.0);
    Solution s = solve(pb.build());
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(3).epsilon(1e-7));
}

TEST_CASE("property: random LPs agree with vertex enumeration") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> nd(2, 8);
    int compared = 0;
    for (int t = 0; t < 200; ++t) {
        int n = nd(rng);
        int m = std::uniform_int_distribution<int>(1, std::min(5, n - 1))(rng);
        Mat A = Mat::NullaryExpr(m, n, [&]() { return std::normal_distribution<>()(rng); });
        Vec x0 = testing::random_in_cone(rng, ConeProduct::nonneg(n));
        Vec c = Vec::NullaryExpr(n, [&]() { return std::uniform_real_distribution<>(0.1, 2.0)(rng); });
        ConicProgram p{c, A, A * x0, ConeProduct::nonneg(n)};
        Solution s = solve(p);
        double oracle = testing::lp_vertex_oracle(c, A, p.b);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(std::abs(s.objective - oracle) <= 1e-6 * (1 + std::abs(oracle)));
        // weak duality for the returned pair and a known feasible point
        CHECK(c.dot(x0) >= p.b.dot(s.y) - 1e-6);
        ++compared;
    }
    CHECK(compared == 200);
}

TEST_CASE("property: status trichotomy and scale invariance on random conic programs") {
    std::mt19937_64 rng(32);
    int seen[4] = {0, 0, 0, 0};
    for (int t = 0; t < 150; ++t) {
        ConeProduct K = testing::random_cone(rng, 2);
        int n = K.total_dim();
        int m = std::uniform_int_distribution<int>(1, std::max(1, n - 1))(rng);
        Mat A = Mat::NullaryExpr(m, n, [&]() { return std::normal_distribution<>()(rng); });
        Vec b = testing::gaussian(rng, m);
        int kind = t % 3;
        if (kind == 0) b = A * testing::random_in_cone(rng, K);  // feasible
        Vec c = kind == 2 ? testing::gaussian(rng, n) : Vec(testing::random_in_cone(rng, K));
        ConicProgram p{c, A, b, K};
        Solution s = solve(p);
        seen[static_cast<int>(s.status)]++;
        if (s.status == SolveStatus::NumericalLimit) continue;
        int verified = 0;
        verified += s.status == SolveStatus::Optimal && check_kkt(p, s, 1e-6).passed;
        verified += s.status != SolveStatus::Optimal && check_certificate(p, s, 1e-6);
        CHECK(verified == 1);

        ConicProgram q = p;
        q.c *= 3.5;
        Solution s2 = solve(q);
        if (s2.status == SolveStatus::NumericalLimit) continue;
        CHECK(s2.status == s.status);
        if (s.status == SolveStatus::Optimal)
            CHECK(testing::close(s2.objective, 3.5 * s.objective, 1e-6));
    }
    CHECK(seen[static_cast<int>(SolveStatus::NumericalLimit)] <= 3);
    CHECK(seen[static_cast<int>(SolveStatus::Optimal)] > 0);
}

}
