#include <doctest.h>

#include "cclab/corpus.hpp"
#include "cclab/error.hpp"
#include "helpers.hpp"

using namespace cclab;
using testing::vec;

namespace {

const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);

DisjunctiveSet simplex_set() {
    DisjunctiveSet s;
    s.A = vec({1, 1}).transpose();
    s.K = ConeProduct::nonneg(2);
    s.B.explicit_rhs = {vec({1})};
    return s;
}

bool same_direction(const Vec& a, const Vec& b, double tol) { return (a / a.norm() - b / b.norm()).norm() <= tol; }

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("theta on the worked examples") {
    ThetaResult t21 = theta(builtin("ex2_1").problem.set, vec({1, 0, -1}));
    CHECK(t21.value == doctest::Approx(-2).epsilon(1e-6));
    REQUIRE(t21.argmin >= 0);
    CHECK(t21.table[t21.argmin].b(0) == 2);
    CHECK(theta(builtin("ex2_4").problem.set, vec({1, -1})).value == doctest::Approx(-1).epsilon(1e-6));
    ThetaResult t42 = theta(builtin("ex4_2").problem.set, vec({0, 0, 1}));
    CHECK(t42.value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(t42.table[0].status == SolveStatus::PrimalInfeasible);
    CHECK(std::isinf(t42.table[0].value));
}

TEST_CASE("theta reports unbounded branches") {
    ThetaResult t = theta(builtin("ex2_4").problem.set, vec({-1, 0}));
    CHECK(t.unbounded);
    CHECK(t.value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("support function values") {
    const auto& s41 = builtin("ex4_1").problem.set;
    for (double z : {1.0, -1.0}) {
        SupportValue sv = support_eval(s41, vec({0, 1, 2}), vec({z}));
        REQUIRE(sv.finite());
        CHECK(sv.value == doctest::Approx(r3).epsilon(1e-6));
        for (double t : {0.0, 1.0, -2.0}) {
            SupportValue st = support_eval(s41, vec({0, t, std::sqrt(t * t + 1)}), vec({z}));
            CHECK(st.value == doctest::Approx(1).epsilon(1e-6));
        }
    }
    CHECK(support_eval(s41, vec({0, 1, 2}), vec({0})).value == 0.0);
    // ex2_1: D_mu = (-inf, -1], so sigma(-1) = +inf
    SupportValue inf = support_eval(builtin("ex2_1").problem.set, vec({1, 0, -1}), vec({-1}));
    CHECK(inf.kind == SupportKind::PlusInfinity);
    CHECK(inf.ray.size() == 1);
    CHECK_THROWS_AS(support_eval(s41, vec({0, 2, 1}), vec({1})), ModelError);
}

TEST_CASE("condition A.0") {
    const auto& s41 = builtin("ex4_1").problem.set;
    A0Result nu = check_A0(s41, vec({0, 1, 2}));
    CHECK(nu.status == CheckStatus::Holds);
    CHECK(contains(s41.K, nu.gamma, 1e-8));
    A0Result bad = check_A0(s41, vec({0, 2, 1}));
    CHECK(bad.status == CheckStatus::Fails);
    CHECK(contains(s41.K, bad.u, 1e-7));
    CHECK(vec({0, 2, 1}).dot(bad.u) < 0);
    Fixture c = builtin("cmir");
    CHECK(check_A0(c.problem.set, c.inequality("cmir").mu).status == CheckStatus::Holds);
}

TEST_CASE("condition A.1i") {
    A1iResult r = check_A1i(builtin("ex2_4").problem.set, vec({1, -1}));
    CHECK(r.status == CheckStatus::Holds);
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].optimum == doctest::Approx(1).epsilon(1e-6));
    CHECK(r.entries[1].optimum == doctest::Approx(-1).epsilon(1e-6));
    A1iResult f = check_A1i(simplex_set(), vec({1, 2}));
    CHECK(f.status == CheckStatus::Fails);
    CHECK(f.entries[0].status == CheckStatus::Holds);
    CHECK(f.entries[1].status == CheckStatus::Fails);
    CHECK(f.entries[1].optimum == doctest::Approx(1).epsilon(1e-6));
    // mu in the image of A^T: equality everywhere
    A1iResult e = check_A1i(simplex_set(), vec({3, 3}));
    CHECK(e.status == CheckStatus::Holds);
    CHECK(check_A1i(builtin("ex4_1").problem.set, vec({0, 0, 1})).status == CheckStatus::NotApplicable);
}

TEST_CASE("tight extreme rays") {
    const auto& s41 = builtin("ex4_1").problem.set;
    RaySearch nu = tight_extreme_ray_search(s41, vec({0, 1, 2}), 256, 0, {});
    REQUIRE(nu.tight.size() == 2);
    int hits = 0;
    for (const auto& t : nu.tight)
        for (double sgn : {1.0, -1.0}) hits += same_direction(t.z, vec({sgn / r3, -1.0 / 3, 2.0 / 3}), 1e-4);
    CHECK(hits == 2);
    for (const auto& s : nu.sampled) CHECK(s.gap >= -1e-6);

    Fixture c = builtin("cmir");
    RaySearch cr = tight_extreme_ray_search(c.problem.set, c.inequality("cmir").mu, 64, 0, {});
    CHECK(cr.tight.size() == 5);

    RaySearch r42 = tight_extreme_ray_search(builtin("ex4_2").problem.set, vec({0, 0, 1}), 64, 3, {});
    REQUIRE(r42.tight.size() == 1);
    CHECK(same_direction(r42.tight[0].z, vec({0, 1, 1}), 1e-6));
}

TEST_CASE("sublinear sufficient check") {
    const auto& s41 = builtin("ex4_1").problem.set;
    SublinearResult r = check_sublinear_sufficient(s41, vec({0, 1, r2}), 1.0);
    CHECK(r.status == CheckStatus::Holds);
    CHECK(r.margin > 0);
    for (const auto& z : r.rays) {
        bool match = same_direction(z, vec({1, -1, r2}), 1e-4) || same_direction(z, vec({-1, -1, r2}), 1e-4);
        CHECK(match);
    }
    Fixture c = builtin("cmir");
    SublinearResult rc = check_sublinear_sufficient(c.problem.set, c.inequality("cmir").mu, 0.375);
    CHECK(rc.status == CheckStatus::Holds);
    CHECK(rc.rays.size() == 5);
    CHECK(check_sublinear_sufficient(builtin("ex4_2").problem.set, vec({0, 0, 1}), 0.5).status ==
          CheckStatus::Inconclusive);
    CHECK(check_sublinear_sufficient(s41, vec({0, 1, 2}), 5.0).status == CheckStatus::NotApplicable);
    CHECK(check_sublinear_sufficient(s41, vec({0, 2, 1}), 0.0).status == CheckStatus::Fails);
}

TEST_CASE("minimality certificate from tight points") {
    const auto& s41 = builtin("ex4_1").problem.set;
    MinimalSufficientResult r = check_minimal_sufficient(s41, vec({0, 1, r2}), 1.0);
    CHECK(r.status == CheckStatus::Holds);
    CHECK_FALSE(r.used_hints);
    CHECK(r.margin > 0);
    for (const auto& x : r.points) CHECK(vec({0, 1, r2}).dot(x) == doctest::Approx(1).epsilon(1e-6));

    Fixture c = builtin("cmir");
    const Inequality& q = c.inequality("cmir");
    MinimalSufficientResult h = check_minimal_sufficient(c.problem.set, q.mu, q.eta0, {}, q.hint_points);
    CHECK(h.status == CheckStatus::Holds);
    CHECK(h.used_hints);
    CHECK(h.points.size() == 4);
    MinimalSufficientResult j = check_minimal_sufficient(c.problem.set, q.mu, q.eta0);
    CHECK(j.status == CheckStatus::Holds);
    CHECK_FALSE(j.used_hints);

    // a bad hint falls back to the joint program
    MinimalSufficientResult bad = check_minimal_sufficient(s41, vec({0, 1, r2}), 1.0, {}, {vec({0, 0, 1})});
    CHECK(bad.status == CheckStatus::Holds);
    CHECK_FALSE(bad.used_hints);

    CHECK(check_minimal_sufficient(s41, vec({0, 1, 2}), 1.0).status == CheckStatus::NotApplicable);
}

TEST_CASE("interior necessary condition") {
    const auto& s41 = builtin("ex4_1").problem.set;
    CHECK(check_minimal_necessary_interior(s41, vec({0, 1, 2}), 1.0).status == CheckStatus::Fails);
    CHECK(check_minimal_necessary_interior(s41, vec({0, 0, 1}), 1.0).status == CheckStatus::Holds);
    Fixture c = builtin("cmir");
    CHECK(check_minimal_necessary_interior(c.problem.set, c.inequality("cmir").mu, 0.375).status ==
          CheckStatus::NotApplicable);
}

TEST_CASE("exact decision on orthants") {
    const auto& s24 = builtin("ex2_4").problem.set;
    ExactDecision a = decide_minimal_exact(s24, vec({1, -1}), -2);
    CHECK(a.verdict == Verdict::CertifiedMinimal);
    CHECK(a.optimum <= 1e-6);
    ExactDecision b = decide_minimal_exact(s24, vec({1, 0}), 0);
    REQUIRE(b.verdict == Verdict::CertifiedNotMinimal);
    CHECK(b.delta(0) > 0);
    CHECK(theta(s24, vec({1, 0}) - b.delta).value >= -1e-6);
    CHECK(decide_minimal_exact(builtin("rem2_5").problem.set, vec({1, -1}), 0.5).verdict ==
          Verdict::CertifiedMinimal);
    CHECK_FALSE(decide_minimal_exact(builtin("ex4_1").problem.set, vec({0, 0, 1}), 1).applicable);
    CHECK_FALSE(decide_minimal_exact(s24, vec({1, -1}), 5).applicable);
}

TEST_CASE("dominance witness") {
    const auto& s22 = builtin("ex2_2").problem.set;
    DominanceWitness w = find_dominance_witness(s22, vec({1, 0, -1}), 0);
    REQUIRE(w.status == CheckStatus::Holds);
    CHECK(contains(s22.K, w.delta, 1e-9));
    CHECK(theta(s22, vec({1, 0, -1}) - w.delta).value >= -1e-6);
    CHECK(find_dominance_witness(builtin("ex2_1").problem.set, vec({1, 0, -1}), -2).status != CheckStatus::Holds);
}

TEST_CASE("dominance repair") {
    RepairResult r = dominance_repair(simplex_set(), vec({1, 2}));
    REQUIRE(r.status == CheckStatus::Holds);
    CHECK(r.repaired.mu(0) == doctest::Approx(1).epsilon(1e-6));
    CHECK(r.repaired.mu(1) == doctest::Approx(1).epsilon(1e-6));
    CHECK(r.repaired.eta0 == doctest::Approx(1).epsilon(1e-6));

    RepairResult e = dominance_repair(builtin("ex4_3").problem.set, vec({-1, 1}));
    REQUIRE(e.status == CheckStatus::Holds);
    CHECK(e.repaired.mu(0) == doctest::Approx(-1).epsilon(1e-6));
    CHECK(e.repaired.mu(1) == doctest::Approx(1).epsilon(1e-6));
    CHECK(e.repaired.eta0 == doctest::Approx(1).epsilon(1e-6));

    RepairResult fixed = dominance_repair(builtin("ex2_4").problem.set, vec({1, -1}));
    REQUIRE(fixed.status == CheckStatus::Holds);
    CHECK((fixed.repaired.mu - vec({1, -1})).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(dominance_repair(builtin("ex4_1").problem.set, vec({0, 0, 1})).status == CheckStatus::NotApplicable);
}

TEST_CASE("valid equations") {
    Fixture c = builtin("cmir");
    EquationCheck e = valid_equation_check(c.problem.set, vec({0, 0, 1, 0, -1}));
    CHECK(e.status == CheckStatus::Holds);
    CHECK((e.lambda - vec({0, 1})).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(e.eta0 == doctest::Approx(0).epsilon(1e-12));
    EquationCheck f = valid_equation_check(builtin("ex2_1").problem.set, vec({1, 0, -1}));
    CHECK(f.status == CheckStatus::Fails);
    CHECK(f.lambda(0) == doctest::Approx(-1));
    CHECK(valid_equation_check(c.problem.set, vec({1, 0, 0, 0, 0})).status == CheckStatus::Fails);

    auto eqs = enumerate_valid_equations(c.problem.set);
    REQUIRE(eqs.size() == 1);
    CHECK(format_equation(eqs[0].eq.mu, eqs[0].eq.eta0, c.problem.set.var_names) == "t − γ₂ = 0");
    CHECK(enumerate_valid_equations(builtin("ex2_1").problem.set).empty());
    DisjunctiveSet single = builtin("ex4_3").problem.set;
    single.B.lattice.reset();
    CHECK(enumerate_valid_equations(single).size() == 2);
}

TEST_CASE("equation formatting") {
    CHECK(format_equation(vec({2, 0, -4}), 6, {"a", "b", "c"}) == "a − 2·c = 3");
    CHECK(format_equation(vec({0, -1}), 0, {}) == "−x2 = 0");
    CHECK(format_equation(vec({1, 0.5}), 1, {"p", "q"}, "≥") == "p + 0.5·q ≥ 1");
}

TEST_CASE("vertex reconstruction") {
    Fixture c = builtin("cmir");
    auto v = reconstruct_vertices_2d(c.problem.set, c.inequality("cmir").mu);
    REQUIRE(v.size() == 3);
    CHECK((v[0] - vec({-0.5, 1})).norm() <= 1e-6);
    CHECK((v[1] - vec({0.5, 0})).norm() <= 1e-6);
    CHECK((v[2] - vec({1.5, 1})).norm() <= 1e-6);
    CHECK(reconstruct_vertices_2d(builtin("ex4_3").problem.set, vec({-1, 1})).empty());
}

TEST_CASE("full report ladder") {
    Fixture f21 = builtin("ex2_1");
    CertificateReport r = full_report(f21.problem.set, f21.inequality("mu"));
    CHECK(r.verdict == Verdict::CertifiedMinimal);
    CHECK(r.find("minimal_sufficient")->status == CheckStatus::Holds);
    CHECK(r.find("A1i") == nullptr);

    Fixture f41 = builtin("ex4_1");
    CertificateReport n = full_report(f41.problem.set, f41.inequality("nu"));
    CHECK(n.verdict == Verdict::CertifiedNotMinimal);
    CHECK(n.find("minimal_necessary_interior")->status == CheckStatus::Fails);
    CHECK(n.find("inf_sigma")->values.at("inf_sigma") == doctest::Approx(r3).epsilon(1e-6));

    CertificateReport inv = full_report(f41.problem.set, Inequality{"too_high", vec({0, 0, 1}), 2.0, {}});
    CHECK(inv.verdict == Verdict::Invalid);
    CHECK(inv.find("validity")->status == CheckStatus::Fails);

    Fixture f43 = builtin("ex4_3");
    CertificateReport t = full_report(f43.problem.set, f43.inequality("mu"));
    CHECK(t.find("truncation_monotonicity")->status == CheckStatus::Holds);
    CHECK(t.find("sublinear_sufficient")->status == CheckStatus::Holds);
}

TEST_CASE("truncation monotonicity failure downgrades inf-sigma verdicts") {
    // D_mu = [1,2] and sigma(b) = b for b < 0, so sigma keeps falling past the lower truncation
    DisjunctiveSet s;
    s.A = vec({1, -1}).transpose();
    s.K = ConeProduct::nonneg(2);
    s.B.lattice = Lattice{vec({0}), vec({1}), -3, 3};
    RhsSupport rs = support_over_rhs(s, vec({2, -1}));
    CHECK_FALSE(rs.monotone);
    CHECK(rs.inf_value == doctest::Approx(-3).epsilon(1e-6));
    CertificateReport r = full_report(s, Inequality{"q", vec({2, -1}), -3.0, {}});
    REQUIRE(r.find("truncation_monotonicity") != nullptr);
    CHECK(r.find("truncation_monotonicity")->status == CheckStatus::Fails);
    CHECK(r.verdict != Verdict::CertifiedNotMinimal);
    CHECK(r.verdict != Verdict::CertifiedMinimal);
}

}
