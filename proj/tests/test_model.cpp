#include <doctest.h>

#include "cclab/corpus.hpp"
#include "cclab/error.hpp"
#include "helpers.hpp"

using namespace cclab;
using testing::vec;

namespace {

std::string error_of(const std::string& text) {
    try {
        load_problem(text);
    } catch (const ModelError& e) {
        return e.what();
    }
    return "";
}

const char* kSmall = R"({
  "format_version": 1,
  "A": {"shape": [1, 2], "data": [-1, 1]},
  "cone": [{"kind": "nonneg", "dim": 2}],
  "rhs": {"explicit": [[-2], [1]]},
  "inequalities": [{"name": "a", "mu": [1, -1], "eta0": -2}]
})";

}  // namespace

TEST_SUITE("model") {

TEST_CASE("load a small problem") {
    Problem p = load_problem(kSmall);
    CHECK(p.set.m() == 1);
    CHECK(p.set.n() == 2);
    CHECK(p.set.B.expand().size() == 2);
    REQUIRE(p.inequalities.size() == 1);
    CHECK(p.inequalities[0].eta0 == -2);
}

TEST_CASE("positioned errors") {
    CHECK(error_of("{\"A\": [1").rfind("parse error at byte", 0) == 0);
    std::string bad_shape = R"({"format_version":1,"A":{"shape":[1,2],"data":[1]},"cone":[{"kind":"nonneg","dim":2}],"rhs":{"explicit":[[0]]}})";
    CHECK(error_of(bad_shape).find("'A.data'") != std::string::npos);
    std::string bad_cone = R"({"format_version":1,"A":{"shape":[1,2],"data":[1,1]},"cone":[{"kind":"nonneg","dim":3}],"rhs":{"explicit":[[0]]}})";
    CHECK(error_of(bad_cone).find("'cone'") != std::string::npos);
    std::string psd = R"({"format_version":1,"A":{"shape":[1,2],"data":[1,1]},"cone":[{"kind":"psd","dim":2}],"rhs":{"explicit":[[0]]}})";
    CHECK(error_of(psd).find("'cone[0].kind'") != std::string::npos);
    std::string bad_rhs = R"({"format_version":1,"A":{"shape":[1,2],"data":[1,1]},"cone":[{"kind":"nonneg","dim":2}],"rhs":{"explicit":[[0,1]]}})";
    CHECK(error_of(bad_rhs).find("'rhs.explicit[0]'") != std::string::npos);
    std::string bad_mu = R"({"format_version":1,"A":{"shape":[1,2],"data":[1,1]},"cone":[{"kind":"nonneg","dim":2}],"rhs":{"explicit":[[0]]},"inequalities":[{"name":"q","mu":[1],"eta0":0}]})";
    CHECK(error_of(bad_mu).find("'inequalities[0].mu'") != std::string::npos);
    std::string no_rhs = R"({"format_version":1,"A":{"shape":[1,2],"data":[1,1]},"cone":[{"kind":"nonneg","dim":2}],"rhs":{}})";
    CHECK(error_of(no_rhs).find("'rhs'") != std::string::npos);
    CHECK(error_of("[1,2]").find("'<root>'") != std::string::npos);
}

TEST_CASE("lattice expansion keeps order and drops duplicates") {
    RhsFamily B;
    B.explicit_rhs = {vec({0.5, 0})};
    B.lattice = Lattice{vec({0.5, 0}), vec({1, 0}), -1, 1};
    auto xs = B.expand();
    REQUIRE(xs.size() == 3);
    CHECK(xs[0] == vec({0.5, 0}));
    CHECK(xs[1] == vec({-0.5, 0}));
    CHECK(xs[2] == vec({1.5, 0}));
}

TEST_CASE("round trip of every fixture") {
    for (const auto& name : builtin_names()) {
        Fixture fx = builtin(name);
        std::string text = save_problem(fx.problem);
        Problem back = load_problem(text);
        CHECK(save_problem(back) == text);
        CHECK(back.set.A == fx.problem.set.A);
        CHECK(back.set.K == fx.problem.set.K);
        CHECK(back.set.B.expand() == fx.problem.set.B.expand());
        REQUIRE(back.inequalities.size() == fx.problem.inequalities.size());
        for (size_t i = 0; i < back.inequalities.size(); ++i) {
            CHECK(back.inequalities[i].mu == fx.problem.inequalities[i].mu);
            CHECK(back.inequalities[i].eta0 == fx.problem.inequalities[i].eta0);
            CHECK(back.inequalities[i].hint_points == fx.problem.inequalities[i].hint_points);
        }
    }
}

TEST_CASE("report json round trip keeps infinities") {
    CertificateReport r;
    r.inequality = "q";
    r.mu = vec({1, 2});
    r.eta0 = 0.25;
    CheckEntry e;
    e.name = "inf_sigma";
    e.status = CheckStatus::Holds;
    e.values["inf_sigma"] = std::numeric_limits<double>::infinity();
    e.note = "n";
    r.checks.push_back(e);
    r.verdict = Verdict::SublinearInconclusiveMinimality;
    r.reason = "because";
    CertificateReport b = report_from_json(json::parse(report_to_json(r).dump()));
    CHECK(b.verdict == r.verdict);
    CHECK(b.mu == r.mu);
    REQUIRE(b.checks.size() == 1);
    CHECK(std::isinf(b.checks[0].values["inf_sigma"]));
    CHECK(report_to_json(b) == report_to_json(r));
    CHECK(verdict_from_string("CertifiedMinimal") == Verdict::CertifiedMinimal);
    CHECK_THROWS_AS(verdict_from_string("Maybe"), ModelError);
}

TEST_CASE("feasible_rhs: certificates and witnesses") {
    Fixture fx = builtin("ex4_2");
    auto st = feasible_rhs(fx.problem.set);
    REQUIRE(st.size() == 2);
    CHECK(st[0].state == RhsState::Infeasible);
    // y with A^T y in -K*, b.y > 0
    const Vec& y = st[0].certificate;
    CHECK(st[0].b.dot(y) > 0);
    CHECK(contains(fx.problem.set.K, Vec(-fx.problem.set.A.transpose() * y), 1e-9));
    CHECK(st[1].state == RhsState::Feasible);
    CHECK(contains(fx.problem.set.K, st[1].witness, 1e-7));
    CHECK((fx.problem.set.A * st[1].witness - st[1].b).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("interior point of S") {
    Assumption2Result a = assumption2_check(builtin("ex2_1").problem.set);
    CHECK(a.status == CheckStatus::Holds);
    CHECK(interior_margin(builtin("ex2_1").problem.set.K, a.witness) > 0);
    Assumption2Result b = assumption2_check(builtin("ex2_2").problem.set);
    CHECK(b.status == CheckStatus::Fails);
    CHECK(b.margin <= 1e-7);
    CHECK(assumption2_check(builtin("ex4_3").problem.set).status == CheckStatus::Fails);
}

TEST_CASE("property: feasible witnesses verify on random sets") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        DisjunctiveSet s = testing::random_set(rng, testing::random_cone(rng), 1 + t % 2, 2);
        s.B.explicit_rhs.push_back(testing::gaussian(rng, s.m()));
        for (const auto& r : feasible_rhs(s)) {
            if (r.state == RhsState::Feasible) {
                CHECK(contains(s.K, r.witness, 1e-7));
                CHECK((s.A * r.witness - r.b).cwiseAbs().maxCoeff() <= 1e-7 * (1 + r.b.cwiseAbs().maxCoeff()));
            } else if (r.state == RhsState::Infeasible) {
                CHECK(r.b.dot(r.certificate) > 0);
                CHECK(contains(s.K, Vec(-s.A.transpose() * r.certificate), 1e-7));
            }
        }
        Assumption2Result a = assumption2_check(s);
        if (a.status == CheckStatus::Holds) {
            CHECK(interior_margin(s.K, a.witness) > 0);
            CHECK((s.A * a.witness - a.b).cwiseAbs().maxCoeff() <= 1e-6 * (1 + a.b.cwiseAbs().maxCoeff()));
        }
    }
}

}
