#include "cclab/corpus.hpp"

#include <cmath>

#include "cclab/error.hpp"

namespace cclab {

namespace {

Vec v(std::initializer_list<double> xs) {
    Vec r(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) r(i++) = x;
    return r;
}

Mat row(std::initializer_list<double> xs) { return v(xs).transpose(); }

double param(const std::map<std::string, double>& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

void reject_unknown(const std::map<std::string, double>& p, std::initializer_list<const char*> allowed,
                    const std::string& fixture) {
    for (const auto& [k, _] : p) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw ModelError("fixture '" + fixture + "' has no parameter '" + k + "'");
    }
}

int int_param(const std::map<std::string, double>& p, const std::string& key, int dflt, int lo,
              const std::string& fixture) {
    double x = param(p, key, dflt);
    if (x != std::floor(x) || x < lo)
        throw ModelError("fixture '" + fixture + "': " + key + " must be an integer >= " + std::to_string(lo));
    return static_cast<int>(x);
}

ExpectedFacts facts(const std::string& ineq, Verdict v, std::vector<ExpectedScalar> s = {}) {
    return ExpectedFacts{ineq, v, std::move(s)};
}

Fixture ex2_1() {
    Fixture fx;
    fx.description = "Lorentz cone L3 with A = [-1,0,1] and B = {0,2}";
    auto& s = fx.problem.set;
    s.A = row({-1, 0, 1});
    s.K = ConeProduct::lorentz(3);
    s.B.explicit_rhs = {v({0}), v({2})};
    fx.problem.inequalities.push_back({"mu", v({1, 0, -1}), -2.0, {v({0, 1, 2})}});
    fx.expected.push_back(facts("mu", Verdict::CertifiedMinimal, {{"theta", -2.0, "closed form"}}));
    return fx;
}

Fixture ex2_2() {
    Fixture fx;
    fx.description = "Lorentz cone L3 with A = [-1,0,1] and B = {0}; no interior points";
    auto& s = fx.problem.set;
    s.A = row({-1, 0, 1});
    s.K = ConeProduct::lorentz(3);
    s.B.explicit_rhs = {v({0})};
    fx.problem.inequalities.push_back({"mu", v({-1, 0, 1}), 0.0, {}});
    fx.problem.inequalities.push_back({"minus_mu", v({1, 0, -1}), 0.0, {}});
    fx.expected.push_back(facts("mu", Verdict::CertifiedNotMinimal, {{"theta", 0.0, "closed form"}}));
    fx.expected.push_back(facts("minus_mu", Verdict::CertifiedNotMinimal, {{"theta", 0.0, "closed form"}}));
    fx.set_scalars.push_back({"assumption2_margin", 0.0, "closed form"});
    fx.equations.push_back("x1 − x3 = 0");
    return fx;
}

Fixture ex2_4() {
    Fixture fx;
    fx.description = "R2+ with A = [-1,1] and B = {-2,1}";
    auto& s = fx.problem.set;
    s.A = row({-1, 1});
    s.K = ConeProduct::nonneg(2);
    s.B.explicit_rhs = {v({-2}), v({1})};
    fx.problem.inequalities.push_back({"nontight", v({1, -1}), -2.0, {}});
    fx.problem.inequalities.push_back({"x1", v({1, 0}), 0.0, {}});
    fx.problem.inequalities.push_back({"hull", v({1, 2}), 2.0, {}});
    fx.expected.push_back(facts("nontight", Verdict::CertifiedMinimal, {{"theta", -1.0, "closed form"}}));
    fx.expected.push_back(facts("x1", Verdict::CertifiedNotMinimal, {{"theta", 0.0, "closed form"}}));
    fx.expected.push_back(facts("hull", Verdict::CertifiedMinimal, {{"theta", 2.0, "derived"}}));
    return fx;
}

Fixture rem2_5() {
    Fixture fx;
    fx.description = "R2+ with A = [-1,1] and B = {-2,-1}";
    auto& s = fx.problem.set;
    s.A = row({-1, 1});
    s.K = ConeProduct::nonneg(2);
    s.B.explicit_rhs = {v({-2}), v({-1})};
    fx.problem.inequalities.push_back({"half", v({1, -1}), 0.5, {}});
    fx.expected.push_back(facts("half", Verdict::CertifiedMinimal, {{"theta", 1.0, "closed form"}}));
    return fx;
}

Fixture ex4_1() {
    Fixture fx;
    fx.description = "Lorentz cone L3 with A = [1,0,0] and B = {-1,1}";
    auto& s = fx.problem.set;
    s.A = row({1, 0, 0});
    s.K = ConeProduct::lorentz(3);
    s.B.explicit_rhs = {v({-1}), v({1})};
    const double r3 = std::sqrt(3.0);
    fx.problem.inequalities.push_back({"nu", v({0, 1, 2}), 1.0, {}});
    fx.expected.push_back(facts("nu", Verdict::CertifiedNotMinimal,
                                {{"theta", r3, "derived"}, {"inf_sigma", r3, "closed form"}}));
    for (double t : {0.0, 1.0, -2.0}) {
        double r = std::sqrt(t * t + 1.0);
        std::string name = t < 0 ? "mu_tm" + std::to_string(int(-t)) : "mu_t" + std::to_string(int(t));
        fx.problem.inequalities.push_back({name, v({0, t, r}), 1.0, {v({1, -t, r}), v({-1, -t, r})}});
        fx.expected.push_back(facts(name, Verdict::CertifiedMinimal,
                                    {{"theta", 1.0, "closed form"}, {"inf_sigma", 1.0, "closed form"}}));
    }
    return fx;
}

Fixture ex4_2() {
    Fixture fx;
    fx.description = "Lorentz cone L3 with A = [0,1,1] and B = {-1,1}";
    auto& s = fx.problem.set;
    s.A = row({0, 1, 1});
    s.K = ConeProduct::lorentz(3);
    s.B.explicit_rhs = {v({-1}), v({1})};
    fx.problem.inequalities.push_back({"mu", v({0, 0, 1}), 0.5, {}});
    fx.expected.push_back(facts("mu", Verdict::Inconclusive, {{"theta", 0.5, "closed form"}}));
    return fx;
}

Fixture ex4_3(int M) {
    Fixture fx;
    fx.description = "R2+ with A = I and B = {(0,1)} plus (k,-1) for |k| <= M";
    fx.params["M"] = M;
    auto& s = fx.problem.set;
    s.A = Mat::Identity(2, 2);
    s.K = ConeProduct::nonneg(2);
    s.B.explicit_rhs = {v({0, 1})};
    s.B.lattice = Lattice{v({0, -1}), v({1, 0}), -M, M};
    fx.problem.inequalities.push_back({"mu", v({-1, 1}), 1.0, {}});
    fx.expected.push_back(facts("mu", Verdict::CertifiedNotMinimal,
                                {{"theta", 1.0, "closed form"}, {"inf_sigma", 1.0, "closed form"}}));
    return fx;
}

Fixture cmir(double f, int M) {
    Fixture fx;
    fx.description = "conic mixed-integer rounding set |x + y - w - b| <= t with b = f";
    fx.params["f"] = f;
    fx.params["M"] = M;
    auto& s = fx.problem.set;
    s.A.resize(2, 5);
    s.A << 1, -1, 0, -1, 0,
           0, 0, 1, 0, -1;
    s.K = ConeProduct::nonneg(3) * ConeProduct::lorentz(2);
    s.B.lattice = Lattice{v({f, 0}), v({1, 0}), -M, M};
    s.var_names = {"y", "w", "t", "γ₁", "γ₂"};
    const double eta = 2 * f - 2 * f * f;
    Inequality cut{"cmir", v({2 - 2 * f, 2 * f, 1, 2 * f - 1, 0}), eta, {}};
    cut.hint_points = {v({f, 0, 0, 0, 0}), v({0, 1 - f, 0, 0, 0}), v({0, 0, f, -f, f}),
                       v({0, 0, 1 - f, 1 - f, 1 - f})};
    fx.problem.inequalities.push_back(cut);
    fx.expected.push_back(facts("cmir", Verdict::CertifiedMinimal,
                                {{"theta", eta, "closed form"}, {"inf_sigma", eta, "closed form"}}));
    fx.equations.push_back("t − γ₂ = 0");
    return fx;
}

}  // namespace

const ExpectedFacts* Fixture::expected_for(const std::string& ineq) const {
    for (const auto& e : expected)
        if (e.inequality == ineq) return &e;
    return nullptr;
}

const Inequality& Fixture::inequality(const std::string& n) const {
    for (const auto& q : problem.inequalities)
        if (q.name == n) return q;
    throw ModelError("fixture '" + name + "' has no inequality '" + n + "'");
}

std::vector<std::string> builtin_names() {
    return {"ex2_1", "ex2_2", "ex2_4", "rem2_5", "ex4_1", "ex4_2", "ex4_3", "cmir"};
}

Fixture builtin(const std::string& name, const std::map<std::string, double>& params) {
    Fixture fx;
    if (name == "cmir") {
        reject_unknown(params, {"f", "M"}, name);
        double f = param(params, "f", 0.25);
        if (!(f > 0.0 && f < 1.0)) throw ModelError("fixture 'cmir': f must lie in (0,1)");
        fx = cmir(f, int_param(params, "M", 10, 2, name));
    } else if (name == "ex4_3") {
        reject_unknown(params, {"M"}, name);
        fx = ex4_3(int_param(params, "M", 5, 2, name));
    } else {
        reject_unknown(params, {}, name);
        if (name == "ex2_1") fx = ex2_1();
        else if (name == "ex2_2") fx = ex2_2();
        else if (name == "ex2_4") fx = ex2_4();
        else if (name == "rem2_5") fx = rem2_5();
        else if (name == "ex4_1") fx = ex4_1();
        else if (name == "ex4_2") fx = ex4_2();
        else throw ModelError("unknown fixture '" + name + "'");
    }
    fx.name = name;
    fx.problem.set.validate();
    return fx;
}

}  // namespace cclab
