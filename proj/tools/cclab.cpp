// cclab: command-line front end for the conic cut analysis library.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cclab/analysis.hpp"
#include "cclab/corpus.hpp"
#include "cclab/error.hpp"
#include "cclab/separation.hpp"

using namespace cclab;

namespace {

enum Exit { kOk = 0, kFail = 1, kModel = 2, kSolver = 3 };

struct Config {
    double tol = 1e-6;
    long long seed = -1;  // -1: take CCLAB_SEED or 0
    int samples = 256;
    bool as_json = false;
    int max_iters = 200;
    double feas_tol = 1e-8, gap_tol = 1e-8;
    double f = std::nan("");
    int M = -1;

    AnalysisOptions options() const {
        AnalysisOptions o;
        o.tol = tol;
        o.samples = samples;
        o.seed = static_cast<std::uint64_t>(seed);
        o.solver.max_iters = max_iters;
        o.solver.feas_tol = feas_tol;
        o.solver.gap_tol = gap_tol;
        return o;
    }
    json to_json() const {
        return {{"tol", tol},           {"seed", seed},         {"samples", samples}, {"max_iters", max_iters},
                {"feas_tol", feas_tol}, {"gap_tol", gap_tol}};
    }
    std::map<std::string, double> params() const {
        std::map<std::string, double> p;
        if (!std::isnan(f)) p["f"] = f;
        if (M >= 0) p["M"] = M;
        return p;
    }
};

bool is_fixture(const std::string& s) {
    for (const auto& n : builtin_names())
        if (n == s) return true;
    return false;
}

Problem load(const std::string& what, const Config& cfg) {
    if (is_fixture(what)) return builtin(what, cfg.params()).problem;
    if (!std::filesystem::exists(what)) throw ModelError("'" + what + "' is neither a fixture nor a file");
    return load_problem_file(what);
}

Vec parse_vec(const std::string& text) {
    std::vector<double> xs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            xs.push_back(std::stod(item, &pos));
            if (pos != item.size() && item.find_first_not_of(" ", pos) != std::string::npos) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ModelError("cannot parse number '" + item + "' in '" + text + "'");
        }
    }
    return Eigen::Map<Vec>(xs.data(), static_cast<int>(xs.size()));
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(8) << v;
    return os.str();
}

std::string fmt(const Vec& v) {
    std::string s = "[";
    for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
    return s + "]";
}

std::vector<Inequality> select(const Problem& p, const std::string& name, const std::string& mu, double eta0) {
    if (!mu.empty()) return {Inequality{"cli", parse_vec(mu), eta0, {}}};
    if (name.empty()) return p.inequalities;
    for (const auto& q : p.inequalities)
        if (q.name == name) return {q};
    throw ModelError("no inequality named '" + name + "'");
}

void print_report(const CertificateReport& r) {
    std::cout << "inequality " << r.inequality << ": mu = " << fmt(r.mu) << ", eta0 = " << fmt(r.eta0) << "\n";
    for (const auto& c : r.checks) {
        std::cout << "  " << std::left << std::setw(28) << c.name << std::setw(14) << to_string(c.status);
        for (const auto& [k, v] : c.values) std::cout << " " << k << "=" << fmt(v);
        if (!c.note.empty()) std::cout << "  (" << c.note << ")";
        std::cout << "\n";
    }
    std::cout << "  verdict: " << to_string(r.verdict) << " - " << r.reason << "\n";
}

int cmd_report(const std::string& problem, const std::string& name, const std::string& mu, double eta0,
               const Config& cfg) {
    Problem p = load(problem, cfg);
    json out = {{"config", cfg.to_json()}, {"reports", json::array()}};
    int code = kOk;
    for (const auto& q : select(p, name, mu, eta0)) {
        CertificateReport r = full_report(p.set, q, cfg.options());
        if (r.find("validity")->status == CheckStatus::Inconclusive) code = kSolver;
        if (cfg.as_json)
            out["reports"].push_back(report_to_json(r));
        else
            print_report(r);
    }
    if (cfg.as_json) std::cout << out.dump(2) << "\n";
    return code;
}

int cmd_theta(const std::string& problem, const std::string& name, const std::string& mu, const Config& cfg) {
    Problem p = load(problem, cfg);
    json out = {{"config", cfg.to_json()}, {"results", json::array()}};
    int code = kOk;
    for (const auto& q : select(p, name, mu, 0.0)) {
        ThetaResult th = theta(p.set, q.mu, cfg.options());
        if (!th.complete) code = kSolver;
        json j = {{"inequality", q.name}, {"mu", vec_to_json(q.mu)}, {"theta", number_to_json(th.value)},
                  {"complete", th.complete}, {"branches", json::array()}};
        for (const auto& b : th.table)
            j["branches"].push_back({{"b", vec_to_json(b.b)}, {"status", to_string(b.status)},
                                     {"value", number_to_json(b.value)}});
        if (cfg.as_json) {
            out["results"].push_back(j);
        } else {
            std::cout << q.name << ": theta = " << fmt(th.value) << (th.complete ? "" : " (incomplete)") << "\n";
            for (const auto& b : th.table)
                std::cout << "  b = " << fmt(b.b) << "  " << to_string(b.status) << "  " << fmt(b.value) << "\n";
        }
    }
    if (cfg.as_json) std::cout << out.dump(2) << "\n";
    return code;
}

int cmd_support(const std::string& problem, const std::string& name, const std::string& mu, const std::string& z,
                const Config& cfg) {
    Problem p = load(problem, cfg);
    json out = {{"config", cfg.to_json()}, {"results", json::array()}};
    int code = kOk;
    for (const auto& q : select(p, name, mu, 0.0)) {
        std::vector<Vec> pts = z.empty() ? p.set.B.expand() : std::vector<Vec>{parse_vec(z)};
        json j = {{"inequality", q.name}, {"values", json::array()}};
        double inf = std::numeric_limits<double>::infinity();
        if (!cfg.as_json) std::cout << q.name << ":\n";
        for (const auto& b : pts) {
            SupportValue sv = support_eval(p.set, q.mu, b, cfg.options());
            if (sv.kind == SupportKind::Unknown) code = kSolver;
            else inf = std::min(inf, sv.value);
            j["values"].push_back({{"z", vec_to_json(b)}, {"sigma", number_to_json(sv.value)}});
            if (!cfg.as_json) std::cout << "  sigma(" << fmt(b) << ") = " << fmt(sv.value) << "\n";
        }
        j["inf"] = number_to_json(inf);
        if (cfg.as_json) out["results"].push_back(j);
        else if (pts.size() > 1) std::cout << "  inf over B = " << fmt(inf) << "\n";
    }
    if (cfg.as_json) std::cout << out.dump(2) << "\n";
    return code;
}

int cmd_equations(const std::string& problem, const Config& cfg) {
    Problem p = load(problem, cfg);
    auto eqs = enumerate_valid_equations(p.set, cfg.options());
    if (cfg.as_json) {
        json out = {{"config", cfg.to_json()}, {"equations", json::array()}};
        for (const auto& e : eqs)
            out["equations"].push_back({{"mu", vec_to_json(e.eq.mu)}, {"eta0", number_to_json(e.eq.eta0)},
                                        {"lambda", vec_to_json(e.lambda)},
                                        {"text", format_equation(e.eq.mu, e.eq.eta0, p.set.var_names)}});
        std::cout << out.dump(2) << "\n";
    } else {
        if (eqs.empty()) std::cout << "no valid equations\n";
        for (const auto& e : eqs) std::cout << format_equation(e.eq.mu, e.eq.eta0, p.set.var_names) << "\n";
    }
    return kOk;
}

int cmd_separate(const std::string& problem, const std::string& point, const std::string& norm_name,
                 const Config& cfg) {
    Problem p = load(problem, cfg);
    Normalization norm = normalization_from_string(norm_name);
    CutResult r = generate_cut(branches_from_set(p.set), parse_vec(point), norm, cfg.options());
    bool limit = r.diagnostic.find("NumericalLimit") != std::string::npos;
    if (cfg.as_json) {
        json j = {{"config", cfg.to_json()}, {"normalization", to_string(norm)}, {"found", r.cut.has_value()},
                  {"diagnostic", r.diagnostic}, {"optimum", r.optimum}};
        if (r.cut)
            j.update({{"mu", vec_to_json(r.cut->mu)}, {"eta0", r.cut->eta0}, {"violation", r.violation},
                      {"theta", number_to_json(r.theta)}});
        std::cout << j.dump(2) << "\n";
    } else if (r.cut) {
        std::cout << "cut: " << format_equation(r.cut->mu, r.cut->eta0, p.set.var_names, "≥") << "\n"
                  << "  mu = " << fmt(r.cut->mu) << ", eta0 = " << fmt(r.cut->eta0) << "\n"
                  << "  violation = " << fmt(r.violation) << "\n"
                  << "  theta re-verification: theta(mu) = " << fmt(r.theta) << " >= eta0  PASS\n";
    } else {
        std::cout << "NoCutFound: " << r.diagnostic << "\n";
    }
    return limit ? kSolver : kOk;
}

bool near(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

int cmd_demo(const std::string& name, const Config& cfg) {
    Fixture fx = builtin(name, cfg.params());
    const AnalysisOptions opts = cfg.options();
    bool all = true;
    auto line = [&](bool ok, const std::string& what) {
        all = all && ok;
        std::cout << (ok ? "PASS  " : "FAIL  ") << what << "\n";
    };
    std::cout << fx.name << ": " << fx.description << "\n";
    for (const auto& q : fx.problem.inequalities) {
        const ExpectedFacts* ex = fx.expected_for(q.name);
        CertificateReport r = full_report(fx.problem.set, q, opts);
        if (ex) line(r.verdict == ex->verdict, q.name + " verdict " + to_string(r.verdict));
        if (!ex) continue;
        for (const auto& s : ex->scalars) {
            double got = s.name == "theta" ? theta(fx.problem.set, q.mu, opts).value
                                           : support_over_rhs(fx.problem.set, q.mu, opts).inf_value;
            line(near(got, s.value, cfg.tol),
                 q.name + " " + s.name + " = " + fmt(got) + " (expected " + fmt(s.value) + ", " + s.origin + ")");
        }
    }
    for (const auto& s : fx.set_scalars)
        if (s.name == "assumption2_margin") {
            Assumption2Result a2 = assumption2_check(fx.problem.set, opts);
            line(a2.status == CheckStatus::Fails, "assumption2 Fails (margin " + fmt(a2.margin) + ")");
        }
    if (!fx.equations.empty()) {
        auto eqs = enumerate_valid_equations(fx.problem.set, opts);
        std::vector<std::string> got;
        for (const auto& e : eqs) got.push_back(format_equation(e.eq.mu, e.eq.eta0, fx.problem.set.var_names));
        std::string txt;
        for (const auto& g : got) txt += (txt.empty() ? "" : "; ") + g;
        line(got == fx.equations, "valid equations: " + (txt.empty() ? std::string("none") : txt));
    }
    if (fx.name == "cmir") {
        const double f = fx.params.at("f");
        const Inequality& q = fx.inequality("cmir");
        auto verts = reconstruct_vertices_2d(fx.problem.set, q.mu, 16, opts);
        std::vector<Vec> want = {Eigen::Vector2d(-2 * f, 1), Eigen::Vector2d(1 - 2 * f, 0),
                                 Eigen::Vector2d(2 - 2 * f, 1)};
        bool ok = verts.size() == want.size();
        for (size_t i = 0; ok && i < want.size(); ++i) ok = (verts[i] - want[i]).cwiseAbs().maxCoeff() <= 1e-6;
        std::string txt;
        for (const auto& v : verts) txt += (txt.empty() ? "" : " ") + fmt(v);
        line(ok, "D_mu vertices " + txt);
    }
    std::cout << (all ? "PASS" : "FAIL") << "\n";
    return all ? kOk : kFail;
}

int cmd_export(const std::string& dir, const Config& cfg) {
    std::filesystem::create_directories(dir);
    for (const auto& n : builtin_names()) {
        Fixture fx = builtin(n, n == "cmir" || n == "ex4_3" ? cfg.params() : std::map<std::string, double>{});
        std::string path = (std::filesystem::path(dir) / (n + ".json")).string();
        std::ofstream(path) << save_problem(fx.problem);
        std::cout << path << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analysis of valid inequalities for disjunctive conic sets"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    app.add_option("--tol", cfg.tol, "validity / tightness tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "random seed (default: $CCLAB_SEED or 0)")->check(CLI::NonNegativeNumber);
    app.add_option("--samples", cfg.samples, "extreme rays sampled per Lorentz block")->check(CLI::PositiveNumber);
    app.add_flag("--json", cfg.as_json, "machine-readable output");
    app.add_option("--max-iters", cfg.max_iters, "solver iteration limit")->check(CLI::PositiveNumber);
    app.add_option("--feas-tol", cfg.feas_tol, "solver feasibility tolerance")->check(CLI::PositiveNumber);
    app.add_option("--gap-tol", cfg.gap_tol, "solver gap tolerance")->check(CLI::PositiveNumber);
    app.add_option("--f", cfg.f, "fixture parameter f (cmir)");
    app.add_option("--M", cfg.M, "fixture truncation M (cmir, ex4_3)");

    std::string problem, name, mu, z, point, norm = "alpha_norm", dir = "data";
    double eta0 = 0.0;
    auto problem_opt = [&](CLI::App* s) {
        s->add_option("problem", problem, "fixture name or problem file")->required();
    };
    auto ineq_opts = [&](CLI::App* s) {
        s->add_option("-i,--inequality", name, "inequality name (default: all)");
        s->add_option("--mu", mu, "comma-separated mu overriding the stored inequalities");
    };
    auto* rep = app.add_subcommand("report", "certificate ladder and verdict per inequality");
    problem_opt(rep);
    ineq_opts(rep);
    rep->add_option("--eta0", eta0, "right-hand side used with --mu");
    auto* th = app.add_subcommand("theta", "best right-hand side theta(mu)");
    problem_opt(th);
    ineq_opts(th);
    auto* sup = app.add_subcommand("support", "support function of D_mu");
    problem_opt(sup);
    ineq_opts(sup);
    sup->add_option("--z", z, "comma-separated point (default: every b in B)");
    auto* eqs = app.add_subcommand("equations", "valid equations of the set");
    problem_opt(eqs);
    auto* sep = app.add_subcommand("separate", "cut off a point");
    problem_opt(sep);
    sep->add_option("--point", point, "comma-separated point")->required();
    sep->add_option("--normalization", norm, "alpha_norm or trivial_box");
    auto* demo = app.add_subcommand("demo", "run a built-in fixture against its expected facts");
    demo->add_option("name", problem, "fixture name")->required();
    auto* exp = app.add_subcommand("export", "write every fixture as a problem file");
    exp->add_option("dir", dir, "output directory");
    app.add_subcommand("list", "list built-in fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kModel;
    }
    if (cfg.seed < 0) {
        const char* env = std::getenv("CCLAB_SEED");
        cfg.seed = 0;
        if (env) {
            try {
                cfg.seed = std::stoll(env);
            } catch (const std::exception&) {
                std::cerr << "error: CCLAB_SEED is not an integer\n";
                return kModel;
            }
        }
    }
    try {
        if (*rep) return cmd_report(problem, name, mu, eta0, cfg);
        if (*th) return cmd_theta(problem, name, mu, cfg);
        if (*sup) return cmd_support(problem, name, mu, z, cfg);
        if (*eqs) return cmd_equations(problem, cfg);
        if (*sep) return cmd_separate(problem, point, norm, cfg);
        if (*demo) return cmd_demo(problem, cfg);
        if (*exp) return cmd_export(dir, cfg);
        for (const auto& n : builtin_names()) std::cout << n << "\n";
        return kOk;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kModel;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolver;
    }
}
