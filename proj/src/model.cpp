#include "cclab/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cclab/error.hpp"
#include "cclab/linalg.hpp"

namespace cclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ModelError("validation error at '" + field + "': " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + key, "missing field");
    return j.at(key);
}

Vec read_vec(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vec v(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        try {
            v(static_cast<int>(i)) = number_from_json(j[i]);
        } catch (const std::exception&) {
            fail(path + "[" + std::to_string(i) + "]", "expected a number");
        }
        if (!std::isfinite(v(static_cast<int>(i)))) fail(path + "[" + std::to_string(i) + "]", "not finite");
    }
    return v;
}

int read_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

}  // namespace

json number_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double number_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ModelError("expected a number, got " + j.dump());
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(number_to_json(v(i)));
    return a;
}

Vec vec_from_json(const json& j) { return read_vec(j, "vector"); }

std::vector<Vec> RhsFamily::expand() const {
    std::vector<Vec> out;
    auto add = [&](const Vec& b) {
        for (const auto& o : out)
            if (o.size() == b.size() && o == b) return;
        out.push_back(b);
    };
    for (const auto& b : explicit_rhs) add(b);
    if (lattice)
        for (int k = lattice->kmin; k <= lattice->kmax; ++k) add(lattice->base + k * lattice->step);
    if (out.empty()) throw ModelError("right-hand-side family is empty");
    return out;
}

void DisjunctiveSet::validate() const {
    if (!K.is_regular()) fail("cone", "only nonneg and lorentz blocks are allowed");
    if (K.total_dim() != n())
        fail("cone", "total dimension " + std::to_string(K.total_dim()) + " does not match A with " +
                         std::to_string(n()) + " columns");
    if (!A.allFinite()) fail("A.data", "entries must be finite");
    for (size_t i = 0; i < B.explicit_rhs.size(); ++i)
        if (B.explicit_rhs[i].size() != m())
            fail("rhs.explicit[" + std::to_string(i) + "]", "length must equal the " + std::to_string(m()) +
                                                                  " rows of A");
    if (B.lattice) {
        if (B.lattice->base.size() != m()) fail("rhs.lattice.base", "length must equal rows of A");
        if (B.lattice->step.size() != m()) fail("rhs.lattice.step", "length must equal rows of A");
        if (B.lattice->kmin > B.lattice->kmax) fail("rhs.lattice", "kmin exceeds kmax");
    }
    if (B.explicit_rhs.empty() && !B.lattice) fail("rhs", "no right-hand sides given");
    if (!var_names.empty() && static_cast<int>(var_names.size()) != n())
        fail("variables", "need one name per column of A");
}

Problem load_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object()) fail("<root>", "expected a JSON object");
    int version = read_int(require(j, "format_version", ""), "format_version");
    if (version != 1) fail("format_version", "unsupported version " + std::to_string(version));

    Problem p;
    auto& s = p.set;
    const json& ja = require(j, "A", "");
    const json& shape = require(ja, "shape", "A.");
    if (!shape.is_array() || shape.size() != 2) fail("A.shape", "expected [rows, cols]");
    int rows = read_int(shape[0], "A.shape[0]"), cols = read_int(shape[1], "A.shape[1]");
    if (rows < 0 || cols < 1) fail("A.shape", "needs rows >= 0 and cols >= 1");
    Vec data = read_vec(require(ja, "data", "A."), "A.data");
    if (data.size() != static_cast<long>(rows) * cols)
        fail("A.data", "has " + std::to_string(data.size()) + " entries, shape needs " +
                           std::to_string(static_cast<long>(rows) * cols));
    s.A = from_row_major(rows, cols, std::vector<double>(data.data(), data.data() + data.size()));

    const json& jc = require(j, "cone", "");
    if (!jc.is_array() || jc.empty()) fail("cone", "expected a nonempty list of blocks");
    std::vector<ConeBlock> blocks;
    for (size_t i = 0; i < jc.size(); ++i) {
        std::string path = "cone[" + std::to_string(i) + "]";
        const json& kind = require(jc[i], "kind", path + ".");
        if (!kind.is_string()) fail(path + ".kind", "expected a string");
        ConeKind k;
        try {
            k = cone_kind_from_string(kind.get<std::string>());
        } catch (const ModelError& e) {
            fail(path + ".kind", e.what());
        }
        if (k != ConeKind::Nonneg && k != ConeKind::Lorentz)
            fail(path + ".kind", "the cone must be regular (nonneg or lorentz)");
        int dim = read_int(require(jc[i], "dim", path + "."), path + ".dim");
        if (dim < 1) fail(path + ".dim", "must be positive");
        if (k == ConeKind::Lorentz && dim < 2) fail(path + ".dim", "lorentz blocks need dim >= 2");
        blocks.push_back({k, dim});
    }
    s.K = ConeProduct(blocks);

    const json& jr = require(j, "rhs", "");
    if (jr.contains("explicit")) {
        const json& je = jr.at("explicit");
        if (!je.is_array()) fail("rhs.explicit", "expected a list of vectors");
        for (size_t i = 0; i < je.size(); ++i)
            s.B.explicit_rhs.push_back(read_vec(je[i], "rhs.explicit[" + std::to_string(i) + "]"));
    }
    if (jr.contains("lattice") && !jr.at("lattice").is_null()) {
        const json& jl = jr.at("lattice");
        Lattice L;
        L.base = read_vec(require(jl, "base", "rhs.lattice."), "rhs.lattice.base");
        L.step = read_vec(require(jl, "step", "rhs.lattice."), "rhs.lattice.step");
        L.kmin = read_int(require(jl, "kmin", "rhs.lattice."), "rhs.lattice.kmin");
        L.kmax = read_int(require(jl, "kmax", "rhs.lattice."), "rhs.lattice.kmax");
        s.B.lattice = L;
    }
    if (j.contains("variables")) {
        const json& jv = j.at("variables");
        if (!jv.is_array()) fail("variables", "expected a list of names");
        for (const auto& v : jv) {
            if (!v.is_string()) fail("variables", "names must be strings");
            s.var_names.push_back(v.get<std::string>());
        }
    }
    s.validate();

    if (j.contains("inequalities")) {
        const json& ji = j.at("inequalities");
        if (!ji.is_array()) fail("inequalities", "expected a list");
        for (size_t i = 0; i < ji.size(); ++i) {
            std::string path = "inequalities[" + std::to_string(i) + "]";
            Inequality q;
            q.name = ji[i].value("name", "ineq" + std::to_string(i));
            q.mu = read_vec(require(ji[i], "mu", path + "."), path + ".mu");
            if (q.mu.size() != s.n()) fail(path + ".mu", "length must equal the columns of A");
            try {
                q.eta0 = number_from_json(require(ji[i], "eta0", path + "."));
            } catch (const ModelError&) {
                fail(path + ".eta0", "expected a number");
            }
            if (ji[i].contains("certificate_points")) {
                const json& jp = ji[i].at("certificate_points");
                for (size_t k = 0; k < jp.size(); ++k) {
                    Vec x = read_vec(jp[k], path + ".certificate_points[" + std::to_string(k) + "]");
                    if (x.size() != s.n()) fail(path + ".certificate_points", "wrong length");
                    q.hint_points.push_back(x);
                }
            }
            p.inequalities.push_back(std::move(q));
        }
    }
    return p;
}

Problem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_problem(ss.str());
}

json problem_to_json(const Problem& p) {
    const auto& s = p.set;
    json j;
    j["format_version"] = 1;
    j["A"] = {{"shape", {s.m(), s.n()}}, {"data", to_row_major(s.A)}};
    json cone = json::array();
    for (const auto& b : s.K.blocks()) cone.push_back({{"kind", to_string(b.kind)}, {"dim", b.dim}});
    j["cone"] = cone;
    json rhs;
    rhs["explicit"] = json::array();
    for (const auto& b : s.B.explicit_rhs) rhs["explicit"].push_back(vec_to_json(b));
    if (s.B.lattice)
        rhs["lattice"] = {{"base", vec_to_json(s.B.lattice->base)},
                          {"step", vec_to_json(s.B.lattice->step)},
                          {"kmin", s.B.lattice->kmin},
                          {"kmax", s.B.lattice->kmax}};
    j["rhs"] = rhs;
    if (!s.var_names.empty()) j["variables"] = s.var_names;
    json ineqs = json::array();
    for (const auto& q : p.inequalities) {
        json e = {{"name", q.name}, {"mu", vec_to_json(q.mu)}, {"eta0", number_to_json(q.eta0)}};
        if (!q.hint_points.empty()) {
            e["certificate_points"] = json::array();
            for (const auto& x : q.hint_points) e["certificate_points"].push_back(vec_to_json(x));
        }
        ineqs.push_back(e);
    }
    j["inequalities"] = ineqs;
    return j;
}

std::string save_problem(const Problem& p) { return problem_to_json(p).dump(2) + "\n"; }

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Holds: return "Holds";
        case CheckStatus::Fails: return "Fails";
        case CheckStatus::Inconclusive: return "Inconclusive";
        case CheckStatus::NotApplicable: return "NotApplicable";
    }
    return "?";
}

CheckStatus check_status_from_string(const std::string& s) {
    for (auto v : {CheckStatus::Holds, CheckStatus::Fails, CheckStatus::Inconclusive, CheckStatus::NotApplicable})
        if (s == to_string(v)) return v;
    throw ModelError("unknown check status '" + s + "'");
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Invalid: return "Invalid";
        case Verdict::CertifiedMinimal: return "CertifiedMinimal";
        case Verdict::CertifiedNotMinimal: return "CertifiedNotMinimal";
        case Verdict::SublinearInconclusiveMinimality: return "SublinearInconclusiveMinimality";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Verdict verdict_from_string(const std::string& s) {
    for (auto v : {Verdict::Invalid, Verdict::CertifiedMinimal, Verdict::CertifiedNotMinimal,
                   Verdict::SublinearInconclusiveMinimality, Verdict::Inconclusive})
        if (s == to_string(v)) return v;
    throw ModelError("unknown verdict '" + s + "'");
}

const CheckEntry* CertificateReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

json report_to_json(const CertificateReport& r) {
    json j;
    j["format_version"] = 1;
    j["inequality"] = r.inequality;
    j["mu"] = vec_to_json(r.mu);
    j["eta0"] = number_to_json(r.eta0);
    j["verdict"] = to_string(r.verdict);
    j["reason"] = r.reason;
    json checks = json::array();
    for (const auto& c : r.checks) {
        json v = json::object();
        for (const auto& [k, x] : c.values) v[k] = number_to_json(x);
        checks.push_back(
            {{"name", c.name}, {"status", to_string(c.status)}, {"values", v}, {"witness", c.witness}, {"note", c.note}});
    }
    j["checks"] = checks;
    return j;
}

CertificateReport report_from_json(const json& j) {
    CertificateReport r;
    r.inequality = j.at("inequality").get<std::string>();
    r.mu = vec_from_json(j.at("mu"));
    r.eta0 = number_from_json(j.at("eta0"));
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.reason = j.value("reason", "");
    for (const auto& jc : j.at("checks")) {
        CheckEntry c;
        c.name = jc.at("name").get<std::string>();
        c.status = check_status_from_string(jc.at("status").get<std::string>());
        for (auto it = jc.at("values").begin(); it != jc.at("values").end(); ++it)
            c.values[it.key()] = number_from_json(it.value());
        c.witness = jc.value("witness", json::object());
        c.note = jc.value("note", "");
        r.checks.push_back(std::move(c));
    }
    return r;
}

const char* to_string(RhsState s) {
    switch (s) {
        case RhsState::Feasible: return "Feasible";
        case RhsState::Infeasible: return "Infeasible";
        case RhsState::Unknown: return "Unknown";
    }
    return "?";
}

std::vector<RhsStatus> feasible_rhs(const DisjunctiveSet& set, const AnalysisOptions& opts) {
    std::vector<RhsStatus> out;
    for (const auto& b : set.B.expand()) {
        ConicProgram p{Vec::Zero(set.n()), set.A, b, set.K};
        Solution sol = solve(p, opts.solver);
        RhsStatus r;
        r.b = b;
        if (sol.status == SolveStatus::Optimal) {
            r.state = RhsState::Feasible;
            r.witness = sol.x;
        } else if (sol.status == SolveStatus::PrimalInfeasible) {
            r.state = RhsState::Infeasible;
            r.certificate = sol.certificate;
        }
        out.push_back(std::move(r));
    }
    return out;
}

Assumption2Result assumption2_check(const DisjunctiveSet& set, const AnalysisOptions& opts) {
    const int n = set.n(), m = set.m();
    const Vec e = canonical_interior_point(set.K);
    Assumption2Result res;
    res.margin = -kInf;
    bool unknown = false;
    for (const auto& b : set.B.expand()) {
        // max t  s.t.  Ax = b,  x - t e = u,  t + w = 1,  x, u in K, w >= 0
        ProgramBuilder pb;
        std::vector<ConeBlock> kb = set.K.blocks();
        int x0 = pb.num_vars();
        for (const auto& blk : kb) pb.add_block(blk.kind, blk.dim);
        int u0 = pb.num_vars();
        for (const auto& blk : kb) pb.add_block(blk.kind, blk.dim);
        int t = pb.add_block(ConeKind::Free, 1);
        int w = pb.add_block(ConeKind::Nonneg, 1);
        pb.set_cost(t, -1.0);
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> row;
            for (int j = 0; j < n; ++j)
                if (set.A(i, j) != 0) row.emplace_back(x0 + j, set.A(i, j));
            pb.add_row(row, b(i));
        }
        for (int j = 0; j < n; ++j) pb.add_row({{x0 + j, 1.0}, {t, -e(j)}, {u0 + j, -1.0}}, 0.0);
        pb.add_row({{t, 1.0}, {w, 1.0}}, 1.0);
        Solution sol = solve(pb.build(), opts.solver);
        if (sol.status == SolveStatus::PrimalInfeasible) continue;
        if (sol.status != SolveStatus::Optimal) {
            unknown = true;
            continue;
        }
        double tval = sol.x(t);
        if (tval > res.margin) {
            res.margin = tval;
            res.witness = sol.x.segment(x0, n);
            res.b = b;
        }
    }
    if (res.margin > opts.margin_tol && interior_margin(set.K, res.witness) > 0)
        res.status = CheckStatus::Holds;
    else if (unknown || !std::isfinite(res.margin))
        res.status = CheckStatus::Inconclusive;
    else
        res.status = CheckStatus::Fails;
    return res;
}

}  // namespace cclab
