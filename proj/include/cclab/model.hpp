#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclab/cone.hpp"
#include "cclab/solver.hpp"

namespace cclab {

using json = nlohmann::json;

/// base + k*step for k in [kmin, kmax].
struct Lattice {
    Vec base, step;
    int kmin = 0, kmax = 0;
};

struct RhsFamily {
    std::vector<Vec> explicit_rhs;
    std::optional<Lattice> lattice;

    /// Explicit vectors first, then the lattice in increasing k; exact
    /// duplicates are dropped. Throws if the result is empty.
    std::vector<Vec> expand() const;
};

/// S(A,K,B) = {x in K : Ax in B}.
struct DisjunctiveSet {
    Mat A;
    ConeProduct K;
    RhsFamily B;
    std::vector<std::string> var_names;  // optional, used for printing

    int m() const { return static_cast<int>(A.rows()); }
    int n() const { return static_cast<int>(A.cols()); }
    void validate() const;
};

/// <mu, x> >= eta0.
struct Inequality {
    std::string name;
    Vec mu;
    double eta0 = 0.0;
    /// Optional points x^i in S with <mu,x^i> = eta0, tried first by the
    /// minimality certificate.
    std::vector<Vec> hint_points;
};

struct Problem {
    DisjunctiveSet set;
    std::vector<Inequality> inequalities;
};

Problem load_problem(const std::string& text);
Problem load_problem_file(const std::string& path);
std::string save_problem(const Problem& p);
json problem_to_json(const Problem& p);

struct AnalysisOptions {
    SolverOptions solver;
    double tol = 1e-6;          // validity, tightness, tight-ray gaps
    double margin_tol = 1e-7;   // interior-margin threshold
    double cert_margin_tol = 1e-5;  // relative margin a sufficient certificate must clear
    int samples = 256;          // extreme rays per Lorentz block
    std::uint64_t seed = 0;
};

enum class CheckStatus { Holds, Fails, Inconclusive, NotApplicable };
const char* to_string(CheckStatus s);
CheckStatus check_status_from_string(const std::string& s);

enum class Verdict { Invalid, CertifiedMinimal, CertifiedNotMinimal, SublinearInconclusiveMinimality, Inconclusive };
const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct CheckEntry {
    std::string name;
    CheckStatus status = CheckStatus::Inconclusive;
    std::map<std::string, double> values;
    json witness = json::object();
    std::string note;
};

struct CertificateReport {
    std::string inequality;
    Vec mu;
    double eta0 = 0.0;
    std::vector<CheckEntry> checks;
    Verdict verdict = Verdict::Inconclusive;
    std::string reason;

    const CheckEntry* find(const std::string& name) const;
};

json report_to_json(const CertificateReport& r);
CertificateReport report_from_json(const json& j);

/// Numbers that may be infinite are written as strings "inf" / "-inf".
json number_to_json(double v);
double number_from_json(const json& j);
json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);

enum class RhsState { Feasible, Infeasible, Unknown };
const char* to_string(RhsState s);

struct RhsStatus {
    Vec b;
    RhsState state = RhsState::Unknown;
    Vec witness;      // x in K with Ax = b
    Vec certificate;  // y with A^T y in -K*, b.y > 0
};

std::vector<RhsStatus> feasible_rhs(const DisjunctiveSet& set, const AnalysisOptions& opts = {});

struct Assumption2Result {
    CheckStatus status = CheckStatus::Inconclusive;
    double margin = 0.0;  // best max-t value found (capped at 1)
    Vec witness;
    Vec b;
};

/// Looks for x in int(K) with Ax in B by maximizing t with x - t e in K.
Assumption2Result assumption2_check(const DisjunctiveSet& set, const AnalysisOptions& opts = {});

}  // namespace cclab
