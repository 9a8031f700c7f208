#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cclab/model.hpp"

namespace cclab {

// ---- theta ---------------------------------------------------------------

struct BranchValue {
    Vec b;
    SolveStatus status = SolveStatus::NumericalLimit;
    double value = 0.0;  // inf{<mu,x> : Ax = b, x in K}; -inf when unbounded
    Vec x;
};

struct ThetaResult {
    double value = 0.0;  // -inf when some branch is unbounded
    int argmin = -1;     // index into table
    bool unbounded = false;
    bool complete = true;  // false when some branch hit a solver limit
    std::vector<BranchValue> table;
};

/// Best right-hand side: min over feasible b of inf{<mu,x> : Ax = b, x in K}.
ThetaResult theta(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts = {});

// ---- support function of D_mu = {lambda : mu - A^T lambda in K*} ----------

enum class SupportKind { Finite, PlusInfinity, Unknown };

struct SupportValue {
    SupportKind kind = SupportKind::Unknown;
    double value = 0.0;  // +inf for PlusInfinity
    Vec lambda;          // maximizer (Finite)
    Vec ray;             // recession direction with z.ray > 0 (PlusInfinity)
    bool finite() const { return kind == SupportKind::Finite; }
};

/// sigma(z) = sup{z.lambda : lambda in D_mu}. Throws ModelError if D_mu is empty.
SupportValue support_eval(const DisjunctiveSet& set, const Vec& mu, const Vec& z, const AnalysisOptions& opts = {});

struct RhsSupport {
    double inf_value = 0.0;
    int argmin = -1;
    std::vector<Vec> rhs;
    std::vector<SupportValue> values;
    bool complete = true;
    /// Lattice spot check: sigma nondecreasing over the last three shifts
    /// on each side. Always true without a lattice.
    bool monotone = true;
    std::vector<double> tail_low, tail_high;  // sigma at kmin+2..kmin and kmax-2..kmax
};

RhsSupport support_over_rhs(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts = {});

// ---- algebraic conditions --------------------------------------------------

struct A0Result {
    CheckStatus status = CheckStatus::Inconclusive;
    Vec lambda, gamma;  // mu = A^T lambda + gamma, gamma in K*
    Vec u;              // u in K, Au = 0, <mu,u> < 0
};

A0Result check_A0(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts = {});

struct A1iEntry {
    int index = 0;
    CheckStatus status = CheckStatus::Inconclusive;
    double optimum = 0.0;  // min{<mu,w> : Aw = a^i, w >= 0}
    bool vacuous = false;
};

struct A1iResult {
    CheckStatus status = CheckStatus::NotApplicable;
    std::vector<A1iEntry> entries;
};

/// Orthant-only per-column test mu_i <= min{<mu,w> : Aw = a^i, w >= 0}.
A1iResult check_A1i(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts = {});

// ---- tight extreme rays ----------------------------------------------------

struct TightRay {
    Vec z;       // unit extreme ray of K
    double gap;  // <mu,z> - sigma(Az)
};

struct RaySearch {
    std::vector<TightRay> tight;    // gap <= tol * max abs(mu), sorted by gap, one per direction
    std::vector<TightRay> sampled;  // every sampled ray with its gap (before refinement)
};

RaySearch tight_extreme_ray_search(const DisjunctiveSet& set, const Vec& mu, int budget, std::uint64_t seed,
                                   const AnalysisOptions& opts = {});

// ---- sublinearity / minimality certificates ---------------------------------

struct SublinearResult {
    CheckStatus status = CheckStatus::Inconclusive;
    std::vector<Vec> rays;
    Vec sum;
    double margin = 0.0;
    std::string note;
};

SublinearResult check_sublinear_sufficient(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                           const AnalysisOptions& opts = {});

struct MinimalSufficientResult {
    CheckStatus status = CheckStatus::Inconclusive;
    std::vector<Vec> points;
    std::vector<Vec> branches;
    Vec sum;
    double margin = 0.0;
    double inf_sigma = 0.0;
    bool used_hints = false;
    std::string note;
};

/// Tight points x^i in S with sum in int(K). Hint points are verified first.
MinimalSufficientResult check_minimal_sufficient(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                                 const AnalysisOptions& opts = {},
                                                 const std::vector<Vec>& hints = {});

struct NecessaryInteriorResult {
    CheckStatus status = CheckStatus::NotApplicable;
    double dual_margin = 0.0;
    double inf_sigma = 0.0;
    double theta = 0.0;
    std::string note;
};

NecessaryInteriorResult check_minimal_necessary_interior(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                                         const AnalysisOptions& opts = {});

struct ExactDecision {
    bool applicable = false;
    Verdict verdict = Verdict::Inconclusive;  // CertifiedMinimal / CertifiedNotMinimal / Inconclusive
    double optimum = 0.0;                     // max sum(delta), capped at 1
    Vec delta;
    std::vector<Vec> lambdas;
    double theta_after = 0.0;  // theta(mu - delta) used to re-verify
    std::string note;
};

/// Orthant cones only: LP over delta >= 0 keeping (mu - delta; eta0) valid.
ExactDecision decide_minimal_exact(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                   const AnalysisOptions& opts = {});

struct DominanceWitness {
    CheckStatus status = CheckStatus::Inconclusive;  // Holds: a dominating delta was found
    Vec delta;
    double theta_after = 0.0;
    std::string source;
};

/// Tries delta = mu (when mu in K*) and delta = +-(valid-equation normals) in K*.
DominanceWitness find_dominance_witness(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                        const AnalysisOptions& opts = {});

struct RepairResult {
    CheckStatus status = CheckStatus::Inconclusive;
    Inequality repaired;
    std::string note;
};

RepairResult dominance_repair(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts = {});

// ---- valid equations ---------------------------------------------------------

struct EquationCheck {
    CheckStatus status = CheckStatus::Fails;
    Vec lambda;
    double eta0 = 0.0;
    double residual = 0.0;  // ||A^T lambda - mu||
    double spread = 0.0;    // max |b.lambda - b0.lambda|
};

EquationCheck valid_equation_check(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts = {});

struct Equation {
    Inequality eq;  // <mu,x> = eta0
    Vec lambda;
};

std::vector<Equation> enumerate_valid_equations(const DisjunctiveSet& set, const AnalysisOptions& opts = {});

/// "t - γ₂ = 0" style rendering with the first nonzero coefficient scaled to 1.
std::string format_equation(const Vec& mu, double eta0, const std::vector<std::string>& names,
                            const char* rel = "=");

// ---- orchestration -------------------------------------------------------------

/// Vertices of a bounded two-dimensional D_mu rebuilt from support values in
/// `directions` evenly spaced directions. Empty if some value is not finite.
std::vector<Vec> reconstruct_vertices_2d(const DisjunctiveSet& set, const Vec& mu, int directions = 16,
                                         const AnalysisOptions& opts = {});

CertificateReport full_report(const DisjunctiveSet& set, const Inequality& ineq, const AnalysisOptions& opts = {});

}  // namespace cclab
