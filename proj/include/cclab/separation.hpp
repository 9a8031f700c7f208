#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cclab/model.hpp"

namespace cclab {

/// Base relaxation {x in K : Ã x = b} split by d.x <= r0 or d.x >= r0 + 1.
/// An empty b means the base has no equality rows (Ã is then ignored).
struct SplitDisjunction {
    Mat A_base;
    Vec b_base;
    ConeProduct K;
    Vec d;  // integer entries
    long r0 = 0;
};

/// One branch program {(x,s) in K_k : A_k (x,s) = b_k}; the first n_shared
/// coordinates are the original variables.
struct Branch {
    Mat A;
    ConeProduct K;
    Vec b;
    int n_shared = 0;
    std::string label;
};

std::vector<Branch> build_split_set(const SplitDisjunction& sd);

/// One branch per right-hand side of the (expanded) set.
std::vector<Branch> branches_from_set(const DisjunctiveSet& set);

enum class Normalization { AlphaNorm, TrivialBox };
const char* to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

/// min over branches of min{<mu,x> : x in branch}; +inf if every branch is empty.
struct BranchTheta {
    double value = 0.0;
    bool complete = true;
    bool unbounded = false;
};
BranchTheta theta_over_branches(const std::vector<Branch>& branches, const Vec& mu, const AnalysisOptions& opts = {});

struct CutResult {
    std::optional<Inequality> cut;
    double violation = 0.0;  // eta0 - <mu, xhat>
    double optimum = 0.0;    // of the cut program
    double theta = 0.0;      // re-verification value
    std::vector<int> dropped;  // infeasible branches
    std::string diagnostic;
};

CutResult generate_cut(const std::vector<Branch>& branches, const Vec& xhat,
                       Normalization norm = Normalization::AlphaNorm, const AnalysisOptions& opts = {});

}  // namespace cclab
