#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cclab/cone.hpp"

namespace cclab {

/// min <c,x>  s.t.  A x = b,  x in K.
struct ConicProgram {
    Vec c;
    Mat A;
    Vec b;
    ConeProduct K;
};

struct SolverOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    double regularization = 1e-10;
    int max_iters = 200;
    bool verbose = false;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, NumericalLimit };

const char* to_string(SolveStatus s);

struct Solution {
    SolveStatus status = SolveStatus::NumericalLimit;
    Vec x, y, s;
    double objective = 0.0;
    /// PrimalInfeasible: y with A^T y in -K*, b.y = 1.
    /// DualInfeasible: x with A x = 0, x in K, c.x = -1.
    Vec certificate;
    int iterations = 0;
    /// Optimal, but the iterates were still growing (infimum not attained).
    bool diverging = false;
    std::string message;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
Solution solve(const ConicProgram& p, const SolverOptions& opts = {});

struct KktReport {
    double primal_residual = 0;  // ||Ax - b||_inf
    double dual_residual = 0;    // ||A^T y + s - c||_inf
    double gap = 0;              // |c.x - b.y|
    double primal_cone_violation = 0;
    double dual_cone_violation = 0;
    bool passed = false;
};

KktReport check_kkt(const ConicProgram& p, const Solution& sol, double tol);

/// Verifies the certificate attached to an infeasibility status.
bool check_certificate(const ConicProgram& p, const Solution& sol, double tol);

/// Assembles a ConicProgram block by block.
class ProgramBuilder {
public:
    /// Returns the index of the first variable of the new block.
    int add_block(ConeKind kind, int dim);
    int num_vars() const { return n_; }
    void set_cost(int var, double value);
    void add_row(const std::vector<std::pair<int, double>>& terms, double rhs);
    ConicProgram build() const;

private:
    std::vector<ConeBlock> blocks_;
    int n_ = 0;
    std::vector<std::pair<int, double>> cost_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
    std::vector<double> rhs_;
};

}  // namespace cclab
