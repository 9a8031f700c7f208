#include "cclab/separation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cclab/error.hpp"

namespace cclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Branch split_branch(const SplitDisjunction& sd, double slack_sign, double rhs, const char* label) {
    const int n = static_cast<int>(sd.d.size());
    const bool has_base = sd.b_base.size() > 0;
    const int mb = has_base ? static_cast<int>(sd.A_base.rows()) : 0;
    Branch br;
    br.n_shared = n;
    br.label = label;
    br.A = Mat::Zero(mb + 1, n + 1);
    if (has_base) br.A.topLeftCorner(mb, n) = sd.A_base;
    br.A.block(mb, 0, 1, n) = sd.d.transpose();
    br.A(mb, n) = slack_sign;
    br.b = Vec(mb + 1);
    if (has_base) br.b.head(mb) = sd.b_base;
    br.b(mb) = rhs;
    br.K = sd.K * ConeProduct::nonneg(1);
    return br;
}

// Interior point of the dual cone over the shared coordinates, if every branch cone
// splits cleanly there; empty otherwise.
Vec shared_interior_dual(const std::vector<Branch>& branches, int n) {
    Vec e;
    for (const auto& br : branches) {
        const auto& offs = br.K.offsets();
        int cut = 0;
        size_t i = 0;
        for (; i < br.K.blocks().size() && offs[i] < n; ++i) cut = offs[i] + br.K.blocks()[i].dim;
        if (cut != n) return {};
        std::vector<ConeBlock> head(br.K.blocks().begin(), br.K.blocks().begin() + static_cast<long>(i));
        for (const auto& b : head)
            if (b.kind != ConeKind::Nonneg && b.kind != ConeKind::Lorentz) return {};
        Vec ei = canonical_interior_point(ConeProduct(head));
        if (e.size() && e != ei) return {};
        e = ei;
    }
    return e;
}

}  // namespace

std::vector<Branch> build_split_set(const SplitDisjunction& sd) {
    const int n = sd.K.total_dim();
    if (sd.d.size() != n) throw ModelError("split: d has length " + std::to_string(sd.d.size()) + ", expected " +
                                           std::to_string(n));
    if (sd.d.cwiseAbs().maxCoeff() == 0.0) throw ModelError("split: d must be nonzero");
    for (int i = 0; i < n; ++i)
        if (sd.d(i) != std::round(sd.d(i))) throw ModelError("split: d must have integer entries");
    if (sd.b_base.size() > 0 && (sd.A_base.rows() != sd.b_base.size() || sd.A_base.cols() != n))
        throw ModelError("split: base matrix is " + std::to_string(sd.A_base.rows()) + "x" +
                         std::to_string(sd.A_base.cols()) + ", inconsistent with b and K");
    const double r0 = static_cast<double>(sd.r0);
    return {split_branch(sd, 1.0, r0, "d.x <= r0"), split_branch(sd, -1.0, r0 + 1.0, "d.x >= r0+1")};
}

std::vector<Branch> branches_from_set(const DisjunctiveSet& set) {
    set.validate();
    std::vector<Branch> out;
    for (const auto& b : set.B.expand()) {
        Branch br;
        br.A = set.A;
        br.K = set.K;
        br.b = b;
        br.n_shared = set.n();
        std::ostringstream os;
        os << "b = " << b.transpose();
        br.label = os.str();
        out.push_back(br);
    }
    return out;
}

const char* to_string(Normalization n) { return n == Normalization::AlphaNorm ? "alpha_norm" : "trivial_box"; }

Normalization normalization_from_string(const std::string& s) {
    if (s == "alpha_norm") return Normalization::AlphaNorm;
    if (s == "trivial_box") return Normalization::TrivialBox;
    throw ModelError("unknown normalization '" + s + "' (expected alpha_norm or trivial_box)");
}

BranchTheta theta_over_branches(const std::vector<Branch>& branches, const Vec& mu, const AnalysisOptions& opts) {
    BranchTheta r;
    r.value = kInf;
    for (const auto& br : branches) {
        Vec c = Vec::Zero(br.K.total_dim());
        c.head(br.n_shared) = mu;
        Solution sol = solve(ConicProgram{c, br.A, br.b, br.K}, opts.solver);
        if (sol.status == SolveStatus::Optimal) {
            r.value = std::min(r.value, sol.objective);
        } else if (sol.status == SolveStatus::DualInfeasible) {
            r.value = -kInf;
            r.unbounded = true;
        } else if (sol.status == SolveStatus::NumericalLimit) {
            r.complete = false;
        }
    }
    return r;
}

CutResult generate_cut(const std::vector<Branch>& branches, const Vec& xhat, Normalization norm,
                       const AnalysisOptions& opts) {
    if (branches.empty()) throw ModelError("generate_cut: no branches");
    const int n = branches.front().n_shared;
    if (xhat.size() != n)
        throw ModelError("generate_cut: point has length " + std::to_string(xhat.size()) + ", expected " +
                         std::to_string(n));
    CutResult res;
    std::vector<const Branch*> live;
    for (size_t k = 0; k < branches.size(); ++k) {
        const Branch& br = branches[k];
        if (br.n_shared != n) throw ModelError("generate_cut: branches disagree on the shared dimension");
        Solution sol = solve(ConicProgram{Vec::Zero(br.K.total_dim()), br.A, br.b, br.K}, opts.solver);
        if (sol.status == SolveStatus::PrimalInfeasible)
            res.dropped.push_back(static_cast<int>(k));
        else
            live.push_back(&br);
    }
    if (live.empty()) throw ModelError("generate_cut: every branch is infeasible");

    // mu = p - q, eta0 = p0 - q0 with p, q >= 0 carrying the normalization.
    ProgramBuilder pb;
    const int p = pb.add_block(ConeKind::Nonneg, n + 1);
    const int q = pb.add_block(ConeKind::Nonneg, n + 1);
    for (int j = 0; j < n; ++j) {
        pb.set_cost(p + j, xhat(j));
        pb.set_cost(q + j, -xhat(j));
    }
    pb.set_cost(p + n, -1.0);
    pb.set_cost(q + n, 1.0);
    if (norm == Normalization::AlphaNorm) {
        int w = pb.add_block(ConeKind::Nonneg, 1);
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j <= n; ++j) {
            row.emplace_back(p + j, 1.0);
            row.emplace_back(q + j, 1.0);
        }
        row.emplace_back(w, 1.0);
        pb.add_row(row, 1.0);
    } else {
        int w = pb.add_block(ConeKind::Nonneg, n + 1);
        for (int j = 0; j <= n; ++j) pb.add_row({{p + j, 1.0}, {q + j, 1.0}, {w + j, 1.0}}, 1.0);
    }
    for (const Branch* br : live) {
        const int mk = static_cast<int>(br->A.rows()), nk = br->K.total_dim();
        const int lam = mk > 0 ? pb.add_block(ConeKind::Free, mk) : pb.num_vars();
        int gam = pb.num_vars();
        const ConeProduct Kd = dual(br->K);
        for (const auto& blk : Kd.blocks()) pb.add_block(blk.kind, blk.dim);
        const int r = pb.add_block(ConeKind::Nonneg, 1);
        // A_k^T lambda + gamma = (mu; 0)
        for (int j = 0; j < nk; ++j) {
            std::vector<std::pair<int, double>> row;
            for (int i = 0; i < mk; ++i)
                if (br->A(i, j) != 0) row.emplace_back(lam + i, br->A(i, j));
            row.emplace_back(gam + j, 1.0);
            if (j < n) {
                row.emplace_back(p + j, -1.0);
                row.emplace_back(q + j, 1.0);
            }
            pb.add_row(row, 0.0);
        }
        // b_k.lambda - r = eta0
        std::vector<std::pair<int, double>> row;
        for (int i = 0; i < mk; ++i)
            if (br->b(i) != 0) row.emplace_back(lam + i, br->b(i));
        row.emplace_back(r, -1.0);
        row.emplace_back(p + n, -1.0);
        row.emplace_back(q + n, 1.0);
        pb.add_row(row, 0.0);
    }
    Solution sol = solve(pb.build(), opts.solver);
    if (sol.status != SolveStatus::Optimal) {
        res.diagnostic = std::string("cut program ended with ") + to_string(sol.status);
        return res;
    }
    res.optimum = sol.objective;
    if (res.optimum >= -opts.tol) {
        res.diagnostic = "no violated inequality";
        return res;
    }
    const Vec mu0 = sol.x.segment(p, n) - sol.x.segment(q, n);
    const double eta0 = sol.x(p + n) - sol.x(q + n);
    // Solver noise can leave mu marginally negative on a recession direction. Adding
    // eps*e with e in int(K*) keeps a valid cut valid, so retry with small shifts.
    Vec e = shared_interior_dual(branches, n);
    const double scale = std::max(1.0, mu0.cwiseAbs().maxCoeff());
    std::vector<double> shifts = {0.0};
    if (e.size()) shifts.insert(shifts.end(), {1e-9 * scale, 1e-7 * scale});
    for (double eps : shifts) {
        Vec mu = eps > 0 ? Vec(mu0 + eps * e) : mu0;
        BranchTheta th = theta_over_branches(branches, mu, opts);
        res.theta = th.value;
        res.violation = eta0 - mu.dot(xhat);
        if (!th.complete || th.unbounded || eta0 > th.value + opts.tol * std::max(1.0, std::abs(eta0))) continue;
        if (res.violation <= opts.tol) {
            res.diagnostic = "violation below tolerance";
            return res;
        }
        res.cut = Inequality{"cut", mu, eta0, {}};
        res.diagnostic = "violated cut found and re-verified";
        return res;
    }
    res.diagnostic = "cut failed re-verification";
    return res;
}

}  // namespace cclab
