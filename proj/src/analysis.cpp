#include "cclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "cclab/error.hpp"
#include "cclab/linalg.hpp"

namespace cclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rel(const AnalysisOptions& o, double v) { return o.tol * std::max(1.0, std::abs(v)); }

// Points that are tight only up to solver residuals can sit slightly inside K in
// coordinates with small |mu_j|, so certificates need a margin well above that noise.
bool clears_cert(const AnalysisOptions& o, double margin, const Vec& sum) {
    return margin > std::max(o.margin_tol, o.cert_margin_tol * std::max(1.0, sum.cwiseAbs().maxCoeff()));
}

void require_mu(const DisjunctiveSet& set, const Vec& mu) {
    if (mu.size() != set.n()) throw ModelError("mu has length " + std::to_string(mu.size()) + ", expected " +
                                               std::to_string(set.n()));
    if (mu.cwiseAbs().maxCoeff() == 0.0) throw ModelError("mu must be nonzero");
}

// Rows of A x = b appended for the variable block starting at x0.
void add_Ax_rows(ProgramBuilder& pb, const Mat& A, int x0, const Vec& b) {
    for (int i = 0; i < A.rows(); ++i) {
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < A.cols(); ++j)
            if (A(i, j) != 0) row.emplace_back(x0 + j, A(i, j));
        pb.add_row(row, b(i));
    }
}

int add_cone_copy(ProgramBuilder& pb, const ConeProduct& K) {
    int first = pb.num_vars();
    for (const auto& blk : K.blocks()) pb.add_block(blk.kind, blk.dim);
    return first;
}

json vecs_to_json(const std::vector<Vec>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(vec_to_json(v));
    return a;
}

}  // namespace

// ---------------------------------------------------------------------------

ThetaResult theta(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts) {
    if (mu.size() != set.n()) throw ModelError("theta: mu has the wrong length");
    ThetaResult r;
    r.value = kInf;
    bool any_feasible = false;
    for (const auto& b : set.B.expand()) {
        Solution sol = solve(ConicProgram{mu, set.A, b, set.K}, opts.solver);
        BranchValue bv;
        bv.b = b;
        bv.status = sol.status;
        switch (sol.status) {
            case SolveStatus::Optimal:
                bv.value = sol.objective;
                bv.x = sol.x;
                any_feasible = true;
                break;
            case SolveStatus::DualInfeasible:
                bv.value = -kInf;
                bv.x = sol.certificate;
                any_feasible = true;
                r.unbounded = true;
                break;
            case SolveStatus::PrimalInfeasible: bv.value = kInf; break;
            case SolveStatus::NumericalLimit:
                bv.value = kNaN;
                r.complete = false;
                break;
        }
        r.table.push_back(bv);
        if (!std::isnan(bv.value) && bv.value < r.value) {
            r.value = bv.value;
            r.argmin = static_cast<int>(r.table.size()) - 1;
        }
    }
    if (!any_feasible && r.complete) throw ModelError("the disjunctive set is empty: every right-hand side is infeasible");
    return r;
}

SupportValue support_eval(const DisjunctiveSet& set, const Vec& mu, const Vec& z, const AnalysisOptions& opts) {
    const int m = set.m(), n = set.n();
    if (z.size() != m) throw ModelError("support_eval: z must have one entry per row of A");
    if (mu.size() != n) throw ModelError("support_eval: mu has the wrong length");
    SupportValue sv;
    if (m == 0) {
        if (!contains(set.K, mu, opts.tol)) throw ModelError("support_eval: D_mu is empty");
        sv.kind = SupportKind::Finite;
        sv.lambda = Vec(0);
        return sv;
    }
    // min -z.lambda  s.t.  A^T lambda + gamma = mu,  lambda free,  gamma in K* (= K blockwise)
    ConicProgram p;
    p.K = ConeProduct({{ConeKind::Free, m}}) * dual(set.K);
    p.c = Vec::Zero(m + n);
    p.c.head(m) = -z;
    p.A.resize(n, m + n);
    p.A << set.A.transpose(), Mat::Identity(n, n);
    p.b = mu;
    Solution sol = solve(p, opts.solver);
    switch (sol.status) {
        case SolveStatus::Optimal:
            sv.kind = SupportKind::Finite;
            sv.value = -sol.objective;
            sv.lambda = sol.x.head(m);
            if (z.cwiseAbs().maxCoeff() == 0.0) sv.value = 0.0;
            break;
        case SolveStatus::DualInfeasible:
            sv.kind = SupportKind::PlusInfinity;
            sv.value = kInf;
            sv.ray = sol.certificate.head(m);
            break;
        case SolveStatus::PrimalInfeasible: throw ModelError("support_eval: D_mu is empty (condition A.0 fails)");
        case SolveStatus::NumericalLimit:
            sv.kind = SupportKind::Unknown;
            sv.value = kNaN;
            break;
    }
    return sv;
}

RhsSupport support_over_rhs(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts) {
    RhsSupport r;
    r.inf_value = kInf;
    r.rhs = set.B.expand();
    for (size_t i = 0; i < r.rhs.size(); ++i) {
        SupportValue sv = support_eval(set, mu, r.rhs[i], opts);
        if (sv.kind == SupportKind::Unknown) r.complete = false;
        if (sv.kind != SupportKind::Unknown && sv.value < r.inf_value) {
            r.inf_value = sv.value;
            r.argmin = static_cast<int>(i);
        }
        r.values.push_back(sv);
    }
    if (set.B.lattice) {
        const auto& L = *set.B.lattice;
        auto sigma_at = [&](int k) {
            SupportValue sv = support_eval(set, mu, L.base + k * L.step, opts);
            return sv.kind == SupportKind::Unknown ? kNaN : sv.value;
        };
        for (int k = std::max(L.kmin, L.kmin + 2); k >= L.kmin; --k)
            if (k <= L.kmax) r.tail_low.push_back(sigma_at(k));
        for (int k = std::max(L.kmin, L.kmax - 2); k <= L.kmax; ++k) r.tail_high.push_back(sigma_at(k));
        auto nondecreasing = [&](const std::vector<double>& v) {
            for (size_t i = 1; i < v.size(); ++i) {
                if (std::isnan(v[i]) || std::isnan(v[i - 1])) return false;
                if (std::isinf(v[i]) && v[i] > 0) continue;
                if (v[i] < v[i - 1] - rel(opts, v[i - 1])) return false;
            }
            return true;
        };
        r.monotone = nondecreasing(r.tail_low) && nondecreasing(r.tail_high);
    }
    return r;
}

// ---------------------------------------------------------------------------

A0Result check_A0(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts) {
    require_mu(set, mu);
    const int m = set.m(), n = set.n();
    A0Result r;
    if (m == 0) {
        r.status = contains(set.K, mu, 0.0) ? CheckStatus::Holds : CheckStatus::Inconclusive;
        r.lambda = Vec(0);
        r.gamma = mu;
        return r;
    }
    ConicProgram p;
    p.K = ConeProduct({{ConeKind::Free, m}}) * dual(set.K);
    p.c = Vec::Zero(m + n);
    p.A.resize(n, m + n);
    p.A << set.A.transpose(), Mat::Identity(n, n);
    p.b = mu;
    Solution sol = solve(p, opts.solver);
    if (sol.status == SolveStatus::Optimal) {
        r.status = CheckStatus::Holds;
        r.lambda = sol.x.head(m);
        r.gamma = sol.x.tail(n);
    } else if (sol.status == SolveStatus::PrimalInfeasible) {
        // y with [A y; y] in -(Zero x K) and mu.y > 0, so u = -y.
        Vec u = -sol.certificate;
        r.u = u / std::max(1e-300, -mu.dot(u));
        bool ok = contains(set.K, r.u, 1e-7) && (set.A * r.u).cwiseAbs().maxCoeff() <= 1e-7 && mu.dot(r.u) < 0;
        r.status = ok ? CheckStatus::Fails : CheckStatus::Inconclusive;
    }
    return r;
}

A1iResult check_A1i(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts) {
    require_mu(set, mu);
    A1iResult r;
    if (!set.K.only_nonneg()) return r;
    r.status = CheckStatus::Holds;
    for (int i = 0; i < set.n(); ++i) {
        A1iEntry e;
        e.index = i;
        Solution sol = solve(ConicProgram{mu, set.A, set.A.col(i), set.K}, opts.solver);
        switch (sol.status) {
            case SolveStatus::Optimal:
                e.optimum = sol.objective;
                e.status = sol.objective >= mu(i) - rel(opts, mu(i)) ? CheckStatus::Holds : CheckStatus::Fails;
                break;
            case SolveStatus::DualInfeasible:
                e.optimum = -kInf;
                e.status = CheckStatus::Fails;
                break;
            case SolveStatus::PrimalInfeasible:
                // Cannot happen for w = e^i, kept for completeness.
                e.optimum = kInf;
                e.vacuous = true;
                e.status = CheckStatus::Holds;
                break;
            case SolveStatus::NumericalLimit: e.status = CheckStatus::Inconclusive; break;
        }
        if (e.status == CheckStatus::Fails)
            r.status = CheckStatus::Fails;
        else if (e.status == CheckStatus::Inconclusive && r.status == CheckStatus::Holds)
            r.status = CheckStatus::Inconclusive;
        r.entries.push_back(e);
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

struct BlockRef {
    int off = 0, dim = 0;
};

// Block of K in which a sampled ray lives.
BlockRef owning_block(const ConeProduct& K, const Vec& z) {
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        int off = K.offsets()[i], d = K.blocks()[i].dim;
        if (z.segment(off, d).cwiseAbs().maxCoeff() > 0) return {off, d};
    }
    return {};
}

bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a(i) < b(i) - 1e-15) return true;
        if (a(i) > b(i) + 1e-15) return false;
    }
    return false;
}

}  // namespace

RaySearch tight_extreme_ray_search(const DisjunctiveSet& set, const Vec& mu, int budget, std::uint64_t seed,
                                   const AnalysisOptions& opts) {
    require_mu(set, mu);
    const ConeProduct& K = set.K;
    auto gap_of = [&](const Vec& z) {
        SupportValue sv = support_eval(set, mu, set.A * z, opts);
        if (sv.kind == SupportKind::Unknown) return kNaN;
        return mu.dot(z) - sv.value;
    };
    auto make_ray = [&](const BlockRef& br, const Vec& u) {
        Vec z = Vec::Zero(K.total_dim());
        z.segment(br.off, br.dim - 1) = u / u.norm();
        z(br.off + br.dim - 1) = 1.0;
        return Vec(z / std::sqrt(2.0));
    };

    RaySearch rs;
    std::vector<Vec> rays = sample_extreme_rays(K, budget, seed);
    for (const auto& z : rays) rs.sampled.push_back({z, gap_of(z)});

    std::vector<TightRay> pool = rs.sampled;

    // Local refinement of the smallest gaps on Lorentz blocks with a curved boundary.
    for (size_t bi = 0; bi < K.blocks().size(); ++bi) {
        const auto& blk = K.blocks()[bi];
        if (blk.kind != ConeKind::Lorentz || blk.dim < 3) continue;
        BlockRef br{K.offsets()[bi], blk.dim};
        const int d = blk.dim - 1;
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(rs.sampled.size()); ++i) {
            BlockRef o = owning_block(K, rs.sampled[i].z);
            if (o.off == br.off && blk.kind == ConeKind::Lorentz) idx.push_back(i);
        }
        if (idx.empty()) continue;
        auto g = [&](int i) {
            double v = rs.sampled[idx[i]].gap;
            return std::isnan(v) ? kInf : v;
        };
        std::vector<int> cand;
        const int cnt = static_cast<int>(idx.size());
        if (d == 2) {
            for (int i = 0; i < cnt; ++i)
                if (g(i) <= g((i + 1) % cnt) && g(i) <= g((i + cnt - 1) % cnt)) cand.push_back(i);
        } else {
            for (int i = 0; i < cnt; ++i) cand.push_back(i);
        }
        std::sort(cand.begin(), cand.end(), [&](int a, int b) { return g(a) < g(b); });
        if (cand.size() > 8) cand.resize(8);

        for (int ci : cand) {
            Vec u = rs.sampled[idx[ci]].z.segment(br.off, d);
            u.normalize();
            double h = d == 2 ? 2.0 * std::numbers::pi / cnt : 0.5;
            int rounds = d == 2 ? 1 : 6;
            double best = g(ci);
            for (int round = 0; round < rounds; ++round) {
                // tangent directions: orthonormal complement of u
                Mat Q = Eigen::HouseholderQR<Mat>(u).householderQ() * Mat::Identity(d, d);
                for (int t = 1; t < d; ++t) {
                    Vec v = Q.col(t);
                    auto f = [&](double phi) {
                        double val = gap_of(make_ray(br, std::cos(phi) * u + std::sin(phi) * v));
                        return std::isnan(val) ? kInf : val;
                    };
                    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
                    double a = -h, b = h;
                    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
                    double f1 = f(c1), f2 = f(c2);
                    while (b - a > 1e-9) {
                        if (f1 <= f2) {
                            b = c2;
                            c2 = c1;
                            f2 = f1;
                            c1 = b - gr * (b - a);
                            f1 = f(c1);
                        } else {
                            a = c1;
                            c1 = c2;
                            f1 = f2;
                            c2 = a + gr * (b - a);
                            f2 = f(c2);
                        }
                    }
                    double phi = 0.5 * (a + b);
                    double fv = f(phi);
                    if (fv < best) {
                        best = fv;
                        u = std::cos(phi) * u + std::sin(phi) * v;
                        u.normalize();
                    }
                }
                h *= 0.5;
            }
            Vec z = make_ray(br, u);
            pool.push_back({z, gap_of(z)});
        }
    }

    std::sort(pool.begin(), pool.end(), [](const TightRay& a, const TightRay& b) {
        double ga = std::isnan(a.gap) ? kInf : a.gap, gb = std::isnan(b.gap) ? kInf : b.gap;
        if (ga != gb) return ga < gb;
        return lex_less(a.z, b.z);
    });
    // The gap grows quadratically away from a minimum on a curved block, so
    // grid neighbours of one tight ray are merged into it.
    const double gap_tol = opts.tol * mu.cwiseAbs().maxCoeff();
    const double merge = 10.0 * std::sqrt(opts.tol);
    for (const auto& tr : pool) {
        if (std::isnan(tr.gap) || tr.gap > gap_tol) continue;
        bool dup = false;
        for (const auto& kept : rs.tight)
            if ((kept.z - tr.z).norm() <= merge) dup = true;
        if (!dup) rs.tight.push_back(tr);
    }
    return rs;
}

// ---------------------------------------------------------------------------

namespace {

// Secondary greedy score: coordinates / blocks that are still on the boundary.
double soft_margin(const ConeProduct& K, const Vec& x) {
    double s = 0.0;
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        auto seg = x.segment(K.offsets()[i], b.dim);
        if (b.kind == ConeKind::Nonneg)
            for (int j = 0; j < b.dim; ++j) s += std::min(seg(j), 1.0);
        else
            s += std::min(seg(b.dim - 1) - seg.head(b.dim - 1).norm(), 1.0);
    }
    return s;
}

}  // namespace

SublinearResult check_sublinear_sufficient(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                           const AnalysisOptions& opts) {
    require_mu(set, mu);
    SublinearResult r;
    A0Result a0 = check_A0(set, mu, opts);
    if (a0.status == CheckStatus::Fails) {
        r.status = CheckStatus::Fails;
        r.note = "condition A.0 fails";
        return r;
    }
    if (a0.status != CheckStatus::Holds) {
        r.note = "condition A.0 undecided";
        return r;
    }
    RhsSupport rs = support_over_rhs(set, mu, opts);
    bool below_inf = rs.complete && eta0 <= rs.inf_value + rel(opts, eta0);
    bool valid = false;
    if (!below_inf) {
        ThetaResult th = theta(set, mu, opts);
        valid = !th.unbounded && eta0 <= th.value + rel(opts, eta0);
    }
    if (!below_inf && !valid) {
        r.status = CheckStatus::NotApplicable;
        r.note = "right-hand side exceeds both inf sigma and theta";
        return r;
    }
    RaySearch search = tight_extreme_ray_search(set, mu, opts.samples, opts.seed, opts);
    std::vector<Vec> cands;
    for (const auto& t : search.tight) cands.push_back(t.z);
    std::sort(cands.begin(), cands.end(), lex_less);

    r.sum = Vec::Zero(set.n());
    r.margin = cands.empty() ? -kInf : interior_margin(set.K, r.sum);
    std::vector<bool> used(cands.size(), false);
    while (!clears_cert(opts, r.margin, r.sum)) {
        int best = -1;
        double bm = -kInf, bs = -kInf;
        for (size_t i = 0; i < cands.size(); ++i) {
            if (used[i]) continue;
            Vec s = r.sum + cands[i];
            double m = interior_margin(set.K, s), sm = soft_margin(set.K, s);
            if (m > bm + 1e-15 || (std::abs(m - bm) <= 1e-15 && sm > bs + 1e-15)) {
                best = static_cast<int>(i);
                bm = m;
                bs = sm;
            }
        }
        if (best < 0) break;
        used[best] = true;
        r.rays.push_back(cands[best]);
        r.sum += cands[best];
        r.margin = interior_margin(set.K, r.sum);
    }
    if (clears_cert(opts, r.margin, r.sum)) {
        r.status = CheckStatus::Holds;
    } else {
        r.status = CheckStatus::Inconclusive;
        r.note = std::to_string(cands.size()) + " tight ray direction(s) found; their sum stays on the boundary";
    }
    return r;
}

MinimalSufficientResult check_minimal_sufficient(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                                 const AnalysisOptions& opts, const std::vector<Vec>& hints) {
    require_mu(set, mu);
    MinimalSufficientResult r;
    A0Result a0 = check_A0(set, mu, opts);
    if (a0.status != CheckStatus::Holds) {
        r.status = CheckStatus::NotApplicable;
        r.note = "D_mu is empty or undecided";
        return r;
    }
    RhsSupport rs = support_over_rhs(set, mu, opts);
    r.inf_sigma = rs.inf_value;
    if (!rs.complete) {
        r.note = "some support values are unavailable";
        return r;
    }
    if (!(std::abs(eta0 - rs.inf_value) <= rel(opts, eta0))) {
        r.status = CheckStatus::NotApplicable;
        r.note = "eta0 differs from inf sigma";
        return r;
    }
    std::vector<Vec> bhat;
    for (size_t i = 0; i < rs.rhs.size(); ++i)
        if (rs.values[i].kind == SupportKind::Finite && rs.values[i].value <= eta0 + rel(opts, eta0))
            bhat.push_back(rs.rhs[i]);

    const double bscale = 1.0 + set.A.cwiseAbs().maxCoeff();
    auto verify = [&](const std::vector<Vec>& pts, std::vector<Vec>& branches) {
        branches.clear();
        Vec sum = Vec::Zero(set.n());
        for (const auto& x : pts) {
            if (!contains(set.K, x, 1e-9)) return -kInf;
            if (std::abs(mu.dot(x) - eta0) > rel(opts, eta0)) return -kInf;
            Vec ax = set.A * x;
            const Vec* hit = nullptr;
            for (const auto& b : bhat)
                if ((ax - b).cwiseAbs().maxCoeff() <= 1e-7 * bscale * std::max(1.0, x.cwiseAbs().maxCoeff()))
                    hit = &b;
            if (!hit) return -kInf;
            branches.push_back(*hit);
            sum += x;
        }
        return pts.empty() ? -kInf : interior_margin(set.K, sum);
    };

    if (!hints.empty()) {
        std::vector<Vec> br;
        double m = verify(hints, br);
        Vec hsum = Vec::Zero(set.n());
        for (const auto& x : hints) hsum += x;
        if (clears_cert(opts, m, hsum)) {
            r.status = CheckStatus::Holds;
            r.points = hints;
            r.branches = br;
            r.sum = hsum;
            r.margin = m;
            r.used_hints = true;
            return r;
        }
        r.note = "supplied certificate points did not verify; ";
    }

    // Branches whose slice actually reaches eta0.
    ThetaResult th = theta(set, mu, opts);
    std::vector<Vec> usable;
    for (const auto& b : bhat)
        for (const auto& bv : th.table)
            if (bv.b == b && bv.status == SolveStatus::Optimal && bv.value <= eta0 + rel(opts, eta0))
                usable.push_back(b);
    if (usable.empty()) {
        r.note += "no branch attains eta0";
        return r;
    }

    // max t  s.t.  A x_b = b,  <mu,x_b> = eta0,  sum x_b - t e = u,  t <= 1
    const int n = set.n();
    const Vec e = canonical_interior_point(set.K);
    ProgramBuilder pb;
    std::vector<int> xs;
    for (size_t k = 0; k < usable.size(); ++k) {
        int x0 = add_cone_copy(pb, set.K);
        xs.push_back(x0);
        add_Ax_rows(pb, set.A, x0, usable[k]);
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < n; ++j)
            if (mu(j) != 0) row.emplace_back(x0 + j, mu(j));
        pb.add_row(row, eta0);
    }
    int u0 = add_cone_copy(pb, set.K);
    int t = pb.add_block(ConeKind::Free, 1);
    int w = pb.add_block(ConeKind::Nonneg, 1);
    pb.set_cost(t, -1.0);
    for (int j = 0; j < n; ++j) {
        std::vector<std::pair<int, double>> row;
        for (int x0 : xs) row.emplace_back(x0 + j, 1.0);
        row.emplace_back(t, -e(j));
        row.emplace_back(u0 + j, -1.0);
        pb.add_row(row, 0.0);
    }
    pb.add_row({{t, 1.0}, {w, 1.0}}, 1.0);
    Solution sol = solve(pb.build(), opts.solver);
    // When each slice is a single boundary point the dual optimum is not attained and
    // the solver stalls with a converged primal; the points are verified below anyway.
    if (sol.status != SolveStatus::Optimal && !(sol.status == SolveStatus::NumericalLimit && sol.x.size())) {
        r.note += std::string("certificate program ended with ") + to_string(sol.status);
        return r;
    }
    std::vector<Vec> pts;
    for (int x0 : xs) pts.push_back(sol.x.segment(x0, n));
    std::vector<Vec> br;
    double m = verify(pts, br);
    r.points = pts;
    r.branches = br;
    r.sum = Vec::Zero(n);
    for (const auto& x : pts) r.sum += x;
    r.margin = m;
    if (clears_cert(opts, m, r.sum)) {
        r.status = CheckStatus::Holds;
    } else {
        r.note += "tight points only reach the boundary of K";
    }
    return r;
}

NecessaryInteriorResult check_minimal_necessary_interior(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                                         const AnalysisOptions& opts) {
    require_mu(set, mu);
    NecessaryInteriorResult r;
    r.dual_margin = interior_margin(dual(set.K), mu);
    if (r.dual_margin <= opts.margin_tol) {
        r.note = "mu is not in the interior of K*";
        return r;
    }
    RhsSupport rs = support_over_rhs(set, mu, opts);
    ThetaResult th = theta(set, mu, opts);
    r.inf_sigma = rs.inf_value;
    r.theta = th.value;
    if (!rs.complete || !th.complete) {
        r.status = CheckStatus::Inconclusive;
        r.note = "solver limits on some branch";
        return r;
    }
    bool off_sigma = std::abs(eta0 - rs.inf_value) > rel(opts, eta0) || std::isinf(rs.inf_value);
    bool off_theta = std::abs(eta0 - th.value) > rel(opts, eta0) || std::isinf(th.value);
    r.status = (off_sigma || off_theta) ? CheckStatus::Fails : CheckStatus::Holds;
    return r;
}

ExactDecision decide_minimal_exact(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                   const AnalysisOptions& opts) {
    require_mu(set, mu);
    ExactDecision r;
    if (!set.K.only_nonneg()) {
        r.note = "exact decision needs an orthant cone";
        return r;
    }
    ThetaResult th = theta(set, mu, opts);
    if (!th.complete) {
        r.applicable = true;
        r.note = "theta undecided on some branch";
        return r;
    }
    if (th.unbounded || eta0 > th.value + rel(opts, eta0)) {
        r.note = "inequality is not valid";
        return r;
    }
    r.applicable = true;
    const int n = set.n(), m = set.m();
    // eta0 is accepted up to rel(); the LP must not see that excess as infeasibility.
    const double level = std::min(eta0, th.value);
    ProgramBuilder pb;
    int d0 = pb.add_block(ConeKind::Nonneg, n);
    std::vector<int> lam;
    for (const auto& bv : th.table) {
        if (bv.status == SolveStatus::PrimalInfeasible) continue;
        int l0 = m > 0 ? pb.add_block(ConeKind::Free, m) : pb.num_vars();
        int s0 = pb.add_block(ConeKind::Nonneg, n);
        int r0 = pb.add_block(ConeKind::Nonneg, 1);
        lam.push_back(l0);
        for (int j = 0; j < n; ++j) {
            std::vector<std::pair<int, double>> row;
            for (int i = 0; i < m; ++i)
                if (set.A(i, j) != 0) row.emplace_back(l0 + i, set.A(i, j));
            row.emplace_back(d0 + j, 1.0);
            row.emplace_back(s0 + j, 1.0);
            pb.add_row(row, mu(j));
        }
        std::vector<std::pair<int, double>> row;
        for (int i = 0; i < m; ++i)
            if (bv.b(i) != 0) row.emplace_back(l0 + i, bv.b(i));
        row.emplace_back(r0, -1.0);
        pb.add_row(row, level);
    }
    int w = pb.add_block(ConeKind::Nonneg, 1);
    std::vector<std::pair<int, double>> cap;
    for (int j = 0; j < n; ++j) {
        cap.emplace_back(d0 + j, 1.0);
        pb.set_cost(d0 + j, -1.0);
    }
    cap.emplace_back(w, 1.0);
    pb.add_row(cap, 1.0);
    Solution sol = solve(pb.build(), opts.solver);
    if (sol.status != SolveStatus::Optimal) {
        r.note = std::string("dominance LP ended with ") + to_string(sol.status);
        return r;
    }
    r.optimum = -sol.objective;
    r.delta = sol.x.segment(d0, n).cwiseMax(0.0);
    for (int l0 : lam) r.lambdas.push_back(sol.x.segment(l0, m));
    if (r.optimum <= opts.tol) {
        r.verdict = Verdict::CertifiedMinimal;
        return r;
    }
    // Interior-point noise can push mu - delta just outside the valid region; snap
    // near-zero entries, then fall back to delta/2 (still dominating by convexity).
    for (int j = 0; j < n; ++j) {
        if (r.delta(j) <= 1e-7) r.delta(j) = 0.0;
        if (mu(j) > 0 && std::abs(mu(j) - r.delta(j)) <= 1e-7) r.delta(j) = mu(j);
    }
    for (double scale : {1.0, 0.5}) {
        Vec d = scale * r.delta;
        ThetaResult after = theta(set, mu - d, opts);
        if (after.complete && !after.unbounded && after.value >= eta0 - rel(opts, eta0)) {
            r.delta = d;
            r.theta_after = after.value;
            r.verdict = Verdict::CertifiedNotMinimal;
            return r;
        }
    }
    r.note = "dominating delta failed re-verification";
    return r;
}

DominanceWitness find_dominance_witness(const DisjunctiveSet& set, const Vec& mu, double eta0,
                                        const AnalysisOptions& opts) {
    require_mu(set, mu);
    DominanceWitness r;
    ConeProduct Kd = dual(set.K);
    ThetaResult th = theta(set, mu, opts);
    if (!th.complete || th.unbounded) return r;

    std::vector<std::pair<Vec, std::string>> cands;
    // (mu - mu; eta0) = (0; eta0) is valid iff eta0 <= 0.
    if (contains(Kd, mu, 0.0) && eta0 <= 0.0) cands.emplace_back(mu, "mu itself (cone-implied)");
    for (const auto& eq : enumerate_valid_equations(set, opts)) {
        for (double sgn : {1.0, -1.0}) {
            Vec xi = sgn * eq.eq.mu;
            double xi0 = sgn * eq.eq.eta0;
            if (!contains(Kd, xi, 1e-12)) continue;
            // theta(mu - s xi) = theta(mu) - s xi0 exactly, since <xi,x> = xi0 on S.
            double s = 1.0;
            if (xi0 > rel(opts, xi0)) {
                double slack = th.value - eta0;
                if (slack <= rel(opts, eta0)) continue;
                s = 0.5 * slack / xi0;
            }
            cands.emplace_back(s * xi, "valid equation " + format_equation(eq.eq.mu, eq.eq.eta0, set.var_names));
        }
    }
    for (const auto& [delta, src] : cands) {
        if (delta.cwiseAbs().maxCoeff() <= 1e-12) continue;
        ThetaResult after = theta(set, mu - delta, opts);
        if (!after.complete || after.unbounded) continue;
        if (after.value >= eta0 - rel(opts, eta0)) {
            r.status = CheckStatus::Holds;
            r.delta = delta;
            r.theta_after = after.value;
            r.source = src;
            return r;
        }
    }
    return r;
}

RepairResult dominance_repair(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts) {
    require_mu(set, mu);
    RepairResult r;
    if (!set.K.only_nonneg()) {
        r.status = CheckStatus::NotApplicable;
        r.note = "repair is defined for orthant cones";
        return r;
    }
    A0Result a0 = check_A0(set, mu, opts);
    if (a0.status != CheckStatus::Holds) {
        r.status = CheckStatus::NotApplicable;
        r.note = "D_mu is empty";
        return r;
    }
    Vec mu2(set.n());
    for (int i = 0; i < set.n(); ++i) {
        SupportValue sv = support_eval(set, mu, set.A.col(i), opts);
        if (!sv.finite()) {
            r.note = "sigma is not finite at column " + std::to_string(i + 1);
            return r;
        }
        mu2(i) = sv.value;
    }
    RhsSupport rs = support_over_rhs(set, mu, opts);
    if (!rs.complete || std::isinf(rs.inf_value)) {
        r.note = "inf sigma over B is not finite";
        return r;
    }
    r.status = CheckStatus::Holds;
    r.repaired.name = "repaired";
    r.repaired.mu = mu2;
    r.repaired.eta0 = rs.inf_value;
    return r;
}

// ---------------------------------------------------------------------------

EquationCheck valid_equation_check(const DisjunctiveSet& set, const Vec& mu, const AnalysisOptions& opts) {
    require_mu(set, mu);
    EquationCheck r;
    Mat At = set.A.transpose();
    LeastSquares ls = least_squares_solve(At, mu);
    r.residual = ls.residual;
    Vec lam = ls.solution;
    auto B = set.B.expand();
    const int m = set.m();
    Mat D(static_cast<int>(B.size()) - 1, m);
    for (size_t i = 1; i < B.size(); ++i) D.row(static_cast<int>(i) - 1) = (B[i] - B[0]).transpose();
    // lambda is only determined up to Ker(A^T); use that freedom to flatten b.lambda.
    Mat N = null_space_basis(At);
    if (N.cols() > 0 && D.rows() > 0) {
        LeastSquares adj = least_squares_solve(D * N, Vec(-D * lam));
        lam += N * adj.solution;
    }
    r.lambda = lam;
    r.eta0 = m > 0 ? B[0].dot(lam) : 0.0;
    if (std::abs(r.eta0) <= 1e-12) r.eta0 = 0.0;
    r.spread = D.rows() > 0 ? (D * lam).cwiseAbs().maxCoeff() : 0.0;
    bool in_image = r.residual <= opts.tol * std::max(1.0, mu.norm());
    r.status = in_image && r.spread <= rel(opts, r.eta0) ? CheckStatus::Holds : CheckStatus::Fails;
    return r;
}

std::vector<Equation> enumerate_valid_equations(const DisjunctiveSet& set, const AnalysisOptions& opts) {
    auto B = set.B.expand();
    const int m = set.m();
    std::vector<Equation> out;
    if (m == 0) return out;
    Mat D(static_cast<int>(B.size()) - 1, m);
    for (size_t i = 1; i < B.size(); ++i) D.row(static_cast<int>(i) - 1) = (B[i] - B[0]).transpose();
    Mat N = null_space_basis(D);
    if (N.cols() == 0) return out;
    Mat M = set.A.transpose() * N;  // candidate normals
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) <= std::max(kRankTol * s(0), 1e-12)) continue;
        Vec lam = N * svd.matrixV().col(i) / s(i);
        Vec mu = svd.matrixU().col(i);
        // scale so the first nonzero coefficient of mu is +1
        int lead = 0;
        while (lead < mu.size() && std::abs(mu(lead)) <= 1e-12) ++lead;
        double f = 1.0 / mu(lead);
        mu *= f;
        lam *= f;
        for (int j = 0; j < mu.size(); ++j)
            if (std::abs(mu(j)) <= 1e-12) mu(j) = 0.0;
        Equation e;
        e.eq.name = "eq" + std::to_string(out.size() + 1);
        e.eq.mu = mu;
        e.eq.eta0 = B[0].dot(lam);
        if (std::abs(e.eq.eta0) <= 1e-12) e.eq.eta0 = 0.0;
        e.lambda = lam;
        out.push_back(e);
    }
    (void)opts;
    return out;
}

std::string format_equation(const Vec& mu, double eta0, const std::vector<std::string>& names, const char* rel_op) {
    int lead = 0;
    while (lead < mu.size() && std::abs(mu(lead)) <= 1e-12) ++lead;
    double f = lead < mu.size() ? 1.0 / std::abs(mu(lead)) : 1.0;
    std::ostringstream os;
    bool first = true;
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    for (int j = 0; j < mu.size(); ++j) {
        double c = mu(j) * f;
        if (std::abs(c) <= 1e-9) continue;
        std::string name = j < static_cast<int>(names.size()) ? names[j] : "x" + std::to_string(j + 1);
        if (first)
            os << (c < 0 ? "−" : "");
        else
            os << (c < 0 ? " − " : " + ");
        if (std::abs(std::abs(c) - 1.0) > 1e-9) os << num(std::abs(c)) << "·";
        os << name;
        first = false;
    }
    if (first) os << "0";
    double rhs = eta0 * f;
    if (std::abs(rhs) <= 1e-12) rhs = 0.0;
    os << " " << rel_op << " " << num(rhs);
    return os.str();
}

std::vector<Vec> reconstruct_vertices_2d(const DisjunctiveSet& set, const Vec& mu, int directions,
                                         const AnalysisOptions& opts) {
    if (set.m() != 2) throw ModelError("vertex reconstruction needs exactly two rows in A");
    if (directions < 3) throw ModelError("vertex reconstruction needs at least three directions");
    std::vector<Vec> dirs;
    std::vector<double> sig;
    for (int k = 0; k < directions; ++k) {
        double a = 2.0 * std::numbers::pi * k / directions;
        Vec d(2);
        d << std::cos(a), std::sin(a);
        SupportValue sv = support_eval(set, mu, d, opts);
        if (!sv.finite()) return {};
        dirs.push_back(d);
        sig.push_back(sv.value);
    }
    std::vector<Vec> verts;
    for (int i = 0; i < directions; ++i)
        for (int j = i + 1; j < directions; ++j) {
            Eigen::Matrix2d M;
            M << dirs[i].transpose(), dirs[j].transpose();
            if (std::abs(M.determinant()) < 1e-9) continue;
            Vec p = M.inverse() * Eigen::Vector2d(sig[i], sig[j]);
            bool inside = true;
            for (int l = 0; l < directions; ++l) inside = inside && dirs[l].dot(p) <= sig[l] + 1e-6;
            if (!inside) continue;
            bool dup = false;
            for (const auto& v : verts) dup = dup || (v - p).norm() <= 1e-5;
            if (!dup) verts.push_back(p);
        }
    std::sort(verts.begin(), verts.end(), lex_less);
    return verts;
}

// ---------------------------------------------------------------------------

CertificateReport full_report(const DisjunctiveSet& set, const Inequality& ineq, const AnalysisOptions& opts) {
    require_mu(set, ineq.mu);
    const Vec& mu = ineq.mu;
    const double eta0 = ineq.eta0;
    CertificateReport rep;
    rep.inequality = ineq.name;
    rep.mu = mu;
    rep.eta0 = eta0;
    auto add = [&](CheckEntry e) { rep.checks.push_back(std::move(e)); };

    // validity / tightness
    ThetaResult th = theta(set, mu, opts);
    {
        CheckEntry e;
        e.name = "validity";
        e.values["theta"] = th.value;
        json table = json::array();
        for (const auto& bv : th.table)
            table.push_back({{"b", vec_to_json(bv.b)}, {"status", to_string(bv.status)},
                             {"value", number_to_json(bv.value)}, {"x", vec_to_json(bv.x)}});
        e.witness["branches"] = table;
        if (th.unbounded || eta0 > th.value + rel(opts, eta0)) {
            e.status = CheckStatus::Fails;
            if (th.argmin >= 0) e.witness["violating_point"] = vec_to_json(th.table[th.argmin].x);
        } else if (!th.complete) {
            e.status = CheckStatus::Inconclusive;
            e.note = "solver limit on some branch";
        } else {
            e.status = CheckStatus::Holds;
        }
        add(e);
    }
    const CheckStatus validity = rep.checks.back().status;
    {
        CheckEntry e;
        e.name = "tightness";
        e.values["theta"] = th.value;
        e.values["eta0"] = eta0;
        if (validity != CheckStatus::Holds)
            e.status = CheckStatus::NotApplicable;
        else
            e.status = std::abs(th.value - eta0) <= rel(opts, eta0) ? CheckStatus::Holds : CheckStatus::Fails;
        add(e);
    }
    if (validity == CheckStatus::Fails) {
        rep.verdict = Verdict::Invalid;
        rep.reason = "eta0 exceeds theta(mu)";
        return rep;
    }
    if (validity == CheckStatus::Inconclusive) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "validity could not be decided";
        return rep;
    }

    A0Result a0 = check_A0(set, mu, opts);
    {
        CheckEntry e;
        e.name = "A0";
        e.status = a0.status;
        if (a0.status == CheckStatus::Holds)
            e.witness = {{"lambda", vec_to_json(a0.lambda)}, {"gamma", vec_to_json(a0.gamma)}};
        if (a0.status == CheckStatus::Fails) e.witness = {{"u", vec_to_json(a0.u)}};
        add(e);
    }
    if (a0.status != CheckStatus::Holds) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "condition A.0 did not verify for a valid inequality (numerical trouble)";
        return rep;
    }

    RhsSupport rs = support_over_rhs(set, mu, opts);
    {
        CheckEntry e;
        e.name = "inf_sigma";
        e.values["inf_sigma"] = rs.inf_value;
        json vals = json::array();
        for (size_t i = 0; i < rs.rhs.size(); ++i)
            vals.push_back({{"b", vec_to_json(rs.rhs[i])}, {"sigma", number_to_json(rs.values[i].value)}});
        e.witness["sigma"] = vals;
        if (rs.argmin >= 0) e.witness["argmin"] = vec_to_json(rs.rhs[rs.argmin]);
        e.status = rs.complete && rs.inf_value <= th.value + rel(opts, th.value) ? CheckStatus::Holds
                                                                                  : CheckStatus::Inconclusive;
        e.note = "inf sigma <= theta";
        add(e);
    }
    if (set.B.lattice) {
        CheckEntry e;
        e.name = "truncation_monotonicity";
        e.status = rs.monotone ? CheckStatus::Holds : CheckStatus::Fails;
        json lo = json::array(), hi = json::array();
        for (double v : rs.tail_low) lo.push_back(number_to_json(v));
        for (double v : rs.tail_high) hi.push_back(number_to_json(v));
        e.witness = {{"sigma_low_side", lo}, {"sigma_high_side", hi}};
        add(e);
    }
    const bool trunc_ok = rs.monotone;

    const bool orthant = set.K.only_nonneg();
    A1iResult a1;
    if (orthant) {
        a1 = check_A1i(set, mu, opts);
        CheckEntry e;
        e.name = "A1i";
        e.status = a1.status;
        json ent = json::array();
        for (const auto& x : a1.entries)
            ent.push_back({{"index", x.index + 1}, {"status", to_string(x.status)},
                           {"optimum", number_to_json(x.optimum)}, {"vacuous", x.vacuous}});
        e.witness["columns"] = ent;
        add(e);
    }

    SublinearResult sub = check_sublinear_sufficient(set, mu, eta0, opts);
    {
        CheckEntry e;
        e.name = "sublinear_sufficient";
        e.status = sub.status;
        e.values["margin"] = sub.margin;
        e.witness = {{"rays", vecs_to_json(sub.rays)}};
        if (sub.sum.size()) e.witness["sum"] = vec_to_json(sub.sum);
        e.note = sub.note;
        if (!trunc_ok && e.status == CheckStatus::Holds) {
            e.status = CheckStatus::Inconclusive;
            e.note = "downgraded: truncation monotonicity failed";
        }
        add(e);
    }

    Assumption2Result a2 = assumption2_check(set, opts);
    {
        CheckEntry e;
        e.name = "assumption2";
        e.status = a2.status;
        e.values["margin"] = a2.margin;
        if (a2.witness.size()) e.witness = {{"x", vec_to_json(a2.witness)}, {"b", vec_to_json(a2.b)}};
        e.note = a2.status == CheckStatus::Holds ? "so every nonzero delta in K* is positive somewhere on S" : "positivity of K* on S undecided";
        add(e);
    }

    ExactDecision ex;
    if (orthant) {
        ex = decide_minimal_exact(set, mu, eta0, opts);
        CheckEntry e;
        e.name = "minimal_exact";
        e.values["optimum"] = ex.optimum;
        if (ex.verdict == Verdict::CertifiedMinimal)
            e.status = CheckStatus::Holds;
        else if (ex.verdict == Verdict::CertifiedNotMinimal)
            e.status = CheckStatus::Fails;
        else
            e.status = ex.applicable ? CheckStatus::Inconclusive : CheckStatus::NotApplicable;
        if (ex.delta.size()) e.witness["delta"] = vec_to_json(ex.delta);
        if (ex.verdict == Verdict::CertifiedNotMinimal) e.values["theta_after"] = ex.theta_after;
        e.note = ex.note;
        if (set.B.lattice && !trunc_ok && e.status == CheckStatus::Fails) {
            e.status = CheckStatus::Inconclusive;
            e.note = "downgraded: truncation monotonicity failed";
        }
        add(e);
    }

    MinimalSufficientResult ms = check_minimal_sufficient(set, mu, eta0, opts, ineq.hint_points);
    {
        CheckEntry e;
        e.name = "minimal_sufficient";
        e.status = ms.status;
        e.values["margin"] = ms.margin;
        e.values["inf_sigma"] = ms.inf_sigma;
        e.witness = {{"points", vecs_to_json(ms.points)}, {"branches", vecs_to_json(ms.branches)}};
        if (ms.sum.size()) e.witness["sum"] = vec_to_json(ms.sum);
        e.witness["from_hints"] = ms.used_hints;
        e.note = ms.note;
        if (!trunc_ok && e.status != CheckStatus::NotApplicable) {
            e.status = CheckStatus::Inconclusive;
            e.note = "downgraded: truncation monotonicity failed";
        }
        add(e);
    }

    NecessaryInteriorResult ni = check_minimal_necessary_interior(set, mu, eta0, opts);
    {
        CheckEntry e;
        e.name = "minimal_necessary_interior";
        e.status = ni.status;
        e.values["dual_margin"] = ni.dual_margin;
        e.values["inf_sigma"] = ni.inf_sigma;
        e.values["theta"] = ni.theta;
        e.note = ni.note;
        if (!trunc_ok && e.status == CheckStatus::Fails) {
            e.status = CheckStatus::Inconclusive;
            e.note = "downgraded: truncation monotonicity failed";
        }
        add(e);
    }

    DominanceWitness dw = find_dominance_witness(set, mu, eta0, opts);
    {
        CheckEntry e;
        e.name = "dominance_witness";
        e.status = dw.status == CheckStatus::Holds ? CheckStatus::Holds : CheckStatus::Inconclusive;
        if (dw.delta.size()) {
            e.witness = {{"delta", vec_to_json(dw.delta)}};
            e.values["theta_after"] = dw.theta_after;
        }
        e.note = dw.source;
        add(e);
    }

    EquationCheck eqc = valid_equation_check(set, mu, opts);
    {
        CheckEntry e;
        e.name = "valid_equation";
        e.status = eqc.status;
        e.values["residual"] = eqc.residual;
        e.values["spread"] = eqc.spread;
        e.values["eta0"] = eqc.eta0;
        e.witness = {{"lambda", vec_to_json(eqc.lambda)}};
        e.note = "sufficient direction; completeness needs a point of S in int(K)";
        add(e);
    }

    auto st = [&](const char* name) { return rep.find(name)->status; };
    if (orthant && st("minimal_exact") == CheckStatus::Holds) {
        rep.verdict = Verdict::CertifiedMinimal;
        rep.reason = "dominance LP optimum is zero";
    } else if (orthant && st("minimal_exact") == CheckStatus::Fails) {
        rep.verdict = Verdict::CertifiedNotMinimal;
        rep.reason = "dominance LP found a re-verified delta";
    } else if (st("minimal_sufficient") == CheckStatus::Holds) {
        rep.verdict = Verdict::CertifiedMinimal;
        rep.reason = "tight points in S sum to an interior point of K";
    } else if (st("minimal_necessary_interior") == CheckStatus::Fails) {
        rep.verdict = Verdict::CertifiedNotMinimal;
        rep.reason = "mu in int(K*) but eta0 differs from theta or inf sigma";
    } else if (st("dominance_witness") == CheckStatus::Holds) {
        rep.verdict = Verdict::CertifiedNotMinimal;
        rep.reason = "dominating delta in K*: " + dw.source;
    } else if (orthant && a1.status == CheckStatus::Fails && trunc_ok) {
        rep.verdict = Verdict::CertifiedNotMinimal;
        rep.reason = "condition A.1i fails, so the inequality is not sublinear";
    } else if (st("sublinear_sufficient") == CheckStatus::Holds) {
        rep.verdict = Verdict::SublinearInconclusiveMinimality;
        rep.reason = "sublinear by tight extreme rays; minimality undecided";
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "no certificate either way";
    }
    if (!trunc_ok && (rep.verdict == Verdict::CertifiedMinimal || rep.verdict == Verdict::CertifiedNotMinimal)) {
        rep.reason = "truncation monotonicity failed; would otherwise be " + std::string(to_string(rep.verdict));
        rep.verdict = Verdict::Inconclusive;
    }
    return rep;
}

}  // namespace cclab
