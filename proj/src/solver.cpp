#include "cclab/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>

#include "cclab/error.hpp"

namespace cclab {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
        case SolveStatus::DualInfeasible: return "DualInfeasible";
        case SolveStatus::NumericalLimit: return "NumericalLimit";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// (x_last - |xbar|)(x_last + |xbar|), accurate near the boundary.
double soc_det(const Eigen::Ref<const Vec>& x) {
    const int d = static_cast<int>(x.size()) - 1;
    double nb = x.head(d).norm();
    return (x(d) - nb) * (x(d) + nb);
}

Vec identity(const ConeProduct& K) {
    Vec e = Vec::Zero(K.total_dim());
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i];
        if (b.kind == ConeKind::Nonneg) e.segment(off, b.dim).setOnes();
        if (b.kind == ConeKind::Lorentz) e(off + b.dim - 1) = 1.0;
    }
    return e;
}

// Jordan product; the Lorentz scalar part sits in the last coordinate.
Vec jprod(const ConeProduct& K, const Vec& u, const Vec& v) {
    Vec r = Vec::Zero(u.size());
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i], d = b.dim - 1;
        if (b.kind == ConeKind::Nonneg) {
            r.segment(off, b.dim) = u.segment(off, b.dim).cwiseProduct(v.segment(off, b.dim));
        } else if (b.kind == ConeKind::Lorentz) {
            double u0 = u(off + d), v0 = v(off + d);
            r.segment(off, d) = u0 * v.segment(off, d) + v0 * u.segment(off, d);
            r(off + d) = u.segment(off, b.dim).dot(v.segment(off, b.dim));
        }
    }
    return r;
}

// Solves lam o w = r for w.
Vec jdiv(const ConeProduct& K, const Vec& lam, const Vec& r) {
    Vec w = Vec::Zero(lam.size());
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i], d = b.dim - 1;
        if (b.kind == ConeKind::Nonneg) {
            w.segment(off, b.dim) = r.segment(off, b.dim).cwiseQuotient(lam.segment(off, b.dim));
        } else if (b.kind == ConeKind::Lorentz) {
            auto l = lam.segment(off, b.dim);
            auto z = r.segment(off, b.dim);
            double det = soc_det(l);
            double w0 = (l(d) * z(d) - l.head(d).dot(z.head(d))) / det;
            w.segment(off, d) = (z.head(d) - w0 * l.head(d)) / l(d);
            w(off + d) = w0;
        }
    }
    return w;
}

// Largest alpha with x + alpha dx still in the cone (Free blocks ignored).
double max_step(const ConeProduct& K, const Vec& x, const Vec& dx) {
    double amax = kInf;
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i], d = b.dim - 1;
        if (b.kind == ConeKind::Nonneg) {
            for (int j = 0; j < b.dim; ++j)
                if (dx(off + j) < 0) amax = std::min(amax, -x(off + j) / dx(off + j));
        } else if (b.kind == ConeKind::Lorentz) {
            auto xs = x.segment(off, b.dim);
            auto ds = dx.segment(off, b.dim);
            double a = ds(d) * ds(d) - ds.head(d).squaredNorm();
            double bb = xs(d) * ds(d) - xs.head(d).dot(ds.head(d));
            double c = soc_det(xs);
            double blk = kInf;
            double scale = ds.squaredNorm();
            if (std::abs(a) <= 1e-14 * std::max(scale, 1e-300)) {
                if (bb < 0) blk = -c / (2 * bb);
            } else {
                double disc = bb * bb - a * c;
                if (disc >= 0) {
                    double q = -(bb + std::copysign(std::sqrt(disc), bb));
                    for (double root : {q / a, q != 0 ? c / q : kInf})
                        if (root > 0) blk = std::min(blk, root);
                }
            }
            if (ds(d) < 0) blk = std::min(blk, -xs(d) / ds(d));
            amax = std::min(amax, blk);
        }
    }
    return amax;
}

// Nesterov-Todd scaling: W symmetric with W x = W^{-1} s.
void nt_scaling(const ConeProduct& K, const Vec& x, const Vec& s, Mat& W, Mat& Winv) {
    const int n = static_cast<int>(x.size());
    W.setZero(n, n);
    Winv.setZero(n, n);
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i], d = b.dim - 1;
        if (b.kind == ConeKind::Nonneg) {
            for (int j = 0; j < b.dim; ++j) {
                double w = std::sqrt(s(off + j) / x(off + j));
                W(off + j, off + j) = w;
                Winv(off + j, off + j) = 1.0 / w;
            }
        } else if (b.kind == ConeKind::Lorentz) {
            Vec xs = x.segment(off, b.dim), ss = s.segment(off, b.dim);
            double xn = std::sqrt(soc_det(xs)), sn = std::sqrt(soc_det(ss));
            Vec xt = xs / xn, st = ss / sn;
            double gamma = std::sqrt(std::max(0.0, (1.0 + xt.dot(st)) / 2.0));
            Vec Jxt = -xt;
            Jxt(d) = xt(d);
            Vec w = (st + Jxt) / (2.0 * gamma);
            double beta = std::sqrt(sn / xn);
            // Wbar = [I + wb wb^T/(1+w0), wb; wb^T, w0], Wbar^{-1} = J Wbar J.
            Mat Wb = Mat::Identity(b.dim, b.dim);
            Wb.topLeftCorner(d, d) += w.head(d) * w.head(d).transpose() / (1.0 + w(d));
            Wb.block(0, d, d, 1) = w.head(d);
            Wb.block(d, 0, 1, d) = w.head(d).transpose();
            Wb(d, d) = w(d);
            Mat J = -Mat::Identity(b.dim, b.dim);
            J(d, d) = 1.0;
            W.block(off, off, b.dim, b.dim) = beta * Wb;
            Winv.block(off, off, b.dim, b.dim) = J * Wb * J / beta;
        }
    }
}

struct Reduced {
    ConicProgram p;
    std::vector<int> keep;  // reduced column -> original column
    std::vector<int> rows;  // reduced row -> original row
};

}  // namespace

Solution solve(const ConicProgram& prog, const SolverOptions& opts) {
    const int n0 = static_cast<int>(prog.c.size());
    const int m0 = static_cast<int>(prog.b.size());
    if (prog.K.total_dim() != n0 || prog.A.cols() != n0 || prog.A.rows() != m0)
        throw ModelError("solve: inconsistent program dimensions");
    if (!prog.c.allFinite() || !prog.b.allFinite() || !prog.A.allFinite())
        throw ModelError("solve: non-finite program data");

    // Drop Zero-cone columns (x fixed at 0) and empty rows.
    Reduced red;
    std::vector<ConeBlock> blocks;
    for (size_t i = 0; i < prog.K.blocks().size(); ++i) {
        const auto& b = prog.K.blocks()[i];
        if (b.kind == ConeKind::Zero) continue;
        blocks.push_back(b);
        for (int j = 0; j < b.dim; ++j) red.keep.push_back(prog.K.offsets()[i] + j);
    }
    const int n = static_cast<int>(red.keep.size());
    Mat Acols(m0, n);
    for (int j = 0; j < n; ++j) Acols.col(j) = prog.A.col(red.keep[j]);
    const double bscale = std::max(1.0, inf_norm(prog.b));
    for (int i = 0; i < m0; ++i) {
        if (n > 0 && Acols.row(i).cwiseAbs().maxCoeff() > 0) {
            red.rows.push_back(i);
        } else if (std::abs(prog.b(i)) > opts.feas_tol * bscale) {
            Solution sol;
            sol.status = SolveStatus::PrimalInfeasible;
            sol.objective = kInf;
            sol.certificate = Vec::Zero(m0);
            sol.certificate(i) = 1.0 / prog.b(i);
            sol.message = "empty row with nonzero right-hand side";
            return sol;
        }
    }
    const int m = static_cast<int>(red.rows.size());
    ConeProduct K(blocks);
    Mat A(m, n);
    Vec b(m), c(n);
    for (int i = 0; i < m; ++i) {
        A.row(i) = Acols.row(red.rows[i]);
        b(i) = prog.b(red.rows[i]);
    }
    for (int j = 0; j < n; ++j) c(j) = prog.c(red.keep[j]);

    auto lift = [&](const Vec& xr, const Vec& yr, const Vec& sr, Solution& sol) {
        sol.x = Vec::Zero(n0);
        sol.s = Vec::Zero(n0);
        sol.y = Vec::Zero(m0);
        for (int j = 0; j < n; ++j) {
            sol.x(red.keep[j]) = xr(j);
            sol.s(red.keep[j]) = sr(j);
        }
        for (int i = 0; i < m; ++i) sol.y(red.rows[i]) = yr(i);
        // Zero-cone slacks are free: s = c - A^T y there.
        Vec sfull = prog.c - prog.A.transpose() * sol.y;
        for (size_t i = 0; i < prog.K.blocks().size(); ++i)
            if (prog.K.blocks()[i].kind == ConeKind::Zero)
                sol.s.segment(prog.K.offsets()[i], prog.K.blocks()[i].dim) =
                    sfull.segment(prog.K.offsets()[i], prog.K.blocks()[i].dim);
    };

    std::vector<bool> is_free(n, false);
    for (size_t i = 0; i < K.blocks().size(); ++i)
        if (K.blocks()[i].kind == ConeKind::Free)
            for (int j = 0; j < K.blocks()[i].dim; ++j) is_free[K.offsets()[i] + j] = true;

    const int deg = cone_degree(K);
    const Vec e = identity(K);
    Vec x = e, s = e, y = Vec::Zero(m);
    double tau = 1.0, kappa = 1.0;

    const double cscale = std::max(1.0, inf_norm(c));
    const double rdelta = opts.regularization;
    const int N = n + m + 1;

    Solution sol;
    int stalls = 0;
    Mat W, Winv;
    for (int it = 0; it <= opts.max_iters; ++it) {
        sol.iterations = it;
        Vec rp = A * x - b * tau;
        Vec rd = c * tau - A.transpose() * y - s;
        double cx = c.dot(x), by = b.dot(y);
        double rg = kappa + cx - by;
        double mu = (x.dot(s) + tau * kappa) / (deg + 1);

        // Termination tests on the normalized iterate.
        double pres = inf_norm(rp) / tau, dres = inf_norm(rd) / tau;
        double pobj = cx / tau, dobj = by / tau;
        if (opts.verbose)
            std::fprintf(stderr, "%3d pres=%.2e dres=%.2e pobj=%.8e dobj=%.8e tau=%.2e kap=%.2e mu=%.2e\n", it,
                         pres, dres, pobj, dobj, tau, kappa, mu);
        if (pres <= opts.feas_tol * bscale && dres <= opts.feas_tol * cscale &&
            std::abs(pobj - dobj) <= opts.gap_tol * std::max(1.0, std::min(std::abs(pobj), std::abs(dobj)))) {
            sol.status = SolveStatus::Optimal;
            sol.objective = pobj;
            lift(x / tau, y / tau, s / tau, sol);
            sol.diverging = inf_norm(sol.x) > 1e6 || inf_norm(sol.y) > 1e6;
            break;
        }
        if (by > 0 && inf_norm(A.transpose() * y + s) / by <= opts.feas_tol * cscale) {
            sol.status = SolveStatus::PrimalInfeasible;
            sol.objective = kInf;
            lift(x, y / by, s / by, sol);
            sol.certificate = sol.y;
            break;
        }
        if (cx < 0 && inf_norm(A * x) / (-cx) <= opts.feas_tol * bscale) {
            sol.status = SolveStatus::DualInfeasible;
            sol.objective = -kInf;
            lift(x / (-cx), y, s, sol);
            sol.certificate = sol.x;
            break;
        }
        if (it == opts.max_iters) {
            sol.message = "iteration limit";
            break;
        }
        if (!std::isfinite(mu) || mu < 1e-300) {
            sol.message = "complementarity collapsed";
            break;
        }

        nt_scaling(K, x, s, W, Winv);
        Vec lam = W * x;

        Mat M = Mat::Zero(N, N);
        M.topLeftCorner(n, n) = W * W;
        for (int j = 0; j < n; ++j) M(j, j) += rdelta;
        M.block(0, n, n, m) = -A.transpose();
        M.block(0, n + m, n, 1) = c;
        M.block(n, 0, m, n) = A;
        for (int i = 0; i < m; ++i) M(n + i, n + i) = -rdelta;
        M.block(n, n + m, m, 1) = -b;
        M.block(n + m, 0, 1, n) = c.transpose();
        M.block(n + m, n, 1, m) = -b.transpose();
        M(n + m, n + m) = -kappa / tau;
        Eigen::PartialPivLU<Mat> lu(M);

        struct Dir {
            Vec dx, dy, ds;
            double dtau, dkappa;
            Vec Wdx, rc;
        };
        auto direction = [&](double eta, const Vec& rc, double rtk) {
            Vec rhs(N);
            rhs.head(n) = -eta * rd + W * rc;
            for (int j = 0; j < n; ++j)
                if (is_free[j]) rhs(j) = -eta * rd(j);
            rhs.segment(n, m) = -eta * rp;
            rhs(n + m) = -eta * rg - rtk / tau;
            Vec sol_v = lu.solve(rhs);
            // one step of iterative refinement
            sol_v += lu.solve(rhs - M * sol_v);
            Dir dd;
            dd.dx = sol_v.head(n);
            dd.dy = sol_v.segment(n, m);
            dd.dtau = sol_v(n + m);
            dd.Wdx = W * dd.dx;
            dd.ds = W * (rc - dd.Wdx);
            for (int j = 0; j < n; ++j)
                if (is_free[j]) dd.ds(j) = 0.0;
            dd.dkappa = (rtk - kappa * dd.dtau) / tau;
            dd.rc = rc;
            return dd;
        };
        auto step_to_boundary = [&](const Dir& dd) {
            double a = std::min(max_step(K, x, dd.dx), max_step(K, s, dd.ds));
            if (dd.dtau < 0) a = std::min(a, -tau / dd.dtau);
            if (dd.dkappa < 0) a = std::min(a, -kappa / dd.dkappa);
            return a;
        };

        // Predictor.
        Dir aff = direction(1.0, -lam, -tau * kappa);
        double a_aff = std::min(1.0, step_to_boundary(aff));
        double sigma = std::pow(1.0 - a_aff, 3);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector with Mehrotra second-order term.
        Vec corr = jprod(K, aff.Wdx, Vec(aff.rc - aff.Wdx));
        Vec rc = jdiv(K, lam, Vec(sigma * mu * e - jprod(K, lam, lam) - corr));
        double rtk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        Dir dir = direction(1.0 - sigma, rc, rtk);
        double alpha = std::min(1.0, 0.99 * step_to_boundary(dir));
        if (!std::isfinite(alpha) || !dir.dx.allFinite() || !dir.dy.allFinite()) {
            sol.message = "non-finite search direction";
            break;
        }

        x += alpha * dir.dx;
        y += alpha * dir.dy;
        s += alpha * dir.ds;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
        for (int j = 0; j < n; ++j)
            if (is_free[j]) s(j) = 0.0;

        stalls = alpha < 1e-8 ? stalls + 1 : 0;
        if (stalls >= 5) {
            sol.message = "step length vanished";
            break;
        }
    }

    if (sol.status == SolveStatus::Optimal) {
        double tol = 10.0 * std::max(opts.feas_tol, opts.gap_tol);
        KktReport k = check_kkt(prog, sol, tol * std::max(bscale, cscale));
        if (!k.passed) {
            sol.status = SolveStatus::NumericalLimit;
            sol.message = "optimality verification failed";
        }
    } else if (sol.status != SolveStatus::NumericalLimit) {
        if (!check_certificate(prog, sol, 100.0 * opts.feas_tol * std::max(bscale, cscale))) {
            sol.status = SolveStatus::NumericalLimit;
            sol.message = "certificate verification failed";
        }
    }
    if (sol.status == SolveStatus::NumericalLimit && sol.x.size() == 0) lift(x / tau, y / tau, s / tau, sol);
    return sol;
}

KktReport check_kkt(const ConicProgram& p, const Solution& sol, double tol) {
    KktReport r;
    r.primal_residual = inf_norm(p.A * sol.x - p.b);
    r.dual_residual = inf_norm(p.A.transpose() * sol.y + sol.s - p.c);
    double cx = p.c.dot(sol.x), by = p.b.dot(sol.y);
    r.gap = std::abs(cx - by);
    // Cone violations: distance below zero of the worst block condition.
    auto violation = [](const ConeProduct& K, const Vec& v) {
        double worst = 0.0;
        for (size_t i = 0; i < K.blocks().size(); ++i) {
            const auto& b = K.blocks()[i];
            auto seg = v.segment(K.offsets()[i], b.dim);
            switch (b.kind) {
                case ConeKind::Zero: worst = std::max(worst, seg.cwiseAbs().maxCoeff()); break;
                case ConeKind::Nonneg: worst = std::max(worst, -seg.minCoeff()); break;
                case ConeKind::Lorentz:
                    worst = std::max(worst, seg.head(b.dim - 1).norm() - seg(b.dim - 1));
                    break;
                default: break;
            }
        }
        return worst;
    };
    r.primal_cone_violation = violation(p.K, sol.x);
    r.dual_cone_violation = violation(dual(p.K), sol.s);
    double gscale = std::max(1.0, std::min(std::abs(cx), std::abs(by)));
    r.passed = r.primal_residual <= tol && r.dual_residual <= tol && r.gap <= tol * gscale &&
               r.primal_cone_violation <= tol && r.dual_cone_violation <= tol;
    return r;
}

bool check_certificate(const ConicProgram& p, const Solution& sol, double tol) {
    if (sol.status == SolveStatus::PrimalInfeasible) {
        const Vec& y = sol.certificate;
        if (y.size() != p.b.size()) return false;
        Vec aty = p.A.transpose() * y;
        return p.b.dot(y) > 0.5 && contains(dual(p.K), Vec(-aty), tol);
    }
    if (sol.status == SolveStatus::DualInfeasible) {
        const Vec& x = sol.certificate;
        if (x.size() != p.c.size()) return false;
        return p.c.dot(x) < -0.5 && inf_norm(p.A * x) <= tol && contains(p.K, x, tol);
    }
    return false;
}

int ProgramBuilder::add_block(ConeKind kind, int dim) {
    int first = n_;
    blocks_.push_back({kind, dim});
    n_ += dim;
    return first;
}

void ProgramBuilder::set_cost(int var, double value) { cost_.emplace_back(var, value); }

void ProgramBuilder::add_row(const std::vector<std::pair<int, double>>& terms, double rhs) {
    rows_.push_back(terms);
    rhs_.push_back(rhs);
}

ConicProgram ProgramBuilder::build() const {
    ConicProgram p;
    p.K = ConeProduct(blocks_);
    p.c = Vec::Zero(n_);
    for (auto [j, v] : cost_) p.c(j) += v;
    p.A = Mat::Zero(static_cast<int>(rows_.size()), n_);
    p.b = Vec::Zero(static_cast<int>(rows_.size()));
    for (size_t i = 0; i < rows_.size(); ++i) {
        for (auto [j, v] : rows_[i]) p.A(static_cast<int>(i), j) += v;
        p.b(static_cast<int>(i)) = rhs_[i];
    }
    return p;
}

}  // namespace cclab
