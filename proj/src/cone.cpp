#include "cclab/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cclab/error.hpp"

namespace cclab {

const char* to_string(ConeKind k) {
    switch (k) {
        case ConeKind::Zero: return "zero";
        case ConeKind::Free: return "free";
        case ConeKind::Nonneg: return "nonneg";
        case ConeKind::Lorentz: return "lorentz";
        case ConeKind::Psd: return "psd";
    }
    return "?";
}

ConeKind cone_kind_from_string(const std::string& s) {
    if (s == "zero") return ConeKind::Zero;
    if (s == "free") return ConeKind::Free;
    if (s == "nonneg") return ConeKind::Nonneg;
    if (s == "lorentz") return ConeKind::Lorentz;
    if (s == "psd") return ConeKind::Psd;
    throw ModelError("unknown cone kind '" + s + "'");
}

ConeProduct::ConeProduct(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) {
        if (b.kind == ConeKind::Psd) throw ModelError("psd cone blocks are not supported");
        if (b.dim < 1) throw ModelError("cone block dimension must be positive");
        if (b.kind == ConeKind::Lorentz && b.dim < 2)
            throw ModelError("lorentz block needs dim >= 2, got " + std::to_string(b.dim));
        offsets_.push_back(total_);
        total_ += b.dim;
    }
}

bool ConeProduct::is_regular() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const ConeBlock& b) {
        return b.kind == ConeKind::Nonneg || b.kind == ConeKind::Lorentz;
    });
}

bool ConeProduct::only_nonneg() const {
    return std::all_of(blocks_.begin(), blocks_.end(),
                       [](const ConeBlock& b) { return b.kind == ConeKind::Nonneg; });
}

ConeProduct ConeProduct::operator*(const ConeProduct& other) const {
    auto bl = blocks_;
    bl.insert(bl.end(), other.blocks_.begin(), other.blocks_.end());
    return ConeProduct(std::move(bl));
}

bool ConeProduct::operator==(const ConeProduct& other) const {
    if (blocks_.size() != other.blocks_.size()) return false;
    for (size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].kind != other.blocks_[i].kind || blocks_[i].dim != other.blocks_[i].dim)
            return false;
    return true;
}

std::string ConeProduct::describe() const {
    std::ostringstream os;
    for (size_t i = 0; i < blocks_.size(); ++i) {
        if (i) os << " x ";
        os << to_string(blocks_[i].kind) << "(" << blocks_[i].dim << ")";
    }
    return os.str();
}

static void check_dim(const ConeProduct& K, const Vec& x) {
    if (x.size() != K.total_dim())
        throw ModelError("vector length " + std::to_string(x.size()) + " does not match cone dimension " +
                         std::to_string(K.total_dim()));
}

static void require_regular(const ConeProduct& K, const char* what) {
    if (!K.is_regular()) throw ModelError(std::string(what) + " requires a regular cone");
}

bool contains(const ConeProduct& K, const Vec& x, double tol) {
    check_dim(K, x);
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        auto seg = x.segment(K.offsets()[i], b.dim);
        switch (b.kind) {
            case ConeKind::Free: break;
            case ConeKind::Zero:
                if (seg.cwiseAbs().maxCoeff() > tol) return false;
                break;
            case ConeKind::Nonneg:
                if (seg.minCoeff() < -tol) return false;
                break;
            case ConeKind::Lorentz:
                if (seg(b.dim - 1) < seg.head(b.dim - 1).norm() - tol) return false;
                break;
            case ConeKind::Psd: return false;
        }
    }
    return true;
}

double interior_margin(const ConeProduct& K, const Vec& x) {
    check_dim(K, x);
    require_regular(K, "interior_margin");
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        auto seg = x.segment(K.offsets()[i], b.dim);
        if (b.kind == ConeKind::Nonneg)
            m = std::min(m, seg.minCoeff());
        else
            m = std::min(m, seg(b.dim - 1) - seg.head(b.dim - 1).norm());
    }
    return m;
}

ConeProduct dual(const ConeProduct& K) {
    std::vector<ConeBlock> out;
    for (auto b : K.blocks()) {
        if (b.kind == ConeKind::Zero)
            b.kind = ConeKind::Free;
        else if (b.kind == ConeKind::Free)
            b.kind = ConeKind::Zero;
        out.push_back(b);
    }
    return ConeProduct(std::move(out));
}

Vec canonical_interior_point(const ConeProduct& K) {
    require_regular(K, "canonical_interior_point");
    Vec e = Vec::Zero(K.total_dim());
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i];
        if (b.kind == ConeKind::Nonneg)
            e.segment(off, b.dim).setOnes();
        else
            e(off + b.dim - 1) = 1.0;
    }
    return e;
}

std::vector<Vec> sample_extreme_rays(const ConeProduct& K, int count, std::uint64_t seed) {
    require_regular(K, "sample_extreme_rays");
    if (count < 1) throw ModelError("sample_extreme_rays: count must be positive");
    std::vector<Vec> rays;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = K.total_dim();
    for (size_t i = 0; i < K.blocks().size(); ++i) {
        const auto& b = K.blocks()[i];
        int off = K.offsets()[i];
        if (b.kind == ConeKind::Nonneg) {
            for (int j = 0; j < b.dim; ++j) {
                Vec r = Vec::Zero(n);
                r(off + j) = 1.0;
                rays.push_back(r);
            }
            continue;
        }
        const int d = b.dim - 1;
        auto push = [&](const Vec& xbar) {
            Vec r = Vec::Zero(n);
            r.segment(off, d) = xbar;
            r(off + d) = 1.0;
            rays.push_back(r / std::sqrt(2.0));
        };
        if (d == 1) {
            push(Vec::Constant(1, 1.0));
            push(Vec::Constant(1, -1.0));
        } else if (d == 2) {
            for (int k = 0; k < count; ++k) {
                double th = 2.0 * std::numbers::pi * k / count;
                Vec u(2);
                // snap so axis-aligned grid points are exact
                u << std::round(std::cos(th) * 1e15) / 1e15, std::round(std::sin(th) * 1e15) / 1e15;
                push(u / u.norm());
            }
        } else {
            for (int k = 0; k < count; ++k) {
                Vec u(d);
                do {
                    for (int j = 0; j < d; ++j) u(j) = gauss(rng);
                } while (u.norm() < 1e-12);
                push(u / u.norm());
            }
        }
    }
    return rays;
}

int cone_degree(const ConeProduct& K) {
    int deg = 0;
    for (const auto& b : K.blocks()) {
        if (b.kind == ConeKind::Nonneg) deg += b.dim;
        if (b.kind == ConeKind::Lorentz) deg += 1;
    }
    return deg;
}

}  // namespace cclab
