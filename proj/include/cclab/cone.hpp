#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cclab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Psd is reserved and rejected everywhere.
enum class ConeKind { Zero, Free, Nonneg, Lorentz, Psd };

const char* to_string(ConeKind k);
ConeKind cone_kind_from_string(const std::string& s);

struct ConeBlock {
    ConeKind kind;
    int dim;
};

/// Ordered product of cone blocks. For a Lorentz block the last coordinate
/// is the radius: x_d >= ||(x_1, ..., x_{d-1})||.
class ConeProduct {
public:
    ConeProduct() = default;
    explicit ConeProduct(std::vector<ConeBlock> blocks);

    static ConeProduct nonneg(int n) { return ConeProduct({{ConeKind::Nonneg, n}}); }
    static ConeProduct lorentz(int n) { return ConeProduct({{ConeKind::Lorentz, n}}); }

    const std::vector<ConeBlock>& blocks() const { return blocks_; }
    const std::vector<int>& offsets() const { return offsets_; }
    int total_dim() const { return total_; }
    bool is_regular() const;
    bool only_nonneg() const;

    /// Concatenation: this x other.
    ConeProduct operator*(const ConeProduct& other) const;
    bool operator==(const ConeProduct& other) const;

    std::string describe() const;

private:
    std::vector<ConeBlock> blocks_;
    std::vector<int> offsets_;
    int total_ = 0;
};

bool contains(const ConeProduct& K, const Vec& x, double tol);

/// min over blocks of the block margin; > 0 iff x in int(K).
double interior_margin(const ConeProduct& K, const Vec& x);

ConeProduct dual(const ConeProduct& K);

Vec canonical_interior_point(const ConeProduct& K);

/// Unit-norm extreme rays. Orthant unit rays are always present; Lorentz
/// blocks of dim <= 3 use an equispaced grid, larger ones seeded samples.
std::vector<Vec> sample_extreme_rays(const ConeProduct& K, int count, std::uint64_t seed);

/// Number of Nonneg coordinates plus Lorentz blocks (barrier degree used by
/// the solver's complementarity measure).
int cone_degree(const ConeProduct& K);

}  // namespace cclab
