#include <doctest.h>

#include "cclab/error.hpp"
#include "helpers.hpp"

using namespace cclab;
using testing::vec;

TEST_SUITE("cone") {

TEST_CASE("membership and margins") {
    ConeProduct L3 = ConeProduct::lorentz(3);
    CHECK(contains(L3, vec({0, 1, 2}), 0));
    CHECK(contains(L3, vec({0, 1, 1}), 0));
    CHECK_FALSE(contains(L3, vec({1, 1, 1}), 1e-9));
    CHECK(interior_margin(L3, vec({0, 1, 2})) > 0);
    CHECK(interior_margin(L3, vec({0, 1, 1})) == doctest::Approx(0).epsilon(1e-15));

    ConeProduct K = ConeProduct::nonneg(2) * ConeProduct::lorentz(2);
    CHECK(K.total_dim() == 4);
    CHECK(K.offsets() == std::vector<int>{0, 2});
    CHECK(contains(K, vec({0, 1, -1, 1}), 0));
    CHECK_FALSE(contains(K, vec({-1e-3, 1, 0, 1}), 1e-6));
    CHECK(cone_degree(K) == 3);
}

TEST_CASE("dimension mismatch throws") {
    CHECK_THROWS_AS(contains(ConeProduct::nonneg(2), vec({1, 2, 3}), 0), ModelError);
}

TEST_CASE("construction rules") {
    CHECK_THROWS_AS(ConeProduct({{ConeKind::Psd, 3}}), ModelError);
    CHECK_THROWS_AS(ConeProduct::lorentz(1), ModelError);
    CHECK_THROWS_AS(ConeProduct::nonneg(0), ModelError);
    CHECK(cone_kind_from_string("lorentz") == ConeKind::Lorentz);
    CHECK_THROWS_AS(cone_kind_from_string("psd?"), ModelError);
    CHECK(ConeProduct::nonneg(3).only_nonneg());
    CHECK_FALSE((ConeProduct::nonneg(3) * ConeProduct::lorentz(2)).only_nonneg());
}

TEST_CASE("dual is self for regular blocks and involutive") {
    ConeProduct K = ConeProduct::nonneg(3) * ConeProduct::lorentz(4);
    CHECK(dual(K) == K);
    CHECK(dual(dual(K)) == K);
    ConeProduct F({{ConeKind::Free, 2}, {ConeKind::Zero, 1}});
    ConeProduct Fd = dual(F);
    CHECK(Fd.blocks()[0].kind == ConeKind::Zero);
    CHECK(Fd.blocks()[1].kind == ConeKind::Free);
    CHECK(dual(Fd) == F);
}

TEST_CASE("canonical interior point") {
    ConeProduct K = ConeProduct::nonneg(2) * ConeProduct::lorentz(3);
    Vec e = canonical_interior_point(K);
    CHECK(e == vec({1, 1, 0, 0, 1}));
    CHECK(interior_margin(K, e) > 0);
}

TEST_CASE("extreme rays: unit, on the boundary, deterministic") {
    for (const ConeProduct& K : {ConeProduct::nonneg(3), ConeProduct::lorentz(2), ConeProduct::lorentz(3),
                                 ConeProduct::lorentz(5), ConeProduct::nonneg(2) * ConeProduct::lorentz(3)}) {
        auto rays = sample_extreme_rays(K, 32, 7);
        CHECK(!rays.empty());
        for (const auto& z : rays) {
            CHECK(z.norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(contains(K, z, 1e-12));
            for (size_t b = 0; b < K.blocks().size(); ++b) {
                int off = K.offsets()[b], d = K.blocks()[b].dim;
                auto seg = z.segment(off, d);
                if (K.blocks()[b].kind == ConeKind::Lorentz && seg.norm() > 0)
                    CHECK(std::abs(seg(d - 1) - seg.head(d - 1).norm()) <= 1e-12);
            }
        }
        auto again = sample_extreme_rays(K, 32, 7);
        REQUIRE(again.size() == rays.size());
        for (size_t i = 0; i < rays.size(); ++i) CHECK(again[i] == rays[i]);
    }
    CHECK(sample_extreme_rays(ConeProduct::lorentz(2), 10, 0).size() == 2);
    CHECK(sample_extreme_rays(ConeProduct::nonneg(4), 10, 0).size() == 4);
    CHECK(sample_extreme_rays(ConeProduct::lorentz(3), 64, 0).size() == 64);
}

TEST_CASE("property: K and K* pair nonnegatively") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 150; ++t) {
        ConeProduct K = testing::random_cone(rng, 3);
        Vec x = testing::random_ray_combination(rng, K);
        Vec y = testing::random_ray_combination(rng, dual(K));
        CHECK(x.dot(y) >= -1e-12);
    }
}

TEST_CASE("property: interior margin agrees with membership") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 150; ++t) {
        ConeProduct K = testing::random_cone(rng, 3);
        Vec x = testing::random_in_cone(rng, K);
        CHECK(interior_margin(K, x) > 0);
        CHECK(contains(K, x, 0));
        Vec z = testing::random_in_cone(rng, K, true);
        if (!K.only_nonneg()) {
            CHECK(interior_margin(K, z) <= 1e-12);
            CHECK(contains(K, z, 1e-10));
        }
        // stepping outward from a boundary point leaves the cone
        Vec e = canonical_interior_point(K);
        Vec b = x - (interior_margin(K, x) / interior_margin(K, e)) * e;
        CHECK(contains(K, b, 1e-9));
        CHECK_FALSE(contains(K, b - 1e-6 * e, 0));
    }
}

}
