#include "parcalc/matrix.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace parcalc;

namespace {

RatMatrix rm(const std::vector<std::vector<int>>& rows) {
    std::vector<std::vector<Rational>> rr;
    for (const auto& r : rows) rr.emplace_back(r.begin(), r.end());
    return RatMatrix::from_rows(rr);
}

std::vector<Rational> rv(const std::vector<int>& v) { return {v.begin(), v.end()}; }

bool proportional(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    if (a.size() != b.size()) return false;
    Rational ca(0), cb(0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero() != b[i].is_zero()) return false;
        if (!a[i].is_zero() && ca.is_zero()) { ca = a[i]; cb = b[i]; }
    }
    if (ca.is_zero()) return true;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] * cb != b[i] * ca) return false;
    return true;
}

}  // namespace

TEST_CASE("rank basics") {
    CHECK(rank(rm({{1, 2}, {2, 4}})) == 1);
    CHECK(rank(RatMatrix::zero(0, 0)) == 0);
    CHECK(rank(RatMatrix::identity(5)) == 5);
    CHECK(rank(RatMatrix::zero(3, 4)) == 0);
}

TEST_CASE("kernel basics") {
    auto k1 = kernel_basis(rm({{1, 1}}));
    REQUIRE(k1.size() == 1);
    CHECK(proportional(k1[0], rv({1, -1})));

    CHECK(kernel_basis(RatMatrix::identity(3)).empty());

    auto k2 = kernel_basis(RatMatrix::zero(2, 2));
    REQUIRE(k2.size() == 2);
    CHECK(rank(RatMatrix::from_columns(2, k2)) == 2);
}

TEST_CASE("image basics") {
    auto b1 = image_basis(rm({{1, 2}, {2, 4}}));
    REQUIRE(b1.size() == 1);
    CHECK(proportional(b1[0], rv({1, 2})));

    CHECK(image_basis(RatMatrix::zero(2, 2)).empty());

    auto b2 = image_basis(RatMatrix::identity(2));
    REQUIRE(b2.size() == 2);
    CHECK(rank(RatMatrix::from_columns(2, b2)) == 2);
}

TEST_CASE("image basis consists of original columns at pivot indices") {
    RatMatrix m = rm({{0, 1, 2, 3}, {0, 2, 4, 5}});
    auto piv = pivot_columns(m);
    REQUIRE(piv.size() == 2);
    CHECK(piv[0] == 1);  // column 0 is zero, column 2 proportional to column 1
    CHECK(piv[1] == 3);
    auto img = image_basis(m);
    CHECK(img[0] == m.column_dense(1));
    CHECK(img[1] == m.column_dense(3));
}

TEST_CASE("solve_consistent") {
    auto x = solve_consistent(RatMatrix::identity(3), rv({3, -1, 2}));
    REQUIRE(x.has_value());
    CHECK(*x == rv({3, -1, 2}));

    auto y = solve_consistent(rm({{1, 1}}), rv({2}));
    REQUIRE(y.has_value());
    CHECK((*y)[0] + (*y)[1] == Rational(2));

    CHECK_FALSE(solve_consistent(RatMatrix::zero(2, 2), rv({1, 0})).has_value());
    CHECK_THROWS_AS(solve_consistent(RatMatrix::identity(2), rv({1})), std::invalid_argument);
}

TEST_CASE("rank/kernel/image invariants on random matrices") {
    auto rng = testing::make_rng(20240801);
    for (int trial = 0; trial < 120; ++trial) {
        int nr = static_cast<int>(rng() % 6);
        int nc = static_cast<int>(rng() % 6);
        RatMatrix m = testing::random_matrix(rng, nr, nc);

        int r = rank(m);
        auto ker = kernel_basis(m);
        CHECK(r + static_cast<int>(ker.size()) == nc);
        for (const auto& k : ker) {
            auto mk = m.apply(k);
            for (const auto& v : mk) CHECK(v.is_zero());
        }
        CHECK(rank(m.transpose()) == r);
        CHECK(static_cast<int>(image_basis(m).size()) == r);

        // solvability matches membership in the column space
        if (nc > 0 && nr > 0) {
            auto b = m.apply(rv(std::vector<int>(nc, 1)));
            auto x = solve_consistent(m, b);
            REQUIRE(x.has_value());
            CHECK(m.apply(*x) == b);
        }
    }
}

TEST_CASE("rank of products") {
    auto rng = testing::make_rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        int a = 1 + static_cast<int>(rng() % 4);
        int b = 1 + static_cast<int>(rng() % 4);
        int c = 1 + static_cast<int>(rng() % 4);
        RatMatrix m = testing::random_matrix(rng, a, b);
        RatMatrix n = testing::random_matrix(rng, b, c);
        int rmn = rank(m * n);
        CHECK(rmn <= std::min(rank(m), rank(n)));
    }
}

TEST_CASE("matrix algebra helpers") {
    RatMatrix a = rm({{1, 2}, {3, 4}});
    CHECK(a * RatMatrix::identity(2) == a);
    CHECK(a + RatMatrix::zero(2, 2) == a);
    CHECK(a - a == RatMatrix::zero(2, 2));
    CHECK(a.scaled(Rational(2)) == a + a);
    CHECK(a.at(1, 0) == Rational(3));
    CHECK(RatMatrix::hcat(a, a).ncols() == 4);
    RatMatrix d = RatMatrix::block_diag(a, RatMatrix::identity(1));
    CHECK(d.nrows() == 3);
    CHECK(d.at(2, 2) == Rational(1));
    CHECK(d.at(2, 0) == Rational(0));
    CHECK(rank_with_clearing(a, nullptr, nullptr) == 2);
}
