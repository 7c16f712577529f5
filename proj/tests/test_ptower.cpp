#include "parcalc/ptower.hpp"

#include <vector>

#include "doctest.h"

using namespace parcalc;

namespace {

GradedRanks ranks(std::vector<int> v) { return GradedRanks(std::move(v)); }

long long weight(const SetPartition& p) {
    long long w = 1;
    for (const auto& b : p.blocks()) w *= single_block_rank(static_cast<int>(b.size()));
    return w;
}

}  // namespace

TEST_CASE("t homology of small partitions") {
    CHECK(t_homology(SetPartition::one_block(4)) == ranks({0, 0, 0, 6}));
    CHECK(t_homology(SetPartition::parse("1,2|3,4")) == ranks({0, 0, 1}));
    CHECK(t_homology(SetPartition::parse("1,2,3|4,5")) == ranks({0, 0, 0, 2}));
    CHECK(t_homology(SetPartition::discrete(5)) == ranks({1}));
    CHECK_THROWS(t_homology(SetPartition(0, {})));
    CHECK_THROWS(t_homology(SetPartition::one_block(8)));
}

TEST_CASE("t homology concentrates in the excess degree") {
    for (int n = 1; n <= 5; ++n)
        for (const auto& p : enumerate_partitions(n)) {
            GradedRanks got = t_homology(p);
            GradedRanks want;
            want.set(p.excess(), static_cast<int>(weight(p)));
            CHECK(got == want);
        }
    GradedRanks t6 = t_homology(SetPartition::one_block(6));
    CHECK(t6 == ranks({0, 0, 0, 0, 0, 120}));
}

TEST_CASE("kunneth factorization over blocks") {
    CHECK(kunneth_check(SetPartition::parse("1,2|3,4")));
    CHECK(kunneth_check(SetPartition::parse("1,2,3|4,5")));
    CHECK(kunneth_check(SetPartition::one_block(5)));
    for (const auto& p : enumerate_partitions(4)) CHECK(kunneth_check(p));
}

TEST_CASE("single block ranks") {
    const long long want[] = {1, 1, 2, 6, 24, 120};
    for (int m = 1; m <= 6; ++m) CHECK(single_block_rank(m) == want[m - 1]);
    CHECK(single_block_rank(8) == 5040);
    CHECK(single_block_rank(9) == 40320);
    CHECK(single_block_rank(10) == 362880);
    CHECK_THROWS(single_block_rank(0));
}

TEST_CASE("layer tables") {
    LayerTable t33 = layer_table(3, 3);
    REQUIRE(t33.rows.size() == 3);
    CHECK(t33.rows[0] == LayerRow{0, 0, 1});
    CHECK(t33.rows[1] == LayerRow{1, 2, 3});
    CHECK(t33.rows[2] == LayerRow{2, 4, 2});

    LayerTable t43 = layer_table(4, 3);
    REQUIRE(t43.rows.size() == 4);
    CHECK(t43.rows[2] == LayerRow{2, 4, 11});

    LayerTable t1 = layer_table(1, 5);
    REQUIRE(t1.rows.size() == 1);
    CHECK(t1.rows[0] == LayerRow{0, 0, 1});

    // degree placement and the weighted-count identity against e_i(1..k-1)
    for (int k = 1; k <= 8; ++k) {
        LayerTable t = layer_table(k, 2);
        PoincareOracle o = poincare_oracle(k, 2);
        REQUIRE(t.rows.size() == static_cast<size_t>(k));
        for (const auto& row : t.rows) {
            CHECK(row.degree == row.i);
            CHECK(row.rank == o.coeffs[row.degree]);
        }
    }
    for (const auto& row : layer_table(5, 4).rows) CHECK(row.degree % 3 == 0);
}

TEST_CASE("layer tables are thread-count independent") {
    LayerTable a = layer_table(6, 3, 1);
    LayerTable b = layer_table(6, 3, 4);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i] == b.rows[i]);
}

TEST_CASE("reduced layer tables start at half excess") {
    LayerTable r4 = reduced_layer_table(4, 3);
    REQUIRE(!r4.rows.empty());
    CHECK(r4.rows[0] == LayerRow{2, 4, 3});

    LayerTable r3 = reduced_layer_table(3, 3);
    REQUIRE(!r3.rows.empty());
    CHECK(r3.rows[0].i == 2);
    CHECK(r3.rows[0].rank == 2);

    LayerTable r2 = reduced_layer_table(2, 5);
    REQUIRE(r2.rows.size() == 1);
    CHECK(r2.rows[0] == LayerRow{1, 4, 1});

    for (int k = 2; k <= 10; ++k) {
        LayerTable r = reduced_layer_table(k, 3);
        REQUIRE(!r.rows.empty());
        CHECK(r.rows[0].i == (k + 1) / 2);
        CHECK(r.rows[0].rank > 0);
        for (const auto& row : r.rows) CHECK(row.i >= (k + 1) / 2);
    }
    CHECK_THROWS(reduced_layer_table(1, 3));
}

TEST_CASE("connectivity bound") {
    CHECK(connectivity(4, 3) == 3);
    CHECK(connectivity(5, 3) == 5);
    CHECK(connectivity(2, 2) == 0);
    for (int k = 2; k <= 10; ++k)
        for (int d : {2, 3, 5})
            CHECK(connectivity(k, d) == reduced_layer_table(k, d).rows[0].degree - 1);
}

TEST_CASE("poincare oracle coefficients") {
    CHECK(poincare_oracle(3, 3).coeffs == std::vector<long long>{1, 0, 3, 0, 2});
    CHECK(poincare_oracle(1, 7).coeffs == std::vector<long long>{1});
    CHECK(poincare_oracle(4, 4).coeffs ==
          std::vector<long long>{1, 0, 0, 6, 0, 0, 11, 0, 0, 6});
}

TEST_CASE("collapse against the oracle") {
    for (int d : {2, 7, 16}) {
        CollapseReport rep = collapse_check(2, d);
        CHECK(rep.ok);
        CHECK(rep.diff.empty());
    }
    for (int k = 1; k <= 5; ++k)
        for (int d : {3, 4}) CHECK(collapse_check(k, d).ok);

    // deliberately corrupted table must be caught with exactly one diff row
    LayerTable t = layer_table(4, 3);
    t.rows[1].rank += 1;
    CollapseReport rep = compare_with_oracle(t, poincare_oracle(4, 3));
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.diff.size() == 1);
    CHECK(rep.diff[0] == CollapseRow{2, 7, 6});
}
