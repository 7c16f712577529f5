#include "parcalc/simplicial.hpp"

#include <vector>

#include "doctest.h"
#include "helpers.hpp"

using namespace parcalc;
using parcalc::testing::make_rng;
using parcalc::testing::random_bounded_poset;
using parcalc::testing::random_poset;

namespace {

// partitions of a 3-set: 0 discrete, 1..3 the pair merges, 4 one block
FinitePoset tiny_partition_poset() {
    return FinitePoset(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 4}, {2, 4}, {3, 4}});
}

GradedRanks ranks(std::vector<int> v) { return GradedRanks(std::move(v)); }

}  // namespace

TEST_CASE("poset construction and bounds") {
    FinitePoset c3 = FinitePoset::chain(3);
    CHECK(c3.less(0, 2));
    CHECK_FALSE(c3.less(2, 0));
    CHECK(c3.minimum() == 0);
    CHECK(c3.maximum() == 2);
    CHECK(FinitePoset::antichain(3).minimum() == std::nullopt);
    CHECK_THROWS(FinitePoset(2, {{0, 1}, {1, 0}}));  // cycle
    CHECK_THROWS(FinitePoset(2, {{0, 2}}));

    FinitePoset sq = FinitePoset::product(FinitePoset::chain(2), FinitePoset::chain(2));
    CHECK(sq.size() == 4);
    CHECK(sq.minimum() == 0);
    CHECK(sq.maximum() == 3);
    CHECK(sq.less(0, 3));
    CHECK_FALSE(sq.less(1, 2));  // (0,1) and (1,0) incomparable
}

TEST_CASE("simplicial complex validation") {
    CHECK_THROWS(SimplicialComplex(3, {{0, 1}}));  // vertices of the edge missing
    CHECK_THROWS(SimplicialComplex(2, {{0, 0}}));
    CHECK_THROWS(SimplicialComplex(1, {{0, 1}}));
    SimplicialComplex tri = SimplicialComplex::from_facets(3, {{0, 1, 2}});
    CHECK(tri.dim() == 2);
    CHECK(tri.count(0) == 3);
    CHECK(tri.count(1) == 3);
    CHECK(tri.count(2) == 1);
    CHECK(tri.facets() == std::vector<std::vector<int>>{{0, 1, 2}});
    CHECK(tri.contains({0, 2}));
    CHECK_FALSE(tri.contains({0, 3}));
    CHECK(tri.chain_complex().betti() == ranks({1}));
}

TEST_CASE("order complexes of small posets") {
    SimplicialComplex edge = order_complex(FinitePoset::chain(2));
    CHECK(edge.count(0) == 2);
    CHECK(edge.count(1) == 1);

    SimplicialComplex pts = order_complex(FinitePoset::antichain(3));
    CHECK(pts.dim() == 0);
    CHECK(pts.count(0) == 3);

    SimplicialComplex p3 = order_complex(tiny_partition_poset());
    CHECK(p3.count(0) == 5);
    CHECK(p3.count(1) == 7);
    CHECK(p3.count(2) == 3);
    CHECK(p3.dim() == 2);
}

TEST_CASE("order complex of a bounded poset is contractible") {
    auto rng = make_rng(811);
    for (int trial = 0; trial < 10; ++trial) {
        FinitePoset p = random_bounded_poset(rng, 4);
        CHECK(order_complex(p).chain_complex().betti() == ranks({1}));
    }
}

TEST_CASE("boundary subcomplex drops through-chains") {
    SimplicialComplex b2 = boundary_subcomplex(FinitePoset::chain(2));
    CHECK(b2.dim() == 0);
    CHECK(b2.count(0) == 2);

    SimplicialComplex b3 = boundary_subcomplex(tiny_partition_poset());
    CHECK(b3.count(0) == 5);
    CHECK(b3.count(1) == 6);
    CHECK(b3.dim() == 1);
    // suspension of three points
    CHECK(b3.chain_complex().betti() == ranks({1, 2}));

    CHECK_THROWS(boundary_subcomplex(FinitePoset::antichain(2)));
}

TEST_CASE("relative homology of pairs") {
    SimplicialComplex edge = SimplicialComplex::from_facets(2, {{0, 1}});
    SimplicialComplex ends(2, {{0}, {1}});
    CHECK(relative_homology(SimplicialPair(edge, edge)) == ranks({}));
    CHECK(relative_homology(SimplicialPair(edge, ends)) == ranks({0, 1}));
    CHECK_THROWS(SimplicialPair(ends, edge));

    FinitePoset p3 = tiny_partition_poset();
    SimplicialPair pair(order_complex(p3), boundary_subcomplex(p3));
    CHECK(relative_homology(pair) == ranks({0, 0, 2}));

    // empty subcomplex: relative complex is the absolute one
    SimplicialComplex empty;
    CHECK(relative_chain_complex(SimplicialPair(edge, empty)) == edge.chain_complex());
}

TEST_CASE("euler characteristic is additive over a pair") {
    auto rng = make_rng(822);
    for (int trial = 0; trial < 10; ++trial) {
        FinitePoset p = random_bounded_poset(rng, 5);
        SimplicialComplex total = order_complex(p);
        SimplicialComplex sub = boundary_subcomplex(p);
        ChainComplex rel = relative_chain_complex(SimplicialPair(total, sub));
        CHECK(total.chain_complex().euler_characteristic() ==
              sub.chain_complex().euler_characteristic() + rel.euler_characteristic());
    }
}

TEST_CASE("direct pair complex matches the subcomplex route") {
    auto check_poset = [](const FinitePoset& p) {
        ChainComplex direct = relative_order_pair_complex(p);
        ChainComplex generic =
            relative_chain_complex(SimplicialPair(order_complex(p), boundary_subcomplex(p)));
        CHECK(direct == generic);
    };
    check_poset(FinitePoset::chain(1));
    check_poset(FinitePoset::chain(2));
    check_poset(FinitePoset::chain(4));
    check_poset(tiny_partition_poset());
    check_poset(FinitePoset::product(FinitePoset::chain(2), FinitePoset::chain(2)));
    check_poset(FinitePoset::product(tiny_partition_poset(), FinitePoset::chain(2)));
    auto rng = make_rng(833);
    for (int trial = 0; trial < 10; ++trial) check_poset(random_bounded_poset(rng, 5));

    // one-element poset: min and max coincide, the pair is a bare point
    CHECK(relative_order_pair_complex(FinitePoset::chain(1)).betti() == ranks({1}));
    CHECK(relative_order_pair_complex(FinitePoset::chain(1)) == ChainComplex({1}, {}));
}

TEST_CASE("square poset pair is a relative 2-sphere") {
    FinitePoset sq = FinitePoset::product(FinitePoset::chain(2), FinitePoset::chain(2));
    CHECK(relative_order_pair_complex(sq).betti() == ranks({0, 0, 1}));
}
