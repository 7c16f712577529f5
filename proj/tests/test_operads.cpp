#include "parcalc/operads.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "parcalc/ptower.hpp"

using namespace parcalc;

namespace {

using Key = std::vector<int>;
using Perm = std::vector<int>;
using Column = RatMatrix::Column;

int ipow(int b, int e) {
    int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

int test_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return std::max(1, std::min(8, static_cast<int>(hw)));
}

// one unary generator in degree one squaring to zero
TruncatedOperad nilpotent_operad() {
    TruncatedOperad o;
    o.n_max = 1;
    o.terms.push_back(ChainComplex::concentrated(0, 1));
    o.terms.push_back(ChainComplex({1, 1}, {RatMatrix::zero(1, 1)}));
    o.unit = {Rational(1)};
    ChainMap counit;
    counit.blocks.push_back(RatMatrix(1, 1, {Column{{0, Rational(1)}}}));
    counit.blocks.push_back(RatMatrix::zero(0, 1));
    o.gamma[Key{1, 0}] = std::move(counit);
    ChainMap mult;
    mult.blocks.push_back(RatMatrix(1, 1, {Column{{0, Rational(1)}}}));
    mult.blocks.push_back(RatMatrix(1, 2, {Column{{0, Rational(1)}}, Column{{0, Rational(1)}}}));
    mult.blocks.push_back(RatMatrix::zero(0, 1));
    o.gamma[Key{1, 1}] = std::move(mult);
    o.sigma.resize(2);
    o.sigma[0][Perm{}] = identity_map(o.terms[0]);
    o.sigma[1][Perm{0}] = identity_map(o.terms[1]);
    return o;
}

// every arity the same complex, every action the identity; a module exactly
// when the operad terms are one-dimensional in degree zero
RightModuleSeq constant_module(const TruncatedOperad& o, const ChainComplex& base) {
    RightModuleSeq m;
    m.n_max = o.n_max;
    m.terms.assign(o.n_max + 1, base);
    for (const auto& key : composition_keys(o.n_max)) m.action[key] = identity_map(base);
    m.sigma.resize(o.n_max + 1);
    for (int k = 0; k <= o.n_max; ++k)
        for (const auto& p : all_permutations(k)) m.sigma[k][p] = identity_map(base);
    return m;
}

bool has_key(const std::vector<Key>& keys, const Key& k) {
    return std::find(keys.begin(), keys.end(), k) != keys.end();
}

}  // namespace

TEST_CASE("operads: composition keys, permutations, unit operad") {
    auto keys = composition_keys(4);
    CHECK(keys.size() == 125);
    Key inner{2, 0, 2}, ones{4, 1, 1, 1, 1}, over{2, 2, 3};
    CHECK(has_key(keys, inner));
    CHECK(has_key(keys, ones));
    CHECK_FALSE(has_key(keys, over));
    CHECK(composition_keys(1).size() == 2);

    auto p0 = all_permutations(0);
    REQUIRE(p0.size() == 1);
    CHECK(p0[0].empty());
    auto p3 = all_permutations(3);
    CHECK(p3.size() == 6);
    Perm first{0, 1, 2};
    CHECK(p3.front() == first);

    for (int n = 1; n <= 4; ++n) {
        TruncatedOperad o = unit_operad(n);
        std::string why;
        CHECK(is_valid_operad(o, &why));
        CHECK(why.empty());
    }
    CHECK_NOTHROW(validate_operad(unit_operad(2)));
}

TEST_CASE("operads: invalid data is reported with a reason") {
    std::string why;

    CHECK_FALSE(is_valid_operad(unit_operad(5), &why));
    CHECK(why == "truncation bound must be 1..4");

    TruncatedOperad missing = unit_operad(2);
    missing.gamma.erase(missing.gamma.find(Key{1, 0}));
    CHECK_FALSE(is_valid_operad(missing, &why));
    CHECK(why == "composition keys differ from the range");

    TruncatedOperad left = unit_operad(2);
    left.gamma[Key{1, 0}].blocks[0] = left.gamma.at(Key{1, 0}).blocks[0].scaled(Rational(2));
    CHECK_FALSE(is_valid_operad(left, &why));
    CHECK(why == "left unit law fails");

    TruncatedOperad right = unit_operad(2);
    right.gamma[Key{2, 1, 1}].blocks[0] =
        right.gamma.at(Key{2, 1, 1}).blocks[0].scaled(Rational(2));
    CHECK_FALSE(is_valid_operad(right, &why));
    CHECK(why == "right unit law fails");

    TruncatedOperad assoc = unit_operad(2);
    assoc.gamma[Key{2, 2, 0}].blocks[0] =
        assoc.gamma.at(Key{2, 2, 0}).blocks[0].scaled(Rational(2));
    CHECK_FALSE(is_valid_operad(assoc, &why));
    CHECK(why == "composition associativity fails");

    TruncatedOperad sign = unit_operad(2);
    sign.sigma[2][Perm{1, 0}].blocks[0] = RatMatrix::identity(1).scaled(Rational(-1));
    CHECK_FALSE(is_valid_operad(sign, &why));
    CHECK(why == "symmetric action block is not a permutation matrix");

    CHECK_THROWS_AS(validate_operad(sign), std::invalid_argument);
}

TEST_CASE("operads: block substitution operad on permutations") {
    TruncatedOperad a = associative_operad(3);
    std::string why;
    CHECK(is_valid_operad(a, &why));
    CHECK(why.empty());
    CHECK(a.terms[0].dim(0) == 1);
    CHECK(a.terms[2].dim(0) == 2);
    CHECK(a.terms[3].dim(0) == 6);

    // gamma on (1 0) with arguments (0 1) and (0): blocks 0..1 and 2 swap as
    // wholes, giving the word (2 0 1)
    const RatMatrix& g = a.gamma.at(Key{2, 2, 1}).blocks[0];
    CHECK(g.nrows() == 6);
    CHECK(g.ncols() == 2 * 2 * 1);
    int col = 1 * 2 + 0;  // w = (1 0), u_0 = (0 1), u_1 = (0)
    CHECK(g.column(col).size() == 1);
    CHECK(g.at(4, col) == Rational(1));  // (2 0 1) is fifth in lex order

    // relabeling acts by composition on words
    Perm cyc{1, 2, 0};
    const RatMatrix& s = a.sigma[3].at(cyc).blocks[0];
    // word (0 2 1) has index 1; (1 2 0) o (0 2 1) = (1 0 2) has index 2
    CHECK(s.column(1).size() == 1);
    CHECK(s.at(2, 1) == Rational(1));
}

TEST_CASE("enriched category: hom complexes count colour functions") {
    TruncatedOperad o = unit_operad(4);
    LinearCategory cat = enriched_category_of(o);
    CHECK(cat.n_max == 4);
    for (int m = 0; m <= 4; ++m)
        for (int n = 0; n <= 4; ++n)
            CHECK(cat.hom[m][n].complex == ChainComplex::concentrated(0, ipow(n, m)));
    CHECK(cat.hom[2][2].complex.dim(0) == 4);
    for (int m = 0; m <= 4; ++m) CHECK(cat.hom[m][1].complex == o.terms[m]);
    for (int n = 0; n <= 4; ++n) CHECK(cat.hom[0][n].complex.dim(0) == 1);
    CHECK(check_enriched_units(cat));

    TruncatedOperad a = associative_operad(3);
    LinearCategory ca = enriched_category_of(a);
    for (int m = 0; m <= 3; ++m) CHECK(ca.hom[m][1].complex == a.terms[m]);
    CHECK(ca.hom[2][2].complex.dim(0) == 6);
    CHECK(ca.hom[3][2].complex.dim(0) == 24);
    CHECK(check_enriched_units(ca));
}

TEST_CASE("enriched category: composition matches operadic substitution") {
    TruncatedOperad a = associative_operad(2);
    LinearCategory cat = enriched_category_of(a);

    // composing with the identity-coloured unary summand is the identity
    CHECK(cat.comp[2][1][1].blocks[0] == RatMatrix::identity(2));

    // g = (1 0) in O(2,1), f = (0 1) x 1 in the (0,0) summand of O(2,2)
    const RatMatrix& c = cat.comp[2][2][1].blocks[0];
    CHECK(c.nrows() == 2);
    CHECK(c.ncols() == 2 * 6);
    int col = 1 * 6 + 0;
    CHECK(c.column(col).size() == 1);
    CHECK(c.at(0, col) == Rational(1));  // substitution gives the word (0 1)
}

TEST_CASE("enriched category: associativity holds exhaustively") {
    int t = test_threads();
    CHECK(check_enriched_associativity(enriched_category_of(unit_operad(4)), t));
    CHECK(check_enriched_associativity(enriched_category_of(associative_operad(3)), t));

    LinearCategory nil = enriched_category_of(nilpotent_operad());
    CHECK(nil.hom[1][1].complex.dim(1) == 1);
    // both degree-one products hit the generator
    RatMatrix prods(1, 2, {Column{{0, Rational(1)}}, Column{{0, Rational(1)}}});
    CHECK(nil.comp[1][1][1].blocks[1] == prods);
    CHECK(check_enriched_units(nil));
    CHECK(check_enriched_associativity(nil, 1));
}

TEST_CASE("modules: self and constant modules validate") {
    std::string why;
    TruncatedOperad uo = unit_operad(2);
    CHECK(is_valid_module(uo, self_module(uo), &why));
    TruncatedOperad a = associative_operad(3);
    CHECK(is_valid_module(a, self_module(a), &why));
    TruncatedOperad nil = nilpotent_operad();
    CHECK(is_valid_module(nil, self_module(nil), &why));

    ChainComplex base({2, 0, 3}, {RatMatrix::zero(2, 0), RatMatrix::zero(0, 3)});
    RightModuleSeq cm = constant_module(uo, base);
    CHECK(is_valid_module(uo, cm, &why));
    CHECK_NOTHROW(validate_module(uo, cm));

    CHECK_FALSE(is_valid_module(unit_operad(3), cm, &why));
    CHECK(why == "module truncation differs from the operad");

    RightModuleSeq unit_broken = cm;
    unit_broken.action[Key{1, 1}].blocks[0] =
        unit_broken.action.at(Key{1, 1}).blocks[0].scaled(Rational(2));
    CHECK_FALSE(is_valid_module(uo, unit_broken, &why));
    CHECK(why == "module unit law fails");

    RightModuleSeq assoc_broken = cm;
    for (auto& b : assoc_broken.action[Key{2, 2, 0}].blocks) b = b.scaled(Rational(2));
    CHECK_FALSE(is_valid_module(uo, assoc_broken, &why));
    CHECK(why == "module associativity fails");

    // a sign on the transposition is a group action but not compatible with
    // the composition
    RightModuleSeq sym_broken = cm;
    for (auto& b : sym_broken.sigma[2][Perm{1, 0}].blocks) b = b.scaled(Rational(-1));
    CHECK_FALSE(is_valid_module(uo, sym_broken, &why));
    CHECK(why == "module symmetry fails");
}

TEST_CASE("modules: configuration ranks follow the layer tables") {
    CHECK_THROWS_AS(configuration_betti_module(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(configuration_betti_module(5, 3), std::invalid_argument);
    CHECK_THROWS_AS(configuration_betti_module(2, 1), std::invalid_argument);

    RightModuleSeq m = configuration_betti_module(4, 3);
    CHECK(m.terms[0].dim(0) == 1);
    CHECK(m.terms[1].dim(0) == 1);
    CHECK(m.terms[2].dim(0) == 1);
    CHECK(m.terms[2].dim(2) == 1);
    CHECK(m.terms[3].dim(2) == 3);
    CHECK(m.terms[3].dim(4) == 2);
    CHECK(m.terms[4].dim(2) == 6);
    CHECK(m.terms[4].dim(4) == 11);
    CHECK(m.terms[4].dim(6) == 6);
    for (int k = 1; k <= 4; ++k) {
        LayerTable lt = layer_table(k, 3);
        for (const auto& row : lt.rows)
            CHECK(static_cast<long long>(m.terms[k].dim(row.degree)) == row.rank);
    }

    std::string why;
    CHECK(is_valid_module(unit_operad(4), configuration_betti_module(4, 3), &why));
    CHECK(why.empty());
    // even ambient dimension flips the commutation signs
    CHECK(is_valid_module(unit_operad(3), configuration_betti_module(3, 2), &why));
    CHECK(why.empty());
    RightModuleSeq flat = configuration_betti_module(3, 2);
    CHECK(flat.terms[3].dim(0) == 1);
    CHECK(flat.terms[3].dim(1) == 3);
    CHECK(flat.terms[3].dim(2) == 2);
}

TEST_CASE("modules: configuration action collapses clusters") {
    RightModuleSeq m = configuration_betti_module(3, 3);

    // splitting one point in two doubles each generator it carries
    const ChainMap& dbl = m.action.at(Key{2, 2, 1});
    CHECK(dbl.blocks[0] == RatMatrix::identity(1));
    CHECK(dbl.blocks[2].nrows() == 3);
    CHECK(dbl.blocks[2].ncols() == 1);
    Column doubled{{1, Rational(1)}, {2, Rational(1)}};
    CHECK(dbl.blocks[2].column(0) == doubled);

    // dropping a point kills the positive-degree classes
    const ChainMap& del = m.action.at(Key{2, 1, 0});
    CHECK(del.blocks[0] == RatMatrix::identity(1));
    CHECK(del.blocks[2].nrows() == 0);

    // transposing the two points is a sign in odd ambient dimension
    Perm swap01{1, 0};
    CHECK(m.sigma[2].at(swap01).blocks[2].at(0, 0) == Rational(-1));
    RightModuleSeq even = configuration_betti_module(2, 4);
    CHECK(even.sigma[2].at(swap01).blocks[3].at(0, 0) == Rational(1));
}

TEST_CASE("functors: enriched module actions compose contravariantly") {
    int t = test_threads();

    TruncatedOperad uo = unit_operad(3);
    LinearCategory cat = enriched_category_of(uo);
    EnrichedModuleFunctor triv = module_as_functor(uo, cat, self_module(uo), t);
    for (int m = 0; m <= 3; ++m)
        for (int n = 0; n <= 3; ++n) {
            std::vector<Rational> row(ipow(n, m), Rational(1));
            CHECK(triv.action[m][n].blocks[0] == RatMatrix::from_rows({row}));
        }

    EnrichedModuleFunctor conf = module_as_functor(uo, cat, configuration_betti_module(3, 3), t);
    CHECK(conf.values[3].dim(4) == 2);
    // the summand (0,1,1) of O(3,2) doubles the second point: the class of
    // the pair {0,1} pulls back to the pairs {0,1} and {0,2}
    Column pulled{{0, Rational(1)}, {1, Rational(1)}};
    CHECK(conf.action[3][2].blocks[2].column(3) == pulled);
    // a single colour recovers the plain collapse onto one point
    Column unit_class{{0, Rational(1)}};
    CHECK(conf.action[2][1].blocks[0].column(0) == unit_class);

    TruncatedOperad uo2 = unit_operad(2);
    LinearCategory cat2 = enriched_category_of(uo2);
    CHECK_NOTHROW(module_as_functor(uo2, cat2, configuration_betti_module(2, 3), t));
    CHECK_THROWS_AS(module_as_functor(uo, cat2, self_module(uo), 1), std::invalid_argument);

    // graded path with the Koszul sign on the module factor
    TruncatedOperad nil = nilpotent_operad();
    LinearCategory ncat = enriched_category_of(nil);
    EnrichedModuleFunctor nf = module_as_functor(nil, ncat, self_module(nil), 1);
    CHECK(nf.values[1].dim(1) == 1);
    CHECK(nf.action[1][1].blocks[1].ncols() == 2);
}

TEST_CASE("splitting: zero-differential modules split by degree") {
    TruncatedOperad uo = unit_operad(2);
    ChainComplex base({2, 0, 3}, {RatMatrix::zero(2, 0), RatMatrix::zero(0, 3)});
    H0SplitReport rep = h0_splitting_check(uo, constant_module(uo, base));
    CHECK(rep.ok);
    CHECK(rep.problems.empty());
    std::vector<int> two_degrees{0, 2};
    CHECK(rep.degrees == two_degrees);
    REQUIRE(rep.summands.size() == 2);
    CHECK(rep.summands[0].terms[1].dim(0) == 2);
    CHECK(rep.summands[1].terms[1].dim(2) == 3);
    CHECK(rep.summands[1].terms[1].dim(0) == 0);

    H0SplitReport self = h0_splitting_check(uo, self_module(uo));
    CHECK(self.ok);
    std::vector<int> zero_only{0};
    CHECK(self.degrees == zero_only);
    CHECK(self.summands.size() == 1);

    // differentials must vanish
    ChainComplex two({1, 1}, {RatMatrix::identity(1)});
    H0SplitReport diff = h0_splitting_check(uo, constant_module(uo, two));
    CHECK_FALSE(diff.ok);
    REQUIRE(diff.problems.size() == 1);
    CHECK(diff.problems[0] == "module differential is nonzero");

    // the nilpotent self-module feeds a positive-degree operad input into a
    // nonzero block
    TruncatedOperad nil = nilpotent_operad();
    H0SplitReport mixed = h0_splitting_check(nil, self_module(nil));
    CHECK_FALSE(mixed.ok);
    REQUIRE(mixed.problems.size() == 1);
    CHECK(mixed.problems[0] == "action does not vanish on positive-degree operad inputs");
    CHECK(mixed.summands.empty());
}

TEST_CASE("splitting: configuration module splits into layer degrees") {
    TruncatedOperad uo = unit_operad(4);
    RightModuleSeq m = configuration_betti_module(4, 3);
    H0SplitReport rep = h0_splitting_check(uo, m);
    CHECK(rep.ok);
    CHECK(rep.problems.empty());
    std::vector<int> degrees{0, 2, 4, 6};
    CHECK(rep.degrees == degrees);
    REQUIRE(rep.summands.size() == 4);
    CHECK(rep.summands[0].terms[4].dim(0) == 1);
    CHECK(rep.summands[1].terms[4].dim(2) == 6);
    CHECK(rep.summands[2].terms[4].dim(4) == 11);
    CHECK(rep.summands[3].terms[4].dim(6) == 6);
    CHECK(rep.summands[3].terms[3].dim(6) == 0);
    // the degree-two summand keeps the doubling coefficients
    Key dbl{2, 2, 1};
    CHECK(rep.summands[1].action.at(dbl).blocks[2].column(0) ==
          m.action.at(dbl).blocks[2].column(0));
}
