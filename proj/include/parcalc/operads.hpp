#pragma once

#include <map>
#include <string>
#include <vector>

#include "parcalc/chain.hpp"

namespace parcalc {

// composition keys {n, m_0..m_{n-1}} with n >= 1, m_i >= 0, sum m_i <= n_max;
// compositions landing outside the truncation range carry no data
std::vector<std::vector<int>> composition_keys(int n_max);

// permutations of {0..n-1} in one-line notation, lexicographic
std::vector<std::vector<int>> all_permutations(int n);

// operad truncated at arity n_max (1..4); terms are chain complexes over Q
struct TruncatedOperad {
    int n_max = 0;
    std::vector<ChainComplex> terms;  // O(0)..O(n_max)
    std::vector<Rational> unit;       // coordinates of 1 in O(1) degree 0

    // keyed by {n, m_0..m_{n-1}}: O(n) (x) O(m_0) (x) ... -> O(sum m_i)
    std::map<std::vector<int>, ChainMap> gamma;

    // sigma[k] keyed by one-line permutations; blocks must be permutation
    // matrices and sigma[p o q] = sigma[p] sigma[q]
    std::vector<std::map<std::vector<int>, ChainMap>> sigma;
};

bool is_valid_operad(const TruncatedOperad& o, std::string* why = nullptr);
void validate_operad(const TruncatedOperad& o);

// one-dimensional operad with every composition the canonical isomorphism
TruncatedOperad unit_operad(int n_max);

// O(k) spanned by the permutations of k letters in degree zero; composition
// substitutes blocks, the symmetric action permutes labels
TruncatedOperad associative_operad(int n_max);

// right module over a truncated operad, same truncation bound
struct RightModuleSeq {
    int n_max = 0;
    std::vector<ChainComplex> terms;  // M(0)..M(n_max)

    // keyed like gamma: M(n) (x) O(m_0) (x) ... -> M(sum m_i)
    std::map<std::vector<int>, ChainMap> action;

    // symmetric actions; invertible chain maps, not forced to be permutation
    // matrices since homology bases mix classes
    std::vector<std::map<std::vector<int>, ChainMap>> sigma;
};

bool is_valid_module(const TruncatedOperad& o, const RightModuleSeq& m,
                     std::string* why = nullptr);
void validate_module(const TruncatedOperad& o, const RightModuleSeq& m);

// every operad acts on itself from the right
RightModuleSeq self_module(const TruncatedOperad& o);

// M(k) = homology of the configuration space of k points in R^d with zero
// differentials; the action collapses clustered points
RightModuleSeq configuration_betti_module(int n_max, int d);

// category with objects 0..n_max enriched in chain complexes,
// O(m,n) = (+) over functions a: {1..m} -> {1..n} of (x)_j O(|a^-1(j)|)
struct LinearCategory {
    struct Hom {
        ChainComplex complex;
        std::vector<std::vector<int>> alphas;   // indexing functions, lex order
        std::vector<std::vector<int>> offsets;  // per summand, per degree
    };

    int n_max = 0;
    std::vector<std::vector<Hom>> hom;  // hom[m][n] = O(m,n)
    // comp[m][n][p]: O(n,p) (x) O(m,n) -> O(m,p)
    std::vector<std::vector<std::vector<ChainMap>>> comp;
    std::vector<RatMatrix> unit;  // degree-zero column in O(n,n)
};

LinearCategory enriched_category_of(const TruncatedOperad& o);

bool check_enriched_units(const LinearCategory& cat);

// exhaustive basis-level associativity of comp; threads split the outer loop
bool check_enriched_associativity(const LinearCategory& cat, int threads = 1);

// contravariant functor on the enriched category induced by a right module
struct EnrichedModuleFunctor {
    std::vector<ChainComplex> values;            // object n -> M(n)
    std::vector<std::vector<ChainMap>> action;   // [m][n]: O(m,n) (x) M(n) -> M(m)
};

// builds the functor and checks unit and composition compatibility
// exhaustively; throws logic_error when a law fails
EnrichedModuleFunctor module_as_functor(const TruncatedOperad& o, const LinearCategory& cat,
                                        const RightModuleSeq& m, int threads = 1);

struct H0SplitReport {
    bool ok = false;
    std::vector<std::string> problems;
    std::vector<int> degrees;               // occupied degrees, ascending
    std::vector<RightModuleSeq> summands;   // one per degree, same order
};

// splits a module with zero differentials into degree summands; requires the
// action to vanish on positive-degree operad inputs
H0SplitReport h0_splitting_check(const TruncatedOperad& o, const RightModuleSeq& m);

}  // namespace parcalc
