#pragma once

#include "parcalc/chain.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace parcalc {

// Strict partial order on elements 0..n-1.  Relations are closed under
// transitivity at construction; cycles are rejected.
class FinitePoset {
public:
    FinitePoset() = default;
    FinitePoset(int n, const std::vector<std::pair<int, int>>& relations);
    static FinitePoset chain(int n);
    static FinitePoset antichain(int n);
    static FinitePoset product(const FinitePoset& a, const FinitePoset& b);

    int size() const { return n_; }
    bool less(int a, int b) const { return lt_[a * n_ + b] != 0; }
    bool leq(int a, int b) const { return a == b || less(a, b); }
    std::optional<int> minimum() const;
    std::optional<int> maximum() const;

private:
    int n_ = 0;
    std::vector<char> lt_;
};

// Abstract simplicial complex on vertices 0..n-1.  Simplices are sorted
// vertex lists, grouped by dimension and kept in lexicographic order, so
// boundary matrices are reproducible.  Downward closure is enforced.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    SimplicialComplex(int nvertices, std::vector<std::vector<int>> simplices);
    static SimplicialComplex from_facets(int nvertices,
                                         const std::vector<std::vector<int>>& facets);

    int vertex_count() const { return nverts_; }
    int dim() const { return static_cast<int>(by_dim_.size()) - 1; }
    int count(int d) const;
    const std::vector<std::vector<int>>& simplices(int d) const;
    // index within its dimension, -1 when absent; s must be sorted
    int index_of(const std::vector<int>& s) const;
    bool contains(const std::vector<int>& s) const { return index_of(s) >= 0; }
    bool is_subcomplex_of(const SimplicialComplex& other) const;
    std::vector<std::vector<int>> facets() const;  // maximal simplices

    ChainComplex chain_complex() const;

private:
    int nverts_ = 0;
    std::vector<std::vector<std::vector<int>>> by_dim_;
};

class SimplicialPair {
public:
    SimplicialPair(SimplicialComplex total, SimplicialComplex sub);
    const SimplicialComplex& total() const { return total_; }
    const SimplicialComplex& sub() const { return sub_; }

private:
    SimplicialComplex total_, sub_;
};

// nerve: simplices are the strictly increasing chains of p
SimplicialComplex order_complex(const FinitePoset& p);

// chains that omit the minimum or omit the maximum; needs both to exist
SimplicialComplex boundary_subcomplex(const FinitePoset& p);

// quotient chain groups: free on simplices of total outside sub, faces that
// land in sub dropped
ChainComplex relative_chain_complex(const SimplicialPair& pair);
GradedRanks relative_homology(const SimplicialPair& pair);

// the relative complex of (order_complex(p), boundary_subcomplex(p)) built
// directly from the chains through min and max; identical matrices, no
// absolute complex materialized
ChainComplex relative_order_pair_complex(const FinitePoset& p);

}  // namespace parcalc
