#pragma once

#include "parcalc/partitions.hpp"

#include <vector>

namespace parcalc {

// homology of the relative pair of the refinement poset of p; direct
// simplicial computation, support capped at 7
GradedRanks t_homology(const SetPartition& p);

// t_homology against the graded product over blocks
bool kunneth_check(const SetPartition& p);

// rank of T of a single m-block in its concentration degree m-1; computed
// from the simplicial pair for m <= 7 (cached), (m-1)! above
long long single_block_rank(int m);

struct LayerRow {
    int i = 0;
    int degree = 0;
    long long rank = 0;
    bool operator==(const LayerRow&) const = default;
};

struct LayerTable {
    int k = 0;
    int d = 0;
    std::vector<LayerRow> rows;  // increasing i, zero-rank rows omitted
};

// rank at layer i = sum over partitions of {1..k} of excess i of the product
// of single-block ranks, placed in degree i(d-1)
LayerTable layer_table(int k, int d, int threads = 1);

// same weights, summed over irreducible partitions only
LayerTable reduced_layer_table(int k, int d, int threads = 1);

// highest degree below every nonzero reduced layer: ceil(k/2)*(d-1) - 1
int connectivity(int k, int d);

struct PoincareOracle {
    int k = 0;
    int d = 0;
    std::vector<long long> coeffs;  // index = degree
};

// expanded product (1 + 1 t^{d-1})(1 + 2 t^{d-1}) ... (1 + (k-1) t^{d-1})
PoincareOracle poincare_oracle(int k, int d);

struct CollapseRow {
    int degree = 0;
    long long table_rank = 0;
    long long oracle_rank = 0;
    bool operator==(const CollapseRow&) const = default;
};

struct CollapseReport {
    bool ok = false;
    std::vector<CollapseRow> diff;  // mismatching degrees only
};

CollapseReport compare_with_oracle(const LayerTable& t, const PoincareOracle& o);
CollapseReport collapse_check(int k, int d, int threads = 1);

}  // namespace parcalc
