#pragma once

#include "parcalc/matrix.hpp"
#include "parcalc/simplicial.hpp"

#include <string>
#include <tuple>
#include <vector>

namespace parcalc {

// Partition of {0..n-1}.  Blocks are kept canonical: elements ascending,
// blocks ordered by their minimum.  Text form is 1-based: "1,2|3,4".
class SetPartition {
public:
    SetPartition() = default;
    SetPartition(int n, std::vector<std::vector<int>> blocks);
    static SetPartition discrete(int n);
    static SetPartition one_block(int n);
    static SetPartition parse(const std::string& text);
    std::string str() const;

    int support_size() const { return n_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int block_of(int s) const { return block_of_.at(s); }
    int excess() const { return n_ - block_count(); }
    bool is_irreducible() const;
    // every block of this lies inside a block of other
    bool refines(const SetPartition& other) const;

    bool operator==(const SetPartition&) const = default;
    bool operator<(const SetPartition& o) const {
        return blocks_ < o.blocks_;  // within fixed support size
    }

private:
    int n_ = 0;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_;
};

// restricted-growth-string order
std::vector<SetPartition> enumerate_partitions(int n);
std::vector<SetPartition> enumerate_by_excess(int n, int excess);

struct RefinementPoset {
    FinitePoset poset;
    std::vector<SetPartition> elements;  // aligned with poset indices
};

// all refinements of p ordered by (block count, block lists); index 0 is p,
// the last index the discrete partition; less(a, b) iff b properly refines a
RefinementPoset refinement_poset(const SetPartition& p);

// mapping cylinder of the quotient S -> blocks: one edge per support element
struct CylinderGraph {
    int support = 0;
    int blocks = 0;
    std::vector<int> edge_block;  // edge s joins s to edge_block[s]
};
CylinderGraph cylinder_graph(const SetPartition& p);

// boundary of cylinder edges into block vertices, support vertices quotiented
// away: |blocks| x |support|, column s has a single 1 at block_of(s)
RatMatrix cylinder_relative_boundary(const SetPartition& p);

// kernel basis of the relative boundary; rank equals excess(p)
std::vector<std::vector<Rational>> relative_h1(const SetPartition& p);
int relative_h1_rank(const SetPartition& p);

struct Premorphism {
    SetPartition source;
    SetPartition target;
    std::vector<int> map;  // support of source -> support of target
};

// surjective and target generated by the image of source's relation
bool is_premorphism(const SetPartition& src, const SetPartition& tgt, const std::vector<int>& map);
Premorphism make_premorphism(SetPartition src, SetPartition tgt, std::vector<int> map);

// partition of the image labels (relabeled 0..m-1 in increasing label order)
// generated by f(a) ~ f(b) for a ~ b in p
SetPartition image_partition(const SetPartition& p, const std::vector<int>& f);

// true iff the induced map on relative H1 is an isomorphism
bool is_morphism(const Premorphism& a);

enum class MapClass { good, bad };
MapClass classify_map(const SetPartition& p, const std::vector<int>& f);

struct EkCategory {
    struct Arrow {
        int src = 0, dst = 0;       // object indices
        std::vector<int> map;
        bool operator==(const Arrow&) const = default;
        bool operator<(const Arrow& o) const {
            return std::tie(src, dst, map) < std::tie(o.src, o.dst, o.map);
        }
    };
    int excess = 0;
    std::vector<SetPartition> objects;
    std::vector<Arrow> morphisms;  // includes identities, closed under composition
};

// irreducible partitions of excess k on supports {1..m}, k+1 <= m <= 2k, with
// every surjection that passes is_morphism
EkCategory build_ek(int k);

}  // namespace parcalc
