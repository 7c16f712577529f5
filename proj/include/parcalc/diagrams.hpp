#pragma once

#include "parcalc/chain.hpp"
#include "parcalc/simplicial.hpp"

#include <string>
#include <utility>
#include <vector>

namespace parcalc {

// Finite category on objects 0..objects()-1.  Arrows are indexed and include
// the identities; the composition table is total exactly on composable pairs.
class FiniteCategory {
public:
    struct Arrow {
        int src = 0;
        int dst = 0;
        bool operator==(const Arrow&) const = default;
    };

    FiniteCategory() = default;
    // table[g * arrows + f] = index of g.f when dst(f) == src(g), else -1
    FiniteCategory(int nobjects, std::vector<Arrow> arrows, std::vector<int> identities,
                   std::vector<int> table);

    static FiniteCategory discrete(int nobjects);
    // reflexive-transitive closure of a relation; rejects cycles
    static FiniteCategory thin(int nobjects, const std::vector<std::pair<int, int>>& rel);
    static FiniteCategory from_poset(const FinitePoset& p);

    int objects() const { return nobj_; }
    int arrow_count() const { return static_cast<int>(arrows_.size()); }
    const Arrow& arrow(int a) const { return arrows_.at(a); }
    int identity(int x) const { return ids_.at(x); }
    bool is_identity(int a) const;
    int compose(int g, int f) const;  // g after f; throws when not composable
    // no non-identity endomorphisms and the arrow relation is acyclic
    bool loop_free() const;

    bool operator==(const FiniteCategory&) const = default;

private:
    int nobj_ = 0;
    std::vector<Arrow> arrows_;
    std::vector<int> ids_;
    std::vector<int> table_;
};

enum class Variance { covariant, contravariant };

// Diagram of chain complexes over a finite shape.  The arrow a: x -> y acts by
// actions[a]: values[x] -> values[y] when covariant, values[y] -> values[x]
// when contravariant.
struct ChainDiagram {
    FiniteCategory shape;
    Variance variance = Variance::covariant;
    std::vector<ChainComplex> values;
    std::vector<ChainMap> actions;
};

int action_src_object(const ChainDiagram& f, int arrow);
int action_dst_object(const ChainDiagram& f, int arrow);
// identity arrows carry identity maps; actions compose exactly
bool is_valid_diagram(const ChainDiagram& f, std::string* why = nullptr);
void validate_diagram(const ChainDiagram& f);  // throws std::invalid_argument
ChainDiagram constant_diagram(const FiniteCategory& shape, const ChainComplex& value,
                              Variance variance);
ChainDiagram diagram_direct_sum(const ChainDiagram& f, const ChainDiagram& g);
// values replaced by their homology (zero differentials), actions by the
// induced maps in the representative bases
ChainDiagram homology_diagram(const ChainDiagram& f);

// Objectwise maps m.parts[x]: f.values[x] -> g.values[x]
struct DiagramMap {
    std::vector<ChainMap> parts;
};
bool is_diagram_map(const ChainDiagram& src, const ChainDiagram& dst, const DiagramMap& m,
                    std::string* why = nullptr);
bool is_objectwise_quasi_iso(const ChainDiagram& src, const ChainDiagram& dst,
                             const DiagramMap& m);
DiagramMap identity_diagram_map(const ChainDiagram& f);

// Totalization of the normalized cosimplicial replacement.  Level p is the
// product over p-chains of composable non-identity arrows of the value at the
// chain end (covariant) or start (contravariant); total degree is the value
// degree minus the level.  The shape must be loop-free.
struct HolimResult {
    ChainComplex complex;  // good truncation of the total complex at degree 0
    GradedRanks betti;     // homology in non-negative total degrees
    GradedRanks negative;  // entry i is the rank in total degree -(i+1)
};
HolimResult holim(const ChainDiagram& f);

// Zig-zag f -> po <- kernel -> hn through the degree-n truncation; every
// component is a quasi-isomorphism and every square commutes exactly.
struct FormalityZigzag {
    ChainDiagram po;      // truncation diagram
    ChainDiagram kernel;  // top-degree kernel diagram
    ChainDiagram hn;      // homology concentrated in degree n
    DiagramMap rho;       // f -> po
    DiagramMap incl;      // kernel -> po
    DiagramMap quot;      // kernel -> hn
};
// requires every object's homology concentrated in degree n
FormalityZigzag formality_zigzag(const ChainDiagram& f, int n);

// Witnessed decomposition of a diagram into homology-concentrated summands.
struct SplittingData {
    std::vector<ChainDiagram> summands;
    DiagramMap witness;  // direct sum of the summands -> f, objectwise quasi-iso
};
struct SplitDiff {
    int degree = 0;  // may be negative
    int lhs = 0;     // holim of the diagram
    int rhs = 0;     // sum over summands of holim of the homology diagram
    bool operator==(const SplitDiff&) const = default;
};
struct SplitReport {
    bool ok = false;
    std::vector<std::string> problems;  // structural verification failures
    GradedRanks lhs;
    GradedRanks lhs_negative;
    GradedRanks rhs;
    GradedRanks rhs_negative;
    std::vector<SplitDiff> diff;
};
SplitReport holim_splitting_check(const ChainDiagram& f, const SplittingData& s);

// Functor between finite categories: object and arrow reindexing.
struct Functor {
    std::vector<int> objects;
    std::vector<int> arrows;
};
bool is_functor(const FiniteCategory& src, const FiniteCategory& dst, const Functor& lam);
Functor identity_functor(const FiniteCategory& c);
Functor constant_functor(const FiniteCategory& src, const FiniteCategory& dst, int object);
// precomposition of f with lam: shape -> f.shape
ChainDiagram restrict_diagram(const ChainDiagram& f, const FiniteCategory& shape,
                              const Functor& lam);
SplittingData restrict_splitting(const SplittingData& s, const FiniteCategory& shape,
                                 const Functor& lam);

}  // namespace parcalc
