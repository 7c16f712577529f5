#pragma once

#include "parcalc/matrix.hpp"

#include <string>
#include <vector>

namespace parcalc {

// Finitely supported per-degree ranks (Betti numbers).  Trailing zeros are
// trimmed so equal gradings compare equal.
struct GradedRanks {
    std::vector<int> r;

    GradedRanks() = default;
    explicit GradedRanks(std::vector<int> v) : r(std::move(v)) { trim(); }

    int at(int n) const { return (n >= 0 && n < static_cast<int>(r.size())) ? r[n] : 0; }
    void set(int n, int v);
    int top() const { return static_cast<int>(r.size()) - 1; }  // -1 when empty
    int total() const;
    bool operator==(const GradedRanks&) const = default;
    GradedRanks operator+(const GradedRanks& o) const;
    GradedRanks convolve(const GradedRanks& o) const;
    std::string str() const;  // "(1,0,2)"

private:
    void trim();
};

// Non-negatively graded chain complex over Q.  dims()[n] is the rank of the
// degree-n chain group; diff(n): degree n -> n-1.  d.d = 0 is enforced at
// construction.  The default-constructed value is the zero complex.
class ChainComplex {
public:
    ChainComplex() = default;
    ChainComplex(std::vector<int> dims, std::vector<RatMatrix> diffs);
    static ChainComplex concentrated(int degree, int dim);

    int top_degree() const { return static_cast<int>(dims_.size()) - 1; }
    int dim(int n) const {
        return (n >= 0 && n < static_cast<int>(dims_.size())) ? dims_[n] : 0;
    }
    const std::vector<int>& dims() const { return dims_; }
    // valid for every n >= 0; zero-shaped outside the stored range
    RatMatrix diff(int n) const;

    GradedRanks betti() const;
    int euler_characteristic() const;

    static ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b);
    static ChainComplex tensor(const ChainComplex& a, const ChainComplex& b);
    // flat index of basis element i (x) j inside (a (x) b)_{p+q}
    static int tensor_index(const ChainComplex& a, const ChainComplex& b,
                            int p, int q, int i, int j);

    bool operator==(const ChainComplex&) const = default;

private:
    std::vector<int> dims_;
    std::vector<RatMatrix> diffs_;  // diffs_[n-1] is d_n
};

// Degreewise map of complexes; blocks[n]: src_n -> dst_n, one block for every
// degree 0..max(top(src), top(dst)), shapes exact even when a side is zero.
struct ChainMap {
    std::vector<RatMatrix> blocks;
    bool operator==(const ChainMap&) const = default;
};

ChainMap identity_map(const ChainComplex& c);
ChainMap zero_map(const ChainComplex& src, const ChainComplex& dst);
// equality up to trailing zero-sized blocks
bool chain_maps_equal(const ChainMap& a, const ChainMap& b);
bool is_chain_map(const ChainComplex& src, const ChainComplex& dst, const ChainMap& f);
// g after f
ChainMap compose(const ChainMap& g, const ChainMap& f);
ChainMap map_direct_sum(const ChainMap& f, const ChainMap& g);
// Leibniz-sign tensor of maps is not needed; degree-0 blocks suffice for the
// block-diagonal maps built here, so only sum and composition are provided.

struct HomologyData {
    GradedRanks betti;
    std::vector<RatMatrix> reps;        // per degree, columns = representative cycles
    std::vector<RatMatrix> boundaries;  // per degree, columns = image basis of d_{n+1}
};
HomologyData homology(const ChainComplex& c);

// Matrices of the induced maps H_n(src) -> H_n(dst) in the representative
// bases; requires f to be a chain map.
std::vector<RatMatrix> induced_on_homology(const ChainComplex& src, const HomologyData& hs,
                                           const ChainComplex& dst, const HomologyData& hd,
                                           const ChainMap& f);
bool is_quasi_iso(const ChainComplex& src, const ChainComplex& dst, const ChainMap& f);

// nth Postnikov section: degrees <= n copied, degree n+1 is the image of
// d_{n+1} presented on the elimination pivot columns, zero above.
ChainComplex postnikov_section(const ChainComplex& c, int n);
// natural map c -> Po_n(c): identity through degree n, d-coordinates in n+1
ChainMap postnikov_rho(const ChainComplex& c, int n);
// Po_n(c) -> Po_{n-1}(c): identity below n, C_n -> d(C_n) in degree n, zero above
ChainMap postnikov_projection(const ChainComplex& c, int n);

struct PostnikovKernel {
    ChainComplex complex;  // concentrated in degrees n, n+1
    ChainMap inclusion;    // into postnikov_section(c, n)
};
PostnikovKernel postnikov_kernel(const ChainComplex& c, int n);

}  // namespace parcalc
