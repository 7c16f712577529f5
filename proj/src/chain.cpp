#include "parcalc/chain.hpp"

#include <sstream>
#include <stdexcept>

namespace parcalc {

void GradedRanks::trim() {
    while (!r.empty() && r.back() == 0) r.pop_back();
    for (int v : r)
        if (v < 0) throw std::invalid_argument("negative rank");
}

void GradedRanks::set(int n, int v) {
    if (n < 0) throw std::invalid_argument("negative degree");
    if (n >= static_cast<int>(r.size())) r.resize(n + 1, 0);
    r[n] = v;
    trim();
}

int GradedRanks::total() const {
    int s = 0;
    for (int v : r) s += v;
    return s;
}

GradedRanks GradedRanks::operator+(const GradedRanks& o) const {
    GradedRanks out;
    out.r.resize(std::max(r.size(), o.r.size()), 0);
    for (size_t i = 0; i < out.r.size(); ++i) out.r[i] = at(static_cast<int>(i)) + o.at(static_cast<int>(i));
    out.trim();
    return out;
}

GradedRanks GradedRanks::convolve(const GradedRanks& o) const {
    GradedRanks out;
    if (r.empty() || o.r.empty()) return out;
    out.r.assign(r.size() + o.r.size() - 1, 0);
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < o.r.size(); ++j) out.r[i + j] += r[i] * o.r[j];
    out.trim();
    return out;
}

std::string GradedRanks::str() const {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < r.size(); ++i) {
        if (i) os << ',';
        os << r[i];
    }
    os << ')';
    return os.str();
}

ChainComplex::ChainComplex(std::vector<int> dims, std::vector<RatMatrix> diffs)
    : dims_(std::move(dims)), diffs_(std::move(diffs)) {
    for (int d : dims_)
        if (d < 0) throw std::invalid_argument("negative chain group rank");
    size_t want = dims_.empty() ? 0 : dims_.size() - 1;
    if (diffs_.size() != want) throw std::invalid_argument("differential count mismatch");
    for (size_t n = 1; n < dims_.size(); ++n) {
        const RatMatrix& d = diffs_[n - 1];
        if (d.nrows() != dims_[n - 1] || d.ncols() != dims_[n])
            throw std::invalid_argument("differential shape mismatch");
    }
    for (size_t n = 2; n < dims_.size(); ++n)
        if (!(diffs_[n - 2] * diffs_[n - 1]).is_zero())
            throw std::invalid_argument("d.d != 0");
}

ChainComplex ChainComplex::concentrated(int degree, int dim) {
    if (degree < 0 || dim < 0) throw std::invalid_argument("bad concentration");
    if (dim == 0) return ChainComplex{};
    std::vector<int> dims(degree + 1, 0);
    dims[degree] = dim;
    std::vector<RatMatrix> diffs;
    for (int n = 1; n <= degree; ++n) diffs.push_back(RatMatrix::zero(dims[n - 1], dims[n]));
    return ChainComplex(std::move(dims), std::move(diffs));
}

RatMatrix ChainComplex::diff(int n) const {
    if (n >= 1 && n < static_cast<int>(dims_.size())) return diffs_[n - 1];
    return RatMatrix::zero(dim(n - 1), dim(n));
}

GradedRanks ChainComplex::betti() const {
    int t = top_degree();
    std::vector<int> rk(t + 2, 0);  // rk[n] = rank d_n, rk[0] = rk[t+1] = 0
    std::vector<int> cleared;       // pivot rows of the previous (higher) differential
    for (int n = t; n >= 1; --n) {
        std::vector<char> skip(diff(n).ncols(), 0);
        for (int c : cleared) skip[c] = 1;
        std::vector<int> piv;
        rk[n] = rank_with_clearing(diff(n), cleared.empty() ? nullptr : &skip, &piv);
        cleared = std::move(piv);
    }
    GradedRanks out;
    for (int n = 0; n <= t; ++n) out.set(n, dims_[n] - rk[n] - rk[n + 1]);
    return out;
}

int ChainComplex::euler_characteristic() const {
    int s = 0;
    for (size_t n = 0; n < dims_.size(); ++n) s += (n % 2 == 0) ? dims_[n] : -dims_[n];
    return s;
}

ChainComplex ChainComplex::direct_sum(const ChainComplex& a, const ChainComplex& b) {
    int t = std::max(a.top_degree(), b.top_degree());
    std::vector<int> dims;
    std::vector<RatMatrix> diffs;
    for (int n = 0; n <= t; ++n) {
        dims.push_back(a.dim(n) + b.dim(n));
        if (n >= 1) diffs.push_back(RatMatrix::block_diag(a.diff(n), b.diff(n)));
    }
    return ChainComplex(std::move(dims), std::move(diffs));
}

int ChainComplex::tensor_index(const ChainComplex& a, const ChainComplex& b,
                               int p, int q, int i, int j) {
    if (i < 0 || i >= a.dim(p) || j < 0 || j >= b.dim(q))
        throw std::out_of_range("tensor index");
    int off = 0;
    for (int pp = 0; pp < p; ++pp) off += a.dim(pp) * b.dim(p + q - pp);
    return off + i * b.dim(q) + j;
}

ChainComplex ChainComplex::tensor(const ChainComplex& a, const ChainComplex& b) {
    if (a.top_degree() < 0 || b.top_degree() < 0) return ChainComplex{};
    int t = a.top_degree() + b.top_degree();
    std::vector<int> dims(t + 1, 0);
    for (int n = 0; n <= t; ++n)
        for (int p = 0; p <= n; ++p) dims[n] += a.dim(p) * b.dim(n - p);
    std::vector<RatMatrix> diffs;
    for (int n = 1; n <= t; ++n) {
        std::vector<RatMatrix::Column> cols(dims[n]);
        for (int p = 0; p <= n; ++p) {
            int q = n - p;
            if (a.dim(p) == 0 || b.dim(q) == 0) continue;
            RatMatrix da = a.diff(p);
            RatMatrix db = b.diff(q);
            bool odd = (p % 2) != 0;
            for (int i = 0; i < a.dim(p); ++i)
                for (int j = 0; j < b.dim(q); ++j) {
                    auto& col = cols[tensor_index(a, b, p, q, i, j)];
                    if (p >= 1)
                        for (const auto& [r, v] : da.column(i))
                            col.emplace_back(tensor_index(a, b, p - 1, q, r, j), v);
                    if (q >= 1)
                        for (const auto& [s, w] : db.column(j))
                            col.emplace_back(tensor_index(a, b, p, q - 1, i, s), odd ? -w : w);
                }
        }
        diffs.push_back(RatMatrix(dims[n - 1], dims[n], std::move(cols)));
    }
    return ChainComplex(std::move(dims), std::move(diffs));
}

namespace {

int map_top(const ChainMap& f) { return static_cast<int>(f.blocks.size()) - 1; }

}  // namespace

ChainMap identity_map(const ChainComplex& c) {
    ChainMap f;
    for (int n = 0; n <= c.top_degree(); ++n) f.blocks.push_back(RatMatrix::identity(c.dim(n)));
    if (f.blocks.empty()) f.blocks.push_back(RatMatrix::zero(0, 0));
    return f;
}

ChainMap zero_map(const ChainComplex& src, const ChainComplex& dst) {
    ChainMap f;
    int t = std::max({src.top_degree(), dst.top_degree(), 0});
    for (int n = 0; n <= t; ++n) f.blocks.push_back(RatMatrix::zero(dst.dim(n), src.dim(n)));
    return f;
}

bool chain_maps_equal(const ChainMap& a, const ChainMap& b) {
    size_t n = std::max(a.blocks.size(), b.blocks.size());
    for (size_t i = 0; i < n; ++i) {
        if (i >= a.blocks.size()) {
            if (b.blocks[i].nrows() != 0 || b.blocks[i].ncols() != 0) return false;
        } else if (i >= b.blocks.size()) {
            if (a.blocks[i].nrows() != 0 || a.blocks[i].ncols() != 0) return false;
        } else if (a.blocks[i] != b.blocks[i]) {
            return false;
        }
    }
    return true;
}

bool is_chain_map(const ChainComplex& src, const ChainComplex& dst, const ChainMap& f) {
    int t = std::max(src.top_degree(), dst.top_degree());
    if (map_top(f) < t) return false;
    for (int n = 0; n <= map_top(f); ++n) {
        const RatMatrix& b = f.blocks[n];
        if (b.nrows() != dst.dim(n) || b.ncols() != src.dim(n)) return false;
    }
    for (int n = 1; n <= t; ++n)
        if (dst.diff(n) * f.blocks[n] != f.blocks[n - 1] * src.diff(n)) return false;
    return true;
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
    ChainMap out;
    int t = std::min(map_top(g), map_top(f));
    for (int n = 0; n <= t; ++n) out.blocks.push_back(g.blocks[n] * f.blocks[n]);
    // any longer tail is zero-valued on one side; keep shapes honest
    for (int n = t + 1; n <= map_top(f); ++n)
        out.blocks.push_back(RatMatrix::zero(0, f.blocks[n].ncols()));
    for (int n = t + 1; n <= map_top(g); ++n)
        out.blocks.push_back(RatMatrix::zero(g.blocks[n].nrows(), 0));
    return out;
}

ChainMap map_direct_sum(const ChainMap& f, const ChainMap& g) {
    ChainMap out;
    int t = std::max(map_top(f), map_top(g));
    for (int n = 0; n <= t; ++n) {
        RatMatrix a = n <= map_top(f) ? f.blocks[n] : RatMatrix::zero(0, 0);
        RatMatrix b = n <= map_top(g) ? g.blocks[n] : RatMatrix::zero(0, 0);
        out.blocks.push_back(RatMatrix::block_diag(a, b));
    }
    return out;
}

HomologyData homology(const ChainComplex& c) {
    HomologyData h;
    int t = c.top_degree();
    h.reps.resize(t + 1, RatMatrix::zero(0, 0));
    h.boundaries.resize(t + 1, RatMatrix::zero(0, 0));
    for (int n = 0; n <= t; ++n) {
        auto cycles = kernel_basis(c.diff(n));
        auto bnd = image_basis(c.diff(n + 1));
        std::vector<std::vector<Rational>> cat = bnd;
        cat.insert(cat.end(), cycles.begin(), cycles.end());
        RatMatrix m = RatMatrix::from_columns(c.dim(n), cat);
        std::vector<std::vector<Rational>> reps;
        for (int p : pivot_columns(m))
            if (p >= static_cast<int>(bnd.size())) reps.push_back(cat[p]);
        h.betti.set(n, static_cast<int>(reps.size()));
        h.reps[n] = RatMatrix::from_columns(c.dim(n), reps);
        h.boundaries[n] = RatMatrix::from_columns(c.dim(n), bnd);
    }
    return h;
}

std::vector<RatMatrix> induced_on_homology(const ChainComplex& src, const HomologyData& hs,
                                           const ChainComplex& dst, const HomologyData& hd,
                                           const ChainMap& f) {
    if (!is_chain_map(src, dst, f)) throw std::invalid_argument("not a chain map");
    int t = std::max(src.top_degree(), dst.top_degree());
    std::vector<RatMatrix> out;
    for (int n = 0; n <= t; ++n) {
        int bs = hs.betti.at(n);
        int bd = hd.betti.at(n);
        if (bs == 0 || bd == 0) {
            out.push_back(RatMatrix::zero(bd, bs));
            continue;
        }
        RatMatrix basis = RatMatrix::hcat(hd.reps[n], hd.boundaries[n]);
        RatMatrix img = f.blocks[n] * hs.reps[n];
        auto sol = solve_consistent_cols(basis, img);
        if (!sol) throw std::logic_error("image of a cycle is not a cycle");
        // top bd rows of the solution are the homology-class coordinates
        std::vector<RatMatrix::Column> sparse(bs);
        for (int j = 0; j < bs; ++j)
            for (const auto& [i, v] : sol->column(j))
                if (i < bd) sparse[j].emplace_back(i, v);
        out.push_back(RatMatrix(bd, bs, std::move(sparse)));
    }
    return out;
}

bool is_quasi_iso(const ChainComplex& src, const ChainComplex& dst, const ChainMap& f) {
    HomologyData hs = homology(src);
    HomologyData hd = homology(dst);
    if (!(hs.betti == hd.betti)) return false;
    auto ind = induced_on_homology(src, hs, dst, hd, f);
    for (size_t n = 0; n < ind.size(); ++n) {
        int b = hs.betti.at(static_cast<int>(n));
        if (ind[n].nrows() != b || ind[n].ncols() != b) return false;
        if (rank(ind[n]) != b) return false;
    }
    return true;
}

ChainComplex postnikov_section(const ChainComplex& c, int n) {
    if (n < 0) throw std::invalid_argument("negative section degree");
    std::vector<int> dims(n + 2, 0);
    std::vector<RatMatrix> diffs;
    for (int i = 0; i <= n; ++i) dims[i] = c.dim(i);
    auto bnd = image_basis(c.diff(n + 1));
    dims[n + 1] = static_cast<int>(bnd.size());
    for (int i = 1; i <= n; ++i) diffs.push_back(c.diff(i));
    diffs.push_back(RatMatrix::from_columns(c.dim(n), bnd));
    return ChainComplex(std::move(dims), std::move(diffs));
}

ChainMap postnikov_rho(const ChainComplex& c, int n) {
    ChainComplex po = postnikov_section(c, n);
    ChainMap f = zero_map(c, po);
    for (int i = 0; i <= n; ++i) f.blocks[i] = RatMatrix::identity(c.dim(i));
    if (c.dim(n + 1) > 0 && po.dim(n + 1) > 0) {
        auto sol = solve_consistent_cols(po.diff(n + 1), c.diff(n + 1));
        if (!sol) throw std::logic_error("boundary outside its own image basis");
        f.blocks[n + 1] = *sol;
    }
    return f;
}

ChainMap postnikov_projection(const ChainComplex& c, int n) {
    if (n < 1) throw std::invalid_argument("projection needs degree >= 1");
    ChainComplex hi = postnikov_section(c, n);
    ChainComplex lo = postnikov_section(c, n - 1);
    ChainMap f = zero_map(hi, lo);
    for (int i = 0; i < n; ++i) f.blocks[i] = RatMatrix::identity(c.dim(i));
    if (c.dim(n) > 0 && lo.dim(n) > 0) {
        auto sol = solve_consistent_cols(lo.diff(n), c.diff(n));
        if (!sol) throw std::logic_error("boundary outside its own image basis");
        f.blocks[n] = *sol;
    }
    return f;
}

PostnikovKernel postnikov_kernel(const ChainComplex& c, int n) {
    ChainComplex po = postnikov_section(c, n);
    auto cycles = kernel_basis(c.diff(n));
    RatMatrix k = RatMatrix::from_columns(c.dim(n), cycles);
    std::vector<int> dims(n + 2, 0);
    dims[n] = k.ncols();
    dims[n + 1] = po.dim(n + 1);
    std::vector<RatMatrix> diffs;
    for (int i = 1; i <= n; ++i) diffs.push_back(RatMatrix::zero(dims[i - 1], dims[i]));
    auto dk = solve_consistent_cols(k, po.diff(n + 1));
    if (!dk) throw std::logic_error("boundary is not a cycle");
    diffs.push_back(*dk);
    PostnikovKernel out{ChainComplex(std::move(dims), std::move(diffs)), {}};
    out.inclusion = zero_map(out.complex, po);
    out.inclusion.blocks[n] = k;
    out.inclusion.blocks[n + 1] = RatMatrix::identity(po.dim(n + 1));
    return out;
}

}  // namespace parcalc
