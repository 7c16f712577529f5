#include "parcalc/simplicial.hpp"

#include <algorithm>
#include <stdexcept>

namespace parcalc {

FinitePoset::FinitePoset(int n, const std::vector<std::pair<int, int>>& relations)
    : n_(n), lt_(static_cast<size_t>(n) * n, 0) {
    if (n < 0) throw std::invalid_argument("negative poset size");
    for (auto [a, b] : relations) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw std::invalid_argument("relation out of range");
        lt_[a * n_ + b] = 1;
    }
    for (int k = 0; k < n_; ++k)
        for (int a = 0; a < n_; ++a) {
            if (!lt_[a * n_ + k]) continue;
            for (int b = 0; b < n_; ++b)
                if (lt_[k * n_ + b]) lt_[a * n_ + b] = 1;
        }
    for (int a = 0; a < n_; ++a)
        if (lt_[a * n_ + a]) throw std::invalid_argument("order relation has a cycle");
}

FinitePoset FinitePoset::chain(int n) {
    std::vector<std::pair<int, int>> rel;
    for (int i = 0; i + 1 < n; ++i) rel.emplace_back(i, i + 1);
    return FinitePoset(n, rel);
}

FinitePoset FinitePoset::antichain(int n) { return FinitePoset(n, {}); }

FinitePoset FinitePoset::product(const FinitePoset& a, const FinitePoset& b) {
    int n = a.size() * b.size();
    std::vector<std::pair<int, int>> rel;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
            for (int k = 0; k < a.size(); ++k)
                for (int l = 0; l < b.size(); ++l) {
                    if (i == k && j == l) continue;
                    if (a.leq(i, k) && b.leq(j, l))
                        rel.emplace_back(i * b.size() + j, k * b.size() + l);
                }
    return FinitePoset(n, rel);
}

std::optional<int> FinitePoset::minimum() const {
    for (int m = 0; m < n_; ++m) {
        bool ok = true;
        for (int x = 0; x < n_ && ok; ++x) ok = leq(m, x);
        if (ok) return m;
    }
    return std::nullopt;
}

std::optional<int> FinitePoset::maximum() const {
    for (int m = 0; m < n_; ++m) {
        bool ok = true;
        for (int x = 0; x < n_ && ok; ++x) ok = leq(x, m);
        if (ok) return m;
    }
    return std::nullopt;
}

SimplicialComplex::SimplicialComplex(int nvertices, std::vector<std::vector<int>> simplices)
    : nverts_(nvertices) {
    if (nvertices < 0) throw std::invalid_argument("negative vertex count");
    for (auto& s : simplices) {
        if (s.empty()) throw std::invalid_argument("empty simplex");
        std::sort(s.begin(), s.end());
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] < 0 || s[i] >= nverts_) throw std::invalid_argument("vertex out of range");
            if (i > 0 && s[i] == s[i - 1]) throw std::invalid_argument("repeated vertex");
        }
        int d = static_cast<int>(s.size()) - 1;
        if (d >= static_cast<int>(by_dim_.size())) by_dim_.resize(d + 1);
        by_dim_[d].push_back(std::move(s));
    }
    for (auto& bucket : by_dim_) {
        std::sort(bucket.begin(), bucket.end());
        bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
    }
    for (int d = dim(); d >= 1; --d)
        for (const auto& s : by_dim_[d]) {
            std::vector<int> face(s.size() - 1);
            for (size_t i = 0; i < s.size(); ++i) {
                face.assign(s.begin(), s.end());
                face.erase(face.begin() + static_cast<long>(i));
                if (index_of(face) < 0) throw std::invalid_argument("not downward closed");
            }
        }
}

SimplicialComplex SimplicialComplex::from_facets(int nvertices,
                                                 const std::vector<std::vector<int>>& facets) {
    std::vector<std::vector<int>> all;
    for (auto f : facets) {
        std::sort(f.begin(), f.end());
        if (f.size() > 24) throw std::invalid_argument("facet too large");
        for (unsigned mask = 1; mask < (1u << f.size()); ++mask) {
            std::vector<int> s;
            for (size_t i = 0; i < f.size(); ++i)
                if (mask & (1u << i)) s.push_back(f[i]);
            all.push_back(std::move(s));
        }
    }
    return SimplicialComplex(nvertices, std::move(all));
}

int SimplicialComplex::count(int d) const {
    if (d < 0 || d > dim()) return 0;
    return static_cast<int>(by_dim_[d].size());
}

const std::vector<std::vector<int>>& SimplicialComplex::simplices(int d) const {
    static const std::vector<std::vector<int>> none;
    if (d < 0 || d > dim()) return none;
    return by_dim_[d];
}

int SimplicialComplex::index_of(const std::vector<int>& s) const {
    int d = static_cast<int>(s.size()) - 1;
    if (d < 0 || d > dim()) return -1;
    const auto& bucket = by_dim_[d];
    auto it = std::lower_bound(bucket.begin(), bucket.end(), s);
    if (it != bucket.end() && *it == s) return static_cast<int>(it - bucket.begin());
    return -1;
}

bool SimplicialComplex::is_subcomplex_of(const SimplicialComplex& other) const {
    for (int d = 0; d <= dim(); ++d)
        for (const auto& s : by_dim_[d])
            if (!other.contains(s)) return false;
    return true;
}

std::vector<std::vector<int>> SimplicialComplex::facets() const {
    std::vector<std::vector<int>> out;
    for (int d = 0; d <= dim(); ++d) {
        std::vector<char> is_face(by_dim_[d].size(), 0);
        for (const auto& s : simplices(d + 1)) {
            std::vector<int> face;
            for (size_t i = 0; i < s.size(); ++i) {
                face.assign(s.begin(), s.end());
                face.erase(face.begin() + static_cast<long>(i));
                is_face[index_of(face)] = 1;
            }
        }
        for (size_t j = 0; j < by_dim_[d].size(); ++j)
            if (!is_face[j]) out.push_back(by_dim_[d][j]);
    }
    return out;
}

ChainComplex SimplicialComplex::chain_complex() const {
    std::vector<int> dims;
    std::vector<RatMatrix> diffs;
    for (int d = 0; d <= dim(); ++d) {
        dims.push_back(count(d));
        if (d == 0) continue;
        std::vector<RatMatrix::Column> cols(count(d));
        std::vector<int> face;
        for (int j = 0; j < count(d); ++j) {
            const auto& s = by_dim_[d][j];
            for (size_t i = 0; i < s.size(); ++i) {
                face.assign(s.begin(), s.end());
                face.erase(face.begin() + static_cast<long>(i));
                cols[j].emplace_back(index_of(face), Rational(i % 2 == 0 ? 1 : -1));
            }
        }
        diffs.push_back(RatMatrix(count(d - 1), count(d), std::move(cols)));
    }
    return ChainComplex(std::move(dims), std::move(diffs));
}

SimplicialPair::SimplicialPair(SimplicialComplex total, SimplicialComplex sub)
    : total_(std::move(total)), sub_(std::move(sub)) {
    if (!sub_.is_subcomplex_of(total_)) throw std::invalid_argument("sub not a subcomplex");
}

namespace {

// every nonempty strictly increasing chain within elems, as element lists in
// chain order
std::vector<std::vector<int>> all_chains(const FinitePoset& p, const std::vector<int>& elems) {
    std::vector<std::vector<int>> succ(p.size());
    for (int x : elems)
        for (int y : elems)
            if (p.less(x, y)) succ[x].push_back(y);
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, const std::vector<int>& cands) -> void {
        for (int y : cands) {
            cur.push_back(y);
            out.push_back(cur);
            self(self, succ[y]);
            cur.pop_back();
        }
    };
    rec(rec, elems);
    return out;
}

std::vector<int> all_elements(const FinitePoset& p) {
    std::vector<int> all(p.size());
    for (int i = 0; i < p.size(); ++i) all[i] = i;
    return all;
}

}  // namespace

SimplicialComplex order_complex(const FinitePoset& p) {
    return SimplicialComplex(p.size(), all_chains(p, all_elements(p)));
}

SimplicialComplex boundary_subcomplex(const FinitePoset& p) {
    auto mn = p.minimum();
    auto mx = p.maximum();
    if (!mn || !mx) throw std::invalid_argument("poset lacks a minimum or maximum");
    std::vector<std::vector<int>> kept;
    for (auto& c : all_chains(p, all_elements(p))) {
        bool has_min = std::find(c.begin(), c.end(), *mn) != c.end();
        bool has_max = std::find(c.begin(), c.end(), *mx) != c.end();
        if (!(has_min && has_max)) kept.push_back(std::move(c));
    }
    return SimplicialComplex(p.size(), std::move(kept));
}

namespace {

ChainComplex relative_from_buckets(std::vector<std::vector<std::vector<int>>> buckets,
                                   int keep_a, int keep_b) {
    for (auto& b : buckets) std::sort(b.begin(), b.end());
    std::vector<int> dims;
    std::vector<RatMatrix> diffs;
    for (int d = 0; d < static_cast<int>(buckets.size()); ++d) {
        dims.push_back(static_cast<int>(buckets[d].size()));
        if (d == 0) continue;
        std::vector<RatMatrix::Column> cols(buckets[d].size());
        std::vector<int> face;
        for (size_t j = 0; j < buckets[d].size(); ++j) {
            const auto& s = buckets[d][j];
            for (size_t i = 0; i < s.size(); ++i) {
                if (s[i] == keep_a || s[i] == keep_b) continue;  // face falls into sub
                face.assign(s.begin(), s.end());
                face.erase(face.begin() + static_cast<long>(i));
                auto it = std::lower_bound(buckets[d - 1].begin(), buckets[d - 1].end(), face);
                if (it == buckets[d - 1].end() || *it != face)
                    throw std::logic_error("missing face");
                int row = static_cast<int>(it - buckets[d - 1].begin());
                cols[j].emplace_back(row, Rational(i % 2 == 0 ? 1 : -1));
            }
        }
        diffs.push_back(RatMatrix(dims[d - 1], dims[d], std::move(cols)));
    }
    return ChainComplex(std::move(dims), std::move(diffs));
}

}  // namespace

ChainComplex relative_chain_complex(const SimplicialPair& pair) {
    const SimplicialComplex& total = pair.total();
    const SimplicialComplex& sub = pair.sub();
    std::vector<std::vector<std::vector<int>>> buckets(total.dim() + 1);
    for (int d = 0; d <= total.dim(); ++d)
        for (const auto& s : total.simplices(d))
            if (!sub.contains(s)) buckets[d].push_back(s);
    std::vector<int> dims;
    std::vector<RatMatrix> diffs;
    for (int d = 0; d < static_cast<int>(buckets.size()); ++d) {
        dims.push_back(static_cast<int>(buckets[d].size()));
        if (d == 0) continue;
        std::vector<RatMatrix::Column> cols(buckets[d].size());
        std::vector<int> face;
        for (size_t j = 0; j < buckets[d].size(); ++j) {
            const auto& s = buckets[d][j];
            for (size_t i = 0; i < s.size(); ++i) {
                face.assign(s.begin(), s.end());
                face.erase(face.begin() + static_cast<long>(i));
                if (sub.contains(face)) continue;
                auto it = std::lower_bound(buckets[d - 1].begin(), buckets[d - 1].end(), face);
                if (it == buckets[d - 1].end() || *it != face)
                    throw std::logic_error("missing face");
                int row = static_cast<int>(it - buckets[d - 1].begin());
                cols[j].emplace_back(row, Rational(i % 2 == 0 ? 1 : -1));
            }
        }
        diffs.push_back(RatMatrix(dims[d - 1], dims[d], std::move(cols)));
    }
    return ChainComplex(std::move(dims), std::move(diffs));
}

GradedRanks relative_homology(const SimplicialPair& pair) {
    return relative_chain_complex(pair).betti();
}

ChainComplex relative_order_pair_complex(const FinitePoset& p) {
    auto mn = p.minimum();
    auto mx = p.maximum();
    if (!mn || !mx) throw std::invalid_argument("poset lacks a minimum or maximum");
    if (*mn == *mx) return ChainComplex({1}, {});
    std::vector<int> inner;
    for (int x = 0; x < p.size(); ++x)
        if (p.less(*mn, x) && p.less(x, *mx)) inner.push_back(x);
    std::vector<std::vector<int>> open_chains = all_chains(p, inner);
    open_chains.push_back({});  // the bare min-max edge
    std::vector<std::vector<std::vector<int>>> buckets;
    for (auto& c : open_chains) {
        c.push_back(*mn);
        c.push_back(*mx);
        std::sort(c.begin(), c.end());
        int d = static_cast<int>(c.size()) - 1;
        if (d >= static_cast<int>(buckets.size())) buckets.resize(d + 1);
        buckets[d].push_back(std::move(c));
    }
    return relative_from_buckets(std::move(buckets), *mn, *mx);
}

}  // namespace parcalc
