#include "parcalc/operads.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "parcalc/ptower.hpp"

namespace parcalc {

namespace {

using Key = std::vector<int>;
using Perm = std::vector<int>;
using Column = RatMatrix::Column;

Perm identity_perm(int n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

// (p o q)[i] = p[q[i]]
Perm compose_perm(const Perm& p, const Perm& q) {
    Perm r(q.size());
    for (size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
    return r;
}

Perm inverse_perm(const Perm& p) {
    Perm r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
    return r;
}

bool is_permutation_matrix(const RatMatrix& m) {
    if (m.nrows() != m.ncols()) return false;
    std::vector<char> hit(m.nrows(), 0);
    for (int j = 0; j < m.ncols(); ++j) {
        const Column& col = m.column(j);
        if (col.size() != 1 || !(col[0].second == Rational(1))) return false;
        if (hit[col[0].first]) return false;
        hit[col[0].first] = 1;
    }
    return true;
}

bool degree_zero_only(const ChainComplex& c) {
    for (int q = 1; q <= c.top_degree(); ++q)
        if (c.dim(q) != 0) return false;
    return true;
}

// weak compositions of each total 0..cap into len parts
std::vector<Key> weak_compositions(int len, int cap) {
    std::vector<Key> out;
    Key cur(len, 0);
    std::function<void(int, int)> rec = [&](int i, int used) {
        if (i == len) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; used + v <= cap; ++v) {
            cur[i] = v;
            rec(i + 1, used + v);
        }
    };
    rec(0, 0);
    return out;
}

bool fail(std::string* why, const std::string& msg) {
    if (why) *why = msg;
    return false;
}

// left-associated iterated tensor product with flat basis indexing; the empty
// product is Q in degree zero
class TensorBasis {
public:
    using Visitor = std::function<void(const std::vector<int>&, const std::vector<int>&, int)>;

    TensorBasis() = default;
    explicit TensorBasis(std::vector<const ChainComplex*> factors) : factors_(std::move(factors)) {
        prefixes_.reserve(factors_.size());
        for (size_t i = 0; i < factors_.size(); ++i)
            prefixes_.push_back(i == 0 ? *factors_[0]
                                       : ChainComplex::tensor(prefixes_.back(), *factors_[i]));
    }

    size_t count() const { return factors_.size(); }
    const ChainComplex& factor(size_t i) const { return *factors_[i]; }
    const ChainComplex& total() const { return factors_.empty() ? unit_complex() : prefixes_.back(); }

    static const ChainComplex& unit_complex() {
        static const ChainComplex q = ChainComplex::concentrated(0, 1);
        return q;
    }

    int index(const std::vector<int>& degs, const std::vector<int>& idxs) const {
        if (factors_.empty()) return 0;
        int deg = degs[0];
        int idx = idxs[0];
        for (size_t i = 1; i < factors_.size(); ++i) {
            idx = ChainComplex::tensor_index(prefixes_[i - 1], *factors_[i], deg, degs[i], idx,
                                             idxs[i]);
            deg += degs[i];
        }
        return idx;
    }

    // visits every pure basis tensor of the given total degree
    void for_each(int degree, const Visitor& visit) const {
        if (factors_.empty()) {
            std::vector<int> none;
            if (degree == 0) visit(none, none, 0);
            return;
        }
        if (degree < 0 || total().dim(degree) == 0) return;
        std::vector<int> degs(count()), idxs(count());
        walk(0, degree, degs, idxs, visit);
    }

private:
    void walk(size_t i, int rest, std::vector<int>& degs, std::vector<int>& idxs,
              const Visitor& visit) const {
        const ChainComplex& f = factor(i);
        if (i + 1 == count()) {
            if (rest > f.top_degree()) return;
            degs[i] = rest;
            for (int j = 0; j < f.dim(rest); ++j) {
                idxs[i] = j;
                visit(degs, idxs, index(degs, idxs));
            }
            return;
        }
        for (int q = 0; q <= std::min(rest, f.top_degree()); ++q) {
            if (f.dim(q) == 0) continue;
            degs[i] = q;
            for (int j = 0; j < f.dim(q); ++j) {
                idxs[i] = j;
                walk(i + 1, rest - q, degs, idxs, visit);
            }
        }
    }

    std::vector<const ChainComplex*> factors_;
    std::vector<ChainComplex> prefixes_;
};

// sign for reordering homogeneous factors so that factor i lands at pos[i]
Rational koszul_sign(const std::vector<int>& degs, const std::vector<int>& pos) {
    int e = 0;
    for (size_t i = 0; i < degs.size(); ++i)
        for (size_t j = i + 1; j < degs.size(); ++j)
            if (pos[i] > pos[j]) e += degs[i] * degs[j];
    return Rational(e % 2 ? -1 : 1);
}

// assembles a ChainMap from per-source-degree sparse columns; blocks cover the
// larger of the two top degrees
ChainMap make_map(const ChainComplex& src, const ChainComplex& dst,
                  std::vector<std::vector<Column>> cols) {
    ChainMap f;
    int t = std::max(src.top_degree(), dst.top_degree());
    for (int q = 0; q <= t; ++q) {
        std::vector<Column> c =
            q < static_cast<int>(cols.size()) ? std::move(cols[q]) : std::vector<Column>();
        c.resize(src.dim(q));
        f.blocks.push_back(RatMatrix(dst.dim(q), src.dim(q), std::move(c)));
    }
    if (f.blocks.empty()) f.blocks.push_back(RatMatrix::zero(0, 0));
    return f;
}

// tensor product of degree-zero chain maps between matching factor lists
ChainMap tensor_maps(const TensorBasis& src, const TensorBasis& dst,
                     const std::vector<const ChainMap*>& maps) {
    const ChainComplex& s = src.total();
    std::vector<std::vector<Column>> cols(s.top_degree() + 1);
    for (int q = 0; q <= s.top_degree(); ++q) {
        cols[q].resize(s.dim(q));
        src.for_each(q, [&](const std::vector<int>& degs, const std::vector<int>& idxs, int flat) {
            std::vector<std::pair<std::vector<int>, Rational>> acc;
            acc.push_back({{}, Rational(1)});
            for (size_t i = 0; i < src.count() && !acc.empty(); ++i) {
                const Column& col = maps[i]->blocks[degs[i]].column(idxs[i]);
                std::vector<std::pair<std::vector<int>, Rational>> next;
                for (const auto& t : acc)
                    for (const auto& e : col) {
                        auto v = t.first;
                        v.push_back(e.first);
                        next.push_back({std::move(v), t.second * e.second});
                    }
                acc = std::move(next);
            }
            for (auto& t : acc) cols[q][flat].emplace_back(dst.index(degs, t.first), t.second);
        });
    }
    return make_map(s, dst.total(), std::move(cols));
}

// moves factor i to position pos[i] with the Koszul sign; dst lists the
// reordered factors
ChainMap permute_factors_map(const TensorBasis& src, const std::vector<int>& pos,
                             const TensorBasis& dst) {
    const ChainComplex& s = src.total();
    std::vector<std::vector<Column>> cols(s.top_degree() + 1);
    std::vector<int> pdegs(src.count()), pidxs(src.count());
    for (int q = 0; q <= s.top_degree(); ++q) {
        cols[q].resize(s.dim(q));
        src.for_each(q, [&](const std::vector<int>& degs, const std::vector<int>& idxs, int flat) {
            for (size_t i = 0; i < src.count(); ++i) {
                pdegs[pos[i]] = degs[i];
                pidxs[pos[i]] = idxs[i];
            }
            cols[q][flat].emplace_back(dst.index(pdegs, pidxs), koszul_sign(degs, pos));
        });
    }
    return make_map(s, dst.total(), std::move(cols));
}

// reassociates a flat tensor into grouped blocks; groups[g] lists the source
// factor positions feeding target factor g, inner[g] indexes inside the block
ChainMap regroup_map(const TensorBasis& src, const std::vector<std::vector<int>>& groups,
                     const std::vector<const TensorBasis*>& inner, const TensorBasis& outer) {
    std::vector<int> pos(src.count());
    {
        int at = 0;
        for (const auto& g : groups)
            for (int i : g) pos[i] = at++;
    }
    const ChainComplex& s = src.total();
    std::vector<std::vector<Column>> cols(s.top_degree() + 1);
    for (int q = 0; q <= s.top_degree(); ++q) {
        cols[q].resize(s.dim(q));
        src.for_each(q, [&](const std::vector<int>& degs, const std::vector<int>& idxs, int flat) {
            std::vector<int> odegs(groups.size()), oidxs(groups.size());
            std::vector<int> gd, gi;
            for (size_t g = 0; g < groups.size(); ++g) {
                gd.clear();
                gi.clear();
                for (int i : groups[g]) {
                    gd.push_back(degs[i]);
                    gi.push_back(idxs[i]);
                }
                oidxs[g] = inner[g]->index(gd, gi);
                odegs[g] = std::accumulate(gd.begin(), gd.end(), 0);
            }
            cols[q][flat].emplace_back(outer.index(odegs, oidxs), koszul_sign(degs, pos));
        });
    }
    return make_map(s, outer.total(), std::move(cols));
}

// x -> unit (x) x  into O(1) (x) c
ChainMap left_unit_insertion(const std::vector<Rational>& unit, const ChainComplex& c,
                             const TensorBasis& dst) {
    std::vector<std::vector<Column>> cols(c.top_degree() + 1);
    for (int q = 0; q <= c.top_degree(); ++q) {
        cols[q].resize(c.dim(q));
        for (int j = 0; j < c.dim(q); ++j)
            for (size_t u = 0; u < unit.size(); ++u) {
                if (unit[u] == Rational(0)) continue;
                cols[q][j].emplace_back(dst.index({0, q}, {static_cast<int>(u), j}), unit[u]);
            }
    }
    return make_map(c, dst.total(), std::move(cols));
}

// x -> x (x) unit (x) ... (x) unit  into c (x) O(1)^n
ChainMap right_unit_insertion(const ChainComplex& c, const std::vector<Rational>& unit, int n,
                              const TensorBasis& dst) {
    std::vector<std::vector<Column>> cols(c.top_degree() + 1);
    std::vector<int> degs(n + 1, 0), idxs(n + 1, 0);
    for (int q = 0; q <= c.top_degree(); ++q) {
        cols[q].resize(c.dim(q));
        for (int j = 0; j < c.dim(q); ++j) {
            degs[0] = q;
            idxs[0] = j;
            std::function<void(int, Rational)> rec = [&](int i, Rational coeff) {
                if (i == n + 1) {
                    cols[q][j].emplace_back(dst.index(degs, idxs), coeff);
                    return;
                }
                for (size_t u = 0; u < unit.size(); ++u) {
                    if (unit[u] == Rational(0)) continue;
                    idxs[i] = static_cast<int>(u);
                    rec(i + 1, coeff * unit[u]);
                }
            };
            rec(1, Rational(1));
        }
    }
    return make_map(c, dst.total(), std::move(cols));
}

TensorBasis key_source(const std::vector<ChainComplex>& fterms,
                       const std::vector<ChainComplex>& oterms, const Key& key) {
    std::vector<const ChainComplex*> fs{&fterms[key[0]]};
    for (size_t i = 1; i < key.size(); ++i) fs.push_back(&oterms[key[i]]);
    return TensorBasis(fs);
}

// shared between operad gamma and module actions; permutation_blocks adds the
// strict permutation-matrix requirement
bool check_sigma(const std::vector<ChainComplex>& terms,
                 const std::vector<std::map<Perm, ChainMap>>& sigma, int n_max,
                 bool permutation_blocks, std::string* why) {
    if (static_cast<int>(sigma.size()) != n_max + 1)
        return fail(why, "one symmetric action table per arity expected");
    for (int k = 0; k <= n_max; ++k) {
        auto perms = all_permutations(k);
        if (sigma[k].size() != perms.size())
            return fail(why, "symmetric action keys differ from the full permutation list");
        for (const auto& p : perms) {
            auto it = sigma[k].find(p);
            if (it == sigma[k].end())
                return fail(why, "symmetric action keys differ from the full permutation list");
            if (!is_chain_map(terms[k], terms[k], it->second))
                return fail(why, "symmetric action entry is not a chain map");
            if (permutation_blocks)
                for (const auto& b : it->second.blocks)
                    if (!is_permutation_matrix(b))
                        return fail(why, "symmetric action block is not a permutation matrix");
        }
        if (!chain_maps_equal(sigma[k].at(identity_perm(k)), identity_map(terms[k])))
            return fail(why, "symmetric action does not fix the identity permutation");
        for (const auto& p : perms)
            for (const auto& q : perms)
                if (!chain_maps_equal(sigma[k].at(compose_perm(p, q)),
                                      compose(sigma[k].at(p), sigma[k].at(q))))
                    return fail(why, "symmetric action is not a group action");
    }
    return true;
}

// composing through F(sum m) agrees with composing inside each slot first;
// fterms/outer are the acting object (the operad itself or a module)
bool composition_associative(const std::vector<ChainComplex>& fterms,
                             const std::map<Key, ChainMap>& outer,
                             const std::vector<ChainComplex>& oterms,
                             const std::map<Key, ChainMap>& gam, int n_max) {
    for (int n = 1; n <= n_max; ++n)
        for (const auto& m : weak_compositions(n, n_max)) {
            int total_m = std::accumulate(m.begin(), m.end(), 0);
            if (total_m < 1) continue;
            Key key1{n};
            key1.insert(key1.end(), m.begin(), m.end());
            TensorBasis txy = key_source(fterms, oterms, key1);
            for (const auto& q : weak_compositions(total_m, n_max)) {
                Key key2{total_m};
                key2.insert(key2.end(), q.begin(), q.end());

                // first the outer composition, then the z factors
                std::vector<const ChainComplex*> s1{&txy.total()}, d1{&fterms[total_m]};
                for (int v : q) {
                    s1.push_back(&oterms[v]);
                    d1.push_back(&oterms[v]);
                }
                TensorBasis src1(s1), dst1(d1);
                std::vector<ChainMap> idz;
                idz.reserve(q.size());
                for (int v : q) idz.push_back(identity_map(oterms[v]));
                std::vector<const ChainMap*> maps1{&outer.at(key1)};
                for (auto& f : idz) maps1.push_back(&f);
                ChainMap lhs = compose(outer.at(key2), tensor_maps(src1, dst1, maps1));

                // regroup each z behind its y and compose inside the slots
                std::vector<const ChainComplex*> flat{&fterms[n]};
                for (int v : m) flat.push_back(&oterms[v]);
                for (int v : q) flat.push_back(&oterms[v]);
                TensorBasis src_flat(flat);
                std::vector<std::vector<int>> groups{{0}};
                std::vector<TensorBasis> inner;
                inner.reserve(n + 1);
                inner.emplace_back(std::vector<const ChainComplex*>{&fterms[n]});
                {
                    int zat = 1 + n;
                    for (int i = 0; i < n; ++i) {
                        std::vector<int> g{1 + i};
                        std::vector<const ChainComplex*> gf{&oterms[m[i]]};
                        for (int t = 0; t < m[i]; ++t) {
                            g.push_back(zat);
                            gf.push_back(&oterms[q[zat - 1 - n]]);
                            ++zat;
                        }
                        groups.push_back(std::move(g));
                        inner.emplace_back(std::move(gf));
                    }
                }
                std::vector<const TensorBasis*> innerp;
                for (auto& tb : inner) innerp.push_back(&tb);
                std::vector<const ChainComplex*> of;
                for (auto& tb : inner) of.push_back(&tb.total());
                TensorBasis outer_tb(of);
                ChainMap rg = regroup_map(src_flat, groups, innerp, outer_tb);

                Key key_r{n};
                std::vector<const ChainComplex*> d2{&fterms[n]};
                std::vector<ChainMap> slot_maps;
                slot_maps.reserve(n + 1);
                slot_maps.push_back(identity_map(fterms[n]));
                {
                    int zoff = 0;
                    for (int i = 0; i < n; ++i) {
                        int qi = 0;
                        Key ki{m[i]};
                        for (int t = 0; t < m[i]; ++t) {
                            ki.push_back(q[zoff + t]);
                            qi += q[zoff + t];
                        }
                        zoff += m[i];
                        key_r.push_back(qi);
                        d2.push_back(&oterms[qi]);
                        slot_maps.push_back(m[i] == 0 ? identity_map(oterms[0]) : gam.at(ki));
                    }
                }
                std::vector<const ChainMap*> maps2;
                for (auto& f : slot_maps) maps2.push_back(&f);
                TensorBasis dst2(d2);
                ChainMap rhs =
                    compose(outer.at(key_r), compose(tensor_maps(outer_tb, dst2, maps2), rg));

                if (!chain_maps_equal(lhs, rhs)) return false;
            }
        }
    return true;
}

// permuting the slots before composing matches permuting the blocks of the
// result; only checked with all operad terms in degree zero
bool composition_equivariant(const std::vector<ChainComplex>& fterms,
                             const std::map<Key, ChainMap>& outer,
                             const std::vector<std::map<Perm, ChainMap>>& fsigma,
                             const std::vector<ChainComplex>& oterms,
                             const std::vector<std::map<Perm, ChainMap>>& osigma, int n_max) {
    for (int n = 1; n <= n_max; ++n)
        for (const auto& m : weak_compositions(n, n_max)) {
            Key key{n};
            key.insert(key.end(), m.begin(), m.end());
            int total_m = std::accumulate(m.begin(), m.end(), 0);
            TensorBasis src = key_source(fterms, oterms, key);
            for (const auto& p : all_permutations(n)) {
                std::vector<ChainMap> ids;
                ids.reserve(n);
                for (int v : m) ids.push_back(identity_map(oterms[v]));
                std::vector<const ChainMap*> maps{&fsigma[n].at(p)};
                for (auto& f : ids) maps.push_back(&f);
                ChainMap lhs = compose(outer.at(key), tensor_maps(src, src, maps));

                Perm ip = inverse_perm(p);
                std::vector<int> pos(1 + n);
                pos[0] = 0;
                for (int j = 0; j < n; ++j) pos[1 + j] = 1 + ip[j];
                Key mp(n);
                for (int i = 0; i < n; ++i) mp[i] = m[p[i]];
                Key pkey{n};
                pkey.insert(pkey.end(), mp.begin(), mp.end());
                TensorBasis pdst = key_source(fterms, oterms, pkey);
                ChainMap moved = permute_factors_map(src, pos, pdst);

                Perm pi(total_m);
                {
                    std::vector<int> c(n + 1, 0);
                    for (int i = 0; i < n; ++i) c[i + 1] = c[i] + m[i];
                    int at = 0;
                    for (int j = 0; j < n; ++j)
                        for (int t = 0; t < mp[j]; ++t) pi[at++] = c[p[j]] + t;
                }
                ChainMap rhs = compose(fsigma[total_m].at(pi), compose(outer.at(pkey), moved));

                if (!chain_maps_equal(lhs, rhs)) return false;
            }

            // permuting inside one slot matches the block permutation of the
            // result
            std::vector<int> c(n + 1, 0);
            for (int i = 0; i < n; ++i) c[i + 1] = c[i] + m[i];
            for (int i = 0; i < n; ++i)
                for (const auto& tau : all_permutations(m[i])) {
                    if (std::is_sorted(tau.begin(), tau.end())) continue;
                    std::vector<ChainMap> ids;
                    ids.reserve(n + 1);
                    ids.push_back(identity_map(fterms[n]));
                    for (int v : m) ids.push_back(identity_map(oterms[v]));
                    std::vector<const ChainMap*> maps;
                    for (auto& f : ids) maps.push_back(&f);
                    maps[1 + i] = &osigma[m[i]].at(tau);
                    ChainMap lhs = compose(outer.at(key), tensor_maps(src, src, maps));

                    Perm blk = identity_perm(total_m);
                    for (int t = 0; t < m[i]; ++t) blk[c[i] + t] = c[i] + tau[t];
                    ChainMap rhs = compose(fsigma[total_m].at(blk), outer.at(key));

                    if (!chain_maps_equal(lhs, rhs)) return false;
                }
        }
    return true;
}

std::vector<std::vector<int>> all_functions(int m, int n) {
    std::vector<std::vector<int>> out;
    if (m == 0) {
        out.push_back({});
        return out;
    }
    if (n == 0) return out;
    std::vector<int> a(m, 0);
    while (true) {
        out.push_back(a);
        int i = m - 1;
        while (i >= 0 && a[i] == n - 1) a[i--] = 0;
        if (i < 0) break;
        ++a[i];
    }
    return out;
}

std::vector<int> fiber_sizes(const std::vector<int>& alpha, int n) {
    std::vector<int> c(n, 0);
    for (int v : alpha) ++c[v];
    return c;
}

bool sparse_equal(const std::map<int, Rational>& a, const std::map<int, Rational>& b) {
    const Rational zero(0);
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (!(v == (it == b.end() ? zero : it->second))) return false;
    }
    for (const auto& [k, v] : b)
        if (a.find(k) == a.end() && !(v == zero)) return false;
    return true;
}

// admissible monomial basis for the cohomology of a configuration space:
// products w_{a1 b1} ... w_{ar br} with a_t < b_t and b_1 < ... < b_r
struct OmegaBasis {
    using Mono = std::vector<std::pair<int, int>>;

    int k = 0;
    std::vector<std::vector<Mono>> monos;  // by word length
    std::map<Mono, int> rank;              // index within its length class

    explicit OmegaBasis(int k_) : k(k_) {
        monos.resize(std::max(1, k));
        Mono cur;
        std::function<void(int)> rec = [&](int bmin) {
            monos[cur.size()].push_back(cur);
            for (int b = bmin; b <= k - 1; ++b)
                for (int a = 0; a < b; ++a) {
                    cur.emplace_back(a, b);
                    rec(b + 1);
                    cur.pop_back();
                }
        };
        rec(1);
        for (auto& per : monos)
            for (size_t i = 0; i < per.size(); ++i) rank[per[i]] = static_cast<int>(i);
    }
};

// rewrites an arbitrary monomial into the admissible basis; tau is the sign
// for transposing one index pair, generators commute or anticommute with the
// parity of d-1
void straighten(OmegaBasis::Mono mono, Rational coeff, int d,
                std::map<OmegaBasis::Mono, Rational>& out) {
    const Rational tau(d % 2 == 0 ? 1 : -1);
    const bool anticommute = d % 2 == 0;
    for (auto& [a, b] : mono) {
        if (a == b) return;
        if (a > b) {
            std::swap(a, b);
            coeff = coeff * tau;
        }
    }
    for (size_t i = 1; i < mono.size(); ++i)
        for (size_t j = i; j > 0; --j) {
            auto lo = std::make_pair(mono[j].second, mono[j].first);
            auto hi = std::make_pair(mono[j - 1].second, mono[j - 1].first);
            if (lo < hi) {
                std::swap(mono[j - 1], mono[j]);
                if (anticommute) coeff = -coeff;
            } else {
                break;
            }
        }
    for (size_t i = 0; i + 1 < mono.size(); ++i) {
        if (mono[i] == mono[i + 1]) return;
        if (mono[i].second == mono[i + 1].second) {
            // w_ab w_a'b = w_aa' w_a'b + tau w_ab w_aa'  with a < a' < b
            int a = mono[i].first, a2 = mono[i + 1].first, b = mono[i].second;
            OmegaBasis::Mono m1 = mono, m2 = mono;
            m1[i] = {a, a2};
            m1[i + 1] = {a2, b};
            m2[i] = {a, b};
            m2[i + 1] = {a, a2};
            straighten(std::move(m1), coeff, d, out);
            straighten(std::move(m2), coeff * tau, d, out);
            return;
        }
    }
    auto [it, fresh] = out.try_emplace(std::move(mono), coeff);
    if (!fresh) it->second = it->second + coeff;
}

// homology blocks of the map collapsing point b of the target configuration
// onto point par[b] of the source; transpose of the cohomology pullback
std::vector<RatMatrix> cluster_homology_blocks(const OmegaBasis& src_basis,
                                               const OmegaBasis& dst_basis,
                                               const std::vector<int>& par, int d, int top) {
    auto dim_at = [&](const OmegaBasis& ob, int q) -> int {
        if (q % (d - 1) != 0) return 0;
        int r = q / (d - 1);
        if (r < 0 || r >= static_cast<int>(ob.monos.size())) return 0;
        return static_cast<int>(ob.monos[r].size());
    };
    std::vector<RatMatrix> blocks;
    for (int q = 0; q <= top; ++q) {
        int scols = dim_at(src_basis, q);
        int drows = dim_at(dst_basis, q);
        std::vector<Column> cols(scols);
        if (scols > 0 && drows > 0) {
            int r = q / (d - 1);
            for (int vi = 0; vi < drows; ++vi) {
                OmegaBasis::Mono mapped;
                bool dead = false;
                for (auto [a, b] : dst_basis.monos[r][vi]) {
                    if (par[a] == par[b]) {
                        dead = true;
                        break;
                    }
                    mapped.emplace_back(par[a], par[b]);
                }
                if (dead) continue;
                std::map<OmegaBasis::Mono, Rational> img;
                straighten(std::move(mapped), Rational(1), d, img);
                for (const auto& [u, c] : img) {
                    if (c == Rational(0)) continue;
                    cols[src_basis.rank.at(u)].emplace_back(vi, c);
                }
            }
        }
        blocks.push_back(RatMatrix(drows, scols, std::move(cols)));
    }
    return blocks;
}

}  // namespace

std::vector<std::vector<int>> composition_keys(int n_max) {
    std::vector<Key> out;
    for (int n = 1; n <= n_max; ++n)
        for (const auto& m : weak_compositions(n, n_max)) {
            Key k{n};
            k.insert(k.end(), m.begin(), m.end());
            out.push_back(std::move(k));
        }
    return out;
}

std::vector<std::vector<int>> all_permutations(int n) {
    Perm p = identity_perm(n);
    std::vector<Perm> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

bool is_valid_operad(const TruncatedOperad& o, std::string* why) {
    if (o.n_max < 1 || o.n_max > 4) return fail(why, "truncation bound must be 1..4");
    if (static_cast<int>(o.terms.size()) != o.n_max + 1)
        return fail(why, "one term per arity 0..n_max expected");
    if (static_cast<int>(o.unit.size()) != o.terms[1].dim(0))
        return fail(why, "unit coordinates must match the degree-zero part of O(1)");
    if (!check_sigma(o.terms, o.sigma, o.n_max, true, why)) return false;

    auto keys = composition_keys(o.n_max);
    if (o.gamma.size() != keys.size()) return fail(why, "composition keys differ from the range");
    for (const auto& k : keys) {
        auto it = o.gamma.find(k);
        if (it == o.gamma.end()) return fail(why, "composition keys differ from the range");
        TensorBasis tb = key_source(o.terms, o.terms, k);
        int total = std::accumulate(k.begin() + 1, k.end(), 0);
        if (!is_chain_map(tb.total(), o.terms[total], it->second))
            return fail(why, "composition entry is not a chain map");
    }

    for (int n = 0; n <= o.n_max; ++n) {
        Key k{1, n};
        TensorBasis tb = key_source(o.terms, o.terms, k);
        ChainMap ins = left_unit_insertion(o.unit, o.terms[n], tb);
        if (!chain_maps_equal(compose(o.gamma.at(k), ins), identity_map(o.terms[n])))
            return fail(why, "left unit law fails");
    }
    for (int n = 1; n <= o.n_max; ++n) {
        Key k{n};
        k.insert(k.end(), n, 1);
        TensorBasis tb = key_source(o.terms, o.terms, k);
        ChainMap ins = right_unit_insertion(o.terms[n], o.unit, n, tb);
        if (!chain_maps_equal(compose(o.gamma.at(k), ins), identity_map(o.terms[n])))
            return fail(why, "right unit law fails");
    }

    if (!composition_associative(o.terms, o.gamma, o.terms, o.gamma, o.n_max))
        return fail(why, "composition associativity fails");

    bool deg0 = true;
    for (const auto& t : o.terms) deg0 = deg0 && degree_zero_only(t);
    if (deg0 && !composition_equivariant(o.terms, o.gamma, o.sigma, o.terms, o.sigma, o.n_max))
        return fail(why, "composition equivariance fails");
    return true;
}

void validate_operad(const TruncatedOperad& o) {
    std::string why;
    if (!is_valid_operad(o, &why)) throw std::invalid_argument("invalid operad: " + why);
}

TruncatedOperad unit_operad(int n_max) {
    TruncatedOperad o;
    o.n_max = n_max;
    for (int k = 0; k <= n_max; ++k) o.terms.push_back(ChainComplex::concentrated(0, 1));
    o.unit = {Rational(1)};
    ChainMap one;
    one.blocks.push_back(RatMatrix(1, 1, {Column{{0, Rational(1)}}}));
    for (const auto& k : composition_keys(n_max)) o.gamma[k] = one;
    o.sigma.resize(n_max + 1);
    for (int k = 0; k <= n_max; ++k)
        for (const auto& p : all_permutations(k)) o.sigma[k][p] = identity_map(o.terms[k]);
    return o;
}

TruncatedOperad associative_operad(int n_max) {
    TruncatedOperad o;
    o.n_max = n_max;
    std::vector<std::vector<Perm>> perms(n_max + 1);
    std::vector<std::map<Perm, int>> rank(n_max + 1);
    for (int k = 0; k <= n_max; ++k) {
        perms[k] = all_permutations(k);
        for (size_t i = 0; i < perms[k].size(); ++i) rank[k][perms[k][i]] = static_cast<int>(i);
        o.terms.push_back(ChainComplex::concentrated(0, static_cast<int>(perms[k].size())));
    }
    o.unit = {Rational(1)};
    for (const auto& key : composition_keys(n_max)) {
        int n = key[0];
        std::vector<int> m(key.begin() + 1, key.end());
        int total = std::accumulate(m.begin(), m.end(), 0);
        std::vector<int> c(n + 1, 0);
        for (int i = 0; i < n; ++i) c[i + 1] = c[i] + m[i];
        TensorBasis tb = key_source(o.terms, o.terms, key);
        std::vector<Column> cols(tb.total().dim(0));
        tb.for_each(0, [&](const std::vector<int>&, const std::vector<int>& idxs, int flat) {
            const Perm& w = perms[n][idxs[0]];
            Perm v;
            v.reserve(total);
            for (int t = 0; t < n; ++t) {
                int i = w[t];
                const Perm& u = perms[m[i]][idxs[1 + i]];
                for (int s = 0; s < m[i]; ++s) v.push_back(c[i] + u[s]);
            }
            cols[flat].emplace_back(rank[total].at(v), Rational(1));
        });
        ChainMap g;
        g.blocks.push_back(
            RatMatrix(static_cast<int>(perms[total].size()), tb.total().dim(0), std::move(cols)));
        o.gamma[key] = std::move(g);
    }
    o.sigma.resize(n_max + 1);
    for (int k = 0; k <= n_max; ++k) {
        int sz = static_cast<int>(perms[k].size());
        for (const auto& p : perms[k]) {
            std::vector<Column> cols(sz);
            for (int wi = 0; wi < sz; ++wi)
                cols[wi].emplace_back(rank[k].at(compose_perm(p, perms[k][wi])), Rational(1));
            ChainMap f;
            f.blocks.push_back(RatMatrix(sz, sz, std::move(cols)));
            o.sigma[k][p] = std::move(f);
        }
    }
    return o;
}

bool is_valid_module(const TruncatedOperad& o, const RightModuleSeq& m, std::string* why) {
    std::string owhy;
    if (!is_valid_operad(o, &owhy)) return fail(why, "operad invalid: " + owhy);
    if (m.n_max != o.n_max) return fail(why, "module truncation differs from the operad");
    if (static_cast<int>(m.terms.size()) != m.n_max + 1)
        return fail(why, "one term per arity 0..n_max expected");
    if (!check_sigma(m.terms, m.sigma, m.n_max, false, why)) return false;

    auto keys = composition_keys(o.n_max);
    if (m.action.size() != keys.size()) return fail(why, "action keys differ from the range");
    for (const auto& k : keys) {
        auto it = m.action.find(k);
        if (it == m.action.end()) return fail(why, "action keys differ from the range");
        TensorBasis tb = key_source(m.terms, o.terms, k);
        int total = std::accumulate(k.begin() + 1, k.end(), 0);
        if (!is_chain_map(tb.total(), m.terms[total], it->second))
            return fail(why, "action entry is not a chain map");
    }

    for (int n = 1; n <= m.n_max; ++n) {
        Key k{n};
        k.insert(k.end(), n, 1);
        TensorBasis tb = key_source(m.terms, o.terms, k);
        ChainMap ins = right_unit_insertion(m.terms[n], o.unit, n, tb);
        if (!chain_maps_equal(compose(m.action.at(k), ins), identity_map(m.terms[n])))
            return fail(why, "module unit law fails");
    }

    if (!composition_associative(m.terms, m.action, o.terms, o.gamma, o.n_max))
        return fail(why, "module associativity fails");

    bool deg0 = true;
    for (const auto& t : o.terms) deg0 = deg0 && degree_zero_only(t);
    if (deg0 && !composition_equivariant(m.terms, m.action, m.sigma, o.terms, o.sigma, o.n_max))
        return fail(why, "module symmetry fails");
    return true;
}

void validate_module(const TruncatedOperad& o, const RightModuleSeq& m) {
    std::string why;
    if (!is_valid_module(o, m, &why)) throw std::invalid_argument("invalid module: " + why);
}

RightModuleSeq self_module(const TruncatedOperad& o) {
    RightModuleSeq m;
    m.n_max = o.n_max;
    m.terms = o.terms;
    m.action = o.gamma;
    m.sigma = o.sigma;
    return m;
}

RightModuleSeq configuration_betti_module(int n_max, int d) {
    if (n_max < 1 || n_max > 4) throw std::invalid_argument("truncation bound must be 1..4");
    if (d < 2) throw std::invalid_argument("ambient dimension must be at least 2");

    std::vector<OmegaBasis> bases;
    bases.reserve(n_max + 1);
    for (int k = 0; k <= n_max; ++k) bases.emplace_back(k);

    RightModuleSeq m;
    m.n_max = n_max;
    for (int k = 0; k <= n_max; ++k) {
        int top = std::max(0, k - 1) * (d - 1);
        std::vector<int> dims(top + 1, 0);
        for (int r = 0; r < static_cast<int>(bases[k].monos.size()); ++r)
            dims[r * (d - 1)] = static_cast<int>(bases[k].monos[r].size());
        std::vector<RatMatrix> diffs;
        for (int q = 1; q <= top; ++q) diffs.push_back(RatMatrix::zero(dims[q - 1], dims[q]));
        m.terms.emplace_back(dims, diffs);
    }
    for (int k = 1; k <= n_max; ++k) {
        LayerTable lt = layer_table(k, d);
        long long seen = 0;
        for (const auto& row : lt.rows) {
            if (static_cast<long long>(m.terms[k].dim(row.degree)) != row.rank)
                throw std::logic_error("admissible monomial count disagrees with the layer table");
            seen += row.rank;
        }
        if (seen != m.terms[k].betti().total())
            throw std::logic_error("admissible monomial count disagrees with the layer table");
    }

    m.sigma.resize(n_max + 1);
    for (int k = 0; k <= n_max; ++k) {
        int top = m.terms[k].top_degree();
        for (const auto& p : all_permutations(k)) {
            ChainMap f;
            f.blocks = cluster_homology_blocks(bases[k], bases[k], inverse_perm(p), d, top);
            m.sigma[k][p] = std::move(f);
        }
    }

    const ChainComplex one = ChainComplex::concentrated(0, 1);
    for (const auto& key : composition_keys(n_max)) {
        int n = key[0];
        int total = std::accumulate(key.begin() + 1, key.end(), 0);
        std::vector<int> par;
        for (int i = 0; i < n; ++i) par.insert(par.end(), key[1 + i], i);

        std::vector<const ChainComplex*> fs{&m.terms[n]};
        for (int i = 0; i < n; ++i) fs.push_back(&one);
        TensorBasis tb(fs);
        int top = std::max(tb.total().top_degree(), m.terms[total].top_degree());
        std::vector<RatMatrix> hb = cluster_homology_blocks(bases[n], bases[total], par, d, top);

        std::vector<std::vector<Column>> cols(top + 1);
        std::vector<int> degs(n + 1, 0), idxs(n + 1, 0);
        for (int q = 0; q <= top; ++q) {
            cols[q].resize(tb.total().dim(q));
            if (q > m.terms[n].top_degree()) continue;
            degs[0] = q;
            for (int j = 0; j < m.terms[n].dim(q); ++j) {
                idxs[0] = j;
                cols[q][tb.index(degs, idxs)] = hb[q].column(j);
            }
        }
        m.action[key] = make_map(tb.total(), m.terms[total], std::move(cols));
    }
    return m;
}

LinearCategory enriched_category_of(const TruncatedOperad& o) {
    validate_operad(o);
    const int nb = o.n_max;
    LinearCategory cat;
    cat.n_max = nb;
    cat.hom.assign(nb + 1, std::vector<LinearCategory::Hom>(nb + 1));

    // per-hom, per-summand factor bases, reused while building compositions
    std::vector<std::vector<std::vector<TensorBasis>>> tbs(
        nb + 1, std::vector<std::vector<TensorBasis>>(nb + 1));
    for (int m = 0; m <= nb; ++m)
        for (int n = 0; n <= nb; ++n) {
            auto& h = cat.hom[m][n];
            h.alphas = all_functions(m, n);
            ChainComplex acc = ChainComplex::concentrated(0, 0);
            bool first = true;
            for (const auto& alpha : h.alphas) {
                auto fib = fiber_sizes(alpha, n);
                std::vector<const ChainComplex*> fs;
                for (int j = 0; j < n; ++j) fs.push_back(&o.terms[fib[j]]);
                tbs[m][n].emplace_back(fs);
                const ChainComplex& t = tbs[m][n].back().total();
                acc = first ? t : ChainComplex::direct_sum(acc, t);
                first = false;
            }
            h.complex = std::move(acc);
            std::vector<int> run(h.complex.top_degree() + 1, 0);
            for (size_t s = 0; s < h.alphas.size(); ++s) {
                h.offsets.push_back(run);
                for (int q = 0; q <= h.complex.top_degree(); ++q)
                    run[q] += tbs[m][n][s].total().dim(q);
            }
        }

    cat.unit.reserve(nb + 1);
    for (int n = 0; n <= nb; ++n) {
        const auto& h = cat.hom[n][n];
        std::vector<int> idf = identity_perm(n);
        int s = static_cast<int>(std::lower_bound(h.alphas.begin(), h.alphas.end(), idf) -
                                 h.alphas.begin());
        const TensorBasis& tb = tbs[n][n][s];
        Column col;
        std::vector<int> degs(n, 0), idxs(n, 0);
        std::function<void(int, Rational)> rec = [&](int i, Rational cf) {
            if (i == n) {
                col.emplace_back(h.offsets[s][0] + tb.index(degs, idxs), cf);
                return;
            }
            for (size_t u = 0; u < o.unit.size(); ++u) {
                if (o.unit[u] == Rational(0)) continue;
                idxs[i] = static_cast<int>(u);
                rec(i + 1, cf * o.unit[u]);
            }
        };
        rec(0, Rational(1));
        cat.unit.push_back(RatMatrix(h.complex.dim(0), 1, {std::move(col)}));
    }

    std::map<Key, TensorBasis> gsrc;
    for (const auto& key : composition_keys(nb)) gsrc.emplace(key, key_source(o.terms, o.terms, key));

    cat.comp.assign(
        nb + 1, std::vector<std::vector<ChainMap>>(nb + 1, std::vector<ChainMap>(nb + 1)));
    for (int m = 0; m <= nb; ++m)
        for (int n = 0; n <= nb; ++n)
            for (int p = 0; p <= nb; ++p) {
                const auto& hg = cat.hom[n][p];
                const auto& hf = cat.hom[m][n];
                const auto& ht = cat.hom[m][p];
                ChainComplex src = ChainComplex::tensor(hg.complex, hf.complex);
                int top = std::max(src.top_degree(), ht.complex.top_degree());
                std::vector<std::vector<Column>> cols(top + 1);
                for (int q = 0; q <= top; ++q) cols[q].resize(src.dim(q));

                for (size_t sb = 0; sb < hg.alphas.size(); ++sb) {
                    const auto& beta = hg.alphas[sb];
                    auto bsz = fiber_sizes(beta, p);
                    std::vector<std::vector<int>> bfib(p);
                    for (int i = 0; i < n; ++i) bfib[beta[i]].push_back(i);

                    // interleave: each g_j followed by the f block of its fiber
                    std::vector<int> pos(p + n);
                    {
                        int at = 0;
                        for (int j = 0; j < p; ++j) {
                            pos[j] = at++;
                            for (size_t t = 0; t < bfib[j].size(); ++t) pos[p + bfib[j][t]] = at++;
                        }
                    }

                    for (size_t sa = 0; sa < hf.alphas.size(); ++sa) {
                        const auto& alpha = hf.alphas[sa];
                        auto asz = fiber_sizes(alpha, n);
                        std::vector<std::vector<int>> afib(n);
                        for (int i = 0; i < m; ++i) afib[alpha[i]].push_back(i);

                        std::vector<int> ba(m);
                        for (int i = 0; i < m; ++i) ba[i] = beta[alpha[i]];
                        int st = static_cast<int>(
                            std::lower_bound(ht.alphas.begin(), ht.alphas.end(), ba) -
                            ht.alphas.begin());
                        const TensorBasis& ttb = tbs[m][p][st];

                        // per slot: composition key, arity, label reordering
                        std::vector<Key> skey(p);
                        std::vector<int> sear(p);
                        std::vector<Perm> spi(p);
                        std::vector<char> sid(p);
                        for (int j = 0; j < p; ++j) {
                            skey[j].push_back(bsz[j]);
                            std::vector<int> s;
                            for (int i : bfib[j]) {
                                skey[j].push_back(asz[i]);
                                for (int v : afib[i]) s.push_back(v);
                            }
                            sear[j] = static_cast<int>(s.size());
                            std::vector<int> sorted = s;
                            std::sort(sorted.begin(), sorted.end());
                            spi[j].resize(s.size());
                            for (size_t t = 0; t < s.size(); ++t)
                                spi[j][t] = static_cast<int>(
                                    std::lower_bound(sorted.begin(), sorted.end(), s[t]) -
                                    sorted.begin());
                            sid[j] = std::is_sorted(s.begin(), s.end()) ? 1 : 0;
                        }

                        const TensorBasis& gtb = tbs[n][p][sb];
                        const TensorBasis& ftb = tbs[m][n][sa];
                        for (int qg = 0; qg <= gtb.total().top_degree(); ++qg) {
                            if (gtb.total().dim(qg) == 0) continue;
                            gtb.for_each(qg, [&](const std::vector<int>& gdegs,
                                                 const std::vector<int>& gidxs, int gflat) {
                                int grow = hg.offsets[sb][qg] + gflat;
                                for (int qf = 0; qf <= ftb.total().top_degree(); ++qf) {
                                    if (ftb.total().dim(qf) == 0) continue;
                                    ftb.for_each(qf, [&](const std::vector<int>& fdegs,
                                                         const std::vector<int>& fidxs, int fflat) {
                                        int frow = hf.offsets[sa][qf] + fflat;
                                        int dd = qg + qf;
                                        int col_idx = ChainComplex::tensor_index(
                                            hg.complex, hf.complex, qg, qf, grow, frow);
                                        std::vector<int> flatdegs;
                                        flatdegs.reserve(p + n);
                                        flatdegs.insert(flatdegs.end(), gdegs.begin(), gdegs.end());
                                        flatdegs.insert(flatdegs.end(), fdegs.begin(), fdegs.end());
                                        Rational sgn = koszul_sign(flatdegs, pos);

                                        std::vector<std::vector<std::pair<int, Rational>>> vs(p);
                                        std::vector<int> dslot(p);
                                        bool dead = false;
                                        for (int j = 0; j < p && !dead; ++j) {
                                            int dj = gdegs[j];
                                            for (int i : bfib[j]) dj += fdegs[i];
                                            dslot[j] = dj;
                                            if (bsz[j] == 0) {
                                                vs[j].emplace_back(gidxs[j], Rational(1));
                                                continue;
                                            }
                                            const TensorBasis& stb = gsrc.at(skey[j]);
                                            std::vector<int> sdegs{gdegs[j]}, sidxs{gidxs[j]};
                                            for (int i : bfib[j]) {
                                                sdegs.push_back(fdegs[i]);
                                                sidxs.push_back(fidxs[i]);
                                            }
                                            const Column& gc =
                                                o.gamma.at(skey[j]).blocks[dj].column(
                                                    stb.index(sdegs, sidxs));
                                            if (gc.empty()) {
                                                dead = true;
                                                break;
                                            }
                                            if (sid[j]) {
                                                vs[j].assign(gc.begin(), gc.end());
                                            } else {
                                                const RatMatrix& sg =
                                                    o.sigma[sear[j]].at(spi[j]).blocks[dj];
                                                for (const auto& e : gc)
                                                    for (const auto& me : sg.column(e.first))
                                                        vs[j].emplace_back(me.first,
                                                                           e.second * me.second);
                                            }
                                        }
                                        if (dead) return;
                                        std::vector<int> tidxs(p);
                                        std::function<void(int, Rational)> emit =
                                            [&](int j, Rational cf) {
                                                if (j == p) {
                                                    cols[dd][col_idx].emplace_back(
                                                        ht.offsets[st][dd] + ttb.index(dslot, tidxs),
                                                        cf);
                                                    return;
                                                }
                                                for (const auto& e : vs[j]) {
                                                    tidxs[j] = e.first;
                                                    emit(j + 1, cf * e.second);
                                                }
                                            };
                                        emit(0, sgn);
                                    });
                                }
                            });
                        }
                    }
                }
                cat.comp[m][n][p] = make_map(src, ht.complex, std::move(cols));
            }
    return cat;
}

bool check_enriched_units(const LinearCategory& cat) {
    auto is_delta = [](std::map<int, Rational>& acc, int j) {
        for (auto it = acc.begin(); it != acc.end();)
            it = it->second == Rational(0) ? acc.erase(it) : std::next(it);
        return acc.size() == 1 && acc.begin()->first == j && acc.begin()->second == Rational(1);
    };
    for (int m = 0; m <= cat.n_max; ++m)
        for (int n = 0; n <= cat.n_max; ++n) {
            const auto& h = cat.hom[m][n];
            const auto& hnn = cat.hom[n][n];
            const auto& hmm = cat.hom[m][m];
            const ChainMap& left = cat.comp[m][n][n];
            const ChainMap& right = cat.comp[m][m][n];
            for (int q = 0; q <= h.complex.top_degree(); ++q)
                for (int j = 0; j < h.complex.dim(q); ++j) {
                    std::map<int, Rational> acc;
                    for (const auto& e : cat.unit[n].column(0))
                        for (const auto& t : left.blocks[q].column(ChainComplex::tensor_index(
                                 hnn.complex, h.complex, 0, q, e.first, j)))
                            acc[t.first] += e.second * t.second;
                    if (!is_delta(acc, j)) return false;
                    acc.clear();
                    for (const auto& e : cat.unit[m].column(0))
                        for (const auto& t : right.blocks[q].column(ChainComplex::tensor_index(
                                 h.complex, hmm.complex, q, 0, j, e.first)))
                            acc[t.first] += e.second * t.second;
                    if (!is_delta(acc, j)) return false;
                }
        }
    return true;
}

bool check_enriched_associativity(const LinearCategory& cat, int threads) {
    struct Item {
        int m, n, p, r, qh, ih;
    };
    std::vector<Item> work;
    for (int m = 0; m <= cat.n_max; ++m)
        for (int n = 0; n <= cat.n_max; ++n)
            for (int p = 0; p <= cat.n_max; ++p)
                for (int r = 0; r <= cat.n_max; ++r) {
                    const ChainComplex& hpr = cat.hom[p][r].complex;
                    for (int qh = 0; qh <= hpr.top_degree(); ++qh)
                        for (int ih = 0; ih < hpr.dim(qh); ++ih)
                            work.push_back({m, n, p, r, qh, ih});
                }
    std::atomic<size_t> next{0};
    std::atomic<bool> ok{true};
    auto runner = [&]() {
        std::map<int, Rational> lhs, rhs;
        while (ok.load()) {
            size_t w = next.fetch_add(1);
            if (w >= work.size()) break;
            const Item it = work[w];
            const ChainComplex& hpr = cat.hom[it.p][it.r].complex;
            const ChainComplex& hnp = cat.hom[it.n][it.p].complex;
            const ChainComplex& hmn = cat.hom[it.m][it.n].complex;
            const ChainComplex& hnr = cat.hom[it.n][it.r].complex;
            const ChainComplex& hmp = cat.hom[it.m][it.p].complex;
            const ChainMap& c_npr = cat.comp[it.n][it.p][it.r];
            const ChainMap& c_mnr = cat.comp[it.m][it.n][it.r];
            const ChainMap& c_mnp = cat.comp[it.m][it.n][it.p];
            const ChainMap& c_mpr = cat.comp[it.m][it.p][it.r];
            for (int qg = 0; qg <= hnp.top_degree(); ++qg)
                for (int ig = 0; ig < hnp.dim(qg); ++ig) {
                    const Column& hg = c_npr.blocks[it.qh + qg].column(
                        ChainComplex::tensor_index(hpr, hnp, it.qh, qg, it.ih, ig));
                    for (int qf = 0; qf <= hmn.top_degree(); ++qf)
                        for (int jf = 0; jf < hmn.dim(qf); ++jf) {
                            int dd = it.qh + qg + qf;
                            lhs.clear();
                            rhs.clear();
                            for (const auto& e : hg)
                                for (const auto& t : c_mnr.blocks[dd].column(
                                         ChainComplex::tensor_index(hnr, hmn, it.qh + qg, qf,
                                                                    e.first, jf)))
                                    lhs[t.first] += e.second * t.second;
                            const Column& gf = c_mnp.blocks[qg + qf].column(
                                ChainComplex::tensor_index(hnp, hmn, qg, qf, ig, jf));
                            for (const auto& e : gf)
                                for (const auto& t : c_mpr.blocks[dd].column(
                                         ChainComplex::tensor_index(hpr, hmp, it.qh, qg + qf,
                                                                    it.ih, e.first)))
                                    rhs[t.first] += e.second * t.second;
                            if (!sparse_equal(lhs, rhs)) {
                                ok.store(false);
                                return;
                            }
                        }
                }
        }
    };
    int nt = std::max(1, threads);
    if (nt == 1) {
        runner();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int i = 0; i < nt; ++i) pool.emplace_back(runner);
        for (auto& t : pool) t.join();
    }
    return ok.load();
}

EnrichedModuleFunctor module_as_functor(const TruncatedOperad& o, const LinearCategory& cat,
                                        const RightModuleSeq& m, int threads) {
    validate_module(o, m);
    if (cat.n_max != o.n_max)
        throw std::invalid_argument("category truncation differs from the operad");
    const int nb = o.n_max;

    std::vector<std::vector<std::vector<TensorBasis>>> tbs(
        nb + 1, std::vector<std::vector<TensorBasis>>(nb + 1));
    for (int mm = 0; mm <= nb; ++mm)
        for (int n = 0; n <= nb; ++n)
            for (const auto& alpha : cat.hom[mm][n].alphas) {
                auto fib = fiber_sizes(alpha, n);
                std::vector<const ChainComplex*> fs;
                for (int j = 0; j < n; ++j) fs.push_back(&o.terms[fib[j]]);
                tbs[mm][n].emplace_back(fs);
            }

    std::map<Key, TensorBasis> asrc;
    for (const auto& key : composition_keys(nb)) asrc.emplace(key, key_source(m.terms, o.terms, key));

    EnrichedModuleFunctor fun;
    fun.values = m.terms;
    fun.action.assign(nb + 1, std::vector<ChainMap>(nb + 1));
    for (int mm = 0; mm <= nb; ++mm)
        for (int n = 0; n <= nb; ++n) {
            const auto& h = cat.hom[mm][n];
            ChainComplex src = ChainComplex::tensor(h.complex, m.terms[n]);
            int top = std::max(src.top_degree(), m.terms[mm].top_degree());
            std::vector<std::vector<Column>> cols(top + 1);
            for (int q = 0; q <= top; ++q) cols[q].resize(src.dim(q));

            for (size_t sa = 0; sa < h.alphas.size(); ++sa) {
                const auto& alpha = h.alphas[sa];
                auto asz = fiber_sizes(alpha, n);
                Key key;
                Perm pi;
                bool pid = true;
                if (n >= 1) {
                    key.push_back(n);
                    for (int j = 0; j < n; ++j) key.push_back(asz[j]);
                    std::vector<std::vector<int>> afib(n);
                    for (int i = 0; i < mm; ++i) afib[alpha[i]].push_back(i);
                    for (int j = 0; j < n; ++j)
                        for (int v : afib[j]) pi.push_back(v);
                    pid = std::is_sorted(pi.begin(), pi.end());
                }
                const TensorBasis& ftb = tbs[mm][n][sa];
                for (int qf = 0; qf <= ftb.total().top_degree(); ++qf) {
                    if (ftb.total().dim(qf) == 0) continue;
                    ftb.for_each(qf, [&](const std::vector<int>& fdegs,
                                         const std::vector<int>& fidxs, int fflat) {
                        int frow = h.offsets[sa][qf] + fflat;
                        for (int qx = 0; qx <= m.terms[n].top_degree(); ++qx)
                            for (int ix = 0; ix < m.terms[n].dim(qx); ++ix) {
                                int dd = qf + qx;
                                int col_idx = ChainComplex::tensor_index(h.complex, m.terms[n], qf,
                                                                         qx, frow, ix);
                                Rational sgn((qf * qx) % 2 ? -1 : 1);
                                if (n == 0) {
                                    cols[dd][col_idx].emplace_back(ix, sgn);
                                    continue;
                                }
                                std::vector<int> sdegs{qx}, sidxs{ix};
                                for (size_t t = 0; t < fdegs.size(); ++t) {
                                    sdegs.push_back(fdegs[t]);
                                    sidxs.push_back(fidxs[t]);
                                }
                                const Column& ac = m.action.at(key).blocks[dd].column(
                                    asrc.at(key).index(sdegs, sidxs));
                                if (pid) {
                                    for (const auto& e : ac)
                                        cols[dd][col_idx].emplace_back(e.first, sgn * e.second);
                                } else {
                                    const RatMatrix& sg = m.sigma[mm].at(pi).blocks[dd];
                                    std::map<int, Rational> acc;
                                    for (const auto& e : ac)
                                        for (const auto& me : sg.column(e.first))
                                            acc[me.first] += e.second * me.second;
                                    for (const auto& [row, v] : acc)
                                        if (!(v == Rational(0)))
                                            cols[dd][col_idx].emplace_back(row, sgn * v);
                                }
                            }
                    });
                }
            }
            fun.action[mm][n] = make_map(src, m.terms[mm], std::move(cols));
            if (!is_chain_map(src, m.terms[mm], fun.action[mm][n]))
                throw std::logic_error("enriched functor action is not a chain map");
        }

    // unit compatibility
    for (int n = 0; n <= nb; ++n) {
        const auto& h = cat.hom[n][n];
        for (int qx = 0; qx <= m.terms[n].top_degree(); ++qx)
            for (int ix = 0; ix < m.terms[n].dim(qx); ++ix) {
                std::map<int, Rational> acc;
                for (const auto& e : cat.unit[n].column(0))
                    for (const auto& t : fun.action[n][n].blocks[qx].column(
                             ChainComplex::tensor_index(h.complex, m.terms[n], 0, qx, e.first, ix)))
                        acc[t.first] += e.second * t.second;
                std::map<int, Rational> want{{ix, Rational(1)}};
                if (!sparse_equal(acc, want))
                    throw std::logic_error("enriched functor unit law fails");
            }
    }

    // contravariant composition law, exhaustive over pure tensors
    struct Item {
        int m, n, p, qg, ig;
    };
    std::vector<Item> work;
    for (int mm = 0; mm <= nb; ++mm)
        for (int n = 0; n <= nb; ++n)
            for (int p = 0; p <= nb; ++p) {
                const ChainComplex& hnp = cat.hom[n][p].complex;
                for (int qg = 0; qg <= hnp.top_degree(); ++qg)
                    for (int ig = 0; ig < hnp.dim(qg); ++ig) work.push_back({mm, n, p, qg, ig});
            }
    std::atomic<size_t> next{0};
    std::atomic<bool> ok{true};
    auto runner = [&]() {
        std::map<int, Rational> lhs, rhs;
        while (ok.load()) {
            size_t w = next.fetch_add(1);
            if (w >= work.size()) break;
            const Item it = work[w];
            const ChainComplex& hnp = cat.hom[it.n][it.p].complex;
            const ChainComplex& hmn = cat.hom[it.m][it.n].complex;
            const ChainComplex& hmp = cat.hom[it.m][it.p].complex;
            const ChainComplex& mp = fun.values[it.p];
            const ChainComplex& mn = fun.values[it.n];
            const ChainMap& cmp = cat.comp[it.m][it.n][it.p];
            for (int qf = 0; qf <= hmn.top_degree(); ++qf)
                for (int jf = 0; jf < hmn.dim(qf); ++jf) {
                    const Column& gf = cmp.blocks[it.qg + qf].column(
                        ChainComplex::tensor_index(hnp, hmn, it.qg, qf, it.ig, jf));
                    for (int qx = 0; qx <= mp.top_degree(); ++qx)
                        for (int ix = 0; ix < mp.dim(qx); ++ix) {
                            int dd = it.qg + qf + qx;
                            lhs.clear();
                            rhs.clear();
                            for (const auto& e : gf)
                                for (const auto& t : fun.action[it.m][it.p].blocks[dd].column(
                                         ChainComplex::tensor_index(hmp, mp, it.qg + qf, qx,
                                                                    e.first, ix)))
                                    lhs[t.first] += e.second * t.second;
                            Rational sgn((it.qg * qf) % 2 ? -1 : 1);
                            for (const auto& e : fun.action[it.n][it.p].blocks[it.qg + qx].column(
                                     ChainComplex::tensor_index(hnp, mp, it.qg, qx, it.ig, ix)))
                                for (const auto& t : fun.action[it.m][it.n].blocks[dd].column(
                                         ChainComplex::tensor_index(hmn, mn, qf, it.qg + qx, jf,
                                                                    e.first)))
                                    rhs[t.first] += sgn * e.second * t.second;
                            if (!sparse_equal(lhs, rhs)) {
                                ok.store(false);
                                return;
                            }
                        }
                }
        }
    };
    int nt = std::max(1, threads);
    if (nt == 1) {
        runner();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int i = 0; i < nt; ++i) pool.emplace_back(runner);
        for (auto& t : pool) t.join();
    }
    if (!ok.load()) throw std::logic_error("enriched functor composition law fails");
    return fun;
}

H0SplitReport h0_splitting_check(const TruncatedOperad& o, const RightModuleSeq& m) {
    H0SplitReport rep;
    std::string why;
    if (!is_valid_operad(o, &why)) {
        rep.problems.push_back("invalid operad: " + why);
        return rep;
    }
    if (!is_valid_module(o, m, &why)) {
        rep.problems.push_back("invalid module: " + why);
        return rep;
    }
    for (int k = 0; k <= m.n_max; ++k)
        for (int q = 1; q <= m.terms[k].top_degree(); ++q)
            if (!m.terms[k].diff(q).is_zero()) {
                rep.problems.push_back("module differential is nonzero");
                return rep;
            }

    auto keys = composition_keys(m.n_max);
    std::map<Key, TensorBasis> asrc;
    for (const auto& key : keys) asrc.emplace(key, key_source(m.terms, o.terms, key));

    // chain maps preserve total degree, so a block taking a positive-degree
    // operad input either lands outside the occupied degrees or mixes them
    bool mixed = false;
    for (const auto& key : keys) {
        const TensorBasis& tb = asrc.at(key);
        const ChainMap& act = m.action.at(key);
        for (int q = 0; q <= tb.total().top_degree() && !mixed; ++q)
            tb.for_each(q, [&](const std::vector<int>& degs, const std::vector<int>&, int flat) {
                for (size_t i = 1; i < degs.size(); ++i)
                    if (degs[i] > 0) {
                        if (!act.blocks[q].column(flat).empty()) mixed = true;
                        return;
                    }
            });
        if (mixed) break;
    }
    if (mixed) {
        rep.problems.push_back("action does not vanish on positive-degree operad inputs");
        return rep;
    }

    std::set<int> occ;
    for (int k = 0; k <= m.n_max; ++k)
        for (int q = 0; q <= m.terms[k].top_degree(); ++q)
            if (m.terms[k].dim(q) > 0) occ.insert(q);
    rep.degrees.assign(occ.begin(), occ.end());

    auto block_of = [](const ChainMap& f, int q) {
        return q < static_cast<int>(f.blocks.size()) ? f.blocks[q] : RatMatrix::zero(0, 0);
    };

    for (int deg : rep.degrees) {
        RightModuleSeq s;
        s.n_max = m.n_max;
        for (int k = 0; k <= m.n_max; ++k)
            s.terms.push_back(ChainComplex::concentrated(deg, m.terms[k].dim(deg)));
        s.sigma.resize(m.n_max + 1);
        for (int k = 0; k <= m.n_max; ++k)
            for (const auto& [p, f] : m.sigma[k]) {
                ChainMap g;
                for (int q = 0; q < deg; ++q) g.blocks.push_back(RatMatrix::zero(0, 0));
                g.blocks.push_back(block_of(f, deg));
                s.sigma[k][p] = std::move(g);
            }
        for (const auto& key : keys) {
            int total = std::accumulate(key.begin() + 1, key.end(), 0);
            std::vector<const ChainComplex*> fs{&s.terms[key[0]]};
            for (size_t i = 1; i < key.size(); ++i) fs.push_back(&o.terms[key[i]]);
            TensorBasis tb(fs);
            int top = std::max(tb.total().top_degree(), s.terms[total].top_degree());
            std::vector<std::vector<Column>> cols(top + 1);
            for (int q = 0; q <= top; ++q) cols[q].resize(tb.total().dim(q));
            const TensorBasis& otb = asrc.at(key);
            const ChainMap& act = m.action.at(key);
            tb.for_each(deg, [&](const std::vector<int>& degs, const std::vector<int>& idxs,
                                 int flat) {
                // the module factor only occupies the summand degree, so all
                // operad factors sit in degree zero here
                cols[deg][flat] = act.blocks[deg].column(otb.index(degs, idxs));
            });
            s.action[key] = make_map(tb.total(), s.terms[total], std::move(cols));
        }
        std::string swhy;
        if (!is_valid_module(o, s, &swhy))
            rep.problems.push_back("summand at degree " + std::to_string(deg) +
                                   " is not a module: " + swhy);
        rep.summands.push_back(std::move(s));
    }

    // reassemble every action column from the summands
    std::vector<std::map<Key, TensorBasis>> stbs(rep.degrees.size());
    for (size_t di = 0; di < rep.degrees.size(); ++di)
        for (const auto& key : keys)
            stbs[di].emplace(key, key_source(rep.summands[di].terms, o.terms, key));
    bool mismatch = false;
    for (const auto& key : keys) {
        const TensorBasis& otb = asrc.at(key);
        const ChainMap& act = m.action.at(key);
        for (int q = 0; q <= otb.total().top_degree() && !mismatch; ++q)
            otb.for_each(q, [&](const std::vector<int>& degs, const std::vector<int>& idxs,
                                int flat) {
                if (mismatch) return;
                const Column& ocol = act.blocks[q].column(flat);
                for (size_t i = 1; i < degs.size(); ++i)
                    if (degs[i] > 0) {
                        if (!ocol.empty()) mismatch = true;
                        return;
                    }
                size_t di = std::lower_bound(rep.degrees.begin(), rep.degrees.end(), degs[0]) -
                            rep.degrees.begin();
                const Column& scol = rep.summands[di].action.at(key).blocks[q].column(
                    stbs[di].at(key).index(degs, idxs));
                if (!(scol == ocol)) mismatch = true;
            });
        if (mismatch) break;
    }
    if (mismatch) rep.problems.push_back("reassembled action differs from the original");

    rep.ok = rep.problems.empty();
    return rep;
}

}  // namespace parcalc
