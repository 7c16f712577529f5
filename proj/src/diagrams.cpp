#include "parcalc/diagrams.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace parcalc {

namespace {

RatMatrix block_at(const ChainMap& f, int n, int rows, int cols) {
    if (n >= 0 && n < static_cast<int>(f.blocks.size())) return f.blocks[n];
    return RatMatrix::zero(rows, cols);
}

ChainComplex betti_complex(const GradedRanks& b) {
    if (b.top() < 0) return ChainComplex();
    std::vector<int> dims(b.r.begin(), b.r.end());
    std::vector<RatMatrix> diffs;
    for (size_t n = 1; n < dims.size(); ++n)
        diffs.push_back(RatMatrix::zero(dims[n - 1], dims[n]));
    return ChainComplex(std::move(dims), std::move(diffs));
}

}  // namespace

FiniteCategory::FiniteCategory(int nobjects, std::vector<Arrow> arrows,
                               std::vector<int> identities, std::vector<int> table)
    : nobj_(nobjects), arrows_(std::move(arrows)), ids_(std::move(identities)),
      table_(std::move(table)) {
    if (nobj_ < 0) throw std::invalid_argument("negative object count");
    int na = static_cast<int>(arrows_.size());
    for (const Arrow& a : arrows_)
        if (a.src < 0 || a.src >= nobj_ || a.dst < 0 || a.dst >= nobj_)
            throw std::invalid_argument("arrow endpoint out of range");
    if (static_cast<int>(ids_.size()) != nobj_)
        throw std::invalid_argument("one identity per object required");
    for (int x = 0; x < nobj_; ++x) {
        int e = ids_[x];
        if (e < 0 || e >= na || arrows_[e].src != x || arrows_[e].dst != x)
            throw std::invalid_argument("bad identity arrow");
    }
    if (table_.size() != static_cast<size_t>(na) * na)
        throw std::invalid_argument("composition table size mismatch");
    for (int g = 0; g < na; ++g)
        for (int f = 0; f < na; ++f) {
            int c = table_[static_cast<size_t>(g) * na + f];
            bool composable = arrows_[f].dst == arrows_[g].src;
            if (!composable) {
                if (c != -1) throw std::invalid_argument("composite of non-composable pair");
                continue;
            }
            if (c < 0 || c >= na) throw std::invalid_argument("composition table not total");
            if (arrows_[c].src != arrows_[f].src || arrows_[c].dst != arrows_[g].dst)
                throw std::invalid_argument("composite endpoints mismatch");
        }
    for (int f = 0; f < na; ++f) {
        if (compose(ids_[arrows_[f].dst], f) != f || compose(f, ids_[arrows_[f].src]) != f)
            throw std::invalid_argument("identity law fails");
    }
    for (int h = 0; h < na; ++h)
        for (int g = 0; g < na; ++g) {
            if (arrows_[g].dst != arrows_[h].src) continue;
            int hg = compose(h, g);
            for (int f = 0; f < na; ++f) {
                if (arrows_[f].dst != arrows_[g].src) continue;
                if (compose(hg, f) != compose(h, compose(g, f)))
                    throw std::invalid_argument("composition not associative");
            }
        }
}

FiniteCategory FiniteCategory::discrete(int nobjects) {
    std::vector<Arrow> arrows;
    std::vector<int> ids;
    for (int x = 0; x < nobjects; ++x) {
        arrows.push_back({x, x});
        ids.push_back(x);
    }
    std::vector<int> table(static_cast<size_t>(nobjects) * nobjects, -1);
    for (int x = 0; x < nobjects; ++x) table[static_cast<size_t>(x) * nobjects + x] = x;
    return FiniteCategory(nobjects, std::move(arrows), std::move(ids), std::move(table));
}

FiniteCategory FiniteCategory::thin(int nobjects,
                                    const std::vector<std::pair<int, int>>& rel) {
    std::vector<char> reach(static_cast<size_t>(nobjects) * nobjects, 0);
    for (int x = 0; x < nobjects; ++x) reach[static_cast<size_t>(x) * nobjects + x] = 1;
    for (auto [a, b] : rel) {
        if (a < 0 || a >= nobjects || b < 0 || b >= nobjects)
            throw std::invalid_argument("relation endpoint out of range");
        reach[static_cast<size_t>(a) * nobjects + b] = 1;
    }
    for (int k = 0; k < nobjects; ++k)
        for (int i = 0; i < nobjects; ++i)
            if (reach[static_cast<size_t>(i) * nobjects + k])
                for (int j = 0; j < nobjects; ++j)
                    if (reach[static_cast<size_t>(k) * nobjects + j])
                        reach[static_cast<size_t>(i) * nobjects + j] = 1;
    for (int i = 0; i < nobjects; ++i)
        for (int j = 0; j < nobjects; ++j)
            if (i != j && reach[static_cast<size_t>(i) * nobjects + j] &&
                reach[static_cast<size_t>(j) * nobjects + i])
                throw std::invalid_argument("relation has a cycle");
    std::vector<Arrow> arrows;
    std::vector<int> ids(nobjects, -1);
    std::vector<int> index(static_cast<size_t>(nobjects) * nobjects, -1);
    for (int i = 0; i < nobjects; ++i)
        for (int j = 0; j < nobjects; ++j)
            if (reach[static_cast<size_t>(i) * nobjects + j]) {
                index[static_cast<size_t>(i) * nobjects + j] = static_cast<int>(arrows.size());
                if (i == j) ids[i] = static_cast<int>(arrows.size());
                arrows.push_back({i, j});
            }
    int na = static_cast<int>(arrows.size());
    std::vector<int> table(static_cast<size_t>(na) * na, -1);
    for (int g = 0; g < na; ++g)
        for (int f = 0; f < na; ++f)
            if (arrows[f].dst == arrows[g].src)
                table[static_cast<size_t>(g) * na + f] =
                    index[static_cast<size_t>(arrows[f].src) * nobjects + arrows[g].dst];
    return FiniteCategory(nobjects, std::move(arrows), std::move(ids), std::move(table));
}

FiniteCategory FiniteCategory::from_poset(const FinitePoset& p) {
    std::vector<std::pair<int, int>> rel;
    for (int a = 0; a < p.size(); ++a)
        for (int b = 0; b < p.size(); ++b)
            if (p.less(a, b)) rel.emplace_back(a, b);
    return thin(p.size(), rel);
}

bool FiniteCategory::is_identity(int a) const { return ids_[arrows_.at(a).src] == a; }

int FiniteCategory::compose(int g, int f) const {
    int c = table_.at(static_cast<size_t>(g) * arrows_.size() + f);
    if (c < 0) throw std::invalid_argument("arrows not composable");
    return c;
}

bool FiniteCategory::loop_free() const {
    for (int a = 0; a < arrow_count(); ++a)
        if (!is_identity(a) && arrows_[a].src == arrows_[a].dst) return false;
    std::vector<char> reach(static_cast<size_t>(nobj_) * nobj_, 0);
    for (int a = 0; a < arrow_count(); ++a)
        if (!is_identity(a)) reach[static_cast<size_t>(arrows_[a].src) * nobj_ + arrows_[a].dst] = 1;
    for (int k = 0; k < nobj_; ++k)
        for (int i = 0; i < nobj_; ++i)
            if (reach[static_cast<size_t>(i) * nobj_ + k])
                for (int j = 0; j < nobj_; ++j)
                    if (reach[static_cast<size_t>(k) * nobj_ + j])
                        reach[static_cast<size_t>(i) * nobj_ + j] = 1;
    for (int i = 0; i < nobj_; ++i)
        if (reach[static_cast<size_t>(i) * nobj_ + i]) return false;
    return true;
}

int action_src_object(const ChainDiagram& f, int arrow) {
    const auto& a = f.shape.arrow(arrow);
    return f.variance == Variance::covariant ? a.src : a.dst;
}

int action_dst_object(const ChainDiagram& f, int arrow) {
    const auto& a = f.shape.arrow(arrow);
    return f.variance == Variance::covariant ? a.dst : a.src;
}

bool is_valid_diagram(const ChainDiagram& f, std::string* why) {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (static_cast<int>(f.values.size()) != f.shape.objects())
        return fail("one value per object required");
    if (static_cast<int>(f.actions.size()) != f.shape.arrow_count())
        return fail("one action per arrow required");
    for (int a = 0; a < f.shape.arrow_count(); ++a) {
        const ChainComplex& s = f.values[action_src_object(f, a)];
        const ChainComplex& d = f.values[action_dst_object(f, a)];
        if (!is_chain_map(s, d, f.actions[a])) return fail("action is not a chain map");
    }
    for (int x = 0; x < f.shape.objects(); ++x)
        if (!chain_maps_equal(f.actions[f.shape.identity(x)], identity_map(f.values[x])))
            return fail("identity arrow does not act by the identity");
    for (int g = 0; g < f.shape.arrow_count(); ++g)
        for (int h = 0; h < f.shape.arrow_count(); ++h) {
            if (f.shape.arrow(h).dst != f.shape.arrow(g).src) continue;
            int gh = f.shape.compose(g, h);
            ChainMap expect = f.variance == Variance::covariant
                                  ? compose(f.actions[g], f.actions[h])
                                  : compose(f.actions[h], f.actions[g]);
            if (!chain_maps_equal(f.actions[gh], expect))
                return fail("actions do not respect composition");
        }
    return true;
}

void validate_diagram(const ChainDiagram& f) {
    std::string why;
    if (!is_valid_diagram(f, &why)) throw std::invalid_argument("invalid diagram: " + why);
}

ChainDiagram constant_diagram(const FiniteCategory& shape, const ChainComplex& value,
                              Variance variance) {
    ChainDiagram f;
    f.shape = shape;
    f.variance = variance;
    f.values.assign(shape.objects(), value);
    f.actions.assign(shape.arrow_count(), identity_map(value));
    return f;
}

ChainDiagram diagram_direct_sum(const ChainDiagram& f, const ChainDiagram& g) {
    if (!(f.shape == g.shape) || f.variance != g.variance)
        throw std::invalid_argument("summands must share shape and variance");
    ChainDiagram out;
    out.shape = f.shape;
    out.variance = f.variance;
    for (int x = 0; x < f.shape.objects(); ++x)
        out.values.push_back(ChainComplex::direct_sum(f.values[x], g.values[x]));
    for (int a = 0; a < f.shape.arrow_count(); ++a)
        out.actions.push_back(map_direct_sum(f.actions[a], g.actions[a]));
    return out;
}

ChainDiagram homology_diagram(const ChainDiagram& f) {
    std::vector<HomologyData> h;
    for (const ChainComplex& c : f.values) h.push_back(homology(c));
    ChainDiagram out;
    out.shape = f.shape;
    out.variance = f.variance;
    for (int x = 0; x < f.shape.objects(); ++x) out.values.push_back(betti_complex(h[x].betti));
    for (int a = 0; a < f.shape.arrow_count(); ++a) {
        int u = action_src_object(f, a);
        int v = action_dst_object(f, a);
        ChainMap m;
        m.blocks = induced_on_homology(f.values[u], h[u], f.values[v], h[v], f.actions[a]);
        out.actions.push_back(std::move(m));
    }
    return out;
}

bool is_diagram_map(const ChainDiagram& src, const ChainDiagram& dst, const DiagramMap& m,
                    std::string* why) {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (!(src.shape == dst.shape) || src.variance != dst.variance)
        return fail("shape or variance mismatch");
    if (static_cast<int>(m.parts.size()) != src.shape.objects())
        return fail("one component per object required");
    for (int x = 0; x < src.shape.objects(); ++x)
        if (!is_chain_map(src.values[x], dst.values[x], m.parts[x]))
            return fail("component is not a chain map");
    for (int a = 0; a < src.shape.arrow_count(); ++a) {
        int u = action_src_object(src, a);
        int v = action_dst_object(src, a);
        ChainMap left = compose(m.parts[v], src.actions[a]);
        ChainMap right = compose(dst.actions[a], m.parts[u]);
        if (!chain_maps_equal(left, right)) return fail("naturality square fails");
    }
    return true;
}

bool is_objectwise_quasi_iso(const ChainDiagram& src, const ChainDiagram& dst,
                             const DiagramMap& m) {
    for (int x = 0; x < src.shape.objects(); ++x)
        if (!is_quasi_iso(src.values[x], dst.values[x], m.parts[x])) return false;
    return true;
}

DiagramMap identity_diagram_map(const ChainDiagram& f) {
    DiagramMap m;
    for (const ChainComplex& c : f.values) m.parts.push_back(identity_map(c));
    return m;
}

namespace {

// chain of composable non-identity arrows; level-0 chains carry the object
struct ArrowChain {
    int start = 0;
    int end = 0;
    std::vector<int> arrows;
};

struct ChainLevels {
    std::vector<std::vector<ArrowChain>> chains;                // per level
    std::vector<std::map<std::pair<int, std::vector<int>>, int>> index;
};

ChainLevels enumerate_chains(const FiniteCategory& c) {
    ChainLevels out;
    std::vector<ArrowChain> cur;
    std::map<std::pair<int, std::vector<int>>, int> idx;
    for (int x = 0; x < c.objects(); ++x) {
        idx[{x, {}}] = static_cast<int>(cur.size());
        cur.push_back({x, x, {}});
    }
    while (!cur.empty()) {
        out.chains.push_back(cur);
        out.index.push_back(std::move(idx));
        std::vector<ArrowChain> next;
        idx.clear();
        for (const ArrowChain& ch : out.chains.back())
            for (int a = 0; a < c.arrow_count(); ++a) {
                if (c.is_identity(a) || c.arrow(a).src != ch.end) continue;
                ArrowChain e{ch.start, c.arrow(a).dst, ch.arrows};
                e.arrows.push_back(a);
                idx[{e.start, e.arrows}] = static_cast<int>(next.size());
                next.push_back(std::move(e));
            }
        cur = std::move(next);
    }
    return out;
}

struct Face {
    int target = 0;  // chain index at level p+1
    int sign = 1;
    int arrow = -1;  // acting arrow, -1 for a plain projection
};

// faces of level p+1 grouped by their level-p source chain
std::vector<std::vector<Face>> level_faces(const FiniteCategory& c, const ChainLevels& lv,
                                           int p, Variance variance) {
    std::vector<std::vector<Face>> by_source(lv.chains[p].size());
    const auto& idx = lv.index[p];
    for (size_t t = 0; t < lv.chains[p + 1].size(); ++t) {
        const ArrowChain& ch = lv.chains[p + 1][t];
        int len = static_cast<int>(ch.arrows.size());
        for (int i = 0; i <= len; ++i) {
            std::pair<int, std::vector<int>> key;
            int arrow = -1;
            if (i == 0) {
                key.first = c.arrow(ch.arrows[0]).dst;
                key.second.assign(ch.arrows.begin() + 1, ch.arrows.end());
                if (variance == Variance::contravariant) arrow = ch.arrows[0];
            } else if (i == len) {
                key.first = ch.start;
                key.second.assign(ch.arrows.begin(), ch.arrows.end() - 1);
                if (variance == Variance::covariant) arrow = ch.arrows[len - 1];
            } else {
                key.first = ch.start;
                key.second = ch.arrows;
                int comp = c.compose(ch.arrows[i], ch.arrows[i - 1]);
                key.second.erase(key.second.begin() + i);
                key.second[i - 1] = comp;
            }
            auto it = idx.find(key);
            if (it == idx.end()) throw std::logic_error("missing face chain");
            by_source[it->second].push_back({static_cast<int>(t), i % 2 == 0 ? 1 : -1, arrow});
        }
    }
    return by_source;
}

}  // namespace

HolimResult holim(const ChainDiagram& f) {
    validate_diagram(f);
    if (f.shape.objects() == 0) return {};
    if (!f.shape.loop_free()) throw std::invalid_argument("shape has loops");

    ChainLevels lv = enumerate_chains(f.shape);
    int levels = static_cast<int>(lv.chains.size());  // levels p = 0..P
    int big = levels - 1;

    auto chain_value = [&](int p, int ci) -> const ChainComplex& {
        const ArrowChain& ch = lv.chains[p][ci];
        return f.values[f.variance == Variance::covariant ? ch.end : ch.start];
    };

    int qmax = -1;
    for (const ChainComplex& c : f.values) qmax = std::max(qmax, c.top_degree());
    if (qmax < 0) return {};  // every value is the zero complex

    // offsets[p][q][chain] inside level p at value degree q
    std::vector<std::vector<std::vector<int>>> off(levels);
    std::vector<std::vector<int>> level_dim(levels, std::vector<int>(qmax + 1, 0));
    for (int p = 0; p < levels; ++p) {
        off[p].assign(qmax + 1, {});
        for (int q = 0; q <= qmax; ++q) {
            int run = 0;
            for (size_t ci = 0; ci < lv.chains[p].size(); ++ci) {
                off[p][q].push_back(run);
                run += chain_value(p, static_cast<int>(ci)).dim(q);
            }
            level_dim[p][q] = run;
        }
    }
    std::vector<std::vector<std::vector<Face>>> faces(big);
    for (int p = 0; p < big; ++p) faces[p] = level_faces(f.shape, lv, p, f.variance);

    // shifted total complex: degree t holds the (p, q = t - big + p) blocks
    int tmax = big + qmax;
    std::vector<int> sdims(tmax + 1, 0);
    auto block_dim = [&](int t, int p) {
        int q = t - big + p;
        return (q >= 0 && q <= qmax) ? level_dim[p][q] : 0;
    };
    std::vector<std::vector<int>> soff(tmax + 1, std::vector<int>(levels + 1, 0));
    for (int t = 0; t <= tmax; ++t) {
        for (int p = 0; p < levels; ++p) soff[t][p + 1] = soff[t][p] + block_dim(t, p);
        sdims[t] = soff[t][levels];
    }

    std::vector<RatMatrix> sdiffs;
    for (int t = 1; t <= tmax; ++t) {
        std::vector<RatMatrix::Column> cols(sdims[t]);
        for (int p = 0; p < levels; ++p) {
            int q = t - big + p;
            if (q < 0 || q > qmax) continue;
            int hsign = q % 2 == 0 ? 1 : -1;
            for (size_t ci = 0; ci < lv.chains[p].size(); ++ci) {
                const ChainComplex& val = chain_value(p, static_cast<int>(ci));
                int d = val.dim(q);
                if (d == 0) continue;
                int colbase = soff[t][p] + off[p][q][ci];
                if (q >= 1) {
                    RatMatrix vert = val.diff(q);
                    int rowbase = soff[t - 1][p] + off[p][q - 1][ci];
                    for (int j = 0; j < d; ++j)
                        for (const auto& [r, v] : vert.column(j))
                            cols[colbase + j].emplace_back(rowbase + r, v);
                }
                if (p < big) {
                    for (const Face& fc : faces[p][ci]) {
                        int rowbase = soff[t - 1][p + 1] + off[p + 1][q][fc.target];
                        Rational s(hsign * fc.sign);
                        if (fc.arrow < 0) {
                            for (int j = 0; j < d; ++j)
                                cols[colbase + j].emplace_back(rowbase + j, s);
                        } else {
                            const ChainMap& act = f.actions[fc.arrow];
                            if (q < static_cast<int>(act.blocks.size()))
                                for (int j = 0; j < d; ++j)
                                    for (const auto& [r, v] : act.blocks[q].column(j))
                                        cols[colbase + j].emplace_back(rowbase + r, s * v);
                        }
                    }
                }
            }
        }
        sdiffs.push_back(RatMatrix(sdims[t - 1], sdims[t], std::move(cols)));
    }
    ChainComplex total(sdims, std::move(sdiffs));

    HolimResult out;
    GradedRanks full = total.betti();
    for (int t = 0; t <= full.top(); ++t) {
        if (t >= big) out.betti.set(t - big, full.at(t));
        else out.negative.set(big - t - 1, full.at(t));
    }
    if (big == 0) {
        out.complex = std::move(total);
        return out;
    }
    auto ker = kernel_basis(total.diff(big));
    RatMatrix k = RatMatrix::from_columns(total.dim(big), ker);
    std::vector<int> tdims{k.ncols()};
    std::vector<RatMatrix> tdiffs;
    for (int n = 1; n + big <= total.top_degree(); ++n) tdims.push_back(total.dim(n + big));
    if (tdims.size() > 1) {
        auto sol = solve_consistent_cols(k, total.diff(big + 1));
        if (!sol) throw std::logic_error("boundary escapes the kernel");
        tdiffs.push_back(*sol);
        for (int n = 2; n + big <= total.top_degree(); ++n) tdiffs.push_back(total.diff(n + big));
    }
    out.complex = ChainComplex(std::move(tdims), std::move(tdiffs));
    return out;
}

FormalityZigzag formality_zigzag(const ChainDiagram& f, int n) {
    validate_diagram(f);
    if (n < 0) throw std::invalid_argument("negative degree");
    int nobj = f.shape.objects();
    std::vector<HomologyData> h;
    for (const ChainComplex& c : f.values) {
        h.push_back(homology(c));
        if (h.back().betti.total() != h.back().betti.at(n))
            throw std::invalid_argument("homology not concentrated in the given degree");
    }

    FormalityZigzag z;
    z.po.shape = z.kernel.shape = z.hn.shape = f.shape;
    z.po.variance = z.kernel.variance = z.hn.variance = f.variance;
    std::vector<RatMatrix> kmat;  // cycle bases in degree n
    for (int x = 0; x < nobj; ++x) {
        z.po.values.push_back(postnikov_section(f.values[x], n));
        z.rho.parts.push_back(postnikov_rho(f.values[x], n));
        PostnikovKernel pk = postnikov_kernel(f.values[x], n);
        kmat.push_back(pk.inclusion.blocks[n]);
        z.kernel.values.push_back(std::move(pk.complex));
        z.incl.parts.push_back(std::move(pk.inclusion));
        z.hn.values.push_back(ChainComplex::concentrated(n, h[x].betti.at(n)));

        ChainMap q = zero_map(z.kernel.values[x], z.hn.values[x]);
        int b = h[x].betti.at(n);
        int kd = z.kernel.values[x].dim(n);
        if (b > 0 && kd > 0) {
            RatMatrix basis = RatMatrix::hcat(h[x].reps[n], h[x].boundaries[n]);
            auto sol = solve_consistent_cols(basis, kmat[x]);
            if (!sol) throw std::logic_error("cycle has no class coordinates");
            std::vector<RatMatrix::Column> sparse(kd);
            for (int j = 0; j < kd; ++j)
                for (const auto& [i, v] : sol->column(j))
                    if (i < b) sparse[j].emplace_back(i, v);
            q.blocks[n] = RatMatrix(b, kd, std::move(sparse));
        }
        z.quot.parts.push_back(std::move(q));
    }

    for (int a = 0; a < f.shape.arrow_count(); ++a) {
        int u = action_src_object(f, a);
        int v = action_dst_object(f, a);
        const ChainMap& fa = f.actions[a];
        const ChainComplex& pu = z.po.values[u];
        const ChainComplex& pv = z.po.values[v];

        ChainMap po = zero_map(pu, pv);
        for (int i = 0; i <= n; ++i)
            po.blocks[i] = block_at(fa, i, f.values[v].dim(i), f.values[u].dim(i));
        RatMatrix top = RatMatrix::zero(pv.dim(n + 1), pu.dim(n + 1));
        if (pu.dim(n + 1) > 0 && pv.dim(n + 1) > 0) {
            auto sol = solve_consistent_cols(pv.diff(n + 1), po.blocks[n] * pu.diff(n + 1));
            if (!sol) throw std::logic_error("image boundary escapes the boundary space");
            top = *sol;
        }
        po.blocks[n + 1] = top;
        z.po.actions.push_back(std::move(po));

        ChainMap kn = zero_map(z.kernel.values[u], z.kernel.values[v]);
        if (kmat[u].ncols() > 0 && kmat[v].ncols() > 0) {
            auto sol = solve_consistent_cols(
                kmat[v], block_at(fa, n, f.values[v].dim(n), f.values[u].dim(n)) * kmat[u]);
            if (!sol) throw std::logic_error("image cycle escapes the cycle space");
            kn.blocks[n] = *sol;
        }
        kn.blocks[n + 1] = top;
        z.kernel.actions.push_back(std::move(kn));

        ChainMap hb = zero_map(z.hn.values[u], z.hn.values[v]);
        hb.blocks[n] = induced_on_homology(f.values[u], h[u], f.values[v], h[v], fa)[n];
        z.hn.actions.push_back(std::move(hb));
    }

    validate_diagram(z.po);
    validate_diagram(z.kernel);
    validate_diagram(z.hn);
    std::string why;
    if (!is_diagram_map(f, z.po, z.rho, &why) || !is_diagram_map(z.kernel, z.po, z.incl, &why) ||
        !is_diagram_map(z.kernel, z.hn, z.quot, &why))
        throw std::logic_error("zigzag leg is not natural: " + why);
    if (!is_objectwise_quasi_iso(f, z.po, z.rho) ||
        !is_objectwise_quasi_iso(z.kernel, z.po, z.incl) ||
        !is_objectwise_quasi_iso(z.kernel, z.hn, z.quot))
        throw std::logic_error("zigzag leg is not a quasi-isomorphism");
    return z;
}

SplitReport holim_splitting_check(const ChainDiagram& f, const SplittingData& s) {
    SplitReport rep;
    std::string why;
    if (!is_valid_diagram(f, &why)) {
        rep.problems.push_back("diagram: " + why);
        return rep;
    }
    if (s.summands.empty()) rep.problems.push_back("no summands supplied");

    ChainDiagram sum;
    bool have_sum = false;
    for (const ChainDiagram& g : s.summands) {
        if (!is_valid_diagram(g, &why)) {
            rep.problems.push_back("summand: " + why);
            continue;
        }
        sum = have_sum ? diagram_direct_sum(sum, g) : g;
        have_sum = true;
    }
    if (have_sum && rep.problems.empty()) {
        if (!is_diagram_map(sum, f, s.witness, &why))
            rep.problems.push_back("witness: " + why);
        else if (!is_objectwise_quasi_iso(sum, f, s.witness))
            rep.problems.push_back("witness is not an objectwise quasi-isomorphism");
    }

    HolimResult lhs = holim(f);
    rep.lhs = lhs.betti;
    rep.lhs_negative = lhs.negative;
    for (const ChainDiagram& g : s.summands) {
        if (!is_valid_diagram(g)) continue;
        ChainDiagram hg = homology_diagram(g);
        int found = -1;
        bool concentrated = true;
        for (const ChainComplex& c : hg.values)
            for (int d = 0; d <= c.top_degree(); ++d)
                if (c.dim(d) > 0) {
                    if (found < 0) found = d;
                    else if (found != d) concentrated = false;
                }
        if (!concentrated) {
            rep.problems.push_back("summand homology occupies several degrees");
            continue;
        }
        if (found < 0) continue;  // acyclic summand contributes nothing
        HolimResult hr = holim(hg);
        rep.rhs = rep.rhs + hr.betti;
        rep.rhs_negative = rep.rhs_negative + hr.negative;
    }

    int top = std::max(rep.lhs.top(), rep.rhs.top());
    for (int d = 0; d <= top; ++d)
        if (rep.lhs.at(d) != rep.rhs.at(d)) rep.diff.push_back({d, rep.lhs.at(d), rep.rhs.at(d)});
    int nbot = std::max(rep.lhs_negative.top(), rep.rhs_negative.top());
    for (int i = 0; i <= nbot; ++i)
        if (rep.lhs_negative.at(i) != rep.rhs_negative.at(i))
            rep.diff.push_back({-(i + 1), rep.lhs_negative.at(i), rep.rhs_negative.at(i)});
    std::sort(rep.diff.begin(), rep.diff.end(),
              [](const SplitDiff& a, const SplitDiff& b) { return a.degree < b.degree; });
    rep.ok = rep.problems.empty() && rep.diff.empty();
    return rep;
}

bool is_functor(const FiniteCategory& src, const FiniteCategory& dst, const Functor& lam) {
    if (static_cast<int>(lam.objects.size()) != src.objects()) return false;
    if (static_cast<int>(lam.arrows.size()) != src.arrow_count()) return false;
    for (int x : lam.objects)
        if (x < 0 || x >= dst.objects()) return false;
    for (int a = 0; a < src.arrow_count(); ++a) {
        int la = lam.arrows[a];
        if (la < 0 || la >= dst.arrow_count()) return false;
        if (dst.arrow(la).src != lam.objects[src.arrow(a).src]) return false;
        if (dst.arrow(la).dst != lam.objects[src.arrow(a).dst]) return false;
    }
    for (int x = 0; x < src.objects(); ++x)
        if (lam.arrows[src.identity(x)] != dst.identity(lam.objects[x])) return false;
    for (int g = 0; g < src.arrow_count(); ++g)
        for (int f = 0; f < src.arrow_count(); ++f) {
            if (src.arrow(f).dst != src.arrow(g).src) continue;
            if (lam.arrows[src.compose(g, f)] != dst.compose(lam.arrows[g], lam.arrows[f]))
                return false;
        }
    return true;
}

Functor identity_functor(const FiniteCategory& c) {
    Functor lam;
    for (int x = 0; x < c.objects(); ++x) lam.objects.push_back(x);
    for (int a = 0; a < c.arrow_count(); ++a) lam.arrows.push_back(a);
    return lam;
}

Functor constant_functor(const FiniteCategory& src, const FiniteCategory& dst, int object) {
    Functor lam;
    lam.objects.assign(src.objects(), object);
    lam.arrows.assign(src.arrow_count(), dst.identity(object));
    return lam;
}

ChainDiagram restrict_diagram(const ChainDiagram& f, const FiniteCategory& shape,
                              const Functor& lam) {
    if (!is_functor(shape, f.shape, lam)) throw std::invalid_argument("not a functor");
    ChainDiagram out;
    out.shape = shape;
    out.variance = f.variance;
    for (int x : lam.objects) out.values.push_back(f.values[x]);
    for (int a : lam.arrows) out.actions.push_back(f.actions[a]);
    return out;
}

SplittingData restrict_splitting(const SplittingData& s, const FiniteCategory& shape,
                                 const Functor& lam) {
    SplittingData out;
    for (const ChainDiagram& g : s.summands)
        out.summands.push_back(restrict_diagram(g, shape, lam));
    for (int x : lam.objects) out.witness.parts.push_back(s.witness.parts[x]);
    return out;
}

}  // namespace parcalc
