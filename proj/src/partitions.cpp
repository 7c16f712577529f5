#include "parcalc/partitions.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace parcalc {

SetPartition::SetPartition(int n, std::vector<std::vector<int>> blocks)
    : n_(n), blocks_(std::move(blocks)), block_of_(n, -1) {
    if (n < 0) throw std::invalid_argument("negative support");
    for (auto& b : blocks_) {
        if (b.empty()) throw std::invalid_argument("empty block");
        std::sort(b.begin(), b.end());
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (size_t j = 0; j < blocks_.size(); ++j)
        for (int s : blocks_[j]) {
            if (s < 0 || s >= n_) throw std::invalid_argument("element out of range");
            if (block_of_[s] != -1) throw std::invalid_argument("element in two blocks");
            block_of_[s] = static_cast<int>(j);
        }
    for (int s = 0; s < n_; ++s)
        if (block_of_[s] == -1) throw std::invalid_argument("element in no block");
}

SetPartition SetPartition::discrete(int n) {
    std::vector<std::vector<int>> blocks;
    for (int i = 0; i < n; ++i) blocks.push_back({i});
    return SetPartition(n, std::move(blocks));
}

SetPartition SetPartition::one_block(int n) {
    if (n == 0) return SetPartition(0, {});
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return SetPartition(n, {all});
}

SetPartition SetPartition::parse(const std::string& text) {
    std::vector<std::vector<int>> blocks;
    int mx = -1;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '|')) {
        std::vector<int> block;
        std::stringstream bs(part);
        std::string tok;
        while (std::getline(bs, tok, ',')) {
            size_t pos = 0;
            int v = std::stoi(tok, &pos);
            while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
            if (pos != tok.size() || v < 1) throw std::invalid_argument("bad partition element");
            block.push_back(v - 1);
            mx = std::max(mx, v - 1);
        }
        if (block.empty()) throw std::invalid_argument("empty block");
        blocks.push_back(std::move(block));
    }
    if (blocks.empty()) throw std::invalid_argument("empty partition");
    return SetPartition(mx + 1, std::move(blocks));
}

std::string SetPartition::str() const {
    std::ostringstream os;
    for (size_t j = 0; j < blocks_.size(); ++j) {
        if (j) os << '|';
        for (size_t i = 0; i < blocks_[j].size(); ++i) {
            if (i) os << ',';
            os << blocks_[j][i] + 1;
        }
    }
    return os.str();
}

bool SetPartition::is_irreducible() const {
    if (blocks_.empty()) return false;
    for (const auto& b : blocks_)
        if (b.size() < 2) return false;
    return true;
}

bool SetPartition::refines(const SetPartition& other) const {
    if (n_ != other.n_) return false;
    for (const auto& b : blocks_)
        for (int s : b)
            if (other.block_of(s) != other.block_of(b.front())) return false;
    return true;
}

std::vector<SetPartition> enumerate_partitions(int n) {
    std::vector<SetPartition> out;
    if (n == 0) {
        out.push_back(SetPartition(0, {}));
        return out;
    }
    std::vector<int> a(n, 0);
    while (true) {
        int nb = *std::max_element(a.begin(), a.end()) + 1;
        std::vector<std::vector<int>> blocks(nb);
        for (int i = 0; i < n; ++i) blocks[a[i]].push_back(i);
        out.push_back(SetPartition(n, std::move(blocks)));
        int i = n - 1;
        while (i > 0 && a[i] == 1 + *std::max_element(a.begin(), a.begin() + i)) --i;
        if (i == 0) break;
        ++a[i];
        std::fill(a.begin() + i + 1, a.end(), 0);
    }
    return out;
}

std::vector<SetPartition> enumerate_by_excess(int n, int excess) {
    std::vector<SetPartition> out;
    for (auto& p : enumerate_partitions(n))
        if (p.excess() == excess) out.push_back(std::move(p));
    return out;
}

RefinementPoset refinement_poset(const SetPartition& p) {
    // independent choices of a partition per block
    std::vector<std::vector<std::vector<std::vector<int>>>> choices;
    for (const auto& b : p.blocks()) {
        std::vector<std::vector<std::vector<int>>> c;
        for (const auto& q : enumerate_partitions(static_cast<int>(b.size()))) {
            std::vector<std::vector<int>> sub;
            for (const auto& qb : q.blocks()) {
                std::vector<int> rb;
                for (int x : qb) rb.push_back(b[x]);
                sub.push_back(std::move(rb));
            }
            c.push_back(std::move(sub));
        }
        choices.push_back(std::move(c));
    }
    std::vector<SetPartition> elems;
    std::vector<size_t> idx(choices.size(), 0);
    while (true) {
        std::vector<std::vector<int>> blocks;
        for (size_t j = 0; j < choices.size(); ++j)
            for (const auto& sub : choices[j][idx[j]]) blocks.push_back(sub);
        elems.push_back(SetPartition(p.support_size(), std::move(blocks)));
        size_t j = choices.size();
        while (j > 0 && idx[j - 1] + 1 == choices[j - 1].size()) idx[--j] = 0;
        if (j == 0) break;
        ++idx[j - 1];
    }
    std::sort(elems.begin(), elems.end(), [](const SetPartition& a, const SetPartition& b) {
        if (a.block_count() != b.block_count()) return a.block_count() < b.block_count();
        return a < b;
    });
    std::vector<std::pair<int, int>> rel;
    int n = static_cast<int>(elems.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && elems[j].refines(elems[i])) rel.emplace_back(i, j);
    return RefinementPoset{FinitePoset(n, rel), std::move(elems)};
}

CylinderGraph cylinder_graph(const SetPartition& p) {
    CylinderGraph g;
    g.support = p.support_size();
    g.blocks = p.block_count();
    for (int s = 0; s < g.support; ++s) g.edge_block.push_back(p.block_of(s));
    return g;
}

RatMatrix cylinder_relative_boundary(const SetPartition& p) {
    std::vector<RatMatrix::Column> cols(p.support_size());
    for (int s = 0; s < p.support_size(); ++s) cols[s] = {{p.block_of(s), Rational(1)}};
    return RatMatrix(p.block_count(), p.support_size(), std::move(cols));
}

std::vector<std::vector<Rational>> relative_h1(const SetPartition& p) {
    return kernel_basis(cylinder_relative_boundary(p));
}

int relative_h1_rank(const SetPartition& p) {
    return static_cast<int>(relative_h1(p).size());
}

bool is_premorphism(const SetPartition& src, const SetPartition& tgt,
                    const std::vector<int>& map) {
    if (static_cast<int>(map.size()) != src.support_size()) return false;
    std::vector<char> hit(tgt.support_size(), 0);
    for (int v : map) {
        if (v < 0 || v >= tgt.support_size()) return false;
        hit[v] = 1;
    }
    for (char h : hit)
        if (!h) return false;
    return image_partition(src, map) == tgt;
}

Premorphism make_premorphism(SetPartition src, SetPartition tgt, std::vector<int> map) {
    if (!is_premorphism(src, tgt, map)) throw std::invalid_argument("not a premorphism");
    return Premorphism{std::move(src), std::move(tgt), std::move(map)};
}

namespace {

int uf_find(std::vector<int>& uf, int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
}

}  // namespace

SetPartition image_partition(const SetPartition& p, const std::vector<int>& f) {
    if (static_cast<int>(f.size()) != p.support_size())
        throw std::invalid_argument("map length mismatch");
    std::vector<int> labels(f);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    auto rank = [&](int v) {
        return static_cast<int>(std::lower_bound(labels.begin(), labels.end(), v) -
                                labels.begin());
    };
    int m = static_cast<int>(labels.size());
    std::vector<int> uf(m);
    std::iota(uf.begin(), uf.end(), 0);
    for (const auto& b : p.blocks())
        for (size_t i = 1; i < b.size(); ++i) {
            int x = uf_find(uf, rank(f[b[0]]));
            int y = uf_find(uf, rank(f[b[i]]));
            if (x != y) uf[std::max(x, y)] = std::min(x, y);
        }
    std::vector<std::vector<int>> blocks(m);
    for (int v = 0; v < m; ++v) blocks[uf_find(uf, v)].push_back(v);
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                                [](const auto& b) { return b.empty(); }),
                 blocks.end());
    return SetPartition(m, std::move(blocks));
}

bool is_morphism(const Premorphism& a) {
    int e = a.source.excess();
    if (e != a.target.excess()) return false;
    if (e == 0) return true;
    RatMatrix ks = RatMatrix::from_columns(a.source.support_size(), relative_h1(a.source));
    RatMatrix kt = RatMatrix::from_columns(a.target.support_size(), relative_h1(a.target));
    std::vector<RatMatrix::Column> ecols(a.source.support_size());
    for (int s = 0; s < a.source.support_size(); ++s) ecols[s] = {{a.map[s], Rational(1)}};
    RatMatrix e_edges(a.target.support_size(), a.source.support_size(), std::move(ecols));
    auto x = solve_consistent_cols(kt, e_edges * ks);
    if (!x) return false;
    return rank(*x) == e;
}

MapClass classify_map(const SetPartition& p, const std::vector<int>& f) {
    SetPartition tgt = image_partition(p, f);
    std::vector<int> labels(f);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<int> g(f.size());
    for (size_t s = 0; s < f.size(); ++s)
        g[s] = static_cast<int>(std::lower_bound(labels.begin(), labels.end(), f[s]) -
                                labels.begin());
    return is_morphism(Premorphism{p, std::move(tgt), std::move(g)}) ? MapClass::good
                                                                     : MapClass::bad;
}

EkCategory build_ek(int k) {
    if (k < 1) throw std::invalid_argument("excess must be positive");
    EkCategory cat;
    cat.excess = k;
    for (int m = k + 1; m <= 2 * k; ++m)
        for (auto& p : enumerate_by_excess(m, k))
            if (p.is_irreducible()) cat.objects.push_back(std::move(p));
    for (size_t i = 0; i < cat.objects.size(); ++i) {
        int mi = cat.objects[i].support_size();
        for (size_t j = 0; j < cat.objects.size(); ++j) {
            int mj = cat.objects[j].support_size();
            if (mi < mj) continue;
            std::vector<int> f(mi, 0);
            while (true) {
                unsigned mask = 0;
                for (int v : f) mask |= 1u << v;
                if (mask == (1u << mj) - 1 && image_partition(cat.objects[i], f) == cat.objects[j] &&
                    is_morphism(Premorphism{cat.objects[i], cat.objects[j], f}))
                    cat.morphisms.push_back(
                        {static_cast<int>(i), static_cast<int>(j), f});
                int t = mi - 1;
                while (t >= 0 && f[t] == mj - 1) f[t--] = 0;
                if (t < 0) break;
                ++f[t];
            }
        }
    }
    std::set<EkCategory::Arrow> have(cat.morphisms.begin(), cat.morphisms.end());
    for (const auto& a : cat.morphisms)
        for (const auto& b : cat.morphisms) {
            if (a.dst != b.src) continue;
            EkCategory::Arrow c{a.src, b.dst, {}};
            c.map.resize(a.map.size());
            for (size_t s = 0; s < a.map.size(); ++s) c.map[s] = b.map[a.map[s]];
            if (!have.count(c)) throw std::logic_error("composition not closed");
        }
    return cat;
}

}  // namespace parcalc
