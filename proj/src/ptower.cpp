#include "parcalc/ptower.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace parcalc {

GradedRanks t_homology(const SetPartition& p) {
    if (p.support_size() == 0) throw std::invalid_argument("empty support");
    if (p.support_size() > 7)
        throw std::invalid_argument("support too large for direct computation");
    return relative_order_pair_complex(refinement_poset(p).poset).betti();
}

bool kunneth_check(const SetPartition& p) {
    GradedRanks lhs = t_homology(p);
    GradedRanks rhs({1});
    for (const auto& b : p.blocks())
        rhs = rhs.convolve(t_homology(SetPartition::one_block(static_cast<int>(b.size()))));
    return lhs == rhs;
}

long long single_block_rank(int m) {
    if (m < 1) throw std::invalid_argument("block size must be positive");
    if (m >= 8) {
        long long r = 1;
        for (int j = 2; j < m; ++j) r *= j;
        return r;
    }
    static std::map<int, long long> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(m);
        if (it != cache.end()) return it->second;
    }
    GradedRanks g = t_homology(SetPartition::one_block(m));
    long long r = g.at(m - 1);
    std::lock_guard<std::mutex> lock(mu);
    cache[m] = r;
    return r;
}

namespace {

LayerTable weighted_table(int k, int d, int threads, bool irreducible_only) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (d < 2) throw std::invalid_argument("dimension must be at least 2");
    for (int m = 1; m <= std::min(k, 7); ++m) single_block_rank(m);  // warm the cache
    std::vector<SetPartition> parts = enumerate_partitions(k);
    int nt = std::max(1, std::min<int>(threads, static_cast<int>(parts.size())));
    std::vector<std::vector<long long>> acc(nt, std::vector<long long>(k, 0));
    auto work = [&](int t) {
        size_t lo = parts.size() * t / nt;
        size_t hi = parts.size() * (t + 1) / nt;
        for (size_t idx = lo; idx < hi; ++idx) {
            const SetPartition& p = parts[idx];
            if (irreducible_only && !p.is_irreducible()) continue;
            long long w = 1;
            for (const auto& b : p.blocks()) w *= single_block_rank(static_cast<int>(b.size()));
            acc[t][p.excess()] += w;
        }
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    LayerTable out{k, d, {}};
    for (int i = 0; i < k; ++i) {
        long long r = 0;
        for (int t = 0; t < nt; ++t) r += acc[t][i];
        if (r > 0) out.rows.push_back({i, i * (d - 1), r});
    }
    return out;
}

}  // namespace

LayerTable layer_table(int k, int d, int threads) {
    return weighted_table(k, d, threads, false);
}

LayerTable reduced_layer_table(int k, int d, int threads) {
    if (k < 2) throw std::invalid_argument("reduced table needs k >= 2");
    return weighted_table(k, d, threads, true);
}

int connectivity(int k, int d) {
    if (k < 2) throw std::invalid_argument("connectivity needs k >= 2");
    if (d < 2) throw std::invalid_argument("dimension must be at least 2");
    return ((k + 1) / 2) * (d - 1) - 1;
}

PoincareOracle poincare_oracle(int k, int d) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (d < 2) throw std::invalid_argument("dimension must be at least 2");
    std::vector<long long> c{1};
    for (int j = 1; j < k; ++j) {
        std::vector<long long> next(c.size() + (d - 1), 0);
        for (size_t deg = 0; deg < c.size(); ++deg) {
            next[deg] += c[deg];
            next[deg + (d - 1)] += j * c[deg];
        }
        c = std::move(next);
    }
    return PoincareOracle{k, d, std::move(c)};
}

CollapseReport compare_with_oracle(const LayerTable& t, const PoincareOracle& o) {
    std::vector<long long> table(o.coeffs.size(), 0);
    for (const auto& row : t.rows) {
        if (row.degree >= static_cast<int>(table.size())) table.resize(row.degree + 1, 0);
        table[row.degree] += row.rank;
    }
    CollapseReport rep;
    for (size_t deg = 0; deg < table.size(); ++deg) {
        long long want = deg < o.coeffs.size() ? o.coeffs[deg] : 0;
        if (table[deg] != want)
            rep.diff.push_back({static_cast<int>(deg), table[deg], want});
    }
    rep.ok = rep.diff.empty();
    return rep;
}

CollapseReport collapse_check(int k, int d, int threads) {
    return compare_with_oracle(layer_table(k, d, threads), poincare_oracle(k, d));
}

}  // namespace parcalc
