#pragma once

#include "parcalc/chain.hpp"
#include "parcalc/diagrams.hpp"
#include "parcalc/matrix.hpp"
#include "parcalc/simplicial.hpp"

#include <random>
#include <vector>

namespace parcalc::testing {

// deterministic RNG for reproducible property tests
inline std::mt19937_64 make_rng(unsigned seed) { return std::mt19937_64(seed); }

inline Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    return Rational(Int(num(rng)), Int(den(rng)));
}

inline RatMatrix random_matrix(std::mt19937_64& rng, int nrows, int ncols, double density = 0.6) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::vector<Rational>> rows(nrows, std::vector<Rational>(ncols, Rational(0)));
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j)
            if (coin(rng) < density) rows[i][j] = random_rational(rng);
    if (nrows == 0) return RatMatrix::zero(nrows, ncols);
    return RatMatrix::from_rows(rows);
}

// random invertible P with its exact inverse, via elementary row additions
inline void random_unimodular(std::mt19937_64& rng, int m, RatMatrix& p, RatMatrix& pinv) {
    p = RatMatrix::identity(m);
    pinv = RatMatrix::identity(m);
    if (m < 2) return;
    std::uniform_int_distribution<int> idx(0, m - 1);
    std::uniform_int_distribution<int> coef(-2, 2);
    for (int k = 0; k < 2 * m; ++k) {
        int i = idx(rng), j = idx(rng);
        Rational c(coef(rng));
        if (i == j || c.is_zero()) continue;
        std::vector<RatMatrix::Column> ec(m), einv(m);
        for (int t = 0; t < m; ++t) {
            ec[t] = {{t, Rational(1)}};
            einv[t] = {{t, Rational(1)}};
        }
        ec[i].push_back({j, c});  // E = I + c e_{ji}: row_j += c row_i
        einv[i].push_back({j, -c});
        p = RatMatrix(m, m, ec) * p;
        pinv = pinv * RatMatrix(m, m, einv);
    }
}

struct ComplexWithBetti {
    ChainComplex complex;
    GradedRanks betti;
};

// sum of points and discs, conjugated by random base changes in every degree;
// homology ranks are known by construction
inline ComplexWithBetti random_complex(std::mt19937_64& rng, int max_top = 4, int max_piece = 3) {
    std::uniform_int_distribution<int> topd(0, max_top);
    std::uniform_int_distribution<int> cnt(0, max_piece);
    int top = topd(rng);
    std::vector<int> points(top + 1), discs(top + 1, 0);
    for (int n = 0; n <= top; ++n) points[n] = cnt(rng);
    for (int n = 1; n <= top; ++n) discs[n] = cnt(rng);
    std::vector<int> dims(top + 1);
    for (int n = 0; n <= top; ++n)
        dims[n] = points[n] + discs[n] + (n + 1 <= top ? discs[n + 1] : 0);
    // degree n basis: [points | disc tops | bottoms of degree n+1 discs]
    std::vector<RatMatrix> diffs;
    for (int n = 1; n <= top; ++n) {
        std::vector<RatMatrix::Column> cols(dims[n]);
        for (int i = 0; i < discs[n]; ++i)
            cols[points[n] + i] = {{points[n - 1] + discs[n - 1] + i, Rational(1)}};
        diffs.push_back(RatMatrix(dims[n - 1], dims[n], std::move(cols)));
    }
    std::vector<RatMatrix> p(top + 1), pinv(top + 1);
    for (int n = 0; n <= top; ++n) random_unimodular(rng, dims[n], p[n], pinv[n]);
    for (int n = 1; n <= top; ++n) diffs[n - 1] = p[n - 1] * diffs[n - 1] * pinv[n];
    GradedRanks b;
    for (int n = 0; n <= top; ++n) b.set(n, points[n]);
    return {ChainComplex(std::move(dims), std::move(diffs)), b};
}

struct ConjugatedDiagram {
    ChainDiagram diagram;
    std::vector<ChainMap> iso;  // iso[x]: base -> values[x], exact inverses exist
};

// every value is the base complex in a random basis; actions are the change
// of basis maps, so the diagram is strictly functorial and objectwise iso to
// the base
inline ConjugatedDiagram conjugated_diagram(std::mt19937_64& rng, const FiniteCategory& shape,
                                            const ChainComplex& base, Variance variance) {
    int top = base.top_degree();
    ConjugatedDiagram out;
    out.diagram.shape = shape;
    out.diagram.variance = variance;
    std::vector<std::vector<RatMatrix>> p(shape.objects()), pinv(shape.objects());
    for (int x = 0; x < shape.objects(); ++x) {
        p[x].resize(top + 1);
        pinv[x].resize(top + 1);
        for (int n = 0; n <= top; ++n) random_unimodular(rng, base.dim(n), p[x][n], pinv[x][n]);
        std::vector<RatMatrix> diffs;
        for (int n = 1; n <= top; ++n) diffs.push_back(p[x][n - 1] * base.diff(n) * pinv[x][n]);
        out.diagram.values.push_back(ChainComplex(base.dims(), std::move(diffs)));
        ChainMap iso;
        iso.blocks = p[x];
        out.iso.push_back(std::move(iso));
    }
    for (int a = 0; a < shape.arrow_count(); ++a) {
        int u = action_src_object(out.diagram, a);
        int v = action_dst_object(out.diagram, a);
        ChainMap act;
        for (int n = 0; n <= top; ++n) act.blocks.push_back(p[v][n] * pinv[u][n]);
        out.diagram.actions.push_back(std::move(act));
    }
    return out;
}

inline FinitePoset random_poset(std::mt19937_64& rng, int n, double density = 0.3) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::pair<int, int>> rel;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng) < density) rel.emplace_back(i, j);
    return FinitePoset(n, rel);
}

// 0 is a global minimum, n+1 a global maximum, random order in between
inline FinitePoset random_bounded_poset(std::mt19937_64& rng, int inner, double density = 0.3) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int n = inner + 2;
    std::vector<std::pair<int, int>> rel = {{0, n - 1}};
    for (int i = 1; i <= inner; ++i) {
        rel.emplace_back(0, i);
        rel.emplace_back(i, n - 1);
    }
    for (int i = 1; i <= inner; ++i)
        for (int j = i + 1; j <= inner; ++j)
            if (coin(rng) < density) rel.emplace_back(i, j);
    return FinitePoset(n, rel);
}

}  // namespace parcalc::testing
