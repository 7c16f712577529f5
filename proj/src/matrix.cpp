#include "parcalc/matrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace parcalc {

namespace {

void normalize_column(RatMatrix::Column& col, int nrows) {
    std::sort(col.begin(), col.end(),
              [](const RatMatrix::Entry& a, const RatMatrix::Entry& b) { return a.first < b.first; });
    RatMatrix::Column out;
    out.reserve(col.size());
    int prev = -1;
    for (auto& [r, v] : col) {
        if (r < 0 || r >= nrows) throw std::invalid_argument("RatMatrix: row index out of range");
        if (r == prev) throw std::invalid_argument("RatMatrix: duplicate entry");
        prev = r;
        if (!v.is_zero()) out.emplace_back(r, v);
    }
    col.swap(out);
}

}  // namespace

RatMatrix::RatMatrix(int nrows, int ncols, std::vector<Column> cols)
    : nrows_(nrows), ncols_(ncols), cols_(std::move(cols)) {
    if (nrows < 0 || ncols < 0) throw std::invalid_argument("RatMatrix: negative dimension");
    if (static_cast<int>(cols_.size()) != ncols)
        throw std::invalid_argument("RatMatrix: column count mismatch");
    for (auto& col : cols_) normalize_column(col, nrows_);
}

RatMatrix RatMatrix::zero(int nrows, int ncols) {
    return RatMatrix(nrows, ncols, std::vector<Column>(ncols));
}

RatMatrix RatMatrix::identity(int n) {
    std::vector<Column> cols(n);
    for (int j = 0; j < n; ++j) cols[j] = {{j, Rational(1)}};
    return RatMatrix(n, n, std::move(cols));
}

RatMatrix RatMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
    const int nr = static_cast<int>(rows.size());
    const int nc = nr == 0 ? 0 : static_cast<int>(rows[0].size());
    std::vector<Column> cols(nc);
    for (int i = 0; i < nr; ++i) {
        if (static_cast<int>(rows[i].size()) != nc)
            throw std::invalid_argument("RatMatrix: ragged rows");
        for (int j = 0; j < nc; ++j)
            if (!rows[i][j].is_zero()) cols[j].emplace_back(i, rows[i][j]);
    }
    return RatMatrix(nr, nc, std::move(cols));
}

RatMatrix RatMatrix::from_columns(int nrows, const std::vector<std::vector<Rational>>& cols) {
    std::vector<Column> cc(cols.size());
    for (size_t j = 0; j < cols.size(); ++j) {
        if (static_cast<int>(cols[j].size()) != nrows)
            throw std::invalid_argument("RatMatrix: column length mismatch");
        for (int i = 0; i < nrows; ++i)
            if (!cols[j][i].is_zero()) cc[j].emplace_back(i, cols[j][i]);
    }
    return RatMatrix(nrows, static_cast<int>(cols.size()), std::move(cc));
}

Rational RatMatrix::at(int i, int j) const {
    if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_)
        throw std::out_of_range("RatMatrix: index out of range");
    const Column& col = cols_[j];
    auto it = std::lower_bound(col.begin(), col.end(), i,
                               [](const Entry& e, int row) { return e.first < row; });
    if (it != col.end() && it->first == i) return it->second;
    return Rational(0);
}

std::vector<Rational> RatMatrix::column_dense(int j) const {
    std::vector<Rational> v(nrows_, Rational(0));
    for (const auto& [r, x] : cols_[j]) v[r] = x;
    return v;
}

std::vector<std::vector<Rational>> RatMatrix::to_rows() const {
    std::vector<std::vector<Rational>> rows(nrows_, std::vector<Rational>(ncols_, Rational(0)));
    for (int j = 0; j < ncols_; ++j)
        for (const auto& [r, v] : cols_[j]) rows[r][j] = v;
    return rows;
}

RatMatrix RatMatrix::transpose() const {
    std::vector<Column> cols(nrows_);
    for (int j = 0; j < ncols_; ++j)
        for (const auto& [r, v] : cols_[j]) cols[r].emplace_back(j, v);
    return RatMatrix(ncols_, nrows_, std::move(cols));
}

bool RatMatrix::is_zero() const {
    for (const auto& c : cols_)
        if (!c.empty()) return false;
    return true;
}

long long RatMatrix::nnz() const {
    long long n = 0;
    for (const auto& c : cols_) n += static_cast<long long>(c.size());
    return n;
}

std::vector<Rational> RatMatrix::apply(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != ncols_)
        throw std::invalid_argument("RatMatrix: apply length mismatch");
    std::vector<Rational> y(nrows_, Rational(0));
    for (int j = 0; j < ncols_; ++j) {
        if (x[j].is_zero()) continue;
        for (const auto& [r, v] : cols_[j]) y[r] += v * x[j];
    }
    return y;
}

bool operator==(const RatMatrix& a, const RatMatrix& b) {
    return a.nrows_ == b.nrows_ && a.ncols_ == b.ncols_ && a.cols_ == b.cols_;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    if (a.ncols_ != b.nrows_) throw std::invalid_argument("RatMatrix: product shape mismatch");
    std::vector<RatMatrix::Column> cols(b.ncols_);
    std::vector<Rational> acc(a.nrows_, Rational(0));
    std::vector<int> touched;
    for (int j = 0; j < b.ncols_; ++j) {
        touched.clear();
        for (const auto& [k, v] : b.cols_[j]) {
            for (const auto& [r, w] : a.cols_[k]) {
                if (acc[r].is_zero()) touched.push_back(r);
                acc[r] += w * v;
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int r : touched) {
            if (!acc[r].is_zero()) cols[j].emplace_back(r, acc[r]);
            acc[r] = Rational(0);
        }
    }
    return RatMatrix(a.nrows_, b.ncols_, std::move(cols));
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
    if (a.nrows_ != b.nrows_ || a.ncols_ != b.ncols_)
        throw std::invalid_argument("RatMatrix: sum shape mismatch");
    std::vector<RatMatrix::Column> cols(a.ncols_);
    for (int j = 0; j < a.ncols_; ++j) {
        const auto& ca = a.cols_[j];
        const auto& cb = b.cols_[j];
        auto& out = cols[j];
        size_t i = 0, k = 0;
        while (i < ca.size() || k < cb.size()) {
            if (k == cb.size() || (i < ca.size() && ca[i].first < cb[k].first)) {
                out.push_back(ca[i++]);
            } else if (i == ca.size() || cb[k].first < ca[i].first) {
                out.push_back(cb[k++]);
            } else {
                Rational s = ca[i].second + cb[k].second;
                if (!s.is_zero()) out.emplace_back(ca[i].first, s);
                ++i;
                ++k;
            }
        }
    }
    return RatMatrix(a.nrows_, a.ncols_, std::move(cols));
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) { return a + (-b); }

RatMatrix RatMatrix::operator-() const { return scaled(Rational(-1)); }

RatMatrix RatMatrix::scaled(const Rational& c) const {
    if (c.is_zero()) return zero(nrows_, ncols_);
    std::vector<Column> cols(cols_);
    for (auto& col : cols)
        for (auto& [r, v] : col) v *= c;
    return RatMatrix(nrows_, ncols_, std::move(cols));
}

RatMatrix RatMatrix::hcat(const RatMatrix& a, const RatMatrix& b) {
    if (a.nrows_ != b.nrows_) throw std::invalid_argument("RatMatrix: hcat row mismatch");
    std::vector<Column> cols = a.cols_;
    cols.insert(cols.end(), b.cols_.begin(), b.cols_.end());
    return RatMatrix(a.nrows_, a.ncols_ + b.ncols_, std::move(cols));
}

RatMatrix RatMatrix::block_diag(const RatMatrix& a, const RatMatrix& b) {
    std::vector<Column> cols = a.cols_;
    for (const auto& col : b.cols_) {
        Column shifted;
        shifted.reserve(col.size());
        for (const auto& [r, v] : col) shifted.emplace_back(r + a.nrows_, v);
        cols.push_back(std::move(shifted));
    }
    return RatMatrix(a.nrows_ + b.nrows_, a.ncols_ + b.ncols_, std::move(cols));
}

// ---------------------------------------------------------------------------
// Fraction-free (Bareiss) elimination.  Rows are scaled to integers first;
// after step k every entry is a (k+1)-minor of the scaled matrix, so growth is
// bounded and the single-step division is always exact.

namespace {

struct Echelon {
    std::vector<std::vector<Int>> rows;  // dense integer echelon rows
    std::vector<int> pivot_col;          // ascending, one per echelon row
    int width = 0;
};

Echelon bareiss_echelon(const RatMatrix& m, const std::vector<Rational>* aug) {
    const int nr = m.nrows();
    const int nc = m.ncols();
    const int w = nc + (aug ? 1 : 0);
    if (aug && static_cast<int>(aug->size()) != nr)
        throw std::invalid_argument("RatMatrix: rhs length mismatch");

    std::vector<std::vector<Rational>> dense(nr, std::vector<Rational>(w, Rational(0)));
    for (int j = 0; j < nc; ++j)
        for (const auto& [r, v] : m.column(j)) dense[r][j] = v;
    if (aug)
        for (int i = 0; i < nr; ++i) dense[i][nc] = (*aug)[i];

    std::vector<std::vector<Int>> rows(nr, std::vector<Int>(w, Int(0)));
    for (int i = 0; i < nr; ++i) {
        Int lcm = 1;
        for (int j = 0; j < w; ++j)
            if (!dense[i][j].is_zero())
                lcm = boost::multiprecision::lcm(lcm, dense[i][j].denominator());
        for (int j = 0; j < w; ++j)
            if (!dense[i][j].is_zero())
                rows[i][j] = dense[i][j].numerator() * (lcm / dense[i][j].denominator());
    }

    Echelon e;
    e.width = w;
    int r = 0;
    Int prev = 1;
    for (int c = 0; c < w && r < nr; ++c) {
        int sel = -1;
        for (int i = r; i < nr; ++i)
            if (rows[i][c] != 0) { sel = i; break; }
        if (sel < 0) continue;
        std::swap(rows[r], rows[sel]);
        const Int piv = rows[r][c];
        for (int i = r + 1; i < nr; ++i) {
            const Int f = rows[i][c];
            for (int j = c; j < w; ++j) rows[i][j] = (piv * rows[i][j] - f * rows[r][j]) / prev;
        }
        prev = piv;
        e.pivot_col.push_back(c);
        ++r;
    }
    rows.resize(r);
    e.rows = std::move(rows);
    return e;
}

// scale a rational vector to a primitive integer vector (positive scale)
void make_primitive(std::vector<Rational>& v) {
    Int lcm = 1;
    for (const auto& x : v)
        if (!x.is_zero()) lcm = boost::multiprecision::lcm(lcm, x.denominator());
    Int gcd = 0;
    std::vector<Int> ints(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero()) continue;
        ints[i] = v[i].numerator() * (lcm / v[i].denominator());
        gcd = boost::multiprecision::gcd(gcd, boost::multiprecision::abs(ints[i]));
    }
    if (gcd == 0) return;
    for (size_t i = 0; i < v.size(); ++i) v[i] = Rational(ints[i] / gcd);
}

}  // namespace

int rank_with_clearing(const RatMatrix& m, const std::vector<char>* skip_cols,
                       std::vector<int>* pivot_rows_out) {
    std::unordered_map<int, int> owner;  // pivot row -> stored column index
    std::vector<RatMatrix::Column> stored;
    RatMatrix::Column cur, tmp;
    int rk = 0;
    for (int j = 0; j < m.ncols(); ++j) {
        if (skip_cols && (*skip_cols)[j]) continue;
        cur = m.column(j);
        while (!cur.empty()) {
            auto it = owner.find(cur.back().first);
            if (it == owner.end()) break;
            const RatMatrix::Column& other = stored[it->second];
            const Rational f = cur.back().second / other.back().second;
            tmp.clear();
            tmp.reserve(cur.size() + other.size());
            size_t a = 0, b = 0;
            while (a < cur.size() || b < other.size()) {
                if (b == other.size() || (a < cur.size() && cur[a].first < other[b].first)) {
                    tmp.push_back(cur[a++]);
                } else if (a == cur.size() || other[b].first < cur[a].first) {
                    tmp.emplace_back(other[b].first, -(f * other[b].second));
                    ++b;
                } else {
                    Rational s = cur[a].second - f * other[b].second;
                    if (!s.is_zero()) tmp.emplace_back(cur[a].first, s);
                    ++a;
                    ++b;
                }
            }
            cur.swap(tmp);
        }
        if (!cur.empty()) {
            owner.emplace(cur.back().first, static_cast<int>(stored.size()));
            if (pivot_rows_out) pivot_rows_out->push_back(cur.back().first);
            stored.push_back(std::move(cur));
            cur = RatMatrix::Column();
            ++rk;
        }
    }
    return rk;
}

int rank(const RatMatrix& m) { return rank_with_clearing(m, nullptr, nullptr); }

std::vector<int> pivot_columns(const RatMatrix& m) {
    return bareiss_echelon(m, nullptr).pivot_col;
}

std::vector<std::vector<Rational>> kernel_basis(const RatMatrix& m) {
    const int nc = m.ncols();
    Echelon e = bareiss_echelon(m, nullptr);
    const int npiv = static_cast<int>(e.pivot_col.size());
    std::vector<char> is_pivot(nc, 0);
    for (int c : e.pivot_col) is_pivot[c] = 1;

    std::vector<std::vector<Rational>> basis;
    basis.reserve(nc - npiv);
    for (int f = 0; f < nc; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> x(nc, Rational(0));
        x[f] = Rational(1);
        for (int i = npiv - 1; i >= 0; --i) {
            const int c = e.pivot_col[i];
            if (c > f) continue;  // echelon row supported on columns >= c > f only
            Rational s(0);
            for (int j = c + 1; j < nc; ++j) {
                if (x[j].is_zero() || e.rows[i][j] == 0) continue;
                s += Rational(e.rows[i][j]) * x[j];
            }
            x[c] = -s / Rational(e.rows[i][c]);
        }
        make_primitive(x);
        basis.push_back(std::move(x));
    }
    return basis;
}

std::vector<std::vector<Rational>> image_basis(const RatMatrix& m) {
    std::vector<std::vector<Rational>> out;
    for (int c : pivot_columns(m)) out.push_back(m.column_dense(c));
    return out;
}

std::optional<std::vector<Rational>> solve_consistent(const RatMatrix& m,
                                                      const std::vector<Rational>& b) {
    const int nc = m.ncols();
    Echelon e = bareiss_echelon(m, &b);
    if (!e.pivot_col.empty() && e.pivot_col.back() == nc) return std::nullopt;
    std::vector<Rational> x(nc, Rational(0));
    for (int i = static_cast<int>(e.pivot_col.size()) - 1; i >= 0; --i) {
        const int c = e.pivot_col[i];
        Rational s = Rational(e.rows[i][nc]);
        for (int j = c + 1; j < nc; ++j) {
            if (x[j].is_zero() || e.rows[i][j] == 0) continue;
            s -= Rational(e.rows[i][j]) * x[j];
        }
        x[c] = s / Rational(e.rows[i][c]);
    }
    return x;
}

std::optional<RatMatrix> solve_consistent_cols(const RatMatrix& m, const RatMatrix& rhs) {
    if (m.nrows() != rhs.nrows()) throw std::invalid_argument("RatMatrix: rhs row mismatch");
    std::vector<std::vector<Rational>> xs;
    xs.reserve(rhs.ncols());
    for (int j = 0; j < rhs.ncols(); ++j) {
        auto x = solve_consistent(m, rhs.column_dense(j));
        if (!x) return std::nullopt;
        xs.push_back(std::move(*x));
    }
    return RatMatrix::from_columns(m.ncols(), xs);
}

}  // namespace parcalc
