#pragma once

#include "parcalc/rational.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace parcalc {

// Immutable sparse matrix over Q.  Entries are kept per column, sorted by row
// index, zeros never stored.  All reductions return fresh objects.
class RatMatrix {
public:
    using Entry = std::pair<int, Rational>;  // (row, value)
    using Column = std::vector<Entry>;

    RatMatrix() : nrows_(0), ncols_(0) {}
    RatMatrix(int nrows, int ncols, std::vector<Column> cols);

    static RatMatrix zero(int nrows, int ncols);
    static RatMatrix identity(int n);
    static RatMatrix from_rows(const std::vector<std::vector<Rational>>& rows);
    // dense column vectors; nrows given explicitly so empty column lists work
    static RatMatrix from_columns(int nrows, const std::vector<std::vector<Rational>>& cols);

    int nrows() const { return nrows_; }
    int ncols() const { return ncols_; }
    const Column& column(int j) const { return cols_[j]; }
    Rational at(int i, int j) const;
    std::vector<Rational> column_dense(int j) const;
    std::vector<std::vector<Rational>> to_rows() const;

    RatMatrix transpose() const;
    bool is_zero() const;
    long long nnz() const;

    std::vector<Rational> apply(const std::vector<Rational>& x) const;  // this * x

    friend bool operator==(const RatMatrix& a, const RatMatrix& b);
    friend bool operator!=(const RatMatrix& a, const RatMatrix& b) { return !(a == b); }
    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
    RatMatrix operator-() const;
    RatMatrix scaled(const Rational& c) const;

    static RatMatrix hcat(const RatMatrix& a, const RatMatrix& b);
    static RatMatrix block_diag(const RatMatrix& a, const RatMatrix& b);

private:
    int nrows_, ncols_;
    std::vector<Column> cols_;
};

// Rank of the column space.  Uses sparse column reduction (exact over Q);
// suited to large boundary matrices as well as small dense ones.
int rank(const RatMatrix& m);

// Column reduction with an optional skip mask over columns (the clearing
// optimization for chain complexes) and optional report of pivot rows.
int rank_with_clearing(const RatMatrix& m, const std::vector<char>* skip_cols,
                       std::vector<int>* pivot_rows_out);

// Indices of a maximal set of columns that are independent from their
// predecessors; deterministic (fraction-free elimination, left to right).
std::vector<int> pivot_columns(const RatMatrix& m);

// Basis of { x : m x = 0 }; vectors are primitive integer vectors ordered by
// their free column.  Count = ncols - rank.
std::vector<std::vector<Rational>> kernel_basis(const RatMatrix& m);

// The columns of m at pivot_columns(m); spans the column space.
std::vector<std::vector<Rational>> image_basis(const RatMatrix& m);

// One solution of m x = b with free variables set to zero, or nullopt when b
// is outside the image.  Throws on length mismatch.
std::optional<std::vector<Rational>> solve_consistent(const RatMatrix& m,
                                                      const std::vector<Rational>& b);

// Columnwise solve: X with m X = rhs, or nullopt if any column fails.
std::optional<RatMatrix> solve_consistent_cols(const RatMatrix& m, const RatMatrix& rhs);

}  // namespace parcalc
