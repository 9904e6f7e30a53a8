#include "spectral/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "spectral/error.hpp"
#include "spectral/simd/vec_ops.hpp"

namespace spectral {

SparseSymMatrix SparseSymMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    SparseSymMatrix m;
    m.n_ = n;
    // fold to upper triangle
    for (auto& t : triplets) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw ValidationError("sparse assembly: triplet index out of range");
        if (!std::isfinite(t.value))
            throw NumericError("sparse assembly: non-finite entry");
        if (t.row > t.col) std::swap(t.row, t.col);
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    // combine duplicates, then mirror
    std::vector<Triplet> upper;
    upper.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (!upper.empty() && upper.back().row == t.row && upper.back().col == t.col)
            upper.back().value += t.value;
        else
            upper.push_back(t);
    }
    std::vector<int> counts(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& t : upper) {
        ++counts[static_cast<std::size_t>(t.row) + 1];
        if (t.row != t.col) ++counts[static_cast<std::size_t>(t.col) + 1];
    }
    m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i)
        m.row_ptr_[static_cast<std::size_t>(i) + 1] =
            m.row_ptr_[static_cast<std::size_t>(i)] + counts[static_cast<std::size_t>(i) + 1];
    m.col_idx_.resize(static_cast<std::size_t>(m.row_ptr_[static_cast<std::size_t>(n)]));
    m.values_.resize(m.col_idx_.size());
    std::vector<int> next(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
    auto place = [&](int r, int c, double v) {
        const int k = next[static_cast<std::size_t>(r)]++;
        m.col_idx_[static_cast<std::size_t>(k)] = c;
        m.values_[static_cast<std::size_t>(k)] = v;
    };
    for (const auto& t : upper) {
        place(t.row, t.col, t.value);
        if (t.row != t.col) place(t.col, t.row, t.value);
    }
    // sort columns within each row
    for (int i = 0; i < n; ++i) {
        const int b = m.row_ptr_[static_cast<std::size_t>(i)];
        const int e = m.row_ptr_[static_cast<std::size_t>(i) + 1];
        std::vector<std::pair<int, double>> row;
        row.reserve(static_cast<std::size_t>(e - b));
        for (int k = b; k < e; ++k)
            row.emplace_back(m.col_idx_[static_cast<std::size_t>(k)],
                             m.values_[static_cast<std::size_t>(k)]);
        std::sort(row.begin(), row.end());
        for (int k = b; k < e; ++k) {
            m.col_idx_[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k - b)].first;
            m.values_[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k - b)].second;
        }
    }
    m.diag_.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) m.diag_[static_cast<std::size_t>(i)] = m.entry(i, i);
    return m;
}

SparseSymMatrix SparseSymMatrix::diagonal(std::vector<double> diag) {
    SparseSymMatrix m;
    const int n = static_cast<int>(diag.size());
    m.n_ = n;
    m.row_ptr_.resize(static_cast<std::size_t>(n) + 1);
    m.col_idx_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i <= n; ++i) m.row_ptr_[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < n; ++i) m.col_idx_[static_cast<std::size_t>(i)] = i;
    m.values_ = diag;
    m.diag_ = std::move(diag);
    return m;
}

bool SparseSymMatrix::is_diagonal() const {
    return nnz() == static_cast<std::size_t>(n_) &&
           std::equal(col_idx_.begin(), col_idx_.end(), row_ptr_.begin());
}

double SparseSymMatrix::entry(int i, int j) const {
    const int b = row_ptr_[static_cast<std::size_t>(i)];
    const int e = row_ptr_[static_cast<std::size_t>(i) + 1];
    const auto it = std::lower_bound(col_idx_.begin() + b, col_idx_.begin() + e, j);
    if (it == col_idx_.begin() + e || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

double SparseSymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void SparseSymMatrix::multiply(const double* x, double* y) const {
    simd::spmv(row_ptr_.data(), col_idx_.data(), values_.data(), n_, x, y);
}

ScalarField SparseSymMatrix::multiply(const ScalarField& x) const {
    ScalarField y(static_cast<std::size_t>(n_));
    multiply(x.data(), y.data());
    return y;
}

double SparseSymMatrix::quadratic_form(const ScalarField& x) const {
    ScalarField y = multiply(x);
    return simd::dot(x.data(), y.data(), x.size());
}

void SparseSymMatrix::write_matrix_market(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write matrix file: " + path);
    std::size_t lower_nnz = 0;
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            if (col_idx_[static_cast<std::size_t>(k)] <= i) ++lower_nnz;
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << n_ << " " << n_ << " " << lower_nnz << "\n";
    char buf[64];
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
            const int j = col_idx_[static_cast<std::size_t>(k)];
            if (j > i) continue;
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i + 1, j + 1,
                          values_[static_cast<std::size_t>(k)]);
            out << buf;
        }
    }
    if (!out) throw InputError("I/O failure writing " + path);
}

}  // namespace spectral
