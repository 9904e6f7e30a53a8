#pragma once

#include <string>
#include <vector>

#include "spectral/mesh.hpp"

namespace spectral {

// Symmetric sparse matrix in CSR form. Both triangles are stored; assembly
// accumulates the upper triangle and mirrors it, so entry(i,j) == entry(j,i)
// holds exactly.
class SparseSymMatrix {
  public:
    struct Triplet {
        int row;
        int col;
        double value;
    };

    SparseSymMatrix() = default;

    // Duplicate triplets are summed. Entries with row > col are folded onto
    // the upper triangle before mirroring, which keeps symmetry exact even
    // when both (i,j) and (j,i) contributions are pushed.
    static SparseSymMatrix from_triplets(int n, std::vector<Triplet> triplets);

    static SparseSymMatrix diagonal(std::vector<double> diag);

    int dim() const { return n_; }
    std::size_t nnz() const { return values_.size(); }
    bool is_diagonal() const;

    double entry(int i, int j) const;
    const std::vector<double>& diag() const { return diag_; }
    double max_abs() const;

    // y = A x
    void multiply(const double* x, double* y) const;
    ScalarField multiply(const ScalarField& x) const;

    double quadratic_form(const ScalarField& x) const;  // x^T A x

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    // Matrix Market coordinate format (general symmetric, lower triangle).
    void write_matrix_market(const std::string& path) const;

  private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
    std::vector<double> diag_;
};

}  // namespace spectral
