#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace qcert {

// Sparse Hermitian operator over a basis sector. In the occupation basis all
// matrix elements of the operators built here are real, so the storage is a
// real symmetric matrix: only the upper triangle (row <= col) is kept and the
// lower triangle is implied.
class SparseHermitian {
  public:
    struct Triplet {
        int row;
        int col;
        double value;
    };

    SparseHermitian() = default;

    // Builds from (row, col, value) entries; duplicates are summed, entries
    // are mirrored into the upper triangle.
    static SparseHermitian from_triplets(int dim, std::vector<Triplet> entries);

    int dimension() const { return dim_; }
    std::int64_t stored_nonzeros() const { return std::int64_t(values_.size()); }

    // y = A x with the full symmetric action.
    void apply(const double* x, double* y) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

    // A + diag(d), preserving sparsity structure.
    SparseHermitian with_added_diagonal(const Eigen::VectorXd& d) const;

    Eigen::MatrixXd dense() const;

    // Infinity-norm estimate from the stored entries (row sums of |A|).
    double norm_inf() const;

  private:
    int dim_ = 0;
    // CSR over the upper triangle
    std::vector<int> row_ptr_;
    std::vector<int> col_;
    std::vector<double> values_;
};

}  // namespace qcert
