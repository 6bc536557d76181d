#include "qcert/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace qcert {

SparseHermitian SparseHermitian::from_triplets(int dim, std::vector<Triplet> entries) {
    if (dim < 0) throw std::invalid_argument("SparseHermitian: negative dimension");
    // fold everything into the upper triangle
    for (auto& t : entries) {
        if (t.row > t.col) std::swap(t.row, t.col);
        if (t.row < 0 || t.col >= dim) throw std::out_of_range("SparseHermitian: index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseHermitian out;
    out.dim_ = dim;
    out.row_ptr_.assign(dim + 1, 0);
    out.col_.reserve(entries.size());
    out.values_.reserve(entries.size());
    for (size_t i = 0; i < entries.size();) {
        size_t j = i;
        double sum = 0.0;
        while (j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col) {
            sum += entries[j].value;
            ++j;
        }
        if (sum != 0.0) {
            out.col_.push_back(entries[i].col);
            out.values_.push_back(sum);
            ++out.row_ptr_[entries[i].row + 1];
        }
        i = j;
    }
    for (int r = 0; r < dim; ++r) out.row_ptr_[r + 1] += out.row_ptr_[r];
    return out;
}

void SparseHermitian::apply(const double* x, double* y) const {
    std::fill(y, y + dim_, 0.0);
    for (int r = 0; r < dim_; ++r) {
        double acc = 0.0;
        double xr = x[r];
        for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            int c = col_[p];
            double v = values_[p];
            acc += v * x[c];
            if (c != r) y[c] += v * xr;
        }
        y[r] += acc;
    }
}

Eigen::VectorXd SparseHermitian::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(dim_);
    apply(x.data(), y.data());
    return y;
}

Eigen::VectorXcd SparseHermitian::apply(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim_);
    for (int r = 0; r < dim_; ++r) {
        std::complex<double> acc(0.0, 0.0);
        std::complex<double> xr = x[r];
        for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            int c = col_[p];
            double v = values_[p];
            acc += v * x[c];
            if (c != r) y[c] += v * xr;
        }
        y[r] += acc;
    }
    return y;
}

SparseHermitian SparseHermitian::with_added_diagonal(const Eigen::VectorXd& d) const {
    if (d.size() != dim_) throw std::invalid_argument("with_added_diagonal: size mismatch");
    SparseHermitian out = *this;
    // diagonal entries may be absent; rebuild via triplets when any are missing
    std::vector<bool> has_diag(dim_, false);
    for (int r = 0; r < dim_; ++r) {
        for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            if (col_[p] == r) {
                out.values_[p] += d[r];
                has_diag[r] = true;
            }
        }
    }
    bool all = true;
    for (int r = 0; r < dim_; ++r) {
        if (!has_diag[r] && d[r] != 0.0) all = false;
    }
    if (all) return out;

    std::vector<Triplet> trips;
    trips.reserve(values_.size() + dim_);
    for (int r = 0; r < dim_; ++r) {
        for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            trips.push_back({r, col_[p], values_[p]});
        }
        trips.push_back({r, r, d[r]});
    }
    return from_triplets(dim_, std::move(trips));
}

Eigen::MatrixXd SparseHermitian::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int r = 0; r < dim_; ++r) {
        for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            m(r, col_[p]) = values_[p];
            m(col_[p], r) = values_[p];
        }
    }
    return m;
}

double SparseHermitian::norm_inf() const {
    std::vector<double> row_sum(dim_, 0.0);
    for (int r = 0; r < dim_; ++r) {
        for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            row_sum[r] += std::abs(values_[p]);
            if (col_[p] != r) row_sum[col_[p]] += std::abs(values_[p]);
        }
    }
    double m = 0.0;
    for (double v : row_sum) m = std::max(m, v);
    return m;
}

}  // namespace qcert
