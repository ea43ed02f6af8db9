#pragma once

// Small dense and sparse kernels used by the accelerators: incremental
// skinny-QR maintenance, triangular solves, CSR products and a power
// iteration for spectral-radius estimates.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace boostconv {

using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Square upper-triangular factor. The strictly-lower part is kept at zero.
class UpperTriangular {
public:
    UpperTriangular() = default;
    explicit UpperTriangular(Eigen::Index m) : data_(DenseMatrix::Zero(m, m)) {}
    /// Takes the upper triangle of `m`; throws if `m` is not square.
    explicit UpperTriangular(const DenseMatrix& m);

    [[nodiscard]] Eigen::Index size() const { return data_.rows(); }
    [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
    [[nodiscard]] const DenseMatrix& dense() const { return data_; }
    [[nodiscard]] DenseVector diagonal() const { return data_.diagonal(); }

    /// Bitwise equality of shape and entries.
    bool operator==(const UpperTriangular& other) const {
        return data_.rows() == other.data_.rows() && data_ == other.data_;
    }

private:
    DenseMatrix data_;
};

/// Thin QR factors of an n x m matrix: Q has orthonormal columns.
struct QrFactors {
    DenseMatrix q;
    UpperTriangular r;

    [[nodiscard]] Eigen::Index cols() const { return q.cols(); }
};

struct SparseMatrixCSR {
    std::int64_t n_rows = 0;
    std::int64_t n_cols = 0;
    std::vector<std::int64_t> row_ptr{0};
    std::vector<std::int64_t> col_idx;
    std::vector<double> values;

    [[nodiscard]] std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

    /// Checks the CSR structural invariants; throws DimensionError on violation.
    void validate() const;

    /// Builds a CSR matrix from 0-based triplets. Duplicates are summed and
    /// each row is sorted by column.
    static SparseMatrixCSR from_triplets(std::int64_t n_rows, std::int64_t n_cols,
                                         std::span<const std::int64_t> rows,
                                         std::span<const std::int64_t> cols,
                                         std::span<const double> vals);

    static SparseMatrixCSR identity(std::int64_t n);

    [[nodiscard]] DenseVector diagonal() const;
    [[nodiscard]] DenseMatrix to_dense() const;
};

/// y = A x, accumulated row by row in column order.
DenseVector spmv(const SparseMatrixCSR& a, const DenseVector& x);

/// Solves R c = y by back substitution.
DenseVector back_solve(const UpperTriangular& r, const DenseVector& y);

/// Gram-Schmidt append of `v` to the factors (q, r).
///
/// Returns std::nullopt when the new column is numerically dependent, i.e.
/// the component of `v` orthogonal to range(q) has norm below tau * |v|, or
/// when v is zero. A second orthogonalization pass is made whenever the
/// first pass removes more than half of |v|.
std::optional<QrFactors> orth_append(const QrFactors& factors, const DenseVector& v, double tau);

/// Removes the first column of the factored matrix using Givens rotations
/// on the Hessenberg block R[:, 1:]. Requires at least two columns.
QrFactors qr_downdate_first(const QrFactors& factors);

struct PowerIterationResult {
    double estimate = 0.0;
    int iterations = 0;
    bool converged = false;
};

using LinearOperator = std::function<DenseVector(const DenseVector&)>;

inline constexpr std::uint64_t kDefaultPowerSeed = 20240917;

/// Estimates the dominant eigenvalue magnitude of `apply` by power iteration
/// from a seeded random start, using the two-step growth |M^2 v|^(1/2) of the
/// normalized iterate. Convergence means successive estimates differ by less
/// than `tol`; otherwise the last estimate is returned unflagged.
PowerIterationResult power_iteration(const LinearOperator& apply, Eigen::Index n, int max_it,
                                     double tol, std::uint64_t seed = kDefaultPowerSeed);

/// Deterministic uniform[-1, 1) vector from a 64-bit Mersenne twister.
DenseVector seeded_uniform_vector(Eigen::Index n, std::uint64_t seed);

bool all_finite(const DenseVector& v);

}  // namespace boostconv
