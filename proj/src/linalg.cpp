#include "boostconv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "boostconv/error.hpp"

namespace boostconv {

UpperTriangular::UpperTriangular(const DenseMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("UpperTriangular: matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected square");
    }
    data_ = m.triangularView<Eigen::Upper>();
}

bool all_finite(const DenseVector& v) { return v.allFinite(); }

// ---------------------------------------------------------------------------
// Sparse

void SparseMatrixCSR::validate() const {
    if (n_rows < 0 || n_cols < 0) throw DimensionError("CSR: negative dimension");
    if (static_cast<std::int64_t>(row_ptr.size()) != n_rows + 1)
        throw DimensionError("CSR: row_ptr has wrong length");
    if (row_ptr.front() != 0) throw DimensionError("CSR: row_ptr[0] != 0");
    if (row_ptr.back() != nnz()) throw DimensionError("CSR: row_ptr[n_rows] != nnz");
    if (col_idx.size() != values.size()) throw DimensionError("CSR: col_idx/values size mismatch");
    for (std::int64_t i = 0; i < n_rows; ++i) {
        if (row_ptr[i + 1] < row_ptr[i]) throw DimensionError("CSR: row_ptr decreasing");
        for (auto p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            if (col_idx[p] < 0 || col_idx[p] >= n_cols)
                throw DimensionError("CSR: column index out of range in row " + std::to_string(i));
            if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1])
                throw DimensionError("CSR: columns not strictly increasing in row " +
                                     std::to_string(i));
        }
    }
}

SparseMatrixCSR SparseMatrixCSR::from_triplets(std::int64_t n_rows, std::int64_t n_cols,
                                               std::span<const std::int64_t> rows,
                                               std::span<const std::int64_t> cols,
                                               std::span<const double> vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw DimensionError("from_triplets: triplet arrays differ in length");
    if (n_rows < 0 || n_cols < 0) throw DimensionError("from_triplets: negative dimension");
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t] < 0 || rows[t] >= n_rows || cols[t] < 0 || cols[t] >= n_cols)
            throw DimensionError("from_triplets: entry (" + std::to_string(rows[t]) + "," +
                                 std::to_string(cols[t]) + ") out of bounds");
    }

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Stable so that duplicates are summed in file order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
    });

    SparseMatrixCSR a;
    a.n_rows = n_rows;
    a.n_cols = n_cols;
    a.row_ptr.assign(static_cast<std::size_t>(n_rows) + 1, 0);
    for (std::size_t t = 0; t < order.size(); ++t) {
        const auto k = order[t];
        if (t > 0 && rows[order[t - 1]] == rows[k] && cols[order[t - 1]] == cols[k]) {
            a.values.back() += vals[k];
            continue;
        }
        a.col_idx.push_back(cols[k]);
        a.values.push_back(vals[k]);
        ++a.row_ptr[rows[k] + 1];
    }
    std::partial_sum(a.row_ptr.begin(), a.row_ptr.end(), a.row_ptr.begin());
    return a;
}

SparseMatrixCSR SparseMatrixCSR::identity(std::int64_t n) {
    SparseMatrixCSR a;
    a.n_rows = a.n_cols = n;
    a.row_ptr.resize(static_cast<std::size_t>(n) + 1);
    std::iota(a.row_ptr.begin(), a.row_ptr.end(), std::int64_t{0});
    a.col_idx.resize(static_cast<std::size_t>(n));
    std::iota(a.col_idx.begin(), a.col_idx.end(), std::int64_t{0});
    a.values.assign(static_cast<std::size_t>(n), 1.0);
    return a;
}

DenseVector SparseMatrixCSR::diagonal() const {
    DenseVector d = DenseVector::Zero(std::min(n_rows, n_cols));
    for (std::int64_t i = 0; i < d.size(); ++i) {
        for (auto p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            if (col_idx[p] == i) d[i] = values[p];
        }
    }
    return d;
}

DenseMatrix SparseMatrixCSR::to_dense() const {
    DenseMatrix m = DenseMatrix::Zero(n_rows, n_cols);
    for (std::int64_t i = 0; i < n_rows; ++i) {
        for (auto p = row_ptr[i]; p < row_ptr[i + 1]; ++p) m(i, col_idx[p]) += values[p];
    }
    return m;
}

DenseVector spmv(const SparseMatrixCSR& a, const DenseVector& x) {
    if (x.size() != a.n_cols) {
        throw DimensionError("spmv: matrix has " + std::to_string(a.n_cols) +
                             " columns, vector has " + std::to_string(x.size()) + " entries");
    }
    DenseVector y(a.n_rows);
    for (std::int64_t i = 0; i < a.n_rows; ++i) {
        double sum = 0.0;
        for (auto p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) sum += a.values[p] * x[a.col_idx[p]];
        y[i] = sum;
    }
    return y;
}

// ---------------------------------------------------------------------------
// Dense triangular / QR

DenseVector back_solve(const UpperTriangular& r, const DenseVector& y) {
    const auto m = r.size();
    if (y.size() != m) {
        throw DimensionError("back_solve: factor is " + std::to_string(m) + "x" +
                             std::to_string(m) + ", rhs has " + std::to_string(y.size()));
    }
    DenseVector c(m);
    for (auto i = m - 1; i >= 0; --i) {
        const double diag = r(i, i);
        if (diag == 0.0) {
            throw SingularFactorError("back_solve: zero diagonal entry at " + std::to_string(i));
        }
        double sum = y[i];
        for (auto j = i + 1; j < m; ++j) sum -= r(i, j) * c[j];
        c[i] = sum / diag;
    }
    return c;
}

std::optional<QrFactors> orth_append(const QrFactors& factors, const DenseVector& v, double tau) {
    const auto m = factors.q.cols();
    if (factors.r.size() != m) throw DimensionError("orth_append: Q and R column counts differ");
    if (m > 0 && factors.q.rows() != v.size())
        throw DimensionError("orth_append: column length does not match Q");
    if (v.size() < m + 1) throw DimensionError("orth_append: no room for another column");
    if (!(tau > 0.0)) throw Error("orth_append: tau must be positive");
    if (!v.allFinite()) throw NonFiniteError("orth_append: non-finite column");

    const double v_norm = v.norm();
    if (v_norm == 0.0) return std::nullopt;

    DenseVector coeffs = DenseVector::Zero(m);
    DenseVector q_new = v;
    if (m > 0) {
        coeffs = factors.q.transpose() * v;
        q_new.noalias() -= factors.q * coeffs;
        if (q_new.norm() < 0.5 * v_norm) {
            const DenseVector again = factors.q.transpose() * q_new;
            q_new.noalias() -= factors.q * again;
            coeffs += again;
        }
    }
    const double q_norm = q_new.norm();
    if (q_norm < tau * v_norm) return std::nullopt;

    QrFactors out;
    out.q.resize(v.size(), m + 1);
    if (m > 0) out.q.leftCols(m) = factors.q;
    out.q.col(m) = q_new / q_norm;

    DenseMatrix r = DenseMatrix::Zero(m + 1, m + 1);
    if (m > 0) {
        r.topLeftCorner(m, m) = factors.r.dense();
        r.col(m).head(m) = coeffs;
    }
    r(m, m) = q_norm;
    out.r = UpperTriangular(r);
    return out;
}

QrFactors qr_downdate_first(const QrFactors& factors) {
    const auto m = factors.q.cols();
    if (factors.r.size() != m) throw DimensionError("qr_downdate_first: Q and R column counts differ");
    if (m < 2) throw DimensionError("qr_downdate_first: need at least two columns");

    // Upper Hessenberg m x (m-1) block.
    DenseMatrix h = factors.r.dense().rightCols(m - 1);
    DenseMatrix q = factors.q;
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
        const double a = h(j, j);
        const double b = h(j + 1, j);
        const double radius = std::hypot(a, b);
        const double c = a / radius;
        const double s = b / radius;
        for (auto l = j + 1; l < m - 1; ++l) {
            const double top = h(j, l);
            const double bottom = h(j + 1, l);
            h(j, l) = c * top + s * bottom;
            h(j + 1, l) = -s * top + c * bottom;
        }
        h(j, j) = radius;
        h(j + 1, j) = 0.0;

        const DenseVector qj = q.col(j);
        q.col(j) = c * qj + s * q.col(j + 1);
        q.col(j + 1) = -s * qj + c * q.col(j + 1);
    }
    return QrFactors{q.leftCols(m - 1), UpperTriangular(DenseMatrix(h.topRows(m - 1)))};
}

// ---------------------------------------------------------------------------
// Power iteration

DenseVector seeded_uniform_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    DenseVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // 53 high bits -> [0, 1), portable across standard libraries.
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        v[i] = 2.0 * u - 1.0;
    }
    return v;
}

PowerIterationResult power_iteration(const LinearOperator& apply, Eigen::Index n, int max_it,
                                     double tol, std::uint64_t seed) {
    if (max_it < 1) throw Error("power_iteration: max_it must be >= 1");
    if (n < 1) throw DimensionError("power_iteration: dimension must be >= 1");

    const auto checked = [&](const DenseVector& v) {
        DenseVector w = apply(v);
        if (w.size() != n) throw DimensionError("power_iteration: operator changed dimension");
        return w;
    };

    DenseVector v = seeded_uniform_vector(n, seed);
    v /= v.norm();

    // Two applications per sweep: |M^2 v|^(1/2) also converges when the
    // dominant eigenvalues are a +/- rho pair, where the plain quotient stalls.
    PowerIterationResult result;
    double previous = 0.0;
    for (int it = 1; it <= max_it; ++it) {
        const DenseVector z = checked(checked(v));
        result.iterations = it;
        const double z_norm = z.norm();
        result.estimate = std::sqrt(z_norm);
        if (z_norm == 0.0) {
            result.converged = true;
            return result;
        }
        if (it > 1 && std::abs(result.estimate - previous) < tol) {
            result.converged = true;
            return result;
        }
        previous = result.estimate;
        v = z / z_norm;
    }
    return result;
}

}  // namespace boostconv
