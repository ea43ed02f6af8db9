#include "boostconv/problems.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "boostconv/error.hpp"

namespace boostconv {

std::string_view to_string(StationaryScheme scheme) {
    return scheme == StationaryScheme::richardson ? "richardson" : "jacobi";
}

StationaryScheme parse_scheme(std::string_view name) {
    if (name == "richardson") return StationaryScheme::richardson;
    if (name == "jacobi") return StationaryScheme::jacobi;
    throw Error("unknown scheme '" + std::string(name) + "'");
}

LinearStationaryProblem::LinearStationaryProblem(SparseMatrixCSR a, DenseVector b,
                                                 StationaryScheme scheme)
    : a_(std::move(a)), b_(std::move(b)), scheme_(scheme) {
    if (a_.n_rows != a_.n_cols) {
        throw DimensionError("linear problem: matrix is " + std::to_string(a_.n_rows) + "x" +
                             std::to_string(a_.n_cols) + ", expected square");
    }
    if (b_.size() != a_.n_rows) {
        throw DimensionError("linear problem: rhs has length " + std::to_string(b_.size()) +
                             ", matrix has " + std::to_string(a_.n_rows) + " rows");
    }
    if (scheme_ == StationaryScheme::jacobi) {
        const DenseVector d = a_.diagonal();
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (d[i] == 0.0) {
                throw SingularFactorError("jacobi: zero diagonal entry in row " +
                                          std::to_string(i + 1));
            }
        }
        diag_inv_ = d.cwiseInverse();
    }
}

DenseVector LinearStationaryProblem::residual(const DenseVector& x) const {
    return b_ - spmv(a_, x);
}

DenseVector LinearStationaryProblem::apply_b(const DenseVector& v) const {
    if (v.size() != b_.size()) throw DimensionError("apply_b: wrong vector length");
    if (scheme_ == StationaryScheme::richardson) return v;
    return v.cwiseProduct(diag_inv_);
}

DenseVector LinearStationaryProblem::apply_iteration_matrix(const DenseVector& v) const {
    return v - apply_b(spmv(a_, v));
}

// ---------------------------------------------------------------------------

Burgers1DProblem::Burgers1DProblem(int nx, double nu, double dt)
    : nx_(nx), dx_(nx > 1 ? 1.0 / (nx - 1) : 0.0), nu_(nu), dt_(dt) {
    if (nx < 3) throw Error("burgers: need at least 3 grid points");
    if (!(nu >= 0.0)) throw Error("burgers: viscosity must be >= 0");
    if (!(dt > 0.0)) throw Error("burgers: time step must be > 0");
}

DenseVector Burgers1DProblem::residual(const DenseVector& u) const {
    if (u.size() != nx_) throw DimensionError("burgers: state has wrong length");
    if (u[0] != 0.0 || u[nx_ - 1] != 0.0) {
        throw Error("burgers: boundary values must be zero");
    }
    const double inv_2dx = 1.0 / (2.0 * dx_);
    const double inv_dx2 = 1.0 / (dx_ * dx_);
    DenseVector r = DenseVector::Zero(nx_);
    for (int i = 1; i < nx_ - 1; ++i) {
        const double convection = u[i] * (u[i + 1] - u[i - 1]) * inv_2dx;
        const double diffusion = nu_ * (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
        r[i] = -convection + diffusion;
    }
    return r;
}

double Burgers1DProblem::energy_l2(const DenseVector& u) const {
    if (u.size() != nx_) throw DimensionError("burgers: state has wrong length");
    const double ends = 0.5 * (u[0] * u[0] + u[nx_ - 1] * u[nx_ - 1]);
    return std::sqrt(dx_ * (u.squaredNorm() - ends));
}

DenseVector Burgers1DProblem::grid() const {
    DenseVector x(nx_);
    for (int i = 0; i < nx_; ++i) x[i] = i * dx_;
    return x;
}

DenseVector Burgers1DProblem::initial_condition() const {
    DenseVector u = (2.0 * std::numbers::pi * grid().array()).sin().matrix();
    u[0] = 0.0;
    u[nx_ - 1] = 0.0;
    return u;
}

}  // namespace boostconv
