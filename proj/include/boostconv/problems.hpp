#pragma once

#include <string_view>

#include "boostconv/linalg.hpp"
#include "boostconv/solver.hpp"

namespace boostconv {

enum class StationaryScheme { richardson, jacobi };

std::string_view to_string(StationaryScheme scheme);
StationaryScheme parse_scheme(std::string_view name);

/// F(x) = A x - b iterated with B = I (Richardson) or B = D^{-1} (Jacobi).
class LinearStationaryProblem final : public FixedPointProblem {
public:
    /// Throws DimensionError for non-square A or mismatched b, and
    /// SingularFactorError for a zero diagonal entry under Jacobi.
    LinearStationaryProblem(SparseMatrixCSR a, DenseVector b, StationaryScheme scheme);

    [[nodiscard]] Eigen::Index dimension() const override { return b_.size(); }
    /// b - A x
    [[nodiscard]] DenseVector residual(const DenseVector& x) const override;
    [[nodiscard]] DenseVector apply_b(const DenseVector& v) const override;

    /// v - B A v, the basic iteration's error propagator.
    [[nodiscard]] DenseVector apply_iteration_matrix(const DenseVector& v) const;

    [[nodiscard]] const SparseMatrixCSR& matrix() const { return a_; }
    [[nodiscard]] const DenseVector& rhs() const { return b_; }
    [[nodiscard]] StationaryScheme scheme() const { return scheme_; }

private:
    SparseMatrixCSR a_;
    DenseVector b_;
    StationaryScheme scheme_;
    DenseVector diag_inv_;
};

/// Semi-discrete viscous Burgers equation u_t + u u_x = nu u_xx on [0, 1]
/// with homogeneous Dirichlet data, marched by explicit Euler (B = dt I).
/// The iterate holds all nx grid values; the two boundary values stay zero.
class Burgers1DProblem final : public FixedPointProblem {
public:
    Burgers1DProblem(int nx, double nu, double dt);

    [[nodiscard]] Eigen::Index dimension() const override { return nx_; }
    /// R(u) with central differences; zero at the boundary nodes.
    [[nodiscard]] DenseVector residual(const DenseVector& u) const override;
    [[nodiscard]] DenseVector apply_b(const DenseVector& v) const override { return dt_ * v; }
    [[nodiscard]] std::optional<double> energy(const DenseVector& u) const override {
        return energy_l2(u);
    }

    /// sqrt of the trapezoidal integral of u^2.
    [[nodiscard]] double energy_l2(const DenseVector& u) const;
    /// sin(2 pi x) sampled on the grid, boundaries set to exactly zero.
    [[nodiscard]] DenseVector initial_condition() const;
    [[nodiscard]] DenseVector grid() const;

    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] double dx() const { return dx_; }
    [[nodiscard]] double nu() const { return nu_; }
    [[nodiscard]] double dt() const { return dt_; }

private:
    int nx_;
    double dx_;
    double nu_;
    double dt_;
};

}  // namespace boostconv
