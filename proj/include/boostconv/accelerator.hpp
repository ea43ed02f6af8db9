#pragma once

// Residual-recombination accelerators.
//
// Every accelerator replaces the residual r_k of a basic iteration
// x_{k+1} = x_k + B r_k by a recombined vector xi_k built from a sliding
// window of past residual differences. The robust variant keeps the window
// as incrementally updated thin-QR factors and refuses columns that are
// numerically dependent on the ones already stored.

#include <optional>
#include <string_view>
#include <vector>

#include "boostconv/linalg.hpp"

namespace boostconv {

enum class AcceleratorKind { none, plain_boostconv, robust_boostconv, anderson };

std::string_view to_string(AcceleratorKind kind);
/// Accepts the CLI spellings (none, plain, robust, anderson) and the long names.
AcceleratorKind parse_accelerator_kind(std::string_view name);

struct AcceleratorConfig {
    AcceleratorKind kind = AcceleratorKind::robust_boostconv;
    int window_n = 3;
    double tau = 1e-10;
    int period_p = 1;
    double beta = 1.0;  // Anderson mixing parameter
    // First active step uses xi_0 = 2 r_0 (the one-column least-squares
    // solution); when false it uses xi_0 = r_0, an unaccelerated step.
    bool double_first_step = true;

    /// Throws Error if N < 1, tau <= 0 or p < 1.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Robust BoostConv

struct ResidualWindow {
    QrFactors factors;                   // V = Q R, never stored explicitly
    DenseMatrix w;                       // n x m recombination directions
    std::vector<double> accepted_norms;  // |v| of each column when it was accepted
    std::vector<int> column_ids;         // active-step index that produced each column
    DenseVector last_r;
    DenseVector last_xi;
    int active_count = 0;

    [[nodiscard]] Eigen::Index m() const { return w.cols(); }
};

struct RobustStepResult {
    DenseVector xi;
    bool accepted = false;
    bool downdated = false;  // window was full and the oldest column was dropped
};

/// xi_0 = r_0 + W_0 c_0 with W_0 = V_0 = r_0, hence 2 r_0. Returns nullopt
/// when r_0 = 0, meaning the iteration has already converged.
std::optional<DenseVector> xi_initial(const DenseVector& r0);

/// Creates the window state after the first active iteration.
ResidualWindow start_robust_window(const DenseVector& r0, const DenseVector& xi0);

/// One robust BoostConv step. On rejection W, Q and R are left exactly as they
/// were on entry; last_r and last_xi are always refreshed.
RobustStepResult robust_step(ResidualWindow& window, const DenseVector& r_k,
                             const AcceleratorConfig& cfg);

// ---------------------------------------------------------------------------
// Plain BoostConv

struct PlainWindow {
    DenseMatrix v;  // residual differences, oldest first
    DenseMatrix w;
    DenseVector last_r;
    DenseVector last_xi;
    int active_count = 0;

    [[nodiscard]] Eigen::Index m() const { return v.cols(); }
};

PlainWindow start_plain_window(const DenseVector& r0, const DenseVector& xi0);

/// Slides the window and returns xi_k = r_k + W c_k with c_k the
/// minimum-norm solution of min |r_k - V c| from a fresh factorization of V.
DenseVector plain_step(PlainWindow& window, const DenseVector& r_k, const AcceleratorConfig& cfg);

// ---------------------------------------------------------------------------
// Stabilized Anderson acceleration (reference implementation)

struct AndersonWindow {
    int capacity = 1;
    DenseMatrix dx;  // iterate differences
    DenseMatrix df;  // F differences
    std::vector<int> column_ids;
    DenseVector last_x;
    DenseVector last_f;
    int steps = 0;

    explicit AndersonWindow(int window_n = 1) : capacity(window_n) {}
    [[nodiscard]] Eigen::Index m() const { return df.cols(); }
};

/// x_{k+1} = x_k + beta F(x_k) - (dX + beta dF) gamma over the retained
/// columns. A new difference pair is retained only if its F-difference keeps
/// a component of relative size >= tau orthogonal to the retained ones; the
/// retained set is re-factored from scratch every step.
DenseVector anderson_step(AndersonWindow& window, const DenseVector& f_xk, const DenseVector& x_k,
                          double beta, double tau);

// ---------------------------------------------------------------------------
// Broyden-form oracle and diagnostics

/// x_{k+1} = x_k - B F(x_k) - (dX - B dF) dF^+ F(x_k). dF must have full
/// column rank; throws SingularFactorError otherwise.
DenseVector broyden_form_step(const DenseMatrix& dx, const DenseMatrix& df,
                              const LinearOperator& apply_b, const DenseVector& f_xk,
                              const DenseVector& x_k);

struct MultisecantResiduals {
    double secant = 0.0;     // |G dF - dX|_F
    double no_change = 0.0;  // max |(G - B) q| over an orthonormal basis of range(dF)^perp
};

/// Residuals of the multisecant and no-change conditions for
/// G = B + (dX - B dF) dF^+.
MultisecantResiduals multisecant_check(const DenseMatrix& dx, const DenseMatrix& df,
                                       const LinearOperator& apply_b);

/// Frobenius-norm condition number |R|_F |R^{-1}|_F.
double kappa_f_diag(const UpperTriangular& r);

}  // namespace boostconv
