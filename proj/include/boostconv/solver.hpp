#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boostconv/accelerator.hpp"
#include "boostconv/linalg.hpp"

namespace boostconv {

/// A nonlinear system F(x) = 0 together with the operator B of its basic
/// iteration x_{k+1} = x_k + B r_k, where r_k = -F(x_k).
class FixedPointProblem {
public:
    virtual ~FixedPointProblem() = default;

    [[nodiscard]] virtual Eigen::Index dimension() const = 0;
    [[nodiscard]] virtual DenseVector residual(const DenseVector& x) const = 0;
    [[nodiscard]] virtual DenseVector apply_b(const DenseVector& v) const = 0;

    /// Optional per-iterate energy recorded in the history (Burgers: |u|_L2).
    [[nodiscard]] virtual std::optional<double> energy(const DenseVector&) const {
        return std::nullopt;
    }
};

enum class StopNorm { l2, linf };

struct RunConfig {
    AcceleratorConfig accel;
    int max_iter = 50;
    double rel_tol = 1e-8;
    double abs_tol = 1e-300;
    StopNorm stop_norm = StopNorm::l2;
    double divergence_factor = 1e12;
    /// Called with (k, x_k) after each residual evaluation.
    std::function<void(int, const DenseVector&)> on_iterate;

    void validate() const;
};

struct IterationRecord {
    int k = 0;
    double res2 = 0.0;
    double resinf = 0.0;
    double relres2 = 0.0;
    bool active = false;
    bool accepted = false;
    int window_m = 0;
    std::optional<double> kappa_f;
    std::optional<double> energy;
};

enum class RunStatus { converged, max_iter, diverged, error };

std::string_view to_string(RunStatus status);

struct ConvergenceHistory {
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::error;

    /// Number of basic-iteration steps taken (index of the last record).
    [[nodiscard]] int iterations() const {
        return records.empty() ? 0 : records.back().k;
    }
    [[nodiscard]] double final_relres() const {
        return records.empty() ? 0.0 : records.back().relres2;
    }
};

struct RunResult {
    DenseVector x;
    ConvergenceHistory history;
};

[[nodiscard]] constexpr bool is_active(int k, int p) { return k % p == 0; }

/// Runs the (optionally accelerated) fixed-point iteration from x0.
///
/// Iteration k evaluates r_k, records it, then stops if
/// |r_k| <= max(rel_tol |r_0|, abs_tol), if |r_k| > divergence_factor |r_0|,
/// or if k == max_iter. Otherwise x_{k+1} = x_k + B xi_k, where xi_k is the
/// accelerated residual at active iterations (k mod p == 0) and r_k
/// elsewhere. Window columns difference consecutive active iterations.
/// Problem exceptions are rethrown as Error with the iteration index.
RunResult run(const FixedPointProblem& problem, const DenseVector& x0, const RunConfig& cfg);

}  // namespace boostconv
