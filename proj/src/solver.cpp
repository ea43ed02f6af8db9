#include "boostconv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boostconv/error.hpp"

namespace boostconv {

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::converged: return "converged";
        case RunStatus::max_iter: return "max_iter";
        case RunStatus::diverged: return "diverged";
        case RunStatus::error: return "error";
    }
    return "error";
}

void RunConfig::validate() const {
    accel.validate();
    if (max_iter < 1) throw Error("max_iter must be >= 1");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error("tolerances must be > 0");
    if (!(divergence_factor > 1.0)) throw Error("divergence factor must be > 1");
}

namespace {

// Accelerator state for one run; only the member matching the kind is used.
struct AcceleratorState {
    std::optional<ResidualWindow> robust;
    std::optional<PlainWindow> plain;
    AndersonWindow anderson;
};

double stop_measure(const IterationRecord& rec, StopNorm norm) {
    return norm == StopNorm::l2 ? rec.res2 : rec.resinf;
}

}  // namespace

RunResult run(const FixedPointProblem& problem, const DenseVector& x0, const RunConfig& cfg) {
    cfg.validate();
    const auto n = problem.dimension();
    if (x0.size() != n) {
        throw DimensionError("run: x0 has length " + std::to_string(x0.size()) +
                             ", problem dimension is " + std::to_string(n));
    }

    const AcceleratorConfig& acc = cfg.accel;
    AcceleratorState state{std::nullopt, std::nullopt, AndersonWindow(acc.window_n)};

    RunResult out;
    out.x = x0;
    auto& history = out.history;
    history.records.reserve(static_cast<std::size_t>(std::min(cfg.max_iter, 100000)) + 1);

    double res2_0 = 0.0;
    double stop_0 = 0.0;
    for (int k = 0;; ++k) {
        DenseVector r;
        try {
            r = problem.residual(out.x);
        } catch (const std::exception& e) {
            throw Error("iteration " + std::to_string(k) + ": residual evaluation failed: " +
                        e.what());
        }
        if (r.size() != n) throw DimensionError("iteration " + std::to_string(k) + ": residual has wrong length");

        IterationRecord rec;
        rec.k = k;
        rec.res2 = r.norm();
        rec.resinf = r.size() > 0 ? r.lpNorm<Eigen::Infinity>() : 0.0;
        if (k == 0) {
            res2_0 = rec.res2;
            stop_0 = stop_measure(rec, cfg.stop_norm);
        }
        rec.relres2 = res2_0 > 0.0 ? rec.res2 / res2_0 : (k == 0 ? 1.0 : 0.0);
        rec.energy = problem.energy(out.x);
        if (cfg.on_iterate) cfg.on_iterate(k, out.x);

        const double measure = stop_measure(rec, cfg.stop_norm);
        if (!std::isfinite(rec.res2)) {
            history.records.push_back(rec);
            history.status = RunStatus::diverged;
            return out;
        }
        if (measure <= std::max(cfg.rel_tol * stop_0, cfg.abs_tol)) {
            history.records.push_back(rec);
            history.status = RunStatus::converged;
            return out;
        }
        if (measure > cfg.divergence_factor * stop_0) {
            history.records.push_back(rec);
            history.status = RunStatus::diverged;
            return out;
        }
        if (k == cfg.max_iter) {
            history.records.push_back(rec);
            history.status = RunStatus::max_iter;
            return out;
        }

        const bool active = acc.kind != AcceleratorKind::none && is_active(k, acc.period_p);
        rec.active = active;
        DenseVector direction;  // multiplied by B
        if (!active) {
            direction = std::move(r);
        } else {
            switch (acc.kind) {
                case AcceleratorKind::robust_boostconv:
                    if (!state.robust) {
                        DenseVector xi0 = acc.double_first_step ? DenseVector(2.0 * r) : r;
                        state.robust = start_robust_window(r, xi0);
                        direction = std::move(xi0);
                    } else {
                        auto step = robust_step(*state.robust, r, acc);
                        rec.accepted = step.accepted;
                        direction = std::move(step.xi);
                    }
                    rec.window_m = static_cast<int>(state.robust->m());
                    if (rec.window_m > 0) rec.kappa_f = kappa_f_diag(state.robust->factors.r);
                    break;
                case AcceleratorKind::plain_boostconv:
                    if (!state.plain) {
                        DenseVector xi0 = acc.double_first_step ? DenseVector(2.0 * r) : r;
                        state.plain = start_plain_window(r, xi0);
                        direction = std::move(xi0);
                    } else {
                        direction = plain_step(*state.plain, r, acc);
                        rec.accepted = true;
                    }
                    rec.window_m = static_cast<int>(state.plain->m());
                    break;
                case AcceleratorKind::anderson: {
                    const auto before = state.anderson.column_ids;
                    out.x = anderson_step(state.anderson, -r, out.x, acc.beta, acc.tau);
                    rec.accepted = state.anderson.column_ids != before;
                    rec.window_m = static_cast<int>(state.anderson.m());
                    history.records.push_back(rec);
                    continue;
                }
                case AcceleratorKind::none:
                    break;
            }
        }
        history.records.push_back(rec);

        DenseVector step;
        try {
            step = problem.apply_b(direction);
        } catch (const std::exception& e) {
            throw Error("iteration " + std::to_string(k) + ": applying B failed: " + e.what());
        }
        out.x += step;
    }
}

}  // namespace boostconv
