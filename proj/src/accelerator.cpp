#include "boostconv/accelerator.hpp"

#include <cmath>
#include <string>

#include "boostconv/error.hpp"

namespace boostconv {

namespace {

void require_finite(const DenseVector& v, const char* what) {
    if (!v.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entries");
}

void require_size(const DenseVector& v, Eigen::Index n, const char* what) {
    if (v.size() != n) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                             ", got " + std::to_string(v.size()));
    }
}

DenseMatrix drop_first_col(const DenseMatrix& a) { return a.rightCols(a.cols() - 1); }

DenseMatrix append_col(const DenseMatrix& a, const DenseVector& c) {
    DenseMatrix out(c.size(), a.cols() + 1);
    if (a.cols() > 0) out.leftCols(a.cols()) = a;
    out.col(a.cols()) = c;
    return out;
}

DenseMatrix apply_columns(const LinearOperator& op, const DenseMatrix& a) {
    DenseMatrix out(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        DenseVector col = op(a.col(j));
        require_size(col, a.rows(), "apply_B");
        out.col(j) = col;
    }
    return out;
}

// Full-rank check for the oracle paths: numerically rank-deficient dF is refused.
Eigen::HouseholderQR<DenseMatrix> full_rank_qr(const DenseMatrix& df, const char* what) {
    if (df.cols() > df.rows()) {
        throw SingularFactorError(std::string(what) + ": more columns than rows");
    }
    Eigen::ColPivHouseholderQR<DenseMatrix> pivoted(df);
    if (pivoted.rank() < df.cols()) {
        throw SingularFactorError(std::string(what) + ": dF is rank deficient");
    }
    return Eigen::HouseholderQR<DenseMatrix>(df);
}

}  // namespace

std::string_view to_string(AcceleratorKind kind) {
    switch (kind) {
        case AcceleratorKind::none: return "none";
        case AcceleratorKind::plain_boostconv: return "plain";
        case AcceleratorKind::robust_boostconv: return "robust";
        case AcceleratorKind::anderson: return "anderson";
    }
    return "none";
}

AcceleratorKind parse_accelerator_kind(std::string_view name) {
    if (name == "none") return AcceleratorKind::none;
    if (name == "plain" || name == "plain_boostconv") return AcceleratorKind::plain_boostconv;
    if (name == "robust" || name == "robust_boostconv") return AcceleratorKind::robust_boostconv;
    if (name == "anderson") return AcceleratorKind::anderson;
    throw Error("unknown accelerator '" + std::string(name) + "'");
}

void AcceleratorConfig::validate() const {
    if (window_n < 1) throw Error("window size N must be >= 1");
    if (!(tau > 0.0)) throw Error("threshold tau must be > 0");
    if (period_p < 1) throw Error("activation period p must be >= 1");
    if (!std::isfinite(beta)) throw Error("mixing parameter beta must be finite");
}

// ---------------------------------------------------------------------------

std::optional<DenseVector> xi_initial(const DenseVector& r0) {
    require_finite(r0, "xi_initial");
    if (r0.norm() == 0.0) return std::nullopt;
    return DenseVector(2.0 * r0);
}

ResidualWindow start_robust_window(const DenseVector& r0, const DenseVector& xi0) {
    require_size(xi0, r0.size(), "start_robust_window");
    ResidualWindow window;
    window.factors.q.resize(r0.size(), 0);
    window.factors.r = UpperTriangular(0);
    window.w.resize(r0.size(), 0);
    window.last_r = r0;
    window.last_xi = xi0;
    window.active_count = 1;
    return window;
}

RobustStepResult robust_step(ResidualWindow& window, const DenseVector& r_k,
                             const AcceleratorConfig& cfg) {
    if (window.active_count < 1) throw Error("robust_step: window was never started");
    const auto n = window.last_r.size();
    require_size(r_k, n, "robust_step");
    require_finite(r_k, "robust_step");

    RobustStepResult result;
    const DenseVector v = window.last_r - r_k;
    const Eigen::Index m = window.m();

    QrFactors base = window.factors;
    DenseMatrix w_base = window.w;
    std::vector<double> norms_base = window.accepted_norms;
    std::vector<int> ids_base = window.column_ids;
    if (m >= cfg.window_n) {
        result.downdated = true;
        if (m >= 2) {
            base = qr_downdate_first(base);
        } else {
            base.q.resize(n, 0);
            base.r = UpperTriangular(0);
        }
        w_base = drop_first_col(w_base);
        norms_base.erase(norms_base.begin());
        ids_base.erase(ids_base.begin());
    }

    // A column space that already fills R^n cannot take another column.
    std::optional<QrFactors> appended;
    if (base.cols() < n) appended = orth_append(base, v, cfg.tau);

    if (appended) {
        result.accepted = true;
        window.factors = std::move(*appended);
        window.w = append_col(w_base, window.last_xi + r_k - window.last_r);
        norms_base.push_back(v.norm());
        ids_base.push_back(window.active_count);
        window.accepted_norms = std::move(norms_base);
        window.column_ids = std::move(ids_base);
    }

    DenseVector xi = r_k;
    if (window.m() > 0) {
        const DenseVector c = back_solve(window.factors.r, window.factors.q.transpose() * r_k);
        xi.noalias() += window.w * c;
    }
    window.last_r = r_k;
    window.last_xi = xi;
    ++window.active_count;
    result.xi = std::move(xi);
    return result;
}

// ---------------------------------------------------------------------------

PlainWindow start_plain_window(const DenseVector& r0, const DenseVector& xi0) {
    require_size(xi0, r0.size(), "start_plain_window");
    PlainWindow window;
    window.v.resize(r0.size(), 0);
    window.w.resize(r0.size(), 0);
    window.last_r = r0;
    window.last_xi = xi0;
    window.active_count = 1;
    return window;
}

DenseVector plain_step(PlainWindow& window, const DenseVector& r_k, const AcceleratorConfig& cfg) {
    if (window.active_count < 1) throw Error("plain_step: window was never started");
    require_size(r_k, window.last_r.size(), "plain_step");
    require_finite(r_k, "plain_step");

    if (window.m() >= cfg.window_n) {
        window.v = drop_first_col(window.v);
        window.w = drop_first_col(window.w);
    }
    window.v = append_col(window.v, window.last_r - r_k);
    window.w = append_col(window.w, window.last_xi + r_k - window.last_r);

    // Minimum-norm least squares; tolerates repeated or zero columns.
    const Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(window.v);
    const DenseVector c = cod.solve(r_k);
    DenseVector xi = r_k + window.w * c;

    window.last_r = r_k;
    window.last_xi = xi;
    ++window.active_count;
    return xi;
}

// ---------------------------------------------------------------------------

DenseVector anderson_step(AndersonWindow& window, const DenseVector& f_xk, const DenseVector& x_k,
                          double beta, double tau) {
    require_size(f_xk, x_k.size(), "anderson_step");
    require_finite(f_xk, "anderson_step");
    require_finite(x_k, "anderson_step");
    if (window.capacity < 1) throw Error("anderson_step: window capacity must be >= 1");
    if (!(tau > 0.0)) throw Error("anderson_step: tau must be positive");

    const auto n = x_k.size();
    if (window.steps > 0) {
        require_size(window.last_x, n, "anderson_step");
        const DenseVector new_dx = x_k - window.last_x;
        const DenseVector new_df = f_xk - window.last_f;

        DenseMatrix dx = window.dx;
        DenseMatrix df = window.df;
        std::vector<int> ids = window.column_ids;
        if (df.cols() >= window.capacity) {
            dx = drop_first_col(dx);
            df = drop_first_col(df);
            ids.erase(ids.begin());
        }

        const double df_norm = new_df.norm();
        bool keep = df_norm > 0.0 && df.cols() < n;
        if (keep && df.cols() > 0) {
            const Eigen::HouseholderQR<DenseMatrix> qr(df);
            const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, df.cols());
            DenseVector proj = new_df - q * (q.transpose() * new_df);
            proj -= q * (q.transpose() * proj);
            keep = proj.norm() >= tau * df_norm;
        }
        if (keep) {
            window.dx = append_col(dx, new_dx);
            window.df = append_col(df, new_df);
            ids.push_back(window.steps);
            window.column_ids = std::move(ids);
        }
    } else {
        window.dx.resize(n, 0);
        window.df.resize(n, 0);
    }

    DenseVector next = x_k + beta * f_xk;
    if (window.m() > 0) {
        const DenseVector gamma = Eigen::HouseholderQR<DenseMatrix>(window.df).solve(f_xk);
        next.noalias() -= (window.dx + beta * window.df) * gamma;
    }
    window.last_x = x_k;
    window.last_f = f_xk;
    ++window.steps;
    return next;
}

// ---------------------------------------------------------------------------

DenseVector broyden_form_step(const DenseMatrix& dx, const DenseMatrix& df,
                              const LinearOperator& apply_b, const DenseVector& f_xk,
                              const DenseVector& x_k) {
    const auto n = x_k.size();
    require_size(f_xk, n, "broyden_form_step");
    if (dx.rows() != n || df.rows() != n || dx.cols() != df.cols())
        throw DimensionError("broyden_form_step: dX and dF must both be n x m");

    DenseVector bf = apply_b(f_xk);
    require_size(bf, n, "apply_B");
    DenseVector next = x_k - bf;
    if (df.cols() == 0) return next;

    const auto qr = full_rank_qr(df, "broyden_form_step");
    const DenseVector gamma = qr.solve(f_xk);
    next.noalias() -= (dx - apply_columns(apply_b, df)) * gamma;
    return next;
}

MultisecantResiduals multisecant_check(const DenseMatrix& dx, const DenseMatrix& df,
                                       const LinearOperator& apply_b) {
    if (dx.rows() != df.rows() || dx.cols() != df.cols())
        throw DimensionError("multisecant_check: dX and dF must have equal shapes");
    const auto n = df.rows();
    const auto m = df.cols();
    const auto qr = full_rank_qr(df, "multisecant_check");

    const DenseMatrix b_df = apply_columns(apply_b, df);
    const DenseMatrix update = dx - b_df;  // G = B + update * dF^+

    MultisecantResiduals out;
    const DenseMatrix pinv_df = qr.solve(df);  // dF^+ dF
    out.secant = (b_df + update * pinv_df - dx).norm();

    if (m < n) {
        const DenseMatrix q_full = qr.householderQ();
        for (Eigen::Index j = m; j < n; ++j) {
            const DenseVector coeff = qr.solve(DenseVector(q_full.col(j)));
            out.no_change = std::max(out.no_change, (update * coeff).norm());
        }
    }
    return out;
}

double kappa_f_diag(const UpperTriangular& r) {
    const auto m = r.size();
    if (m == 0) throw SingularFactorError("kappa_f_diag: empty factor");
    double inv_sq = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        inv_sq += back_solve(r, DenseVector::Unit(m, j)).squaredNorm();
    }
    return r.dense().norm() * std::sqrt(inv_sq);
}

}  // namespace boostconv
