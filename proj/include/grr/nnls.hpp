#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace grr {

struct NnlsResult {
    Eigen::VectorXd x;     ///< componentwise >= 0
    double residual = 0.0; ///< ||A x - b||_2
    bool converged = false;
};

/// Lawson-Hanson active-set method for  min ||A x - b||  s.t.  x >= 0.
///
/// The passive set grows one column at a time by the most positive
/// dual; inner feasibility steps clip along the segment toward the
/// unconstrained subproblem solution.  Anti-cycling: a column whose
/// subproblem value keeps coming out nonpositive is barred for one
/// outer round.
inline NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       double tol = 1e-10, int max_iter = -1) {
    const int n = static_cast<int>(A.cols());
    if (max_iter < 0) max_iter = 3 * n + 30;

    NnlsResult out;
    out.x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(n, false);
    std::vector<int> barred(n, 0);

    Eigen::VectorXd resid = b;
    double b_norm = std::max(b.norm(), 1.0);

    auto solve_passive = [&](const std::vector<int>& cols) -> Eigen::VectorXd {
        Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) Ap.col(static_cast<Eigen::Index>(j)) = A.col(cols[j]);
        return Ap.colPivHouseholderQr().solve(b);
    };

    for (int outer = 0; outer < max_iter; ++outer) {
        // Dual w = A^T (b - A x); pick the most positive passive candidate.
        Eigen::VectorXd w = A.transpose() * resid;
        int best = -1;
        double best_w = tol * b_norm;
        for (int j = 0; j < n; ++j) {
            if (passive[j]) continue;
            if (barred[j] > 0) { --barred[j]; continue; }
            if (w(j) > best_w) { best_w = w(j); best = j; }
        }
        if (best < 0) {
            out.converged = true;
            break;
        }
        passive[best] = true;

        for (int inner = 0; inner < max_iter; ++inner) {
            std::vector<int> cols;
            for (int j = 0; j < n; ++j)
                if (passive[j]) cols.push_back(j);
            Eigen::VectorXd z = solve_passive(cols);

            bool all_pos = true;
            for (Eigen::Index j = 0; j < z.size(); ++j)
                if (z(j) <= tol) { all_pos = false; break; }
            if (all_pos) {
                out.x.setZero();
                for (std::size_t j = 0; j < cols.size(); ++j) out.x(cols[j]) = z(static_cast<Eigen::Index>(j));
                break;
            }

            // Step from x toward z, stopping at the first variable to hit zero.
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < cols.size(); ++j) {
                double zj = z(static_cast<Eigen::Index>(j));
                if (zj > tol) continue;
                double xj = out.x(cols[j]);
                double denom = xj - zj;
                if (denom > 0) alpha = std::min(alpha, xj / denom);
            }
            if (!std::isfinite(alpha)) alpha = 0.0;
            for (std::size_t j = 0; j < cols.size(); ++j) {
                int c = cols[j];
                out.x(c) += alpha * (z(static_cast<Eigen::Index>(j)) - out.x(c));
            }
            for (std::size_t j = 0; j < cols.size(); ++j) {
                int c = cols[j];
                if (out.x(c) <= tol) {
                    out.x(c) = 0.0;
                    passive[c] = false;
                    if (c == best) barred[c] = 1;
                }
            }
            bool any_passive = false;
            for (int j = 0; j < n; ++j) any_passive |= passive[j];
            if (!any_passive) break;
        }

        resid = b - A * out.x;
    }

    out.residual = (b - A * out.x).norm();
    return out;
}

}  // namespace grr
