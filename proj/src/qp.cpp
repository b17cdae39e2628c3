#include "drcbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drcbf/errors.hpp"

namespace drcbf {

const char* to_string(QpStatus status)
{
    return status == QpStatus::optimal ? "optimal" : "infeasible";
}

namespace {

void validate(const QpProblem& qp)
{
    const auto n = qp.Q.rows();
    if (n == 0 || qp.Q.cols() != n) throw ValidationError("QP: Q must be square and non-empty");
    if (qp.c.size() != n) throw DimensionError("QP c", n, qp.c.size());
    if (qp.A.rows() > 0 && qp.A.cols() != n) throw DimensionError("QP A columns", n, qp.A.cols());
    if (qp.b.size() != qp.A.rows()) throw DimensionError("QP b", qp.A.rows(), qp.b.size());
    if (!qp.Q.isApprox(qp.Q.transpose(), 1e-12)) throw ValidationError("QP: Q is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(qp.Q);
    if (llt.info() != Eigen::Success) throw ValidationError("QP: Q is not positive definite");
}

// Calls visit(subset) for every subset of {0..count-1} with size <= max_size,
// in increasing size then lexicographic order.
template <typename Visit>
void for_each_subset(int count, int max_size, Visit&& visit)
{
    std::vector<int> subset;
    for (int size = 0; size <= std::min(count, max_size); ++size) {
        subset.resize(size);
        for (int i = 0; i < size; ++i) subset[i] = i;
        while (true) {
            visit(subset);
            int i = size - 1;
            while (i >= 0 && subset[i] == count - size + i) --i;
            if (i < 0) break;
            ++subset[i];
            for (int j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
        }
    }
}

}  // namespace

QpSolution solve_qp(const QpProblem& qp)
{
    validate(qp);
    const auto n = static_cast<int>(qp.Q.rows());
    const auto rows = static_cast<int>(qp.A.rows());

    QpSolution best;
    best.multipliers = Eigen::VectorXd::Zero(rows);
    double best_objective = std::numeric_limits<double>::infinity();
    const double scale = 1.0 + qp.c.cwiseAbs().maxCoeff();

    for_each_subset(rows, n, [&](const std::vector<int>& active) {
        const auto k = static_cast<int>(active.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
        Eigen::VectorXd rhs(n + k);
        kkt.topLeftCorner(n, n) = qp.Q;
        rhs.head(n) = -qp.c;
        for (int i = 0; i < k; ++i) {
            kkt.block(n + i, 0, 1, n) = qp.A.row(active[i]);
            kkt.block(0, n + i, n, 1) = qp.A.row(active[i]).transpose();
            rhs[n + i] = qp.b[active[i]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible()) return;  // dependent active rows
        const Eigen::VectorXd sol = lu.solve(rhs);
        const Eigen::VectorXd z = sol.head(n);
        const Eigen::VectorXd lambda = sol.tail(k);

        for (int i = 0; i < rows; ++i) {
            // Tolerance follows the rounding scale of A_i z, not just b_i.
            const double magnitude = qp.A.row(i).cwiseAbs().dot(z.cwiseAbs());
            const double slack = qp.A.row(i).dot(z) - qp.b[i];
            if (slack > kQpFeasibilityTolerance * (1.0 + std::abs(qp.b[i]) + magnitude)) return;
        }
        const double dual_tol = kQpFeasibilityTolerance * (scale + (k > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0));
        for (int i = 0; i < k; ++i) {
            if (lambda[i] < -dual_tol) return;
        }

        const double objective = 0.5 * z.dot(qp.Q * z) + qp.c.dot(z);
        const double tie = 1e-12 * (1.0 + std::abs(objective));
        const bool better = objective < best_objective - tie ||
                            (std::abs(objective - best_objective) <= tie && z.norm() < best.z.norm());
        if (!better) return;
        best_objective = objective;
        best.status = QpStatus::optimal;
        best.z = z;
        best.objective = objective;
        best.active_set = active;
        best.multipliers.setZero();
        for (int i = 0; i < k; ++i) best.multipliers[active[i]] = std::max(lambda[i], 0.0);
    });

    if (best.status != QpStatus::optimal) {
        best.z = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
        best.objective = std::numeric_limits<double>::quiet_NaN();
    }
    return best;
}

double stationarity_residual(const QpProblem& qp, const QpSolution& s)
{
    Eigen::VectorXd r = qp.Q * s.z + qp.c;
    if (qp.A.rows() > 0) r += qp.A.transpose() * s.multipliers;
    return r.cwiseAbs().maxCoeff();
}

}  // namespace drcbf
