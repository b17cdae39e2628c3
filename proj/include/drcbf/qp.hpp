#pragma once

#include <Eigen/Dense>

#include <vector>

namespace drcbf {

/// minimize 1/2 z'Qz + c'z  subject to  A z <= b.
struct QpProblem {
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

enum class QpStatus { optimal, infeasible };

const char* to_string(QpStatus status);

struct QpSolution {
    QpStatus status = QpStatus::infeasible;
    Eigen::VectorXd z;
    std::vector<int> active_set;
    Eigen::VectorXd multipliers;  // one per constraint row, zero off the active set
    double objective = 0.0;
};

inline constexpr double kQpFeasibilityTolerance = 1e-9;

/// Exact solve of a small strictly convex QP by enumerating active sets of
/// size <= dim(z). Throws ValidationError if Q is not symmetric positive
/// definite or the shapes disagree.
QpSolution solve_qp(const QpProblem& problem);

/// ||Qz + c + A' lambda||_inf for a returned solution.
double stationarity_residual(const QpProblem& problem, const QpSolution& solution);

}  // namespace drcbf
