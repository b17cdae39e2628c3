#pragma once

#include <Eigen/Dense>

namespace drcbf {

enum class Sense { greater_equal, less_equal };

/// row . u + slack_coefficient * delta  (>= | <=)  offset
///
/// Barrier constraints leave slack_coefficient at zero; the CLF row carries -1.
struct AffineControlConstraint {
    Eigen::RowVectorXd row;
    double slack_coefficient = 0.0;
    double offset = 0.0;
    Sense sense = Sense::greater_equal;

    double lhs(const Eigen::VectorXd& u, double slack = 0.0) const { return row.dot(u) + slack_coefficient * slack; }

    /// Nonnegative exactly when the constraint holds.
    double residual(const Eigen::VectorXd& u, double slack = 0.0) const
    {
        const double v = lhs(u, slack);
        return sense == Sense::greater_equal ? v - offset : offset - v;
    }
};

}  // namespace drcbf
