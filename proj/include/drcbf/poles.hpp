#pragma once

#include <span>
#include <vector>

namespace drcbf {

/// Linear class-K coefficients for a chain of order m.
///
/// Row i (1-based) holds c_0^i .. c_{i-1}^i, the sub-leading coefficients of
/// the monic polynomial prod_{j<=i} (s + p_j). The leading coefficient c_i^i = 1
/// is implicit but returned by `coefficient(i, i)`.
class CoefficientTable {
public:
    CoefficientTable() = default;
    CoefficientTable(std::vector<double> poles, std::vector<std::vector<double>> rows)
        : poles_(std::move(poles)), rows_(std::move(rows))
    {
    }

    int order() const { return static_cast<int>(rows_.size()); }
    std::span<const double> poles() const { return poles_; }
    std::span<const double> row(int i) const { return rows_.at(i - 1); }
    /// c_j^i for 0 <= j <= i, i in 0..m (c_0^0 = 1).
    double coefficient(int i, int j) const;

private:
    std::vector<double> poles_;
    std::vector<std::vector<double>> rows_;
};

/// Expands prod (s + p_j) one factor at a time. Throws ValidationError on a
/// nonpositive or non-finite pole.
CoefficientTable coefficients_from_poles(std::span<const double> poles);

}  // namespace drcbf
