#include "drcbf/poles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "drcbf/errors.hpp"

namespace drcbf {

double CoefficientTable::coefficient(int i, int j) const
{
    if (i < 0 || i > order() || j < 0 || j > i) {
        throw std::out_of_range("coefficient c_" + std::to_string(j) + "^" + std::to_string(i) + " out of range");
    }
    if (j == i) return 1.0;
    return rows_[i - 1][j];
}

CoefficientTable coefficients_from_poles(std::span<const double> poles)
{
    if (poles.empty()) throw ValidationError("pole set is empty");
    // poly[k] is the coefficient of s^k; starts as the constant 1.
    std::vector<double> poly{1.0};
    std::vector<std::vector<double>> rows;
    for (std::size_t idx = 0; idx < poles.size(); ++idx) {
        const double p = poles[idx];
        if (!(std::isfinite(p) && p > 0.0)) {
            throw ValidationError("pole p_" + std::to_string(idx + 1) + " = " + std::to_string(p) +
                                  " is not strictly positive");
        }
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k + 1] += poly[k];
            next[k] += p * poly[k];
        }
        poly = std::move(next);
        rows.emplace_back(poly.begin(), poly.end() - 1);
    }
    return CoefficientTable(std::vector<double>(poles.begin(), poles.end()), std::move(rows));
}

}  // namespace drcbf
