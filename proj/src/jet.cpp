#include "drcbf/jet.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace drcbf {

namespace {

// All exponent vectors of total degree `degree` in `nvars` variables, first
// exponent largest first.
void compositions(int nvars, int degree, std::vector<int>& prefix, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(prefix.size()) == nvars - 1) {
        prefix.push_back(degree);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        prefix.push_back(e);
        compositions(nvars, degree - e, prefix, out);
        prefix.pop_back();
    }
}

void require_same_space(const Jet& a, const Jet& b)
{
    if (a.nvars() != b.nvars()) {
        throw std::invalid_argument("jet operands live in different spaces (" + std::to_string(a.nvars()) +
                                    " vs " + std::to_string(b.nvars()) + " variables)");
    }
}

double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order)
{
    if (nvars <= 0 || order < 0) {
        throw std::invalid_argument("jet layout needs nvars > 0 and order >= 0");
    }
    degree_offsets_.push_back(0);
    for (int d = 0; d <= order; ++d) {
        std::vector<int> prefix;
        if (nvars == 1) {
            exponents_.push_back({d});
        } else {
            compositions(nvars, d, prefix, exponents_);
        }
        degree_offsets_.push_back(exponents_.size());
    }

    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < exponents_.size(); ++i) index.emplace(exponents_[i], i);

    auto degree_of = [](const std::vector<int>& e) {
        int s = 0;
        for (int v : e) s += v;
        return s;
    };

    std::vector<int> sum(nvars);
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
        for (std::size_t j = 0; j < exponents_.size(); ++j) {
            if (degree_of(exponents_[i]) + degree_of(exponents_[j]) > order) continue;
            for (int v = 0; v < nvars; ++v) sum[v] = exponents_[i][v] + exponents_[j][v];
            products_.push_back({i, j, index.at(sum)});
        }
    }

    derivatives_.resize(nvars);
    if (order >= 1) {
        const std::size_t lower = degree_offsets_[order];
        for (int var = 0; var < nvars; ++var) {
            for (std::size_t j = 0; j < lower; ++j) {
                std::vector<int> e = exponents_[j];
                const double factor = e[var] + 1;
                e[var] += 1;
                derivatives_[var].push_back({index.at(e), factor});
            }
        }
    }
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot = std::make_shared<const JetLayout>(nvars, order);
    return slot;
}

std::span<const int> JetLayout::exponent(std::size_t index) const
{
    return exponents_.at(index);
}

Jet::Jet(std::shared_ptr<const JetLayout> layout, double value) : layout_(std::move(layout))
{
    coeffs_.assign(layout_->size(), 0.0);
    coeffs_[0] = value;
}

Jet Jet::variable(std::shared_ptr<const JetLayout> layout, double value, int var)
{
    if (var < 0 || var >= layout->nvars()) throw std::out_of_range("jet variable index out of range");
    Jet j(std::move(layout), value);
    if (j.order() >= 1) j.coeffs_[j.layout_->unit_index(var)] = 1.0;
    return j;
}

double Jet::partial(int var) const
{
    if (order() < 1) throw std::logic_error("gradient requested from an order-0 jet");
    return coeffs_[layout_->unit_index(var)];
}

Jet Jet::truncated(int new_order) const
{
    if (new_order >= order()) return *this;
    Jet out;
    out.layout_ = JetLayout::get(nvars(), new_order);
    out.coeffs_.assign(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(out.layout_->size()));
    return out;
}

Jet Jet::derivative(int var) const
{
    if (order() < 1) throw std::logic_error("cannot differentiate an order-0 jet");
    Jet out;
    out.layout_ = JetLayout::get(nvars(), order() - 1);
    const auto terms = layout_->derivative(var);
    out.coeffs_.resize(terms.size());
    for (std::size_t j = 0; j < terms.size(); ++j) out.coeffs_[j] = terms[j].factor * coeffs_[terms[j].source];
    return out;
}

Jet& Jet::operator+=(const Jet& rhs)
{
    require_same_space(*this, rhs);
    if (rhs.order() < order()) *this = truncated(rhs.order());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs)
{
    require_same_space(*this, rhs);
    if (rhs.order() < order()) *this = truncated(rhs.order());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    return *this;
}

Jet& Jet::operator*=(const Jet& rhs)
{
    *this = *this * rhs;
    return *this;
}

Jet& Jet::operator+=(double rhs)
{
    coeffs_[0] += rhs;
    return *this;
}

Jet& Jet::operator-=(double rhs)
{
    coeffs_[0] -= rhs;
    return *this;
}

Jet& Jet::operator*=(double rhs)
{
    for (double& c : coeffs_) c *= rhs;
    return *this;
}

Jet& Jet::operator/=(double rhs)
{
    for (double& c : coeffs_) c /= rhs;
    return *this;
}

Jet Jet::operator-() const
{
    Jet out = *this;
    for (double& c : out.coeffs_) c = -c;
    return out;
}

Jet Jet::compose(std::span<const double> derivs) const
{
    const int k_max = order();
    if (static_cast<int>(derivs.size()) < k_max + 1) {
        throw std::invalid_argument("compose needs order()+1 derivative values");
    }
    Jet shifted = *this;
    shifted.coeffs_[0] = 0.0;
    Jet out(layout_, derivs[0]);
    Jet power(layout_, 1.0);
    for (int k = 1; k <= k_max; ++k) {
        power = power * shifted;
        const double scale = derivs[k] / factorial(k);
        for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] += scale * power.coeffs_[i];
    }
    return out;
}

Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }

Jet operator*(const Jet& lhs, const Jet& rhs)
{
    require_same_space(lhs, rhs);
    // Product tables of the smaller layout index into the larger one, which
    // shares its prefix.
    const auto& layout = lhs.order() <= rhs.order() ? lhs.layout_ : rhs.layout_;
    std::vector<double> acc(layout->size(), 0.0);
    for (const auto& p : layout->products()) acc[p.out] += lhs.coeffs_[p.lhs] * rhs.coeffs_[p.rhs];
    return Jet(layout, std::move(acc));
}

Jet operator/(const Jet& lhs, const Jet& rhs) { return lhs * reciprocal(rhs); }
Jet operator+(Jet lhs, double rhs) { return lhs += rhs; }
Jet operator+(double lhs, Jet rhs) { return rhs += lhs; }
Jet operator-(Jet lhs, double rhs) { return lhs -= rhs; }
Jet operator-(double lhs, const Jet& rhs) { return (-rhs) += lhs; }
Jet operator*(Jet lhs, double rhs) { return lhs *= rhs; }
Jet operator*(double lhs, Jet rhs) { return rhs *= lhs; }
Jet operator/(Jet lhs, double rhs) { return lhs /= rhs; }
Jet operator/(double lhs, const Jet& rhs) { return reciprocal(rhs) *= lhs; }

Jet reciprocal(const Jet& a)
{
    const double a0 = a.value();
    std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
    double inv = 1.0 / a0;
    double term = inv;
    for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = term;
        term *= -static_cast<double>(k + 1) * inv;
    }
    return a.compose(d);
}

Jet square(const Jet& a) { return a * a; }

Jet pow(const Jet& a, int exponent)
{
    if (exponent < 0) return reciprocal(pow(a, -exponent));
    Jet out(a.layout(), 1.0);
    for (int i = 0; i < exponent; ++i) out = out * a;
    return out;
}

Jet sqrt(const Jet& a)
{
    const double a0 = a.value();
    std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
    double coef = 1.0;
    double expo = 0.5;
    for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = coef * std::pow(a0, expo);
        coef *= expo;
        expo -= 1.0;
    }
    return a.compose(d);
}

Jet exp(const Jet& a)
{
    std::vector<double> d(static_cast<std::size_t>(a.order()) + 1, std::exp(a.value()));
    return a.compose(d);
}

Jet log(const Jet& a)
{
    const double a0 = a.value();
    std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
    d[0] = std::log(a0);
    double term = 1.0 / a0;
    for (std::size_t k = 1; k < d.size(); ++k) {
        d[k] = term;
        term *= -static_cast<double>(k) / a0;
    }
    return a.compose(d);
}

Jet sin(const Jet& a)
{
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const double cycle[4] = {s, c, -s, -c};
    std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
    return a.compose(d);
}

Jet cos(const Jet& a)
{
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const double cycle[4] = {c, -s, -c, s};
    std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
    return a.compose(d);
}

}  // namespace drcbf
