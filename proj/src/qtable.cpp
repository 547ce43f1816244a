#include "vrcq/qtable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vrcq/error.hpp"

namespace vrcq {

QTable::QTable(std::size_t num_states, std::size_t num_actions, std::vector<double> values)
    : states_(num_states), actions_(num_actions), values_(std::move(values)) {
    if (values_.size() != states_ * actions_) {
        throw ModelError("QTable: expected " + std::to_string(states_ * actions_) +
                         " entries, got " + std::to_string(values_.size()));
    }
}

void QTable::state_max(std::vector<double>& out) const {
    out.resize(states_);
    const double* row = values_.data();
    for (std::size_t x = 0; x < states_; ++x, row += actions_) {
        double best = row[0];
        for (std::size_t u = 1; u < actions_; ++u) best = std::max(best, row[u]);
        out[x] = best;
    }
}

std::vector<double> QTable::state_max() const {
    std::vector<double> out;
    state_max(out);
    return out;
}

QTable& QTable::operator+=(const QTable& rhs) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
    return *this;
}

QTable& QTable::operator-=(const QTable& rhs) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
    return *this;
}

QTable& QTable::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

QTable& QTable::add_constant(double c) {
    for (double& v : values_) v += c;
    return *this;
}

QTable operator+(QTable lhs, const QTable& rhs) { return lhs += rhs; }
QTable operator-(QTable lhs, const QTable& rhs) { return lhs -= rhs; }
QTable operator*(double c, QTable q) { return q *= c; }

double linf_norm(const QTable& q) {
    double m = 0.0;
    for (double v : q.values()) m = std::max(m, std::abs(v));
    return m;
}

double span_seminorm(const QTable& q) {
    if (q.size() == 0) return 0.0;
    auto [lo, hi] = std::minmax_element(q.values().begin(), q.values().end());
    return *hi - *lo;
}

double linf_distance(const QTable& a, const QTable& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace vrcq
