#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vrcq {

/// Dense |X| x |U| table of action values, stored row-major by state.
class QTable {
  public:
    QTable() = default;
    QTable(std::size_t num_states, std::size_t num_actions, double fill = 0.0)
        : states_(num_states), actions_(num_actions), values_(num_states * num_actions, fill) {}
    QTable(std::size_t num_states, std::size_t num_actions, std::vector<double> values);

    std::size_t num_states() const { return states_; }
    std::size_t num_actions() const { return actions_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t x, std::size_t u) { return values_[x * actions_ + u]; }
    double operator()(std::size_t x, std::size_t u) const { return values_[x * actions_ + u]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// max_u q(x,u) for every state.
    void state_max(std::vector<double>& out) const;
    std::vector<double> state_max() const;

    bool same_shape(const QTable& other) const {
        return states_ == other.states_ && actions_ == other.actions_;
    }

    QTable& operator+=(const QTable& rhs);
    QTable& operator-=(const QTable& rhs);
    QTable& operator*=(double c);
    QTable& add_constant(double c);

    friend bool operator==(const QTable&, const QTable&) = default;

  private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> values_;
};

QTable operator+(QTable lhs, const QTable& rhs);
QTable operator-(QTable lhs, const QTable& rhs);
QTable operator*(double c, QTable q);

double linf_norm(const QTable& q);
double span_seminorm(const QTable& q);
/// ||a - b||_inf without materializing the difference.
double linf_distance(const QTable& a, const QTable& b);

}  // namespace vrcq
