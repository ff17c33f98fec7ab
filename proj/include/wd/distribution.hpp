#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wd/errors.hpp"

namespace wd {

// Centralised numeric tolerances.
namespace tolerances {
inline constexpr double kWeightSum = 1e-12; // probability vectors sum to 1 within this
inline constexpr double kMarginal = 1e-9;   // transport-plan marginal agreement
inline constexpr double kValue = 1e-9;      // optimal-value agreement
} // namespace tolerances

// Probability weights over a finite alphabet {1..A}.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<double> weights) : w_(std::move(weights)) {
        if (w_.empty()) throw validation_error("distribution needs alphabet size >= 1");
        double sum = 0.0;
        for (double v : w_) {
            if (!(v >= 0.0)) throw validation_error("distribution weight is negative or NaN");
            sum += v;
        }
        if (std::abs(sum - 1.0) > tolerances::kWeightSum)
            throw validation_error("distribution weights sum to " + std::to_string(sum) + ", expected 1");
    }

    // Scales a nonnegative weight vector to total mass 1.
    static DiscreteDistribution normalized(std::vector<double> weights) {
        double sum = 0.0;
        for (double v : weights) {
            if (!(v >= 0.0)) throw validation_error("distribution weight is negative or NaN");
            sum += v;
        }
        if (!(sum > 0.0)) throw validation_error("cannot normalise a zero-mass weight vector");
        for (double& v : weights) v /= sum;
        return DiscreteDistribution(std::move(weights));
    }

    static DiscreteDistribution uniform(int alphabet) {
        return DiscreteDistribution(std::vector<double>(static_cast<std::size_t>(alphabet),
                                                        1.0 / static_cast<double>(alphabet)));
    }

    int size() const { return static_cast<int>(w_.size()); }
    double operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& weights() const { return w_; }

private:
    std::vector<double> w_;
};

// Symmetric ground cost with zero diagonal and positive off-diagonal entries.
class CostMatrix {
public:
    CostMatrix(int size, std::vector<double> entries) : size_(size), d_(std::move(entries)) {
        if (size_ < 1) throw validation_error("cost matrix needs size >= 1");
        if (d_.size() != static_cast<std::size_t>(size_) * static_cast<std::size_t>(size_))
            throw validation_error("cost matrix entry count does not match size");
        for (int i = 0; i < size_; ++i) {
            if ((*this)(i, i) != 0.0) throw validation_error("cost matrix diagonal must be exactly 0");
            for (int j = i + 1; j < size_; ++j) {
                if ((*this)(i, j) != (*this)(j, i)) throw validation_error("cost matrix must be symmetric");
                if (!((*this)(i, j) > 0.0)) throw validation_error("off-diagonal costs must be positive");
            }
        }
    }

    static CostMatrix uniform(int size, double off_diagonal) {
        std::vector<double> e(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), off_diagonal);
        for (int i = 0; i < size; ++i) e[static_cast<std::size_t>(i) * size + i] = 0.0;
        return CostMatrix(size, std::move(e));
    }

    int size() const { return size_; }
    double operator()(int i, int j) const {
        return d_[static_cast<std::size_t>(i) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(j)];
    }

    double min_off_diagonal() const {
        double m = 0.0;
        bool first = true;
        for (int i = 0; i < size_; ++i)
            for (int j = i + 1; j < size_; ++j) {
                if (first || (*this)(i, j) < m) m = (*this)(i, j);
                first = false;
            }
        return first ? 0.0 : m;
    }

    double max_off_diagonal() const {
        double m = 0.0;
        for (int i = 0; i < size_; ++i)
            for (int j = i + 1; j < size_; ++j) m = std::max(m, (*this)(i, j));
        return m;
    }

    bool uniform_off_diagonal() const { return min_off_diagonal() == max_off_diagonal(); }

    const std::vector<double>& entries() const { return d_; }

private:
    int size_;
    std::vector<double> d_;
};

// Coupling with prescribed marginals.
struct TransportPlan {
    int size = 0;
    std::vector<double> mass; // row-major

    double operator()(int i, int j) const {
        return mass[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) + static_cast<std::size_t>(j)];
    }

    std::vector<double> row_marginals() const {
        std::vector<double> r(static_cast<std::size_t>(size), 0.0);
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) r[static_cast<std::size_t>(i)] += (*this)(i, j);
        return r;
    }

    std::vector<double> col_marginals() const {
        std::vector<double> c(static_cast<std::size_t>(size), 0.0);
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) c[static_cast<std::size_t>(j)] += (*this)(i, j);
        return c;
    }

    // Plan cost under squared ground distances.
    double squared_cost(const CostMatrix& d) const {
        long double acc = 0.0L;
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) {
                const double c = d(i, j);
                acc += static_cast<long double>((*this)(i, j)) * c * c;
            }
        return static_cast<double>(acc);
    }
};

} // namespace wd
