#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "wd/errors.hpp"

namespace wd {

// Finite window of a symbol process: a core block x_{-N..N} plus guard bands
// of length G on both sides that stand in for the doubly-infinite process.
class SymbolSequence {
public:
    SymbolSequence(std::vector<int> core, std::vector<int> guard_left,
                   std::vector<int> guard_right, int alphabet)
        : alphabet_(alphabet), guard_(static_cast<std::int64_t>(guard_left.size())) {
        if (alphabet_ < 1) throw validation_error("symbol sequence needs alphabet >= 1");
        if (core.empty() || core.size() % 2 == 0)
            throw validation_error("core block must have odd length 2N+1");
        if (guard_left.size() != guard_right.size())
            throw validation_error("guard bands must have equal length");
        radius_ = static_cast<std::int64_t>(core.size() / 2);
        data_.reserve(guard_left.size() + core.size() + guard_right.size());
        data_.insert(data_.end(), guard_left.begin(), guard_left.end());
        data_.insert(data_.end(), core.begin(), core.end());
        data_.insert(data_.end(), guard_right.begin(), guard_right.end());
        for (int s : data_)
            if (s < 1 || s > alphabet_)
                throw validation_error("symbol " + std::to_string(s) + " outside alphabet {1.." +
                                       std::to_string(alphabet_) + "}");
    }

    // Splits a flat array [guard | core | guard] with the given guard length.
    static SymbolSequence from_flat(const std::vector<int>& all, std::int64_t guard, int alphabet) {
        const std::int64_t total = static_cast<std::int64_t>(all.size());
        if (guard < 0 || total - 2 * guard < 1)
            throw validation_error("from_flat: guard bands leave no core symbols");
        std::vector<int> gl(all.begin(), all.begin() + guard);
        std::vector<int> core(all.begin() + guard, all.end() - guard);
        std::vector<int> gr(all.end() - guard, all.end());
        return SymbolSequence(std::move(core), std::move(gl), std::move(gr), alphabet);
    }

    int alphabet() const { return alphabet_; }
    std::int64_t core_radius() const { return radius_; }      // N
    std::int64_t core_length() const { return 2 * radius_ + 1; }
    std::int64_t guard_length() const { return guard_; }
    std::int64_t min_index() const { return -(radius_ + guard_); }
    std::int64_t max_index() const { return radius_ + guard_; }

    int at(std::int64_t n) const {
        if (n < min_index() || n > max_index()) {
            std::ostringstream msg;
            msg << "index " << n << " outside [" << min_index() << ", " << max_index() << "]";
            throw validation_error(msg.str());
        }
        return data_[static_cast<std::size_t>(n - min_index())];
    }

    bool same_shape_as(const SymbolSequence& other) const {
        return alphabet_ == other.alphabet_ && radius_ == other.radius_ && guard_ == other.guard_;
    }

    const std::vector<int>& raw() const { return data_; }

private:
    std::vector<int> data_; // guard_left | core | guard_right
    int alphabet_;
    std::int64_t guard_;
    std::int64_t radius_ = 0;
};

// Local feature map applied around each index.
class FeatureMap {
public:
    enum class Kind { Identity, SlidingWindowAverage };

    static FeatureMap identity() { return FeatureMap(Kind::Identity, 1); }

    static FeatureMap sliding_window_average(int width) {
        if (width < 1 || width % 2 == 0)
            throw validation_error("sliding window width must be odd and >= 1");
        return FeatureMap(Kind::SlidingWindowAverage, width);
    }

    Kind kind() const { return kind_; }
    int width() const { return width_; }
    int half_width() const { return (width_ - 1) / 2; }

    double operator()(const SymbolSequence& x, std::int64_t n) const {
        if (kind_ == Kind::Identity) return static_cast<double>(x.at(n));
        double s = 0.0;
        for (int j = -half_width(); j <= half_width(); ++j) s += static_cast<double>(x.at(n + j));
        return s / static_cast<double>(width_);
    }

private:
    FeatureMap(Kind kind, int width) : kind_(kind), width_(width) {}
    Kind kind_;
    int width_;
};

} // namespace wd
