#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "wd/distribution.hpp"
#include "wd/errors.hpp"
#include "wd/pooling.hpp"
#include "wd/sequence.hpp"
#include "wd/transport.hpp"

namespace wd {

// Mixture of point masses at feature values, weighted by the pooling PMF
// centred at one index. Identity features over a finite alphabet aggregate
// into a DiscreteDistribution; other feature maps keep raw point masses.
struct PooledMeasure {
    std::optional<DiscreteDistribution> distribution;
    std::vector<double> points;
    std::vector<double> weights;
    bool is_discrete() const { return distribution.has_value(); }
};

// Order-independent mean: pairwise summation keeps the result deterministic
// and accurate regardless of how the terms were produced.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_mean(std::span<const double> v) {
    if (v.empty()) throw validation_error("pairwise_mean: empty input");
    return pairwise_sum(v) / static_cast<double>(v.size());
}

namespace detail {

inline void require_reach(const SymbolSequence& x, std::int64_t n, std::int64_t reach) {
    if (n - reach < x.min_index() || n + reach > x.max_index()) {
        std::ostringstream msg;
        msg << "insufficient guard band: index " << n << " needs radius " << reach
            << " but the sequence covers [" << x.min_index() << ", " << x.max_index() << "]";
        throw validation_error(msg.str());
    }
}

} // namespace detail

// Pooled measure with identity features: a distribution over {1..A}.
inline DiscreteDistribution pooled_distribution(const SymbolSequence& x, std::int64_t n,
                                                const PoolingPmf& q, double tol = 1e-10) {
    const std::int64_t R = q.truncation_radius(tol);
    detail::require_reach(x, n, R);
    std::vector<double> w(static_cast<std::size_t>(x.alphabet()), 0.0);
    for (std::int64_t k = -R; k <= R; ++k)
        w[static_cast<std::size_t>(x.at(n + k) - 1)] += q.value(k);
    return DiscreteDistribution::normalized(std::move(w));
}

inline PooledMeasure pooled_measure(const SymbolSequence& x, const FeatureMap& phi, std::int64_t n,
                                    const PoolingPmf& q, double tol = 1e-10) {
    PooledMeasure out;
    if (phi.kind() == FeatureMap::Kind::Identity) {
        out.distribution = pooled_distribution(x, n, q, tol);
        return out;
    }
    const std::int64_t R = q.truncation_radius(tol);
    detail::require_reach(x, n, R + phi.half_width());
    double total = 0.0;
    for (std::int64_t k = -R; k <= R; ++k) total += q.value(k);
    out.points.reserve(static_cast<std::size_t>(2 * R + 1));
    out.weights.reserve(static_cast<std::size_t>(2 * R + 1));
    for (std::int64_t k = -R; k <= R; ++k) {
        out.points.push_back(phi(x, n + k));
        out.weights.push_back(q.value(k) / total);
    }
    return out;
}

inline PooledMeasure pooled_measure(const SymbolSequence& x, std::int64_t n, const PoolingPmf& q,
                                    double tol = 1e-10) {
    return pooled_measure(x, FeatureMap::identity(), n, q, tol);
}

// Squared 2-Wasserstein distortion at one index: the distance between the
// pooled symbol distributions of source and reconstruction. Uses the
// uniform-cost closed form whenever all off-diagonal costs coincide.
inline double distortion_at(const SymbolSequence& x, const SymbolSequence& xhat, std::int64_t n,
                            const PoolingPmf& q, const CostMatrix& d, double tol = 1e-10) {
    if (!x.same_shape_as(xhat)) throw validation_error("distortion_at: sequences must share shape and alphabet");
    if (d.size() != x.alphabet()) throw validation_error("distortion_at: cost size does not match alphabet");
    const DiscreteDistribution y = pooled_distribution(x, n, q, tol);
    const DiscreteDistribution yhat = pooled_distribution(xhat, n, q, tol);
    if (d.size() == 1) return 0.0;
    if (d.uniform_off_diagonal()) return w2sq_uniform(y, yhat, d.max_off_diagonal());
    return w2sq_exact(y, yhat, d).value;
}

// D_n for every core index, in order n = -N..N.
inline std::vector<double> distortion_profile(const SymbolSequence& x, const SymbolSequence& xhat,
                                              const PoolingPmf& q, const CostMatrix& d,
                                              double tol = 1e-10) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(x.core_length()));
    for (std::int64_t n = -x.core_radius(); n <= x.core_radius(); ++n)
        out.push_back(distortion_at(x, xhat, n, q, d, tol));
    return out;
}

// Spatial average of the per-index distortion over the core block.
inline double block_distortion(const SymbolSequence& x, const SymbolSequence& xhat,
                               const PoolingPmf& q, const CostMatrix& d, double tol = 1e-10) {
    const std::vector<double> profile = distortion_profile(x, xhat, q, d, tol);
    return pairwise_mean(profile);
}

// W_p^p distortion at one index for real-valued feature sequences, computed
// with the quantile coupling on the pooled point masses.
inline double feature_distortion_at(const SymbolSequence& x, const SymbolSequence& xhat,
                                    const FeatureMap& phi, std::int64_t n, const PoolingPmf& q,
                                    double p, double tol = 1e-10) {
    if (!x.same_shape_as(xhat)) throw validation_error("feature_distortion_at: shape mismatch");
    const PooledMeasure y = pooled_measure(x, phi, n, q, tol);
    const PooledMeasure yhat = pooled_measure(xhat, phi, n, q, tol);
    if (y.is_discrete()) {
        // identity features: points are the symbol values themselves
        std::vector<double> pts(static_cast<std::size_t>(x.alphabet()));
        for (int a = 0; a < x.alphabet(); ++a) pts[static_cast<std::size_t>(a)] = a + 1;
        return wp_p_quantile(pts, y.distribution->weights(), pts, yhat.distribution->weights(), p);
    }
    return wp_p_quantile(y.points, y.weights, yhat.points, yhat.weights, p);
}

} // namespace wd
