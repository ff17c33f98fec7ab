#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wd/distribution.hpp"
#include "wd/errors.hpp"

namespace wd {

inline constexpr int kMaxExactAlphabet = 64;

struct TransportSolution {
    double value = 0.0;
    TransportPlan plan;
};

// Exact squared 2-Wasserstein distance between distributions over a shared
// alphabet, solved as a min-cost flow on the dense bipartite graph by
// successive shortest augmenting paths with node potentials. Zero-mass atoms
// are dropped before solving and restored as zero rows/columns of the plan.
inline TransportSolution w2sq_exact(const DiscreteDistribution& mu,
                                    const DiscreteDistribution& nu,
                                    const CostMatrix& d) {
    const int A = mu.size();
    if (nu.size() != A || d.size() != A)
        throw validation_error("w2sq_exact: alphabet size mismatch");
    if (A > kMaxExactAlphabet)
        throw capability_error("w2sq_exact: alphabet " + std::to_string(A) +
                               " exceeds the exact-solver envelope of " +
                               std::to_string(kMaxExactAlphabet));

    std::vector<int> src, snk;
    for (int i = 0; i < A; ++i)
        if (mu[i] > 0.0) src.push_back(i);
    for (int j = 0; j < A; ++j)
        if (nu[j] > 0.0) snk.push_back(j);
    const int m = static_cast<int>(src.size());
    const int n = static_cast<int>(snk.size());

    std::vector<double> supply(static_cast<std::size_t>(m)), demand(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) supply[static_cast<std::size_t>(i)] = mu[src[static_cast<std::size_t>(i)]];
    for (int j = 0; j < n; ++j) demand[static_cast<std::size_t>(j)] = nu[snk[static_cast<std::size_t>(j)]];

    auto arc_cost = [&](int i, int j) {
        const double c = d(src[static_cast<std::size_t>(i)], snk[static_cast<std::size_t>(j)]);
        return c * c;
    };

    std::vector<double> flow(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0.0);
    std::vector<double> potential(static_cast<std::size_t>(m + n), 0.0);

    constexpr double kMassEps = 1e-15;  // below this, a node is exhausted
    constexpr double kStopEps = 1e-13;  // unmatched mass we are willing to leave
    const double inf = std::numeric_limits<double>::infinity();

    int guard = 8 * (m + n) * (m + n) + 64;
    while (true) {
        double remaining = 0.0;
        for (double s : supply) remaining += s;
        if (remaining <= kStopEps) break;
        if (--guard < 0) throw check_failure("w2sq_exact: augmentation limit exceeded");

        // Dijkstra over sources [0,m) and sinks [m,m+n) with reduced costs.
        const int V = m + n;
        std::vector<double> dist(static_cast<std::size_t>(V), inf);
        std::vector<int> prev(static_cast<std::size_t>(V), -1);
        std::vector<char> done(static_cast<std::size_t>(V), 0);
        for (int i = 0; i < m; ++i)
            if (supply[static_cast<std::size_t>(i)] > kMassEps) dist[static_cast<std::size_t>(i)] = 0.0;

        for (int iter = 0; iter < V; ++iter) {
            int u = -1;
            double best = inf;
            for (int v = 0; v < V; ++v)
                if (!done[static_cast<std::size_t>(v)] && dist[static_cast<std::size_t>(v)] < best) {
                    best = dist[static_cast<std::size_t>(v)];
                    u = v;
                }
            if (u < 0) break;
            done[static_cast<std::size_t>(u)] = 1;
            if (u < m) {
                for (int j = 0; j < n; ++j) {
                    if (done[static_cast<std::size_t>(m + j)]) continue;
                    const double rc = arc_cost(u, j) + potential[static_cast<std::size_t>(u)] -
                                      potential[static_cast<std::size_t>(m + j)];
                    const double nd = dist[static_cast<std::size_t>(u)] + rc;
                    if (nd < dist[static_cast<std::size_t>(m + j)]) {
                        dist[static_cast<std::size_t>(m + j)] = nd;
                        prev[static_cast<std::size_t>(m + j)] = u;
                    }
                }
            } else {
                const int j = u - m;
                for (int i = 0; i < m; ++i) {
                    if (done[static_cast<std::size_t>(i)]) continue;
                    if (flow[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] <= kMassEps) continue;
                    const double rc = -arc_cost(i, j) + potential[static_cast<std::size_t>(u)] -
                                      potential[static_cast<std::size_t>(i)];
                    const double nd = dist[static_cast<std::size_t>(u)] + rc;
                    if (nd < dist[static_cast<std::size_t>(i)]) {
                        dist[static_cast<std::size_t>(i)] = nd;
                        prev[static_cast<std::size_t>(i)] = u;
                    }
                }
            }
        }

        int target = -1;
        double target_dist = inf;
        for (int j = 0; j < n; ++j)
            if (demand[static_cast<std::size_t>(j)] > kMassEps &&
                dist[static_cast<std::size_t>(m + j)] < target_dist) {
                target_dist = dist[static_cast<std::size_t>(m + j)];
                target = j;
            }
        if (target < 0) throw check_failure("w2sq_exact: no augmenting path found");

        for (int v = 0; v < V; ++v)
            potential[static_cast<std::size_t>(v)] += std::min(dist[static_cast<std::size_t>(v)], target_dist);

        // Bottleneck along the path, then augment.
        double bottleneck = demand[static_cast<std::size_t>(target)];
        for (int v = m + target; prev[static_cast<std::size_t>(v)] != -1;) {
            const int u = prev[static_cast<std::size_t>(v)];
            if (u >= m) // backward arc sink u -> source v consumes existing flow
                bottleneck = std::min(bottleneck,
                                      flow[static_cast<std::size_t>(v) * n + static_cast<std::size_t>(u - m)]);
            v = u;
        }
        {
            int v = m + target;
            while (prev[static_cast<std::size_t>(v)] != -1) v = prev[static_cast<std::size_t>(v)];
            bottleneck = std::min(bottleneck, supply[static_cast<std::size_t>(v)]);
        }

        int v = m + target;
        while (prev[static_cast<std::size_t>(v)] != -1) {
            const int u = prev[static_cast<std::size_t>(v)];
            if (u < m)
                flow[static_cast<std::size_t>(u) * n + static_cast<std::size_t>(v - m)] += bottleneck;
            else
                flow[static_cast<std::size_t>(v) * n + static_cast<std::size_t>(u - m)] -= bottleneck;
            v = u;
        }
        supply[static_cast<std::size_t>(v)] -= bottleneck;
        demand[static_cast<std::size_t>(target)] -= bottleneck;
    }

    TransportSolution out;
    out.plan.size = A;
    out.plan.mass.assign(static_cast<std::size_t>(A) * static_cast<std::size_t>(A), 0.0);
    long double value = 0.0L;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const double f = flow[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
            if (f <= 0.0) continue;
            out.plan.mass[static_cast<std::size_t>(src[static_cast<std::size_t>(i)]) * A +
                          static_cast<std::size_t>(snk[static_cast<std::size_t>(j)])] = f;
            value += static_cast<long double>(f) * arc_cost(i, j);
        }
    out.value = static_cast<double>(value);
    return out;
}

// Closed form for a uniform off-diagonal cost: (d^2/2) * sum_i |mu_i - nu_i|.
inline double w2sq_uniform(const DiscreteDistribution& mu,
                           const DiscreteDistribution& nu,
                           double d_val) {
    if (nu.size() != mu.size()) throw validation_error("w2sq_uniform: alphabet size mismatch");
    if (!(d_val > 0.0)) throw validation_error("w2sq_uniform: cost must be positive");
    double tv = 0.0;
    for (int i = 0; i < mu.size(); ++i) tv += std::abs(mu[i] - nu[i]);
    return 0.5 * d_val * d_val * tv;
}

// W_p^p between equal-weight empirical measures on the line: the monotone
// (sorted) coupling is optimal.
inline double wp_p_sorted(std::vector<double> x, std::vector<double> y, double p) {
    if (x.size() != y.size()) throw validation_error("wp_p_sorted: size mismatch");
    if (x.empty()) throw validation_error("wp_p_sorted: empty input");
    if (!(p >= 1.0)) throw validation_error("wp_p_sorted: p must be >= 1");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += std::pow(std::abs(x[i] - y[i]), static_cast<long double>(p));
    return static_cast<double>(acc / static_cast<long double>(x.size()));
}

// W_p^p between two weighted point-mass measures on the line via the
// quantile coupling. Total weights must both be 1 (up to kMarginal).
inline double wp_p_quantile(std::span<const double> x_points, std::span<const double> x_weights,
                            std::span<const double> y_points, std::span<const double> y_weights,
                            double p) {
    if (x_points.size() != x_weights.size() || y_points.size() != y_weights.size())
        throw validation_error("wp_p_quantile: points/weights size mismatch");
    if (x_points.empty() || y_points.empty()) throw validation_error("wp_p_quantile: empty measure");
    if (!(p >= 1.0)) throw validation_error("wp_p_quantile: p must be >= 1");

    auto order_of = [](std::span<const double> pts) {
        std::vector<std::size_t> idx(pts.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
        return idx;
    };
    const auto xi = order_of(x_points);
    const auto yi = order_of(y_points);

    long double acc = 0.0L;
    std::size_t i = 0, j = 0;
    double rx = x_weights[xi[0]];
    double ry = y_weights[yi[0]];
    while (i < xi.size() && j < yi.size()) {
        const double m = std::min(rx, ry);
        if (m > 0.0)
            acc += static_cast<long double>(m) *
                   std::pow(std::abs(x_points[xi[i]] - y_points[yi[j]]), static_cast<long double>(p));
        rx -= m;
        ry -= m;
        if (rx <= 1e-18) {
            ++i;
            rx = i < xi.size() ? x_weights[xi[i]] : 0.0;
        }
        if (ry <= 1e-18) {
            ++j;
            ry = j < yi.size() ? y_weights[yi[j]] : 0.0;
        }
    }
    return static_cast<double>(acc);
}

struct SandwichBounds {
    double lower = 0.0;
    double mid = 0.0;
    double upper = 0.0;
};

// Bounds W2^2 under an arbitrary cost between the uniform-cost values at the
// smallest and largest off-diagonal entries.
inline SandwichBounds sandwich_bounds(const DiscreteDistribution& mu,
                                      const DiscreteDistribution& nu,
                                      const CostMatrix& d) {
    SandwichBounds out;
    out.mid = w2sq_exact(mu, nu, d).value;
    if (d.size() == 1) return out; // single-symbol alphabet: everything is 0
    out.lower = w2sq_uniform(mu, nu, d.min_off_diagonal());
    out.upper = w2sq_uniform(mu, nu, d.max_off_diagonal());
    if (out.lower > out.mid + tolerances::kValue || out.mid > out.upper + tolerances::kValue)
        throw check_failure("sandwich_bounds: ordering violated");
    return out;
}

} // namespace wd
