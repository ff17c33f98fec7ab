#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "wd/errors.hpp"

namespace wd {

enum class PmfKind { TwoSidedGeometric, KroneckerDelta, CustomTable };

// Symmetric unimodal pooling weights over integer offsets. The width sigma
// interpolates between a point mass (sigma = 0) and ever flatter two-sided
// geometric weights. Values are immutable after construction.
class PoolingPmf {
public:
    static PoolingPmf geometric(double sigma) {
        if (!(sigma >= 0.0)) throw validation_error("pooling width must be nonnegative");
        if (sigma == 0.0) return delta();
        PoolingPmf q;
        q.kind_ = PmfKind::TwoSidedGeometric;
        q.sigma_ = sigma;
        return q;
    }

    static PoolingPmf delta() {
        PoolingPmf q;
        q.kind_ = PmfKind::KroneckerDelta;
        q.sigma_ = 0.0;
        return q;
    }

    // half_table[k] is the weight at offsets +-k; negative offsets are
    // mirrored, so symmetry holds by construction. Monotonicity in |k| is
    // required; the table is normalised to total mass 1.
    static PoolingPmf custom(std::vector<double> half_table) {
        if (half_table.empty()) throw validation_error("custom pooling table must be nonempty");
        double total = 0.0;
        for (std::size_t k = 0; k < half_table.size(); ++k) {
            const double w = half_table[k];
            if (!(w >= 0.0)) throw validation_error("custom pooling table has a negative weight");
            if (k > 0 && half_table[k] > half_table[k - 1])
                throw validation_error("custom pooling table must be nonincreasing in |k|");
            total += (k == 0 ? w : 2.0 * w);
        }
        if (!(total > 0.0)) throw validation_error("custom pooling table has zero total mass");
        for (double& w : half_table) w /= total;
        PoolingPmf q;
        q.kind_ = PmfKind::CustomTable;
        q.sigma_ = 0.0;
        q.table_ = std::move(half_table);
        return q;
    }

    PmfKind kind() const { return kind_; }
    double sigma() const { return sigma_; }

    // q(k); offsets outside a custom table's support have weight 0.
    double value(std::int64_t k) const {
        const std::int64_t a = k < 0 ? -k : k;
        switch (kind_) {
        case PmfKind::KroneckerDelta:
            return a == 0 ? 1.0 : 0.0;
        case PmfKind::TwoSidedGeometric:
            return normaliser() * std::exp(-static_cast<double>(a) / sigma_);
        case PmfKind::CustomTable:
            return a < static_cast<std::int64_t>(table_.size()) ? table_[static_cast<std::size_t>(a)] : 0.0;
        }
        return 0.0;
    }

    // Mass outside [-K, K]. Closed form for the geometric family:
    // 2 r^{K+1} / (1 + r) with r = e^{-1/sigma}.
    double tail_mass(std::int64_t K) const {
        if (K < 0) throw validation_error("tail_mass: K must be nonnegative");
        switch (kind_) {
        case PmfKind::KroneckerDelta:
            return 0.0;
        case PmfKind::TwoSidedGeometric: {
            const double r = std::exp(-1.0 / sigma_);
            return 2.0 * std::exp(-static_cast<double>(K + 1) / sigma_) / (1.0 + r);
        }
        case PmfKind::CustomTable: {
            double s = 0.0;
            for (std::size_t a = static_cast<std::size_t>(K) + 1; a < table_.size(); ++a) s += 2.0 * table_[a];
            return s;
        }
        }
        return 0.0;
    }

    // Smallest K with tail_mass(K) <= tol.
    std::int64_t truncation_radius(double tol) const {
        if (!(tol > 0.0 && tol < 1.0)) throw validation_error("truncation tolerance must lie in (0, 1)");
        switch (kind_) {
        case PmfKind::KroneckerDelta:
            return 0;
        case PmfKind::TwoSidedGeometric: {
            const double r = std::exp(-1.0 / sigma_);
            // solve 2 r^{K+1}/(1+r) <= tol, then settle exactly by scanning
            double est = sigma_ * (std::log(2.0 / (1.0 + r)) - std::log(tol)) - 1.0;
            std::int64_t K = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(est)) - 2);
            while (tail_mass(K) > tol) ++K;
            while (K > 0 && tail_mass(K - 1) <= tol) --K;
            return K;
        }
        case PmfKind::CustomTable: {
            std::int64_t K = static_cast<std::int64_t>(table_.size()) - 1;
            while (K > 0 && tail_mass(K - 1) <= tol) --K;
            if (K == 0 && tail_mass(0) > tol) K = 1;
            while (tail_mass(K) > tol) ++K;
            return K;
        }
        }
        return 0;
    }

private:
    double normaliser() const {
        const double e = std::exp(1.0 / sigma_);
        return (e - 1.0) / (e + 1.0);
    }

    PmfKind kind_ = PmfKind::KroneckerDelta;
    double sigma_ = 0.0;
    std::vector<double> table_;
};

// --------------------------------------------------------------------------
// Weighted-sum checker for the Cesaro-mean equivalence: as sigma grows, the
// pooled weighted sum of a sequence with Cesaro mean m converges to m.

struct CesaroRow {
    double sigma = 0.0;
    double weighted_sum = 0.0;
    double abs_error = 0.0;
};

struct CesaroReport {
    std::vector<CesaroRow> rows;
    bool error_min_at_largest_sigma = false;
};

inline CesaroReport cesaro_check(const std::function<double(std::int64_t)>& term,
                                 double cesaro_mean,
                                 const std::vector<double>& sigma_grid,
                                 std::int64_t horizon,
                                 double tol = 1e-10) {
    if (sigma_grid.empty()) throw validation_error("cesaro_check: empty sigma grid");
    for (std::size_t i = 0; i + 1 < sigma_grid.size(); ++i)
        if (!(sigma_grid[i] < sigma_grid[i + 1]))
            throw validation_error("cesaro_check: sigma grid must be strictly increasing");

    const double sigma_max = sigma_grid.back();
    const std::int64_t needed = PoolingPmf::geometric(sigma_max).truncation_radius(tol);
    if (needed > horizon) {
        std::ostringstream msg;
        msg << "insufficient horizon: sigma=" << sigma_max << " needs radius " << needed
            << " but horizon is " << horizon;
        throw validation_error(msg.str());
    }

    CesaroReport report;
    for (double sigma : sigma_grid) {
        const PoolingPmf q = PoolingPmf::geometric(sigma);
        const std::int64_t R = q.truncation_radius(tol);
        double total = 0.0;
        double sum = 0.0;
        for (std::int64_t k = -R; k <= R; ++k) {
            const double w = q.value(k);
            total += w;
            sum += w * term(k);
        }
        const double value = sum / total;
        report.rows.push_back({sigma, value, std::abs(value - cesaro_mean)});
    }
    const double last = report.rows.back().abs_error;
    report.error_min_at_largest_sigma =
        std::all_of(report.rows.begin(), report.rows.end(),
                    [last](const CesaroRow& r) { return r.abs_error >= last; });
    return report;
}

// --------------------------------------------------------------------------
// Axiom verification used by the verify-pmf command and the test suites.

struct AxiomResult {
    bool pass = true;
    std::string detail;
};

struct PmfAxiomReport {
    AxiomResult symmetry;       // q(k) == q(-k)
    AxiomResult monotonicity;   // |k| <= |k'|  =>  q(k) >= q(k')
    AxiomResult delta_at_zero;  // sigma = 0 reduces to the point mass at 0
    AxiomResult normalization;  // truncated sum + closed-form tail == 1
    bool all_pass() const {
        return symmetry.pass && monotonicity.pass && delta_at_zero.pass && normalization.pass;
    }
};

inline PmfAxiomReport verify_pmf_axioms(const PoolingPmf& q, std::int64_t k_range = 10000) {
    PmfAxiomReport rep;
    for (std::int64_t k = 0; k <= k_range; ++k) {
        if (q.value(k) != q.value(-k)) {
            rep.symmetry = {false, "q(" + std::to_string(k) + ") != q(-" + std::to_string(k) + ")"};
            break;
        }
        if (k > 0 && q.value(k) > q.value(k - 1)) {
            rep.monotonicity = {false, "q increases at |k|=" + std::to_string(k)};
            break;
        }
    }

    if (q.kind() == PmfKind::CustomTable) {
        rep.delta_at_zero = {true, "not applicable for custom tables"};
    } else {
        const PoolingPmf at_zero = PoolingPmf::geometric(0.0);
        bool ok = at_zero.value(0) == 1.0;
        for (std::int64_t k = 1; k <= 5 && ok; ++k) ok = at_zero.value(k) == 0.0 && at_zero.value(-k) == 0.0;
        if (!ok) rep.delta_at_zero = {false, "sigma = 0 is not the point mass at 0"};
    }

    const std::int64_t R = q.truncation_radius(1e-12);
    double sum = 0.0;
    for (std::int64_t k = -R; k <= R; ++k) sum += q.value(k);
    sum += q.tail_mass(R);
    const double err = std::abs(sum - 1.0);
    if (err > 1e-10)
        rep.normalization = {false, "normalization error " + std::to_string(err)};
    else
        rep.normalization = {true, "error " + std::to_string(err)};
    return rep;
}

// Sampled continuity at sigma = 0: on a grid descending to 0, the error
// |q_sigma(k) - q_0(k)| must vanish for every |k| <= k_max. Convergence is
// witnessed by the two smallest positive grid widths plus exactness at 0.
inline AxiomResult verify_continuity_at_zero(std::vector<double> sigma_grid, int k_max = 5) {
    std::sort(sigma_grid.begin(), sigma_grid.end());
    if (sigma_grid.size() < 3 || sigma_grid.front() != 0.0)
        throw validation_error("continuity check needs a grid containing 0 and two positive widths");
    const PoolingPmf q0 = PoolingPmf::geometric(0.0);
    const PoolingPmf q1 = PoolingPmf::geometric(sigma_grid[1]);
    const PoolingPmf q2 = PoolingPmf::geometric(sigma_grid[2]);
    for (int k = -k_max; k <= k_max; ++k) {
        const double e1 = std::abs(q1.value(k) - q0.value(k));
        const double e2 = std::abs(q2.value(k) - q0.value(k));
        if (e1 > e2) return {false, "error grows as sigma shrinks for k=" + std::to_string(k)};
        if (e1 > 1e-3) return {false, "error at smallest positive sigma too large for k=" + std::to_string(k)};
    }
    return {true, ""};
}

// Small-sigma monotonicity: q_sigma(k) nondecreasing in sigma on [0, eps] for
// |k| >= K; checked for the geometric family with eps = 0.1, K = 1.
inline AxiomResult verify_small_sigma_monotone(int k_from = 1, int k_to = 5,
                                               double eps = 0.1, int grid_points = 11) {
    for (int k = k_from; k <= k_to; ++k) {
        double prev = PoolingPmf::geometric(0.0).value(k);
        for (int i = 1; i < grid_points; ++i) {
            const double sigma = eps * static_cast<double>(i) / (grid_points - 1);
            const double cur = PoolingPmf::geometric(sigma).value(k);
            if (cur < prev) return {false, "q not nondecreasing on [0,0.1] at k=" + std::to_string(k)};
            prev = cur;
        }
    }
    return {true, ""};
}

// Vanishing at large sigma: along the increasing grid, q_sigma(k) is
// unimodal in sigma with its tail decreasing toward 0; the final grid value
// must already be small (q_sigma(k) <= q_sigma(0) < 2/sigma for sigma >= 1).
inline AxiomResult verify_vanishing(const std::vector<double>& sigma_grid_increasing, std::int64_t k) {
    if (sigma_grid_increasing.size() < 2) throw validation_error("vanishing check needs >= 2 grid points");
    std::vector<double> vals;
    for (double s : sigma_grid_increasing) vals.push_back(PoolingPmf::geometric(s).value(k));
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(vals.begin(), vals.end()) - vals.begin());
    for (std::size_t i = peak; i + 1 < vals.size(); ++i)
        if (vals[i + 1] > vals[i])
            return {false, "q_sigma(k) not decreasing past its mode for k=" + std::to_string(k)};
    const double sigma_last = sigma_grid_increasing.back();
    if (sigma_last >= 1.0 && vals.back() > 2.0 / sigma_last)
        return {false, "q_sigma(k) has not vanished at the largest sigma for k=" + std::to_string(k)};
    return {true, ""};
}

} // namespace wd
