#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wd/distribution.hpp"
#include "wd/errors.hpp"
#include "wd/rng.hpp"
#include "wd/sequence.hpp"

namespace wd {

// i.i.d. source over {1..A}.
struct SourceSpec {
    int alphabet = 2;
    std::vector<double> pmf;

    SourceSpec(int A, std::vector<double> p) : alphabet(A), pmf(std::move(p)) {
        if (alphabet < 2) throw validation_error("source alphabet must be >= 2");
        if (pmf.size() != static_cast<std::size_t>(alphabet))
            throw validation_error("source pmf length does not match alphabet");
        double sum = 0.0;
        for (double v : pmf) {
            if (!(v >= 0.0)) throw validation_error("source pmf has a negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > tolerances::kWeightSum)
            throw validation_error("source pmf sums to " + std::to_string(sum));
    }

    DiscreteDistribution distribution() const { return DiscreteDistribution(pmf); }
};

inline std::vector<int> sample_symbols(const SourceSpec& spec, std::int64_t length, Rng& rng) {
    if (length < 1) throw validation_error("sample_symbols: length must be >= 1");
    std::vector<int> out(static_cast<std::size_t>(length));
    for (auto& s : out) s = sample_index(spec.pmf, rng) + 1;
    return out;
}

// i.i.d. block of odd core length with i.i.d. guard bands, deterministic in
// the seed.
inline SymbolSequence sample_source(const SourceSpec& spec, std::int64_t core_length,
                                    std::int64_t guard, std::uint64_t seed) {
    if (core_length < 1 || core_length % 2 == 0)
        throw validation_error("sample_source: core length must be odd and >= 1");
    Rng rng(seed);
    std::vector<int> all = sample_symbols(spec, core_length + 2 * guard, rng);
    return SymbolSequence::from_flat(all, guard, spec.alphabet);
}

// Zero-rate reconstruction: a fresh i.i.d. realization of the source law,
// independent of the input by construction.
inline SymbolSequence independent_realization(const SourceSpec& spec, const SymbolSequence& x,
                                              std::uint64_t seed) {
    if (spec.alphabet != x.alphabet())
        throw validation_error("independent_realization: alphabet mismatch");
    Rng rng = Rng::child(seed, 0x49445250ull); // dedicated stream, never reused for sources
    std::vector<int> all = sample_symbols(spec, static_cast<std::int64_t>(x.raw().size()), rng);
    return SymbolSequence::from_flat(all, x.guard_length(), spec.alphabet);
}

// --------------------------------------------------------------------------
// Windowed random-permutation scheme.

struct PermutationSchemeConfig {
    std::int64_t k = 1;      // window size
    std::int64_t offset = 0; // first window starts this many positions into the block
    double gamma = 0.5;      // used when k is tied to sigma as k = round(sigma^gamma)

    PermutationSchemeConfig(std::int64_t k_, std::int64_t offset_ = 0, double gamma_ = 0.5)
        : k(k_), offset(offset_), gamma(gamma_) {
        if (k < 1) throw validation_error("window size k must be >= 1");
        if (offset < 0 || offset > k - 1) throw validation_error("window offset must lie in [0, k-1]");
        if (!(gamma > 0.0 && gamma < 1.0)) throw validation_error("gamma must lie in (0, 1)");
    }

    static std::int64_t window_for_sigma(double sigma, double gamma) {
        return std::max<std::int64_t>(1, std::llround(std::pow(sigma, gamma)));
    }
};

// Block-local window partition: the leading `offset` positions and the tail
// that does not fill a window of length k form the window of remainders.
struct WindowLayout {
    std::int64_t block_length = 0;
    std::int64_t k = 1;
    std::int64_t offset = 0;

    std::int64_t full_windows() const {
        return block_length >= offset ? (block_length - offset) / k : 0;
    }
    std::int64_t window_begin(std::int64_t w) const { return offset + w * k; }
    std::int64_t covered_end() const { return offset + full_windows() * k; }
};

inline std::int64_t bits_per_count(std::int64_t k) {
    return static_cast<std::int64_t>(std::bit_width(static_cast<std::uint64_t>(k)));
}

// Per-window counts of each but the last symbol; the remainder window
// contributes nothing.
struct EncodedMessage {
    int alphabet = 2;
    std::int64_t k = 1;
    std::int64_t window_count = 0;
    std::vector<std::int64_t> counts; // window-major, symbol-minor (symbols 1..A-1)

    std::int64_t bits_per_field() const { return bits_per_count(k); }
    std::int64_t bit_length() const {
        return window_count * static_cast<std::int64_t>(alphabet - 1) * bits_per_field();
    }
};

// Exact per-block rate in bits per symbol.
inline double permutation_rate(int alphabet, std::int64_t k, std::int64_t block_length,
                               std::int64_t offset = 0) {
    const WindowLayout layout{block_length, k, offset};
    return static_cast<double>((alphabet - 1) * bits_per_count(k) * layout.full_windows()) /
           static_cast<double>(block_length);
}

inline EncodedMessage permutation_encode_block(std::span<const int> block, int alphabet,
                                               const PermutationSchemeConfig& cfg) {
    const WindowLayout layout{static_cast<std::int64_t>(block.size()), cfg.k, cfg.offset};
    EncodedMessage msg;
    msg.alphabet = alphabet;
    msg.k = cfg.k;
    msg.window_count = layout.full_windows();
    msg.counts.assign(static_cast<std::size_t>(msg.window_count * (alphabet - 1)), 0);
    for (std::int64_t w = 0; w < msg.window_count; ++w) {
        const std::int64_t begin = layout.window_begin(w);
        for (std::int64_t i = 0; i < cfg.k; ++i) {
            const int s = block[static_cast<std::size_t>(begin + i)];
            if (s < alphabet)
                ++msg.counts[static_cast<std::size_t>(w * (alphabet - 1) + (s - 1))];
        }
    }
    return msg;
}

inline EncodedMessage permutation_encode(const SymbolSequence& x, const PermutationSchemeConfig& cfg) {
    return permutation_encode_block(std::span<const int>(x.raw()).subspan(
                                        static_cast<std::size_t>(x.guard_length()),
                                        static_cast<std::size_t>(x.core_length())),
                                    x.alphabet(), cfg);
}

namespace detail {

inline void check_message(const EncodedMessage& msg) {
    if (msg.alphabet < 2) throw validation_error("malformed message: alphabet < 2");
    if (msg.k < 1) throw validation_error("malformed message: k < 1");
    if (msg.counts.size() != static_cast<std::size_t>(msg.window_count * (msg.alphabet - 1)))
        throw validation_error("malformed message: count field size mismatch");
    for (std::int64_t w = 0; w < msg.window_count; ++w) {
        std::int64_t sum = 0;
        for (int a = 0; a < msg.alphabet - 1; ++a) {
            const std::int64_t c = msg.counts[static_cast<std::size_t>(w * (msg.alphabet - 1) + a)];
            if (c < 0 || c > msg.k) throw validation_error("malformed message: count outside [0, k]");
            sum += c;
        }
        if (sum > msg.k) throw validation_error("malformed message: window counts exceed k");
    }
}

} // namespace detail

// Fills `block` with the reconstruction: each full window is a uniformly
// random arrangement of the multiset given by the counts (the last symbol
// fills whatever the counts leave); remainder positions emit symbol 1.
inline void permutation_decode_into(const EncodedMessage& msg, const PermutationSchemeConfig& cfg,
                                    std::span<int> block, std::uint64_t seed) {
    detail::check_message(msg);
    if (msg.k != cfg.k) throw validation_error("message window size does not match config");
    const WindowLayout layout{static_cast<std::int64_t>(block.size()), cfg.k, cfg.offset};
    if (layout.full_windows() != msg.window_count)
        throw validation_error("message window count does not match block length");
    for (auto& s : block) s = 1;
    Rng rng(seed);
    std::vector<int> window(static_cast<std::size_t>(cfg.k));
    for (std::int64_t w = 0; w < msg.window_count; ++w) {
        std::size_t pos = 0;
        for (int a = 0; a < msg.alphabet - 1; ++a) {
            const std::int64_t c = msg.counts[static_cast<std::size_t>(w * (msg.alphabet - 1) + a)];
            for (std::int64_t i = 0; i < c; ++i) window[pos++] = a + 1;
        }
        while (pos < window.size()) window[pos++] = msg.alphabet;
        rng.shuffle(std::span<int>(window));
        std::copy(window.begin(), window.end(),
                  block.begin() + static_cast<std::ptrdiff_t>(layout.window_begin(w)));
    }
}

// Standalone decode producing a guardless block. The wire format does not
// carry the block length, so it is an explicit argument; by default the
// decoded block exactly covers the offset plus the full windows.
inline SymbolSequence permutation_decode(const EncodedMessage& msg, const PermutationSchemeConfig& cfg,
                                         std::uint64_t seed, std::int64_t block_length = -1) {
    if (block_length < 0) block_length = cfg.offset + msg.window_count * cfg.k;
    if (block_length % 2 == 0)
        throw validation_error("permutation_decode: block length must be odd (2N+1); pass it explicitly");
    std::vector<int> block(static_cast<std::size_t>(block_length));
    permutation_decode_into(msg, cfg, block, seed);
    return SymbolSequence(std::move(block), {}, {}, msg.alphabet);
}

// --------------------------------------------------------------------------
// Wire format: 16-byte header {magic "WDPM", A: u16, k: u32, window_count:
// u32, 2 zero pad bytes}, all big-endian, followed by the count fields packed
// MSB-first, window-major and symbol-minor, each ceil(log2(k+1)) bits wide.

inline constexpr std::array<std::uint8_t, 4> kMessageMagic{'W', 'D', 'P', 'M'};
inline constexpr std::size_t kMessageHeaderBytes = 16;

inline std::vector<std::uint8_t> serialize_message(const EncodedMessage& msg) {
    detail::check_message(msg);
    if (msg.alphabet > 0xFFFF) throw validation_error("serialize: alphabet exceeds u16");
    if (msg.k > 0xFFFFFFFFll) throw validation_error("serialize: k exceeds u32");
    if (msg.window_count > 0xFFFFFFFFll) throw validation_error("serialize: window count exceeds u32");

    std::vector<std::uint8_t> out(kMessageHeaderBytes, 0);
    std::copy(kMessageMagic.begin(), kMessageMagic.end(), out.begin());
    auto put_be = [&out](std::size_t at, std::uint64_t v, int bytes) {
        for (int b = 0; b < bytes; ++b)
            out[at + static_cast<std::size_t>(b)] =
                static_cast<std::uint8_t>((v >> (8 * (bytes - 1 - b))) & 0xFF);
    };
    put_be(4, static_cast<std::uint64_t>(msg.alphabet), 2);
    put_be(6, static_cast<std::uint64_t>(msg.k), 4);
    put_be(10, static_cast<std::uint64_t>(msg.window_count), 4);

    const int width = static_cast<int>(msg.bits_per_field());
    std::uint64_t acc = 0;
    int acc_bits = 0;
    for (std::int64_t c : msg.counts) {
        acc = (acc << width) | static_cast<std::uint64_t>(c);
        acc_bits += width;
        while (acc_bits >= 8) {
            out.push_back(static_cast<std::uint8_t>((acc >> (acc_bits - 8)) & 0xFF));
            acc_bits -= 8;
        }
    }
    if (acc_bits > 0)
        out.push_back(static_cast<std::uint8_t>((acc << (8 - acc_bits)) & 0xFF));
    return out;
}

inline EncodedMessage deserialize_message(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMessageHeaderBytes) throw validation_error("malformed message: truncated header");
    for (std::size_t i = 0; i < kMessageMagic.size(); ++i)
        if (bytes[i] != kMessageMagic[i]) throw validation_error("malformed message: bad magic");
    auto get_be = [&bytes](std::size_t at, int n) {
        std::uint64_t v = 0;
        for (int b = 0; b < n; ++b) v = (v << 8) | bytes[at + static_cast<std::size_t>(b)];
        return v;
    };
    EncodedMessage msg;
    msg.alphabet = static_cast<int>(get_be(4, 2));
    msg.k = static_cast<std::int64_t>(get_be(6, 4));
    msg.window_count = static_cast<std::int64_t>(get_be(10, 4));
    if (msg.alphabet < 2) throw validation_error("malformed message: alphabet < 2");
    if (msg.k < 1) throw validation_error("malformed message: k < 1");

    const std::int64_t fields = msg.window_count * (msg.alphabet - 1);
    const int width = static_cast<int>(msg.bits_per_field());
    const std::int64_t need_bits = fields * width;
    const std::int64_t have_bits =
        8 * (static_cast<std::int64_t>(bytes.size()) - static_cast<std::int64_t>(kMessageHeaderBytes));
    if (have_bits < need_bits) throw validation_error("malformed message: truncated payload");

    msg.counts.reserve(static_cast<std::size_t>(fields));
    std::uint64_t acc = 0;
    int acc_bits = 0;
    std::size_t at = kMessageHeaderBytes;
    for (std::int64_t f = 0; f < fields; ++f) {
        while (acc_bits < width) {
            acc = (acc << 8) | bytes[at++];
            acc_bits += 8;
        }
        msg.counts.push_back(static_cast<std::int64_t>((acc >> (acc_bits - width)) &
                                                       ((std::uint64_t{1} << width) - 1)));
        acc_bits -= width;
    }
    detail::check_message(msg);
    return msg;
}

// --------------------------------------------------------------------------
// Analytic distortion bounds and the convergence-rate region.

// sum_m q_sigma(m)^2 in closed form; expm1 keeps it accurate at large sigma.
inline double pooled_weight_l2_sq(double sigma) {
    if (!(sigma > 0.0)) throw validation_error("pooled_weight_l2_sq: sigma must be positive");
    const double u = 1.0 / sigma;
    const double e = std::exp(u);
    return std::expm1(u) * (std::exp(2.0 * u) + 1.0) / ((e + 1.0) * (e + 1.0) * (e + 1.0));
}

// Upper bound on E[D] for the independent-realization scheme.
inline double bound_independent(double sigma, const SourceSpec& spec, double d_max) {
    if (!(sigma > 0.0)) throw validation_error("bound_independent: sigma must be positive");
    if (!(d_max > 0.0)) throw validation_error("bound_independent: d_max must be positive");
    double spread = 0.0;
    for (double p : spec.pmf) spread += std::sqrt(2.0 * p * (1.0 - p));
    return std::sqrt(pooled_weight_l2_sq(sigma)) * (d_max * d_max / 2.0) * spread;
}

// Upper bound on E[D] for the windowed random-permutation scheme with window
// size k; includes the (d_max^2/2)*A per-symbol prefactor.
inline double bound_permutation(double sigma, std::int64_t k, double d_max, int alphabet) {
    if (!(sigma > 0.0)) throw validation_error("bound_permutation: sigma must be positive");
    if (k < 1) throw validation_error("bound_permutation: k must be >= 1");
    const double u = 1.0 / sigma;
    const double c = std::expm1(u) / (std::exp(u) + 1.0);
    const double kd = static_cast<double>(k);
    const double bracket = (1.0 + std::exp(2.0 * (kd - 1.0) / sigma)) / std::expm1(2.0 * kd / sigma) + 2.0;
    const double ratio = kd / sigma;
    const double poly = (kd * kd * kd) / (sigma * sigma) * (1.0 - ratio + ratio * ratio);
    return (d_max * d_max / 2.0) * static_cast<double>(alphabet) * c * std::sqrt(bracket * poly);
}

// Leading term of the converse bound (before the CLT constant).
inline double converse_leading_term(double sigma, std::int64_t k, double min_variance) {
    const double u = 1.0 / sigma;
    const double e = std::exp(u);
    return std::sqrt(min_variance * std::expm1(u) * std::exp(2.0 * u) *
                     (-std::expm1(-2.0 * static_cast<double>(k) / sigma)) /
                     ((e + 1.0) * (e + 1.0) * (e + 1.0)));
}

// Converse-side lower bound. The CLT constant is supplied by the caller (it
// is not computable from the analysis); the vanishing window fraction is
// evaluated at its limit of 0. Only the sigma-scaling of this expression is
// meaningful, never its absolute value.
inline double converse_lower_bound(double sigma, std::int64_t k, double eta, double epsilon,
                                   double clt_constant, const SourceSpec& spec, double d_min) {
    if (!(sigma > 0.0)) throw validation_error("converse_lower_bound: sigma must be positive");
    if (k < 1) throw validation_error("converse_lower_bound: k must be >= 1");
    double min_var = 0.25;
    for (double p : spec.pmf) min_var = std::min(min_var, p * (1.0 - p));
    const double lead = clt_constant * converse_leading_term(sigma, k, min_var);
    const double u = 1.0 / sigma;
    const double corrections =
        std::sqrt(2.0 / std::pow(sigma, 1.0 + (epsilon - eta) / 2.0)) +
        std::exp(-std::pow(sigma, eta / 2.0)) * 2.0 * std::exp(u) / (std::exp(u) + 1.0);
    const double kd = static_cast<double>(k);
    // count of window indices away from the boundary; empty until
    // sigma^{eta/2} exceeds 2
    const double interior = std::max(0.0, std::floor(kd * (1.0 - 2.0 / std::pow(sigma, eta / 2.0))));
    const double prefactor = interior / kd * (d_min * d_min / 2.0) * static_cast<double>(spec.alphabet);
    return prefactor * (lead - corrections);
}

enum class RegionClass { Achievable, NotAchievable, Unresolved };

inline const char* to_string(RegionClass c) {
    switch (c) {
    case RegionClass::Achievable: return "Achievable";
    case RegionClass::NotAchievable: return "NotAchievable";
    case RegionClass::Unresolved: return "Unresolved";
    }
    return "Unresolved";
}

// Classifies a convergence-rate pair (alpha, beta); -infinity sentinels are
// allowed. Achievability combines the three proven schemes with upward
// monotone closure; the converse statement is applied literally at
// beta = -1/2 only, leaving {alpha < -2, beta < -1/2} unresolved.
inline RegionClass classify_rate_region(double alpha, double beta) {
    if (beta > -0.5) return RegionClass::Achievable;                      // zero-rate scheme
    if (alpha >= 0.0) return RegionClass::Achievable;                     // k = 1 scheme
    if (alpha > -1.0 && alpha < 0.0 && alpha + beta > -1.5)
        return RegionClass::Achievable;                                   // permutation scheme
    if (alpha < -2.0 && beta == -0.5) return RegionClass::NotAchievable;  // converse
    return RegionClass::Unresolved;
}

} // namespace wd
