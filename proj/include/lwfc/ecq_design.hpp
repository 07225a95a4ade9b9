#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lwfc/binarization.hpp"
#include "lwfc/detail/byte_io.hpp"
#include "lwfc/errors.hpp"
#include "lwfc/quantize.hpp"
#include "lwfc/types.hpp"

namespace lwfc {

// Offline entropy-constrained quantizer design. Two variants of the
// same descent:
//
//   conventional  rate term -log2(p_n) from the running bin
//                 probabilities; all levels free (bin centroids).
//   modified      rate term is the fixed truncated-unary codeword
//                 length b_n, and the outermost levels are pinned to
//                 the clip bounds on every iteration so reconstructions
//                 span the full clipping range.
//
// Each iteration assigns every sample to its cost-minimizing bin
// (ties to the lowest index, for determinism), refits levels, and
// records the Lagrangian cost J = D + lambda*R as a per-sample mean.
// Decision thresholds are derived from first principles as the point
// where adjacent-bin costs are equal, then clamped into
// [level_{n-1}, level_n].

struct DesignConfig {
    std::uint32_t n_bins = 2;
    double lambda = 0.0;
    ClipRange clip;                 // modified variant only
    CodewordTable codeword_lengths; // modified variant only; N entries
    double rel_tolerance = 1e-6;
    std::uint32_t max_iterations = 100;
};

struct Assignment {
    std::vector<std::uint32_t> bin_of_sample;
    std::vector<std::uint64_t> counts;
    std::vector<double> probabilities;
};

struct DesignResult {
    Codebook codebook;
    std::vector<double> cost_trace; // one entry per iteration, non-increasing
    std::uint32_t iterations = 0;
    bool converged = false;
};

enum class DesignVariant { conventional, modified };

// Per-sample Lagrangian cost of a codebook under given per-bin rate
// terms, with samples routed through the codebook's own thresholds
// (tie at a threshold goes to the upper bin).
inline double lagrangian_cost(std::span<const double> samples, const Codebook& cb,
                              std::span<const double> rate_terms, double lambda) {
    cb.validate();
    if (samples.empty()) throw InvalidArgument("empty training set");
    if (rate_terms.size() != cb.size())
        throw InvalidArgument("rate terms must have one entry per bin");
    double acc = 0.0;
    for (double x : samples) {
        auto it = std::upper_bound(cb.thresholds.begin(), cb.thresholds.end(), x);
        const auto n = static_cast<std::size_t>(it - cb.thresholds.begin());
        const double d = x - cb.levels[n];
        acc += d * d + lambda * rate_terms[n];
    }
    return acc / static_cast<double>(samples.size());
}

namespace detail {

// argmin_n (x - level_n)^2 + lambda * rate_n, lowest index on ties.
inline void assign_and_accumulate(std::span<const double> samples,
                                  std::span<const double> levels,
                                  std::span<const double> rates, double lambda,
                                  std::vector<std::uint32_t>& bins,
                                  std::vector<std::uint64_t>& counts,
                                  std::vector<double>& sums) {
    const std::size_t n_bins = levels.size();
    bins.resize(samples.size());
    counts.assign(n_bins, 0);
    sums.assign(n_bins, 0.0);
    for (std::size_t m = 0; m < samples.size(); ++m) {
        const double x = samples[m];
        std::uint32_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < n_bins; ++n) {
            const double d = x - levels[n];
            const double cost = d * d + lambda * rates[n];
            if (cost < best_cost) {
                best_cost = cost;
                best = static_cast<std::uint32_t>(n);
            }
        }
        bins[m] = best;
        ++counts[best];
        sums[best] += x;
    }
}

// Restores strictly increasing level order after descent. Only bins
// that went empty can violate it; the offending run is respaced
// linearly between the nearest kept anchors. Pinned ends stay exact.
inline void enforce_strict_order(std::vector<double>& levels, bool pinned_ends, double lo,
                                 double hi) {
    const std::size_t n = levels.size();
    std::vector<std::size_t> kept;
    kept.push_back(0);
    const std::size_t last = n - 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (pinned_ends && i == last) break;
        if (levels[i] > levels[kept.back()] && (!pinned_ends || levels[i] < levels[last]))
            kept.push_back(i);
    }
    if (pinned_ends && kept.back() != last) kept.push_back(last);
    for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
        const std::size_t a = kept[k], b = kept[k + 1];
        for (std::size_t i = a + 1; i < b; ++i)
            levels[i] = levels[a] + (levels[b] - levels[a]) * static_cast<double>(i - a) /
                                        static_cast<double>(b - a);
    }
    if (!pinned_ends && kept.back() < last) {
        const std::size_t a = kept.back();
        double span = hi - levels[a];
        if (!(span > 0.0)) span = hi - lo;
        const double step = span / static_cast<double>(n - a);
        for (std::size_t i = a + 1; i < n; ++i)
            levels[i] = levels[a] + step * static_cast<double>(i - a);
    }
}

// Cost-equality thresholds, with the threshold pair of any
// still-empty bin collapsed at the boundary of its flanking
// neighbours, then everything clamped into [level_{n-1}, level_n]
// (which also makes the sequence non-decreasing).
inline std::vector<double> cost_equality_thresholds(const std::vector<double>& levels,
                                                    const std::vector<double>& rates,
                                                    double lambda,
                                                    const std::vector<std::uint64_t>& counts) {
    const std::size_t n = levels.size();
    std::vector<double> th(n - 1);
    auto boundary = [&](std::size_t a, std::size_t b) {
        return 0.5 * (levels[a] + levels[b]) +
               lambda * (rates[b] - rates[a]) / (2.0 * (levels[b] - levels[a]));
    };
    for (std::size_t i = 0; i + 1 < n; ++i) th[i] = boundary(i, i + 1);
    if (!counts.empty()) {
        std::size_t i = 1;
        while (i + 1 < n) {
            if (counts[i] == 0) {
                std::size_t j = i;
                while (j + 1 < n && counts[j] == 0) ++j; // run [i, j)
                const double t = boundary(i - 1, j);
                for (std::size_t k = i - 1; k < j; ++k) th[k] = t;
                i = j;
            } else {
                ++i;
            }
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        th[i] = std::clamp(th[i], levels[i], levels[i + 1]);
    return th;
}

inline DesignResult run_design(std::span<const double> raw_samples, const DesignConfig& cfg,
                               DesignVariant variant) {
    if (cfg.n_bins < 2) throw InvalidArgument("design needs at least 2 bins");
    if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
        throw InvalidArgument("lambda must be non-negative and finite");
    if (!(cfg.rel_tolerance > 0.0)) throw InvalidArgument("rel_tolerance must be positive");
    if (cfg.max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
    const std::size_t n = cfg.n_bins;
    const bool modified = variant == DesignVariant::modified;
    if (modified) {
        cfg.clip.validate();
        if (cfg.codeword_lengths.lengths.size() != n)
            throw InvalidArgument("codeword length table must have one entry per bin");
    }
    if (raw_samples.size() < n) throw InvalidArgument("fewer training samples than bins");

    std::vector<double> xs(raw_samples.begin(), raw_samples.end());
    for (double x : xs)
        if (!std::isfinite(x)) throw DataError("training sample not finite");
    if (modified)
        for (double& x : xs) x = clip(x, cfg.clip);
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(lo < hi)) throw InvalidArgument("degenerate design: all training samples identical");
    const double sample_count = static_cast<double>(xs.size());

    // Initialization: levels uniformly spaced over the (clipped) sample
    // range, probabilities equiprobable.
    std::vector<double> levels(n);
    for (std::size_t i = 0; i < n; ++i)
        levels[i] = i == 0 ? lo
                  : i == n - 1
                      ? hi
                      : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);

    // -log2(p) is floored at p = 1/(2M) so empty bins keep a finite,
    // large rate penalty and can be re-entered.
    const double prob_floor = 1.0 / (2.0 * sample_count);
    std::vector<double> rates(n);
    if (modified) {
        for (std::size_t i = 0; i < n; ++i)
            rates[i] = static_cast<double>(cfg.codeword_lengths.lengths[i]);
    } else {
        const double r0 = -std::log2(std::max(1.0 / static_cast<double>(n), prob_floor));
        rates.assign(n, r0);
    }

    std::vector<std::uint32_t> bins;
    std::vector<std::uint64_t> counts;
    std::vector<double> sums;
    DesignResult result;
    double prev_cost = std::numeric_limits<double>::infinity();

    for (std::uint32_t iter = 0; iter < cfg.max_iterations; ++iter) {
        assign_and_accumulate(xs, levels, rates, cfg.lambda, bins, counts, sums);

        if (modified) {
            levels.front() = cfg.clip.c_min;
            levels.back() = cfg.clip.c_max;
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (counts[i] > 0) levels[i] = sums[i] / static_cast<double>(counts[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[i] > 0) levels[i] = sums[i] / static_cast<double>(counts[i]);
                const double p = static_cast<double>(counts[i]) / sample_count;
                rates[i] = -std::log2(std::max(p, prob_floor));
            }
        }

        double distortion = 0.0;
        double rate = 0.0;
        for (std::size_t m = 0; m < xs.size(); ++m) {
            const double d = xs[m] - levels[bins[m]];
            distortion += d * d;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (counts[i] > 0) rate += static_cast<double>(counts[i]) * rates[i];
        const double cost = (distortion + cfg.lambda * rate) / sample_count;
        result.cost_trace.push_back(cost);

        if (prev_cost - cost <= cfg.rel_tolerance *
                                    std::max(prev_cost, std::numeric_limits<double>::min())) {
            result.converged = true;
            break;
        }
        prev_cost = cost;
    }
    result.iterations = static_cast<std::uint32_t>(result.cost_trace.size());

    enforce_strict_order(levels, modified, lo, hi);
    result.codebook.levels = levels;
    result.codebook.thresholds = cost_equality_thresholds(levels, rates, cfg.lambda, counts);
    result.codebook.validate();
    return result;
}

} // namespace detail

inline Assignment assign_samples(std::span<const double> samples,
                                 std::span<const double> levels,
                                 std::span<const double> rate_terms, double lambda) {
    if (levels.size() < 2 || rate_terms.size() != levels.size())
        throw InvalidArgument("levels/rate terms size mismatch");
    Assignment a;
    std::vector<double> sums;
    detail::assign_and_accumulate(samples, levels, rate_terms, lambda, a.bin_of_sample, a.counts,
                                  sums);
    a.probabilities.resize(a.counts.size());
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        a.probabilities[i] =
            static_cast<double>(a.counts[i]) / static_cast<double>(samples.size());
    return a;
}

inline DesignResult design_conventional(std::span<const double> samples,
                                        const DesignConfig& cfg) {
    return detail::run_design(samples, cfg, DesignVariant::conventional);
}

inline DesignResult design_modified(std::span<const double> samples, const DesignConfig& cfg) {
    return detail::run_design(samples, cfg, DesignVariant::modified);
}

// Exhaustive grid search over the free levels, for verifying the
// iterative designs on small instances. Kept deliberately independent
// of the descent code. The conventional variant is supported only at
// lambda = 0: its probability rate terms depend on the assignment they
// drive, which has no closed per-candidate evaluation.
inline std::pair<Codebook, double> brute_force_design_oracle(std::span<const double> raw_samples,
                                                             const DesignConfig& cfg,
                                                             DesignVariant variant,
                                                             double grid_step) {
    if (cfg.n_bins < 2 || cfg.n_bins > 3) throw InvalidArgument("oracle supports N in [2, 3]");
    if (raw_samples.size() > 64) throw InvalidArgument("oracle supports at most 64 samples");
    if (raw_samples.empty()) throw InvalidArgument("empty training set");
    if (!(grid_step > 0.0) || !std::isfinite(grid_step))
        throw InvalidArgument("grid_step must be positive");
    const bool modified = variant == DesignVariant::modified;
    if (!modified && cfg.lambda != 0.0)
        throw InvalidArgument("oracle supports the conventional variant only at lambda = 0");

    const std::size_t n = cfg.n_bins;
    std::vector<double> xs(raw_samples.begin(), raw_samples.end());
    std::vector<double> rates(n, 0.0);
    if (modified) {
        cfg.clip.validate();
        if (cfg.codeword_lengths.lengths.size() != n)
            throw InvalidArgument("codeword length table must have one entry per bin");
        for (std::size_t i = 0; i < n; ++i)
            rates[i] = static_cast<double>(cfg.codeword_lengths.lengths[i]);
        for (double& x : xs) x = clip(x, cfg.clip);
    }

    auto candidate_cost = [&](const std::vector<double>& levels) {
        double acc = 0.0;
        for (double x : xs) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double d = x - levels[i];
                const double c = d * d + cfg.lambda * rates[i];
                if (c < best) best = c;
            }
            acc += best;
        }
        return acc / static_cast<double>(xs.size());
    };

    std::vector<double> best_levels;
    double best_cost = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& levels) {
        const double c = candidate_cost(levels);
        if (c < best_cost) {
            best_cost = c;
            best_levels = levels;
        }
    };

    if (modified) {
        const double c_min = cfg.clip.c_min, c_max = cfg.clip.c_max;
        if (n == 2) {
            consider({c_min, c_max});
        } else {
            const auto max_points =
                static_cast<std::uint64_t>((static_cast<double>(c_max) - c_min) / grid_step) + 2;
            if (max_points > 10'000'000) throw InvalidArgument("oracle instance too large");
            bool any = false;
            for (std::uint64_t k = 1;; ++k) {
                const double g = c_min + static_cast<double>(k) * grid_step;
                if (!(g < c_max)) break;
                consider({c_min, g, c_max});
                any = true;
            }
            if (!any) throw InvalidArgument("grid_step too coarse for interior level");
        }
    } else {
        const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
        const double lo = *lo_it, hi = *hi_it;
        if (!(lo < hi)) throw InvalidArgument("degenerate design: all training samples identical");
        std::vector<double> grid;
        for (std::uint64_t k = 0;; ++k) {
            const double g = lo + static_cast<double>(k) * grid_step;
            if (g > hi) break;
            grid.push_back(g);
            if (grid.size() > 10'000'000) throw InvalidArgument("oracle instance too large");
        }
        if (grid.back() < hi) grid.push_back(hi);
        const double combos = n == 2
                                  ? 0.5 * static_cast<double>(grid.size()) * grid.size()
                                  : static_cast<double>(grid.size()) * grid.size() * grid.size() / 6.0;
        if (combos * static_cast<double>(xs.size()) > 2e8)
            throw InvalidArgument("oracle instance too large");
        std::vector<double> levels(n);
        if (n == 2) {
            for (std::size_t i = 0; i < grid.size(); ++i)
                for (std::size_t j = i + 1; j < grid.size(); ++j)
                    consider({grid[i], grid[j]});
        } else {
            for (std::size_t i = 0; i < grid.size(); ++i)
                for (std::size_t j = i + 1; j < grid.size(); ++j)
                    for (std::size_t k = j + 1; k < grid.size(); ++k)
                        consider({grid[i], grid[j], grid[k]});
        }
    }

    Codebook cb;
    cb.levels = best_levels;
    cb.thresholds = detail::cost_equality_thresholds(best_levels, rates, cfg.lambda, {});
    cb.validate();
    return {cb, best_cost};
}

// .lwqc codebook file: "LWQC", version 0x01, u8 N, N float32 levels,
// N-1 float32 thresholds, float32 c_min, float32 c_max. Everything
// little-endian.

inline constexpr char kCodebookMagic[4] = {'L', 'W', 'Q', 'C'};
inline constexpr std::uint8_t kCodebookVersion = 0x01;

struct CodebookFile {
    Codebook codebook;
    ClipRange clip;
};

inline std::vector<std::uint8_t> serialize_codebook(const Codebook& cb, const ClipRange& clip) {
    cb.validate();
    clip.validate();
    if (cb.size() > 255) throw InvalidArgument("codebook too large for file format (N > 255)");
    // Narrow to float32 once and re-validate: nearly-equal designed
    // levels could collapse and must be caught at write time.
    Codebook narrowed;
    for (double v : cb.levels) narrowed.levels.push_back(static_cast<float>(v));
    for (double v : cb.thresholds) narrowed.thresholds.push_back(static_cast<float>(v));
    narrowed.validate();
    std::vector<std::uint8_t> out;
    out.insert(out.end(), std::begin(kCodebookMagic), std::end(kCodebookMagic));
    detail::put_u8(out, kCodebookVersion);
    detail::put_u8(out, static_cast<std::uint8_t>(cb.size()));
    for (double v : narrowed.levels) detail::put_f32le(out, static_cast<float>(v));
    for (double v : narrowed.thresholds) detail::put_f32le(out, static_cast<float>(v));
    detail::put_f32le(out, clip.c_min);
    detail::put_f32le(out, clip.c_max);
    return out;
}

inline CodebookFile parse_codebook(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (!std::equal(std::begin(magic), std::end(magic), std::begin(kCodebookMagic)))
        throw FormatError("not a codebook file (bad magic)");
    if (r.u8() != kCodebookVersion) throw FormatError("unsupported codebook file version");
    const std::uint8_t n = r.u8();
    if (n < 2) throw FormatError("codebook file needs at least 2 levels");
    CodebookFile file;
    for (std::uint32_t i = 0; i < n; ++i) file.codebook.levels.push_back(r.f32le());
    for (std::uint32_t i = 0; i + 1 < n; ++i) file.codebook.thresholds.push_back(r.f32le());
    file.clip.c_min = r.f32le();
    file.clip.c_max = r.f32le();
    if (r.remaining() != 0) throw CorruptStreamError("trailing bytes in codebook file");
    file.codebook.validate();
    file.clip.validate();
    return file;
}

inline void write_codebook_file(const std::filesystem::path& path, const Codebook& cb,
                                const ClipRange& clip) {
    detail::write_file(path, serialize_codebook(cb, clip));
}

inline CodebookFile read_codebook_file(const std::filesystem::path& path) {
    return parse_codebook(detail::read_file(path));
}

} // namespace lwfc
