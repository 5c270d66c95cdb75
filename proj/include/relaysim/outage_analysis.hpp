#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "relaysim/channel_model.hpp"
#include "relaysim/errors.hpp"
#include "relaysim/parallel.hpp"
#include "relaysim/relay_selection.hpp"
#include "relaysim/rng.hpp"

namespace relaysim {

inline double mutual_info_direct(double rho, double h_direct_sq)
{
    return std::log2(1.0 + rho * h_direct_sq);
}

/// Half-duplex relaying: the destination combines both phases, each using
/// half the channel uses.
inline double mutual_info_two_hop(double rho, double h_direct_sq, double g_best_sq)
{
    return 0.5 * std::log2(1.0 + rho * (h_direct_sq + g_best_sq));
}

/// Which relay the outage event is evaluated for.
enum class OutageRule {
    snr_max,  // best second hop among relays that decoded (the analysis' bounding rule)
    judrs,    // the relay the energy-minimising selector actually picks
};

struct OutageOptions {
    OutageRule rule = OutageRule::snr_max;
    std::size_t workers = 1;
    /// Keep adding trials until this many outage events are seen, up to max_trials.
    std::uint64_t min_events = 0;
    std::uint64_t max_trials = 0;  // 0: never grow beyond the requested trials
    bool hard_zero_direct = false;
    TrafficProfile profile{};        // judrs rule only
    SelectionOptions selection{};    // judrs rule only
};

struct OutageEstimate {
    double probability = 0.0;  // zeta * UL + (1 - zeta) * DL
    std::uint64_t trials = 0;
    double ci95_halfwidth = 0.0;
    double snr_rho = 0.0;
    double rate_r_bits = 0.0;
    double ul_probability = 0.0;
    double dl_probability = 0.0;
    std::uint64_t ul_events = 0;
    std::uint64_t dl_events = 0;
    double mean_gamma_size = 0.0;
    bool low_confidence = false;  // fewer than OutageOptions::min_events events
};

inline double ci95_halfwidth(double p, std::uint64_t trials)
{
    return trials == 0 ? 0.0 : 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

namespace detail {

struct OutageCounts {
    std::uint64_t trials = 0;
    std::uint64_t ul = 0;
    std::uint64_t dl = 0;
    std::uint64_t gamma_total = 0;

    OutageCounts& operator+=(const OutageCounts& o)
    {
        trials += o.trials;
        ul += o.ul;
        dl += o.dl;
        gamma_total += o.gamma_total;
        return *this;
    }
};

/// One direction of the relay channel. `first_hop` decides who decodes,
/// `second_hop` is what the destination combines with the direct link.
inline bool direction_in_outage_snr_max(double rho, double rate, double two_phase_snr, double h_direct_sq,
                                        std::span<const double> first_hop, std::span<const double> second_hop,
                                        std::size_t& decoded)
{
    decoded = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < first_hop.size(); ++i) {
        if (rho * first_hop[i] >= two_phase_snr) {
            ++decoded;
            best = std::max(best, second_hop[i]);
        }
    }
    if (mutual_info_direct(rho, h_direct_sq) >= rate) {
        return false;
    }
    return decoded == 0 || mutual_info_two_hop(rho, h_direct_sq, best) < rate;
}

inline bool relay_direction_in_outage(double rho, double rate, double two_phase_snr, double h_direct_sq,
                                      double first_hop, double second_hop)
{
    if (mutual_info_direct(rho, h_direct_sq) >= rate) {
        return false;
    }
    return rho * first_hop < two_phase_snr || mutual_info_two_hop(rho, h_direct_sq, second_hop) < rate;
}

}  // namespace detail

/// Monte Carlo outage of the relay network at general SNR rho and rate R.
///
/// Uplink: MS broadcasts, relays with rho |h_i|^2 >= 2^{2R} - 1 decode and
/// the BS combines the direct link with the chosen relay's |g|^2. Downlink
/// mirrors it with h and g exchanged. Trial k always uses stream (seed, k).
inline OutageEstimate outage_probability_mc(const LinkStatistics& stats, double zeta, double rho, double rate_r,
                                            std::uint64_t trials, std::uint64_t seed,
                                            const OutageOptions& options = {})
{
    if (trials == 0) {
        throw DomainError("outage_probability_mc: trials must be >= 1");
    }
    if (!(rho > 0.0) || !(rate_r > 0.0)) {
        throw DomainError("outage_probability_mc: rho and rate must be > 0");
    }
    if (!(zeta >= 0.0 && zeta <= 1.0)) {
        throw DomainError("outage_probability_mc: zeta must lie in [0, 1]");
    }
    const double two_phase_snr = std::exp2(2.0 * rate_r) - 1.0;

    SystemParams normalised;
    normalised.noise_psd_w_per_hz = 1.0;
    normalised.bandwidth_hz = 1.0;
    normalised.p0_watts = rho;
    normalised.spectral_efficiency_r = rate_r;

    auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
        detail::OutageCounts counts;
        for (std::uint64_t k = begin; k < end; ++k) {
            ChannelRealization real = sample_realization(stats, seed, k);
            if (options.hard_zero_direct) {
                real.h_direct_sq = 0.0;
            }
            std::size_t gamma_ul = 0;
            bool ul = false;
            bool dl = false;
            if (options.rule == OutageRule::snr_max) {
                std::size_t gamma_dl = 0;
                ul = detail::direction_in_outage_snr_max(rho, rate_r, two_phase_snr, real.h_direct_sq, real.h_sq,
                                                         real.g_sq, gamma_ul);
                dl = detail::direction_in_outage_snr_max(rho, rate_r, two_phase_snr, real.h_direct_sq, real.g_sq,
                                                         real.h_sq, gamma_dl);
            } else {
                const SelectionOutcome out = select_judrs(options.profile, normalised, real, options.selection);
                gamma_ul = out.candidate_sets.t();
                const bool direct_fails = mutual_info_direct(rho, real.h_direct_sq) < rate_r;
                if (out.decision == Decision::relay) {
                    const std::size_t i = *out.relay;
                    ul = detail::relay_direction_in_outage(rho, rate_r, two_phase_snr, real.h_direct_sq,
                                                           real.h_sq[i], real.g_sq[i]);
                    dl = detail::relay_direction_in_outage(rho, rate_r, two_phase_snr, real.h_direct_sq,
                                                           real.g_sq[i], real.h_sq[i]);
                } else {
                    ul = dl = direct_fails;
                }
            }
            ++counts.trials;
            counts.ul += ul ? 1 : 0;
            counts.dl += dl ? 1 : 0;
            counts.gamma_total += gamma_ul;
        }
        return counts;
    };

    auto relevant_events = [zeta](const detail::OutageCounts& c) {
        return (zeta > 0.0 ? c.ul : 0) + (zeta < 1.0 ? c.dl : 0);
    };

    detail::OutageCounts total;
    std::uint64_t block = trials;
    const std::uint64_t cap = std::max(trials, options.max_trials);
    while (true) {
        for (const auto& c : map_trial_chunks<detail::OutageCounts>(total.trials, block, options.workers, chunk)) {
            total += c;
        }
        if (relevant_events(total) >= options.min_events || total.trials >= cap) {
            break;
        }
        block = std::min(total.trials, cap - total.trials);
    }

    OutageEstimate est;
    const double n = static_cast<double>(total.trials);
    est.trials = total.trials;
    est.snr_rho = rho;
    est.rate_r_bits = rate_r;
    est.ul_events = total.ul;
    est.dl_events = total.dl;
    est.ul_probability = static_cast<double>(total.ul) / n;
    est.dl_probability = static_cast<double>(total.dl) / n;
    est.probability = zeta * est.ul_probability + (1.0 - zeta) * est.dl_probability;
    est.ci95_halfwidth = ci95_halfwidth(est.probability, total.trials);
    est.mean_gamma_size = static_cast<double>(total.gamma_total) / n;
    est.low_confidence = relevant_events(total) < options.min_events;
    return est;
}

/// Monte Carlo histogram of |Gamma| (relays decoding the MS broadcast),
/// indexed 0..N.
inline std::vector<std::uint64_t> gamma_size_histogram_mc(const LinkStatistics& stats, double rho, double rate_r,
                                                          std::uint64_t trials, std::uint64_t seed,
                                                          std::size_t workers = 1)
{
    const std::size_t n = stats.relay_count();
    const double two_phase_snr = std::exp2(2.0 * rate_r) - 1.0;
    auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<std::uint64_t> hist(n + 1, 0);
        for (std::uint64_t k = begin; k < end; ++k) {
            const ChannelRealization real = sample_realization(stats, seed, k);
            std::size_t t = 0;
            for (double h : real.h_sq) {
                t += rho * h >= two_phase_snr ? 1 : 0;
            }
            ++hist[t];
        }
        return hist;
    };
    std::vector<std::uint64_t> hist(n + 1, 0);
    for (const auto& part : map_trial_chunks<std::vector<std::uint64_t>>(0, trials, workers, chunk)) {
        for (std::size_t t = 0; t <= n; ++t) {
            hist[t] += part[t];
        }
    }
    return hist;
}

/// Pr{|Gamma| = t} for independent exponential first hops with rates
/// lambdas: the sum over all size-t subsets of the decode/fail product,
/// evaluated by dynamic programming over relays.
inline double prob_gamma_size_closed_form(std::span<const double> lambdas, double rho, double rate_r,
                                          std::size_t t)
{
    const std::size_t n = lambdas.size();
    if (t > n) {
        throw DomainError("prob_gamma_size_closed_form: t out of range");
    }
    const double x = (std::exp2(2.0 * rate_r) - 1.0) / rho;
    std::vector<double> dist(n + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = std::exp(-lambdas[i] * x);
        for (std::size_t k = i + 1; k > 0; --k) {
            dist[k] = dist[k] * (1.0 - q) + dist[k - 1] * q;
        }
        dist[0] *= 1.0 - q;
    }
    return dist[t];
}

/// Pr{log2(1 + rho |h_direct|^2) < R} for an exponential direct gain.
inline double direct_outage_closed_form(double lambda_direct, double rho, double rate_r)
{
    return -std::expm1(-lambda_direct * (std::exp2(rate_r) - 1.0) / rho);
}

struct DmtPoint {
    double multiplexing_r = 0.0;
    double diversity_d = 0.0;
};

/// d(r) = (N+1) (1 - r (2N+1)/(N+1))^+.
inline DmtPoint dmt_theoretical(std::size_t n_relays, double r)
{
    if (!(r >= 0.0)) {
        throw DomainError("dmt_theoretical: r must be >= 0");
    }
    const double n = static_cast<double>(n_relays);
    return {r, (n + 1.0) * std::max(0.0, 1.0 - r * (2.0 * n + 1.0) / (n + 1.0))};
}

struct OutagePoint {
    double rho = 0.0;
    double probability = 0.0;
};

/// Negated least-squares slope of log10 P_out against log10 rho. Points
/// with probability outside (0, 1) are dropped; at least three must remain.
inline double estimate_diversity_slope(std::span<const OutagePoint> points)
{
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : points) {
        if (p.probability > 0.0 && p.probability < 1.0 && p.rho > 0.0) {
            xy.emplace_back(std::log10(p.rho), std::log10(p.probability));
        }
    }
    if (xy.size() < 3) {
        throw EstimationError("estimate_diversity_slope: fewer than 3 usable points");
    }
    double mx = 0.0;
    double my = 0.0;
    for (auto [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (auto [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) {
        throw EstimationError("estimate_diversity_slope: all points share one SNR");
    }
    return -sxy / sxx;
}

}  // namespace relaysim
