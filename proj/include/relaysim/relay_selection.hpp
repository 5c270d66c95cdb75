#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaysim/channel_model.hpp"
#include "relaysim/energy_model.hpp"
#include "relaysim/errors.hpp"

namespace relaysim {

/// Relay indices are 0-based throughout the library.
struct CandidateSets {
    std::vector<std::size_t> gamma;  // decoded the MS broadcast
    std::vector<std::size_t> sigma;  // subset of gamma whose second hop closes the link

    std::size_t t() const { return gamma.size(); }
};

enum class Scheme { judrs, best_worse, harmonic_mean, direct_only };

inline std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::judrs:
        return "judrs";
    case Scheme::best_worse:
        return "best_worse";
    case Scheme::harmonic_mean:
        return "harmonic_mean";
    case Scheme::direct_only:
        return "direct_only";
    }
    return "unknown";
}

inline Scheme scheme_from_string(std::string_view label)
{
    for (Scheme s : {Scheme::judrs, Scheme::best_worse, Scheme::harmonic_mean, Scheme::direct_only}) {
        if (to_string(s) == label) {
            return s;
        }
    }
    throw DomainError("unknown scheme label '" + std::string(label) + "'");
}

enum class Decision { relay, direct, outage };

/// Pool the baseline selectors draw from.
enum class BaselineSet { sigma, gamma };

struct SelectionOptions {
    bool p0_cap = false;
    BaselineSet baseline_set = BaselineSet::sigma;
};

struct SelectionOutcome {
    Decision decision = Decision::outage;
    std::optional<std::size_t> relay;
    Scheme scheme = Scheme::judrs;
    std::optional<PowerAllocation> powers;
    std::optional<EnergyBreakdown> breakdown;
    std::optional<double> energy_per_bit;  // weighted, absent on outage
    CandidateSets candidate_sets;
};

inline std::vector<std::size_t> form_gamma(const SystemParams& params, const ChannelRealization& real)
{
    const double th1 = two_phase_threshold(params);
    std::vector<std::size_t> gamma;
    for (std::size_t i = 0; i < real.relay_count(); ++i) {
        if (params.p0_watts * real.h_sq[i] >= th1) {
            gamma.push_back(i);
        }
    }
    return gamma;
}

inline std::vector<std::size_t> form_sigma(const SystemParams& params, const ChannelRealization& real,
                                           const std::vector<std::size_t>& gamma)
{
    const double th1 = two_phase_threshold(params);
    std::vector<std::size_t> sigma;
    for (std::size_t i : gamma) {
        const double th2 = th1 * (1.0 - real.h_direct_sq / real.h_sq[i]);
        if (params.p0_watts * real.g_sq[i] >= th2) {
            sigma.push_back(i);
        }
    }
    return sigma;
}

inline CandidateSets form_candidate_sets(const SystemParams& params, const ChannelRealization& real)
{
    CandidateSets sets;
    sets.gamma = form_gamma(params, real);
    sets.sigma = form_sigma(params, real, sets.gamma);
    return sets;
}

namespace detail {

struct RelayOption {
    PowerAllocation powers;
    EnergyBreakdown breakdown;
    double weighted = 0.0;
};

inline std::optional<RelayOption> relay_option(const TrafficProfile& profile, const SystemParams& params,
                                               const ChannelRealization& real, std::size_t relay,
                                               const SelectionOptions& options)
{
    if (!(real.h_sq[relay] > 0.0) || !(real.g_sq[relay] > 0.0)) {
        return std::nullopt;
    }
    RelayOption opt;
    opt.powers = allocate_powers(params, real, relay, options.p0_cap);
    if (opt.powers.exceeds_p0) {
        return std::nullopt;
    }
    opt.breakdown = coop_energy_breakdown(profile, params, opt.powers);
    opt.weighted = opt.breakdown.weighted(profile);
    return opt;
}

inline bool direct_within_cap(const SystemParams& params, const ChannelRealization& real,
                              const SelectionOptions& options)
{
    return !options.p0_cap || direct_link_supports_rate(params, real);
}

inline SelectionOutcome direct_or_outage(const TrafficProfile& profile, const SystemParams& params,
                                         const ChannelRealization& real, SelectionOutcome out)
{
    if (direct_link_supports_rate(params, real)) {
        out.decision = Decision::direct;
        out.breakdown = direct_energy_breakdown(profile, params, real);
        out.energy_per_bit = out.breakdown->weighted(profile);
    } else {
        out.decision = Decision::outage;
    }
    return out;
}

inline SelectionOutcome with_relay(std::size_t relay, RelayOption opt, SelectionOutcome out)
{
    out.decision = Decision::relay;
    out.relay = relay;
    out.powers = opt.powers;
    out.breakdown = opt.breakdown;
    out.energy_per_bit = opt.weighted;
    return out;
}

/// Shared driver for the metric-based baselines: argmax of `metric` over
/// the configured pool, lowest index on ties.
template <class Metric>
SelectionOutcome select_by_metric(Scheme scheme, Metric metric, const TrafficProfile& profile,
                                  const SystemParams& params, const ChannelRealization& real,
                                  const SelectionOptions& options)
{
    SelectionOutcome out;
    out.scheme = scheme;
    out.candidate_sets = form_candidate_sets(params, real);
    const auto& pool =
        options.baseline_set == BaselineSet::sigma ? out.candidate_sets.sigma : out.candidate_sets.gamma;

    std::optional<std::size_t> best;
    std::optional<RelayOption> best_opt;
    double best_metric = -std::numeric_limits<double>::infinity();
    for (std::size_t i : pool) {
        auto opt = relay_option(profile, params, real, i, options);
        if (!opt) {
            continue;
        }
        const double m = metric(real.h_sq[i], real.g_sq[i]);
        if (!best || m > best_metric) {
            best = i;
            best_opt = opt;
            best_metric = m;
        }
    }
    if (!best) {
        return direct_or_outage(profile, params, real, std::move(out));
    }
    return with_relay(*best, *best_opt, std::move(out));
}

}  // namespace detail

/// Energy-minimising joint UL/DL selection. Relays in sigma are ranked by
/// the weighted energy of their (clamped) minimum-power allocation; direct
/// transmission wins ties. With an empty sigma the direct link is used if
/// it supports rate R at P0, otherwise the outcome is an outage.
inline SelectionOutcome select_judrs(const TrafficProfile& profile, const SystemParams& params,
                                     const ChannelRealization& real, const SelectionOptions& options = {})
{
    SelectionOutcome out;
    out.scheme = Scheme::judrs;
    out.candidate_sets = form_candidate_sets(params, real);

    std::optional<std::size_t> best;
    std::optional<detail::RelayOption> best_opt;
    for (std::size_t i : out.candidate_sets.sigma) {
        auto opt = detail::relay_option(profile, params, real, i, options);
        if (opt && (!best || opt->weighted < best_opt->weighted)) {
            best = i;
            best_opt = opt;
        }
    }
    if (!best) {
        return detail::direct_or_outage(profile, params, real, std::move(out));
    }

    const double e_direct = weighted_energy_direct(profile, params, real);
    if (real.h_direct_sq > 0.0 && detail::direct_within_cap(params, real, options) &&
        e_direct <= best_opt->weighted) {
        out.decision = Decision::direct;
        out.breakdown = direct_energy_breakdown(profile, params, real);
        out.energy_per_bit = out.breakdown->weighted(profile);
        return out;
    }
    return detail::with_relay(*best, *best_opt, std::move(out));
}

/// Baseline: relay whose weaker hop is strongest.
inline SelectionOutcome select_best_worse(const TrafficProfile& profile, const SystemParams& params,
                                          const ChannelRealization& real, const SelectionOptions& options = {})
{
    return detail::select_by_metric(
        Scheme::best_worse, [](double h, double g) { return std::min(h, g); }, profile, params, real, options);
}

inline double harmonic_mean_metric(double h, double g)
{
    if (!(h > 0.0) || !(g > 0.0)) {
        return 0.0;
    }
    return 1.0 / (1.0 / h + 1.0 / g);
}

/// Baseline: relay maximising (|h|^-2 + |g|^-2)^-1.
inline SelectionOutcome select_harmonic_mean(const TrafficProfile& profile, const SystemParams& params,
                                             const ChannelRealization& real,
                                             const SelectionOptions& options = {})
{
    return detail::select_by_metric(Scheme::harmonic_mean, harmonic_mean_metric, profile, params, real, options);
}

/// No cooperation at all.
inline SelectionOutcome select_direct_only(const TrafficProfile& profile, const SystemParams& params,
                                           const ChannelRealization& real)
{
    SelectionOutcome out;
    out.scheme = Scheme::direct_only;
    out.candidate_sets = form_candidate_sets(params, real);
    return detail::direct_or_outage(profile, params, real, std::move(out));
}

inline SelectionOutcome select(Scheme scheme, const TrafficProfile& profile, const SystemParams& params,
                               const ChannelRealization& real, const SelectionOptions& options = {})
{
    switch (scheme) {
    case Scheme::judrs:
        return select_judrs(profile, params, real, options);
    case Scheme::best_worse:
        return select_best_worse(profile, params, real, options);
    case Scheme::harmonic_mean:
        return select_harmonic_mean(profile, params, real, options);
    case Scheme::direct_only:
        return select_direct_only(profile, params, real);
    }
    throw DomainError("unknown scheme");
}

}  // namespace relaysim
