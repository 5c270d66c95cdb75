#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "relaysim/channel_model.hpp"
#include "relaysim/errors.hpp"

namespace relaysim {

/// Uplink share of the traffic and the per-node energy weights.
struct TrafficProfile {
    double zeta = 0.5;
    double l_total_bits = 1e6;
    double weight_ms = 1.0;
    double weight_relay = 1.0;
    double weight_bs = 0.0;

    double ul_bits() const { return zeta * l_total_bits; }
    double dl_bits() const { return (1.0 - zeta) * l_total_bits; }

    void validate() const
    {
        if (!(zeta >= 0.0 && zeta <= 1.0)) {
            throw DomainError("TrafficProfile.zeta must lie in [0, 1]");
        }
        if (!(l_total_bits > 0.0)) {
            throw DomainError("TrafficProfile.l_total_bits must be > 0");
        }
        if (!(weight_ms >= 0.0 && weight_relay >= 0.0 && weight_bs >= 0.0)) {
            throw DomainError("TrafficProfile weights must be >= 0");
        }
        if (weight_ms + weight_relay + weight_bs == 0.0) {
            throw DomainError("TrafficProfile: at least one weight must be > 0");
        }
    }
};

struct Thresholds {
    double th1 = 0.0;
    double th2 = 0.0;
    double th3 = 0.0;
};

/// Minimum transmit powers (W) for one relay serving both directions.
struct PowerAllocation {
    double p_ms_ul = 0.0;
    double p_relay_ul = 0.0;
    double p_bs_dl = 0.0;
    double p_relay_dl = 0.0;
    Thresholds thresholds;
    bool exceeds_p0 = false;  // only set when the P0 cap is enabled
};

/// Unweighted per-bit transmit energy of each node (J/bit).
struct EnergyBreakdown {
    double ms = 0.0;
    double relay = 0.0;
    double bs = 0.0;

    double weighted(const TrafficProfile& profile) const
    {
        return profile.weight_ms * ms + profile.weight_relay * relay + profile.weight_bs * bs;
    }
};

/// Received power needed for rate R over a single phase, N0 B (2^R - 1).
inline double single_phase_threshold(const SystemParams& params)
{
    return params.noise_power() * (std::exp2(params.spectral_efficiency_r) - 1.0);
}

/// th1 = N0 B (2^{2R} - 1): each of the two relaying phases carries 2R.
inline double two_phase_threshold(const SystemParams& params)
{
    return params.noise_power() * (std::exp2(2.0 * params.spectral_efficiency_r) - 1.0);
}

inline void check_relay_index(const ChannelRealization& real, std::size_t relay)
{
    if (relay >= real.relay_count()) {
        throw DomainError("relay index " + std::to_string(relay) + " out of range");
    }
}

/// th2 and th3 discount the first-hop requirement by the direct-link
/// contribution the destination combines.
inline Thresholds thresholds(const SystemParams& params, const ChannelRealization& real, std::size_t relay)
{
    check_relay_index(real, relay);
    const double h = real.h_sq[relay];
    const double g = real.g_sq[relay];
    if (!(h > 0.0) || !(g > 0.0)) {
        throw InfeasibleLinkError("relay " + std::to_string(relay) + " has a zero-gain link");
    }
    const double th1 = two_phase_threshold(params);
    return {th1, th1 * (1.0 - real.h_direct_sq / h), th1 * (1.0 - real.h_direct_sq / g)};
}

/// Negative th2/th3 are clamped to zero power.
inline PowerAllocation allocate_powers(const SystemParams& params, const ChannelRealization& real,
                                       std::size_t relay, bool p0_cap = false)
{
    const Thresholds th = thresholds(params, real, relay);
    const double h = real.h_sq[relay];
    const double g = real.g_sq[relay];
    PowerAllocation alloc;
    alloc.thresholds = th;
    alloc.p_ms_ul = th.th1 / h;
    alloc.p_relay_ul = std::max(0.0, th.th2) / g;
    alloc.p_bs_dl = th.th1 / g;
    alloc.p_relay_dl = std::max(0.0, th.th3) / h;
    if (p0_cap) {
        const double peak = std::max({alloc.p_ms_ul, alloc.p_relay_ul, alloc.p_bs_dl, alloc.p_relay_dl});
        alloc.exceeds_p0 = peak > params.p0_watts;
    }
    return alloc;
}

/// Per-bit energy of each node for a relay allocation: each phase lasts
/// 1/(2RB) seconds per bit, UL terms weighted by zeta and DL by 1 - zeta.
inline EnergyBreakdown coop_energy_breakdown(const TrafficProfile& profile, const SystemParams& params,
                                             const PowerAllocation& alloc)
{
    const double per_bit = 1.0 / (2.0 * params.spectral_efficiency_r * params.bandwidth_hz);
    const double ul = profile.zeta;
    const double dl = 1.0 - profile.zeta;
    return {ul * alloc.p_ms_ul * per_bit, (ul * alloc.p_relay_ul + dl * alloc.p_relay_dl) * per_bit,
            dl * alloc.p_bs_dl * per_bit};
}

/// Closed-form weighted cooperative energy per bit. Agrees with the
/// allocation-based assembly whenever th2 and th3 are non-negative.
inline double weighted_energy_coop(const TrafficProfile& profile, const SystemParams& params,
                                   const ChannelRealization& real, std::size_t relay)
{
    check_relay_index(real, relay);
    const double h = real.h_sq[relay];
    const double g = real.g_sq[relay];
    if (!(h > 0.0) || !(g > 0.0)) {
        throw InfeasibleLinkError("relay " + std::to_string(relay) + " has a zero-gain link");
    }
    const double r = params.spectral_efficiency_r;
    const double scale = params.noise_psd_w_per_hz * (std::exp2(2.0 * r) - 1.0) / (2.0 * r);
    const double zeta = profile.zeta;
    const double first = (zeta * profile.weight_ms + (1.0 - zeta) * profile.weight_relay) / h;
    const double second = (zeta * profile.weight_relay + (1.0 - zeta) * profile.weight_bs) / g;
    const double overlap = profile.weight_relay * real.h_direct_sq / (h * g);
    return scale * (first + second - overlap);
}

/// Weighted energy per bit of direct MS-BS transmission; +infinity when
/// the direct gain is zero and the effective weight is not.
inline double weighted_energy_direct(const TrafficProfile& profile, const SystemParams& params,
                                     const ChannelRealization& real)
{
    const double weight = profile.zeta * profile.weight_ms + (1.0 - profile.zeta) * profile.weight_bs;
    if (weight == 0.0) {
        return 0.0;
    }
    if (!(real.h_direct_sq > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    const double r = params.spectral_efficiency_r;
    return params.noise_psd_w_per_hz * (std::exp2(r) - 1.0) / r * weight / real.h_direct_sq;
}

/// Per-node energy of direct transmission; requires a non-zero direct gain.
inline EnergyBreakdown direct_energy_breakdown(const TrafficProfile& profile, const SystemParams& params,
                                               const ChannelRealization& real)
{
    if (!(real.h_direct_sq > 0.0)) {
        throw InfeasibleLinkError("direct link has zero gain");
    }
    const double power = single_phase_threshold(params) / real.h_direct_sq;
    const double per_bit = 1.0 / (params.spectral_efficiency_r * params.bandwidth_hz);
    return {profile.zeta * power * per_bit, 0.0, (1.0 - profile.zeta) * power * per_bit};
}

/// True when full power P0 closes the direct link at rate R.
inline bool direct_link_supports_rate(const SystemParams& params, const ChannelRealization& real)
{
    return params.p0_watts * real.h_direct_sq >= single_phase_threshold(params);
}

}  // namespace relaysim
