#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relaysim/errors.hpp"
#include "relaysim/rng.hpp"

namespace relaysim {

inline constexpr double speed_of_light_m_per_s = 2.99792458e8;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
inline double dbm_to_watts(double dbm) { return db_to_linear(dbm) * 1e-3; }
inline double wavelength_from_carrier(double carrier_hz) { return speed_of_light_m_per_s / carrier_hz; }

/// Radio constants shared by every node. Defaults reproduce the reference
/// scenario: 24 dBm, 180 kHz, -171 dBm/Hz, 5 dBi, 2.5 GHz, exponent 3.76.
struct SystemParams {
    double p0_watts = dbm_to_watts(24.0);
    double bandwidth_hz = 180e3;
    double noise_psd_w_per_hz = dbm_to_watts(-171.0);
    double spectral_efficiency_r = 3.0;
    double carrier_wavelength_m = wavelength_from_carrier(2.5e9);
    double antenna_gain_product = db_to_linear(5.0);
    double ref_distance_m = 1.0;
    double path_loss_exponent = 3.76;
    double shadowing_sigma_db = 0.0;

    /// N0 * B, the noise power in watts.
    double noise_power() const { return noise_psd_w_per_hz * bandwidth_hz; }

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw DomainError(std::string("SystemParams.") + name + " must be finite and > 0");
            }
        };
        positive(p0_watts, "p0_watts");
        positive(bandwidth_hz, "bandwidth_hz");
        positive(noise_psd_w_per_hz, "noise_psd_w_per_hz");
        positive(spectral_efficiency_r, "spectral_efficiency_r");
        positive(carrier_wavelength_m, "carrier_wavelength_m");
        positive(antenna_gain_product, "antenna_gain_product");
        positive(ref_distance_m, "ref_distance_m");
        if (!(path_loss_exponent >= 2.0) || !std::isfinite(path_loss_exponent)) {
            throw DomainError("SystemParams.path_loss_exponent must be >= 2");
        }
        if (!(shadowing_sigma_db >= 0.0) || !std::isfinite(shadowing_sigma_db)) {
            throw DomainError("SystemParams.shadowing_sigma_db must be >= 0");
        }
        const double rho = p0_watts / noise_power();
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw DomainError("SystemParams: general SNR is not finite and positive");
        }
    }
};

/// General SNR without fading, P0 / (N0 B).
inline double general_snr(const SystemParams& params)
{
    return params.p0_watts / params.noise_power();
}

/// Mean linear power gain 1/lambda of a link under the log-distance law.
inline double mean_channel_gain(const SystemParams& params, double distance_m, double shadow_linear)
{
    if (!(distance_m > 0.0)) {
        throw DomainError("mean_channel_gain: distance must be > 0");
    }
    if (!(shadow_linear > 0.0)) {
        throw DomainError("mean_channel_gain: shadowing factor must be > 0");
    }
    const double d0 = params.ref_distance_m;
    const double far_field = std::sqrt(params.antenna_gain_product) * params.carrier_wavelength_m /
                             (4.0 * std::numbers::pi * d0);
    return far_field * far_field * std::pow(d0 / distance_m, params.path_loss_exponent) * shadow_linear;
}

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Topology {
    Point ms_position;
    Point bs_position;
    std::vector<Point> relay_positions;

    std::size_t relay_count() const { return relay_positions.size(); }

    void validate() const
    {
        std::vector<Point> nodes{ms_position, bs_position};
        nodes.insert(nodes.end(), relay_positions.begin(), relay_positions.end());
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            for (std::size_t b = a + 1; b < nodes.size(); ++b) {
                if (!(distance(nodes[a], nodes[b]) > 0.0)) {
                    throw DomainError("Topology: nodes " + std::to_string(a) + " and " + std::to_string(b) +
                                      " coincide");
                }
            }
        }
    }

    /// Same MS/BS with only the first n relays kept.
    Topology first_relays(std::size_t n) const
    {
        Topology t{ms_position, bs_position, {}};
        t.relay_positions.assign(relay_positions.begin(),
                                 relay_positions.begin() + static_cast<std::ptrdiff_t>(std::min(n, relay_count())));
        return t;
    }
};

/// MS at the origin, BS on the x axis at the given distance, relays drawn
/// uniformly in the disc whose diameter is the MS-BS segment.
inline Topology place_relays_in_disc(double ms_bs_distance_m, std::size_t n_relays, std::uint64_t placement_seed)
{
    if (!(ms_bs_distance_m > 0.0)) {
        throw DomainError("place_relays_in_disc: MS-BS distance must be > 0");
    }
    Topology topo{{0.0, 0.0}, {ms_bs_distance_m, 0.0}, {}};
    TrialStream stream(placement_seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double radius = ms_bs_distance_m / 2.0;
    const Point centre{radius, 0.0};
    for (std::size_t i = 0; i < n_relays; ++i) {
        const double r = radius * std::sqrt(unit(stream));
        const double theta = 2.0 * std::numbers::pi * unit(stream);
        topo.relay_positions.push_back({centre.x + r * std::cos(theta), centre.y + r * std::sin(theta)});
    }
    return topo;
}

/// Linear shadowing factors per link; UL and DL share the factor.
struct ShadowDraws {
    double direct = 1.0;
    std::vector<double> ms_relay;
    std::vector<double> relay_bs;
};

/// Exponential rates of the three link families.
struct LinkStatistics {
    double lambda_direct = 1.0;
    std::vector<double> lambda_ms_relay;
    std::vector<double> lambda_relay_bs;

    std::size_t relay_count() const { return lambda_ms_relay.size(); }

    /// All links with the same mean gain, used by normalised outage studies.
    static LinkStatistics iid(std::size_t n_relays, double mean_gain = 1.0)
    {
        const double lambda = 1.0 / mean_gain;
        return {lambda, std::vector<double>(n_relays, lambda), std::vector<double>(n_relays, lambda)};
    }

    LinkStatistics first_relays(std::size_t n) const
    {
        const auto k = static_cast<std::ptrdiff_t>(std::min(n, relay_count()));
        return {lambda_direct, {lambda_ms_relay.begin(), lambda_ms_relay.begin() + k},
                {lambda_relay_bs.begin(), lambda_relay_bs.begin() + k}};
    }
};

/// Log-normal shadowing with sigma in dB, one factor per link.
inline ShadowDraws sample_shadowing(double sigma_db, std::size_t n_relays, std::uint64_t seed)
{
    ShadowDraws draws{1.0, std::vector<double>(n_relays, 1.0), std::vector<double>(n_relays, 1.0)};
    if (sigma_db == 0.0) {
        return draws;
    }
    TrialStream stream(seed, 1);
    std::normal_distribution<double> normal(0.0, sigma_db);
    draws.direct = db_to_linear(normal(stream));
    for (std::size_t i = 0; i < n_relays; ++i) {
        draws.ms_relay[i] = db_to_linear(normal(stream));
        draws.relay_bs[i] = db_to_linear(normal(stream));
    }
    return draws;
}

/// Rates for every link of a topology. Without explicit shadow draws the
/// factors are sampled from params.shadowing_sigma_db using shadow_seed.
inline LinkStatistics build_link_statistics(const SystemParams& params, const Topology& topo,
                                            const std::optional<ShadowDraws>& shadow = std::nullopt,
                                            std::uint64_t shadow_seed = 0)
{
    topo.validate();
    const std::size_t n = topo.relay_count();
    const ShadowDraws draws = shadow ? *shadow : sample_shadowing(params.shadowing_sigma_db, n, shadow_seed);
    if (draws.ms_relay.size() != n || draws.relay_bs.size() != n) {
        throw DomainError("build_link_statistics: shadow draws do not match relay count");
    }

    LinkStatistics stats;
    stats.lambda_direct =
        1.0 / mean_channel_gain(params, distance(topo.ms_position, topo.bs_position), draws.direct);
    for (std::size_t i = 0; i < n; ++i) {
        const Point relay = topo.relay_positions[i];
        stats.lambda_ms_relay.push_back(
            1.0 / mean_channel_gain(params, distance(topo.ms_position, relay), draws.ms_relay[i]));
        stats.lambda_relay_bs.push_back(
            1.0 / mean_channel_gain(params, distance(relay, topo.bs_position), draws.relay_bs[i]));
    }
    return stats;
}

/// Instantaneous power gains for one fading draw. Each link has a single
/// value used by both uplink and downlink.
struct ChannelRealization {
    double h_direct_sq = 0.0;
    std::vector<double> h_sq;  // MS <-> relay i
    std::vector<double> g_sq;  // relay i <-> BS

    std::size_t relay_count() const { return h_sq.size(); }
};

/// Draws every gain as Exp(1) / lambda in a fixed order (direct, then
/// h_i, g_i per relay), so a prefix of relays sees the same draws
/// regardless of how many relays follow.
template <class Stream>
ChannelRealization sample_realization(const LinkStatistics& stats, Stream& stream)
{
    std::exponential_distribution<double> unit_exp(1.0);
    ChannelRealization real;
    const std::size_t n = stats.relay_count();
    real.h_sq.resize(n);
    real.g_sq.resize(n);
    real.h_direct_sq = unit_exp(stream) / stats.lambda_direct;
    for (std::size_t i = 0; i < n; ++i) {
        real.h_sq[i] = unit_exp(stream) / stats.lambda_ms_relay[i];
        real.g_sq[i] = unit_exp(stream) / stats.lambda_relay_bs[i];
    }
    return real;
}

inline ChannelRealization sample_realization(const LinkStatistics& stats, std::uint64_t master_seed,
                                             std::uint64_t trial_index)
{
    TrialStream stream(master_seed, trial_index);
    return sample_realization(stats, stream);
}

}  // namespace relaysim
