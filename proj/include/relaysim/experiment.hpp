#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaysim/channel_model.hpp"
#include "relaysim/energy_model.hpp"
#include "relaysim/errors.hpp"
#include "relaysim/outage_analysis.hpp"
#include "relaysim/parallel.hpp"
#include "relaysim/relay_selection.hpp"

namespace relaysim {

enum class ExperimentKind { energy_vs_relays, energy_vs_zeta, outage_sweep, dmt_check };

inline std::string_view to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::energy_vs_relays:
        return "energy-vs-relays";
    case ExperimentKind::energy_vs_zeta:
        return "energy-vs-zeta";
    case ExperimentKind::outage_sweep:
        return "outage-sweep";
    case ExperimentKind::dmt_check:
        return "dmt-check";
    }
    return "unknown";
}

enum class TopologyMode {
    geometry,  // log-distance gains from node positions
    iid,       // every link has the same mean gain
};

struct TopologyConfig {
    TopologyMode mode = TopologyMode::geometry;
    double ms_bs_distance_m = 450.0;
    /// Explicit relay coordinates; when empty, relays are placed in the disc.
    std::vector<Point> relay_positions;
    std::optional<Point> ms_position;
    std::optional<Point> bs_position;
    std::vector<std::size_t> relay_counts;
    std::uint64_t placement_seed = 20100507;
    double iid_mean_gain = 1.0;
};

struct TrafficConfig {
    std::vector<double> zetas;
    double l_total_bits = 1e6;
    double weight_ms = 1.0;
    double weight_relay = 1.0;
    double weight_bs = 0.0;

    TrafficProfile profile(double zeta) const { return {zeta, l_total_bits, weight_ms, weight_relay, weight_bs}; }
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::energy_vs_relays;
    std::uint64_t trials = 100000;
    std::uint64_t master_seed = 1;
    std::vector<double> rho_db;
    /// Set to scale the rate as r log2(rho) instead of holding R fixed.
    std::optional<double> multiplexing_gain;
    std::uint64_t min_outage_events = 50;
    std::uint64_t max_trials = 20000000;
};

struct Flags {
    bool p0_cap = false;
    BaselineSet baseline_set = BaselineSet::sigma;
    OutageRule outage_rule = OutageRule::snr_max;
    bool hard_zero_direct = false;
};

struct ScenarioConfig {
    SystemParams system;
    TopologyConfig topology;
    TrafficConfig traffic;
    ExperimentConfig experiment;
    Flags flags;
    std::size_t workers = 1;
};

/// One output line. Optional fields are empty in CSV and null in JSON.
struct ResultRow {
    std::string scheme;
    std::size_t n_relays = 0;
    double zeta = 0.0;
    std::optional<double> rho_db;
    std::uint64_t trials = 0;
    std::optional<double> energy_total_j_per_bit;
    std::optional<double> energy_ms_j_per_bit;
    std::optional<double> energy_relay_j_per_bit;
    std::optional<double> energy_bs_j_per_bit;
    std::optional<double> ci95_energy;
    double outage_rate = 0.0;
    double ci95_outage = 0.0;
    double mean_gamma_size = 0.0;
    std::uint64_t master_seed = 0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct SlopeFit {
    std::size_t n_relays = 0;
    double zeta = 0.0;
    std::size_t points_used = 0;
    std::optional<double> slope;  // empty when fewer than 3 confident points
    double theoretical = 0.0;     // d(r) at the configured multiplexing gain (0 for fixed rate)
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<SlopeFit> fits;
};

inline void validate(const ScenarioConfig& config)
{
    config.system.validate();
    if (config.experiment.trials == 0) {
        throw ConfigError(ConfigError::Kind::invalid_value, "experiment.trials", "experiment.trials must be >= 1");
    }
    if (config.traffic.zetas.empty()) {
        throw ConfigError(ConfigError::Kind::invalid_value, "traffic.zeta", "traffic.zeta grid is empty");
    }
    for (double z : config.traffic.zetas) {
        if (!(z >= 0.0 && z <= 1.0)) {
            throw ConfigError(ConfigError::Kind::invalid_value, "traffic.zeta",
                              "traffic.zeta values must lie in [0, 1]");
        }
    }
    try {
        config.traffic.profile(0.5).validate();
    } catch (const DomainError& e) {
        throw ConfigError(ConfigError::Kind::invalid_value, "traffic", e.what());
    }
    if (config.topology.relay_counts.empty()) {
        throw ConfigError(ConfigError::Kind::invalid_value, "topology.relay_counts",
                          "topology.relay_counts grid is empty");
    }
    if (!config.topology.relay_positions.empty()) {
        for (std::size_t n : config.topology.relay_counts) {
            if (n > config.topology.relay_positions.size()) {
                throw ConfigError(ConfigError::Kind::invalid_value, "topology.relay_counts",
                                  "relay count exceeds the number of explicit relay positions");
            }
        }
    }
    const bool outage = config.experiment.kind == ExperimentKind::outage_sweep ||
                        config.experiment.kind == ExperimentKind::dmt_check;
    if (outage && config.experiment.rho_db.empty()) {
        throw ConfigError(ConfigError::Kind::invalid_value, "experiment.rho_db", "experiment.rho_db grid is empty");
    }
    if (config.experiment.multiplexing_gain && !(*config.experiment.multiplexing_gain > 0.0)) {
        throw ConfigError(ConfigError::Kind::invalid_value, "experiment.multiplexing_gain",
                          "experiment.multiplexing_gain must be > 0");
    }
    if (config.topology.mode == TopologyMode::iid && !(config.topology.iid_mean_gain > 0.0)) {
        throw ConfigError(ConfigError::Kind::invalid_value, "topology.iid_mean_gain",
                          "topology.iid_mean_gain must be > 0");
    }
    if (!(config.topology.ms_bs_distance_m > 0.0)) {
        throw ConfigError(ConfigError::Kind::invalid_value, "topology.ms_bs_distance_m",
                          "topology.ms_bs_distance_m must be > 0");
    }
}

/// Topology holding the largest relay count of the grid; smaller counts
/// use its first n relays so grid points are nested.
inline Topology scenario_topology(const ScenarioConfig& config)
{
    const auto& topo = config.topology;
    std::size_t max_n = 0;
    for (std::size_t n : topo.relay_counts) {
        max_n = std::max(max_n, n);
    }
    Topology t;
    if (topo.relay_positions.empty()) {
        t = place_relays_in_disc(topo.ms_bs_distance_m, max_n, topo.placement_seed);
    } else {
        t.ms_position = topo.ms_position.value_or(Point{0.0, 0.0});
        t.bs_position = topo.bs_position.value_or(Point{topo.ms_bs_distance_m, 0.0});
        t.relay_positions = topo.relay_positions;
    }
    if (topo.ms_position) {
        t.ms_position = *topo.ms_position;
    }
    if (topo.bs_position) {
        t.bs_position = *topo.bs_position;
    }
    return t;
}

inline LinkStatistics scenario_link_statistics(const ScenarioConfig& config)
{
    std::size_t max_n = 0;
    for (std::size_t n : config.topology.relay_counts) {
        max_n = std::max(max_n, n);
    }
    if (config.topology.mode == TopologyMode::iid) {
        return LinkStatistics::iid(max_n, config.topology.iid_mean_gain);
    }
    return build_link_statistics(config.system, scenario_topology(config), std::nullopt,
                                 derive_seed(config.topology.placement_seed, 0x5AD0));
}

namespace detail {

/// Running mean/variance (Chan et al. pairwise merge) plus component sums.
struct EnergyAccumulator {
    std::uint64_t served = 0;
    std::uint64_t outages = 0;
    std::uint64_t gamma_total = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double ms = 0.0;
    double relay = 0.0;
    double bs = 0.0;

    void add(double weighted, const EnergyBreakdown& parts)
    {
        ++served;
        const double delta = weighted - mean;
        mean += delta / static_cast<double>(served);
        m2 += delta * (weighted - mean);
        ms += parts.ms;
        relay += parts.relay;
        bs += parts.bs;
    }

    void merge(const EnergyAccumulator& o)
    {
        outages += o.outages;
        gamma_total += o.gamma_total;
        ms += o.ms;
        relay += o.relay;
        bs += o.bs;
        if (o.served == 0) {
            return;
        }
        if (served == 0) {
            served = o.served;
            mean = o.mean;
            m2 = o.m2;
            return;
        }
        const double na = static_cast<double>(served);
        const double nb = static_cast<double>(o.served);
        const double delta = o.mean - mean;
        const double n = na + nb;
        mean += delta * nb / n;
        m2 += o.m2 + delta * delta * na * nb / n;
        served += o.served;
    }
};

inline constexpr Scheme energy_schemes[] = {Scheme::judrs, Scheme::best_worse, Scheme::harmonic_mean};

inline ResultRow energy_row(Scheme scheme, std::size_t n, double zeta, double rho_db, std::uint64_t trials,
                            std::uint64_t seed, const TrafficProfile& profile, const EnergyAccumulator& acc)
{
    ResultRow row;
    row.scheme = std::string(to_string(scheme));
    row.n_relays = n;
    row.zeta = zeta;
    row.rho_db = rho_db;
    row.trials = trials;
    row.master_seed = seed;
    if (acc.served > 0) {
        const double served = static_cast<double>(acc.served);
        row.energy_ms_j_per_bit = acc.ms / served;
        row.energy_relay_j_per_bit = acc.relay / served;
        row.energy_bs_j_per_bit = acc.bs / served;
        row.energy_total_j_per_bit = EnergyBreakdown{*row.energy_ms_j_per_bit, *row.energy_relay_j_per_bit,
                                                     *row.energy_bs_j_per_bit}
                                         .weighted(profile);
        const double var = acc.served > 1 ? acc.m2 / (served - 1.0) : 0.0;
        row.ci95_energy = 1.96 * std::sqrt(var / served);
    }
    row.outage_rate = static_cast<double>(acc.outages) / static_cast<double>(trials);
    row.ci95_outage = ci95_halfwidth(row.outage_rate, trials);
    row.mean_gamma_size = static_cast<double>(acc.gamma_total) / static_cast<double>(trials);
    return row;
}

/// Monte Carlo energy per bit over the (relay count x zeta) grid for the
/// three selectors. Trial k draws the same fading for every grid point
/// (common random numbers), which sharpens scheme and grid comparisons.
inline std::vector<ResultRow> run_energy_grid(const ScenarioConfig& config)
{
    validate(config);
    const LinkStatistics full = scenario_link_statistics(config);
    const SelectionOptions options{config.flags.p0_cap, config.flags.baseline_set};
    const std::uint64_t trials = config.experiment.trials;
    const std::uint64_t seed = config.experiment.master_seed;
    const double rho_db = linear_to_db(general_snr(config.system));

    std::vector<ResultRow> rows;
    for (std::size_t n : config.topology.relay_counts) {
        const LinkStatistics stats = full.first_relays(n);
        for (double zeta : config.traffic.zetas) {
            const TrafficProfile profile = config.traffic.profile(zeta);
            using Accs = std::array<EnergyAccumulator, 3>;
            auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
                Accs accs{};
                for (std::uint64_t k = begin; k < end; ++k) {
                    ChannelRealization real = sample_realization(stats, seed, k);
                    if (config.flags.hard_zero_direct) {
                        real.h_direct_sq = 0.0;
                    }
                    for (std::size_t s = 0; s < 3; ++s) {
                        const SelectionOutcome out = select(energy_schemes[s], profile, config.system, real, options);
                        accs[s].gamma_total += out.candidate_sets.t();
                        if (out.decision == Decision::outage) {
                            ++accs[s].outages;
                        } else {
                            accs[s].add(*out.energy_per_bit, *out.breakdown);
                        }
                    }
                }
                return accs;
            };
            Accs total{};
            for (const auto& part : map_trial_chunks<Accs>(0, trials, config.workers, chunk)) {
                for (std::size_t s = 0; s < 3; ++s) {
                    total[s].merge(part[s]);
                }
            }
            for (std::size_t s = 0; s < 3; ++s) {
                rows.push_back(energy_row(energy_schemes[s], n, zeta, rho_db, trials, seed, profile, total[s]));
            }
        }
    }
    return rows;
}

}  // namespace detail

/// Energy per bit against the number of relays, one row per (N, zeta, scheme).
inline std::vector<ResultRow> run_energy_vs_relays(const ScenarioConfig& config)
{
    if (config.experiment.kind != ExperimentKind::energy_vs_relays) {
        throw ConfigError(ConfigError::Kind::invalid_value, "experiment.kind",
                          "run_energy_vs_relays needs kind energy-vs-relays");
    }
    return detail::run_energy_grid(config);
}

/// Energy per bit against the traffic asymmetry factor.
inline std::vector<ResultRow> run_energy_vs_zeta(const ScenarioConfig& config)
{
    if (config.experiment.kind != ExperimentKind::energy_vs_zeta) {
        throw ConfigError(ConfigError::Kind::invalid_value, "experiment.kind",
                          "run_energy_vs_zeta needs kind energy-vs-zeta");
    }
    return detail::run_energy_grid(config);
}

/// Outage probability over the rho grid for every (N, zeta), followed by a
/// diversity-slope fit per (N, zeta) over the points with enough events.
inline RunResult run_outage_sweep(const ScenarioConfig& config)
{
    if (config.experiment.kind != ExperimentKind::outage_sweep &&
        config.experiment.kind != ExperimentKind::dmt_check) {
        throw ConfigError(ConfigError::Kind::invalid_value, "experiment.kind",
                          "run_outage_sweep needs kind outage-sweep or dmt-check");
    }
    validate(config);
    const LinkStatistics full = scenario_link_statistics(config);
    const auto& exp = config.experiment;

    RunResult result;
    for (std::size_t n : config.topology.relay_counts) {
        const LinkStatistics stats = full.first_relays(n);
        for (double zeta : config.traffic.zetas) {
            OutageOptions options;
            options.rule = config.flags.outage_rule;
            options.workers = config.workers;
            options.min_events = exp.min_outage_events;
            options.max_trials = exp.max_trials;
            options.hard_zero_direct = config.flags.hard_zero_direct;
            options.profile = config.traffic.profile(zeta);
            options.selection = {config.flags.p0_cap, config.flags.baseline_set};

            std::vector<OutagePoint> confident;
            for (double rho_db : exp.rho_db) {
                const double rho = db_to_linear(rho_db);
                const double rate = exp.multiplexing_gain ? *exp.multiplexing_gain * std::log2(rho)
                                                          : config.system.spectral_efficiency_r;
                const OutageEstimate est =
                    outage_probability_mc(stats, zeta, rho, rate, exp.trials, exp.master_seed, options);
                ResultRow row;
                row.scheme = std::string(to_string(n == 0 ? Scheme::direct_only : Scheme::judrs));
                row.n_relays = n;
                row.zeta = zeta;
                row.rho_db = rho_db;
                row.trials = est.trials;
                row.outage_rate = est.probability;
                row.ci95_outage = est.ci95_halfwidth;
                row.mean_gamma_size = est.mean_gamma_size;
                row.master_seed = exp.master_seed;
                result.rows.push_back(row);
                if (!est.low_confidence && est.probability > 0.0 && est.probability < 1.0) {
                    confident.push_back({rho, est.probability});
                }
            }

            SlopeFit fit;
            fit.n_relays = n;
            fit.zeta = zeta;
            fit.points_used = confident.size();
            fit.theoretical = dmt_theoretical(n, exp.multiplexing_gain.value_or(0.0)).diversity_d;
            try {
                fit.slope = estimate_diversity_slope(confident);
            } catch (const EstimationError&) {
                fit.slope.reset();
            }
            result.fits.push_back(fit);
        }
    }
    return result;
}

inline RunResult run_experiment(const ScenarioConfig& config)
{
    switch (config.experiment.kind) {
    case ExperimentKind::energy_vs_relays:
        return {run_energy_vs_relays(config), {}};
    case ExperimentKind::energy_vs_zeta:
        return {run_energy_vs_zeta(config), {}};
    case ExperimentKind::outage_sweep:
    case ExperimentKind::dmt_check:
        return run_outage_sweep(config);
    }
    throw ConfigError(ConfigError::Kind::invalid_value, "experiment.kind", "unknown experiment kind");
}

}  // namespace relaysim
