#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "relaysim/errors.hpp"
#include "relaysim/experiment.hpp"

namespace relaysim {

// Scenario files are YAML documents with five flat sections:
//
//   system:     p0_dbm, bandwidth_hz, noise_psd_dbm_per_hz, spectral_efficiency,
//               carrier_hz, antenna_gain_dbi, ref_distance_m, path_loss_exponent,
//               shadowing_sigma_db
//   topology:   mode (geometry|iid), ms_bs_distance_m, ms_position, bs_position,
//               relay_positions, relay_counts, placement_seed, iid_mean_gain
//   traffic:    zeta (scalar or list), l_total_bits, weight_ms, weight_relay, weight_bs
//   experiment: kind, trials, master_seed, rho_db, multiplexing_gain,
//               min_outage_events, max_trials
//   flags:      p0_cap, baseline_set (sigma|gamma), outage_rule (snr-max|judrs),
//               hard_zero_direct
//
// Unknown sections or keys are rejected.

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema()
{
    static const std::map<std::string, std::set<std::string>> schema{
        {"system",
         {"p0_dbm", "bandwidth_hz", "noise_psd_dbm_per_hz", "spectral_efficiency", "carrier_hz", "antenna_gain_dbi",
          "ref_distance_m", "path_loss_exponent", "shadowing_sigma_db"}},
        {"topology",
         {"mode", "ms_bs_distance_m", "ms_position", "bs_position", "relay_positions", "relay_counts",
          "placement_seed", "iid_mean_gain"}},
        {"traffic", {"zeta", "l_total_bits", "weight_ms", "weight_relay", "weight_bs"}},
        {"experiment",
         {"kind", "trials", "master_seed", "rho_db", "multiplexing_gain", "min_outage_events", "max_trials"}},
        {"flags", {"p0_cap", "baseline_set", "outage_rule", "hard_zero_direct"}},
    };
    return schema;
}

inline void check_schema(const YAML::Node& doc)
{
    if (!doc.IsDefined() || doc.IsNull()) {
        return;
    }
    if (!doc.IsMap()) {
        throw ConfigError(ConfigError::Kind::parse_failure, "", "config document must be a mapping of sections");
    }
    const auto& schema = config_schema();
    for (const auto& section : doc) {
        const auto name = section.first.as<std::string>();
        auto it = schema.find(name);
        if (it == schema.end()) {
            throw ConfigError(ConfigError::Kind::unknown_key, name, "unknown config section '" + name + "'");
        }
        if (section.second.IsNull()) {
            continue;
        }
        if (!section.second.IsMap()) {
            throw ConfigError(ConfigError::Kind::parse_failure, name, "config section '" + name + "' must be a mapping");
        }
        for (const auto& entry : section.second) {
            const auto key = entry.first.as<std::string>();
            if (!it->second.contains(key)) {
                throw ConfigError(ConfigError::Kind::unknown_key, name + "." + key,
                                  "unknown config key '" + key + "' in section '" + name + "'");
            }
        }
    }
}

/// Later documents override earlier ones key by key.
inline YAML::Node merge_documents(const std::vector<YAML::Node>& docs)
{
    YAML::Node merged(YAML::NodeType::Map);
    for (const auto& doc : docs) {
        check_schema(doc);
        if (!doc.IsDefined() || doc.IsNull()) {
            continue;
        }
        for (const auto& section : doc) {
            const auto name = section.first.as<std::string>();
            if (!merged[name]) {
                merged[name] = YAML::Node(YAML::NodeType::Map);
            }
            if (section.second.IsNull()) {
                continue;
            }
            for (const auto& entry : section.second) {
                merged[name][entry.first.as<std::string>()] = YAML::Clone(entry.second);
            }
        }
    }
    return merged;
}

class SectionReader {
public:
    SectionReader(const YAML::Node& root, std::string section) : section_(std::move(section))
    {
        if (root[section_]) {
            node_ = root[section_];
        }
    }

    bool has(const std::string& key) const { return node_ && node_[key]; }

    template <class T>
    T get(const std::string& key, T fallback) const
    {
        if (!has(key)) {
            return fallback;
        }
        return convert<T>(node_[key], key);
    }

    /// Scalar or sequence, returned as a sequence.
    template <class T>
    std::vector<T> get_list(const std::string& key, std::vector<T> fallback) const
    {
        if (!has(key)) {
            return fallback;
        }
        const YAML::Node value = node_[key];
        if (value.IsSequence()) {
            return convert<std::vector<T>>(value, key);
        }
        return {convert<T>(value, key)};
    }

    std::optional<Point> get_point(const std::string& key) const
    {
        if (!has(key)) {
            return std::nullopt;
        }
        return to_point(node_[key], key);
    }

    std::vector<Point> get_points(const std::string& key) const
    {
        std::vector<Point> points;
        if (!has(key)) {
            return points;
        }
        const YAML::Node value = node_[key];
        if (!value.IsSequence()) {
            invalid(key, "expected a list of [x, y] pairs");
        }
        for (const auto& item : value) {
            points.push_back(to_point(item, key));
        }
        return points;
    }

    [[noreturn]] void invalid(const std::string& key, const std::string& why) const
    {
        throw ConfigError(ConfigError::Kind::invalid_value, section_ + "." + key,
                          "invalid value for '" + section_ + "." + key + "': " + why);
    }

private:
    template <class T>
    T convert(const YAML::Node& value, const std::string& key) const
    {
        try {
            return value.as<T>();
        } catch (const YAML::Exception&) {
            invalid(key, "cannot convert '" + YAML::Dump(value) + "'");
        }
    }

    Point to_point(const YAML::Node& value, const std::string& key) const
    {
        const auto xy = convert<std::vector<double>>(value, key);
        if (xy.size() != 2) {
            invalid(key, "expected [x, y]");
        }
        return {xy[0], xy[1]};
    }

    std::string section_;
    YAML::Node node_;
};

inline ExperimentKind parse_kind(const SectionReader& r)
{
    const auto text = r.get<std::string>("kind", "energy-vs-relays");
    for (auto kind : {ExperimentKind::energy_vs_relays, ExperimentKind::energy_vs_zeta, ExperimentKind::outage_sweep,
                      ExperimentKind::dmt_check}) {
        if (to_string(kind) == text) {
            return kind;
        }
    }
    r.invalid("kind", "expected energy-vs-relays, energy-vs-zeta, outage-sweep or dmt-check");
}

inline void require(bool ok, const SectionReader& r, const std::string& key, const std::string& why)
{
    if (!ok) {
        r.invalid(key, why);
    }
}

inline ScenarioConfig config_from_node(const YAML::Node& root)
{
    ScenarioConfig cfg;
    const SectionReader sys(root, "system");
    const SectionReader topo(root, "topology");
    const SectionReader traffic(root, "traffic");
    const SectionReader exp(root, "experiment");
    const SectionReader flags(root, "flags");

    cfg.experiment.kind = parse_kind(exp);
    const bool outage_kind = cfg.experiment.kind == ExperimentKind::outage_sweep ||
                             cfg.experiment.kind == ExperimentKind::dmt_check;

    auto positive = [](const SectionReader& r, const std::string& key, double v) {
        require(v > 0.0 && std::isfinite(v), r, key, "must be finite and > 0");
        return v;
    };

    SystemParams& s = cfg.system;
    s.p0_watts = dbm_to_watts(sys.get("p0_dbm", 24.0));
    s.bandwidth_hz = positive(sys, "bandwidth_hz", sys.get("bandwidth_hz", 180e3));
    s.noise_psd_w_per_hz = dbm_to_watts(sys.get("noise_psd_dbm_per_hz", -171.0));
    s.spectral_efficiency_r = positive(sys, "spectral_efficiency", sys.get("spectral_efficiency", 3.0));
    s.carrier_wavelength_m = wavelength_from_carrier(positive(sys, "carrier_hz", sys.get("carrier_hz", 2.5e9)));
    s.antenna_gain_product = db_to_linear(sys.get("antenna_gain_dbi", 5.0));
    s.ref_distance_m = positive(sys, "ref_distance_m", sys.get("ref_distance_m", 1.0));
    s.path_loss_exponent = sys.get("path_loss_exponent", 3.76);
    require(s.path_loss_exponent >= 2.0, sys, "path_loss_exponent", "must be >= 2");
    s.shadowing_sigma_db = sys.get("shadowing_sigma_db", 0.0);
    require(s.shadowing_sigma_db >= 0.0, sys, "shadowing_sigma_db", "must be >= 0");

    TopologyConfig& t = cfg.topology;
    const auto mode = topo.get<std::string>("mode", outage_kind ? "iid" : "geometry");
    if (mode == "geometry") {
        t.mode = TopologyMode::geometry;
    } else if (mode == "iid") {
        t.mode = TopologyMode::iid;
    } else {
        topo.invalid("mode", "expected geometry or iid");
    }
    t.ms_bs_distance_m = positive(topo, "ms_bs_distance_m", topo.get("ms_bs_distance_m", 450.0));
    t.ms_position = topo.get_point("ms_position");
    t.bs_position = topo.get_point("bs_position");
    t.relay_positions = topo.get_points("relay_positions");
    std::vector<std::size_t> default_counts{1};
    if (cfg.experiment.kind == ExperimentKind::energy_vs_relays) {
        default_counts = {1, 2, 3, 4, 5, 6, 7, 8};
    } else if (cfg.experiment.kind == ExperimentKind::energy_vs_zeta) {
        default_counts = {8};
    }
    t.relay_counts = topo.get_list<std::size_t>("relay_counts", default_counts);
    require(!t.relay_counts.empty(), topo, "relay_counts", "grid is empty");
    t.placement_seed = topo.get<std::uint64_t>("placement_seed", t.placement_seed);
    t.iid_mean_gain = positive(topo, "iid_mean_gain", topo.get("iid_mean_gain", 1.0));

    TrafficConfig& tr = cfg.traffic;
    std::vector<double> default_zetas{0.5};
    if (cfg.experiment.kind == ExperimentKind::energy_vs_zeta) {
        default_zetas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    }
    tr.zetas = traffic.get_list<double>("zeta", default_zetas);
    require(!tr.zetas.empty(), traffic, "zeta", "grid is empty");
    for (double z : tr.zetas) {
        require(z >= 0.0 && z <= 1.0, traffic, "zeta", "values must lie in [0, 1]");
    }
    tr.l_total_bits = positive(traffic, "l_total_bits", traffic.get("l_total_bits", 1e6));
    tr.weight_ms = traffic.get("weight_ms", 1.0);
    tr.weight_relay = traffic.get("weight_relay", 1.0);
    tr.weight_bs = traffic.get("weight_bs", 0.0);
    require(tr.weight_ms >= 0.0, traffic, "weight_ms", "must be >= 0");
    require(tr.weight_relay >= 0.0, traffic, "weight_relay", "must be >= 0");
    require(tr.weight_bs >= 0.0, traffic, "weight_bs", "must be >= 0");
    require(tr.weight_ms + tr.weight_relay + tr.weight_bs > 0.0, traffic, "weight_ms",
                    "at least one weight must be > 0");

    ExperimentConfig& e = cfg.experiment;
    e.trials = exp.get<std::uint64_t>("trials", e.trials);
    require(e.trials >= 1, exp, "trials", "must be >= 1");
    e.master_seed = exp.get<std::uint64_t>("master_seed", e.master_seed);
    e.rho_db = exp.get_list<double>("rho_db", {10.0, 14.0, 18.0, 22.0, 26.0, 30.0});
    if (outage_kind) {
        require(!e.rho_db.empty(), exp, "rho_db", "grid is empty");
    }
    if (exp.has("multiplexing_gain")) {
        e.multiplexing_gain = positive(exp, "multiplexing_gain", exp.get("multiplexing_gain", 0.0));
    }
    e.min_outage_events = exp.get<std::uint64_t>("min_outage_events", e.min_outage_events);
    e.max_trials = exp.get<std::uint64_t>("max_trials", e.max_trials);

    Flags& f = cfg.flags;
    f.p0_cap = flags.get("p0_cap", false);
    const auto basis = flags.get<std::string>("baseline_set", "sigma");
    if (basis == "sigma") {
        f.baseline_set = BaselineSet::sigma;
    } else if (basis == "gamma") {
        f.baseline_set = BaselineSet::gamma;
    } else {
        flags.invalid("baseline_set", "expected sigma or gamma");
    }
    const auto rule = flags.get<std::string>("outage_rule", "snr-max");
    if (rule == "snr-max") {
        f.outage_rule = OutageRule::snr_max;
    } else if (rule == "judrs") {
        f.outage_rule = OutageRule::judrs;
    } else {
        flags.invalid("outage_rule", "expected snr-max or judrs");
    }
    f.hard_zero_direct = flags.get("hard_zero_direct", false);

    try {
        validate(cfg);
    } catch (const DomainError& err) {
        throw ConfigError(ConfigError::Kind::invalid_value, "system", err.what());
    }
    return cfg;
}

inline YAML::Node parse_yaml(const std::string& text, const std::string& origin)
{
    try {
        return YAML::Load(text);
    } catch (const YAML::Exception& err) {
        throw ConfigError(ConfigError::Kind::parse_failure, "", "cannot parse " + origin + ": " + err.what());
    }
}

}  // namespace detail

/// Built-in scenario presets. The same documents ship under presets/.
inline const std::map<std::string, std::string, std::less<>>& preset_documents()
{
    static const std::map<std::string, std::string, std::less<>> presets{
        {"fig3a", R"(# Energy per bit vs relay count, strong direct link.
system:
  spectral_efficiency: 3
topology:
  mode: geometry
  ms_bs_distance_m: 450
  relay_counts: [1, 2, 3, 4, 5, 6, 7, 8]
  placement_seed: 20100507
traffic:
  zeta: [0.5]
  weight_ms: 1
  weight_relay: 1
  weight_bs: 0
experiment:
  kind: energy-vs-relays
  trials: 100000
  master_seed: 1
)"},
        {"fig3b", R"(# Energy per bit vs relay count, negligible direct link.
system:
  spectral_efficiency: 1
topology:
  mode: geometry
  ms_bs_distance_m: 1200
  relay_counts: [1, 2, 3, 4, 5, 6, 7, 8]
  placement_seed: 20100507
traffic:
  zeta: [0.5]
  weight_ms: 1
  weight_relay: 1
  weight_bs: 0
experiment:
  kind: energy-vs-relays
  trials: 100000
  master_seed: 1
)"},
        {"fig4", R"(# Energy per bit vs traffic asymmetry with 8 relays.
system:
  spectral_efficiency: 3
topology:
  mode: geometry
  ms_bs_distance_m: 450
  relay_counts: [8]
  placement_seed: 20100507
traffic:
  zeta: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
  weight_ms: 1
  weight_relay: 1
  weight_bs: 0
experiment:
  kind: energy-vs-zeta
  trials: 100000
  master_seed: 1
)"},
    };
    return presets;
}

/// Parses and validates one or more layered YAML documents (later ones win)
/// and fills every unset field with its default.
inline ScenarioConfig load_config_documents(const std::vector<std::string>& texts)
{
    std::vector<YAML::Node> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        docs.push_back(detail::parse_yaml(texts[i], "config document " + std::to_string(i)));
    }
    return detail::config_from_node(detail::merge_documents(docs));
}

inline ScenarioConfig load_config_string(const std::string& text) { return load_config_documents({text}); }

inline std::string read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(ConfigError::Kind::missing_file, "", "cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline const std::string& preset_document(std::string_view name)
{
    const auto& presets = preset_documents();
    auto it = presets.find(name);
    if (it == presets.end()) {
        throw ConfigError(ConfigError::Kind::invalid_value, "preset", "unknown preset '" + std::string(name) + "'");
    }
    return it->second;
}

inline ScenarioConfig load_preset(std::string_view name) { return load_config_string(preset_document(name)); }

inline ScenarioConfig load_config(const std::filesystem::path& path)
{
    return load_config_string(read_config_file(path));
}

}  // namespace relaysim
