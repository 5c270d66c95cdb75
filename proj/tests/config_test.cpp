#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "relaysim/config.hpp"

namespace relaysim {
namespace {

ConfigError expect_config_error(const std::string& text)
{
    try {
        load_config_string(text);
    } catch (const ConfigError& err) {
        return err;
    }
    ADD_FAILURE() << "expected ConfigError for:\n" << text;
    return ConfigError(ConfigError::Kind::parse_failure, "", "none");
}

TEST(LoadConfig, MinimalConfigGetsReferenceDefaults)
{
    const auto cfg = load_config_string("experiment:\n  kind: energy-vs-relays\n");
    const SystemParams& s = cfg.system;
    EXPECT_NEAR(s.p0_watts, 0.25118864315095796, 1e-15);  // 24 dBm
    EXPECT_DOUBLE_EQ(s.bandwidth_hz, 180e3);
    EXPECT_NEAR(s.noise_psd_w_per_hz, 7.943282347242789e-21, 1e-33);  // -171 dBm/Hz
    EXPECT_NEAR(s.antenna_gain_product, 3.1622776601683795, 1e-14);    // 5 dBi
    EXPECT_NEAR(s.carrier_wavelength_m, 2.99792458e8 / 2.5e9, 1e-15);
    EXPECT_DOUBLE_EQ(s.path_loss_exponent, 3.76);
    EXPECT_DOUBLE_EQ(s.ref_distance_m, 1.0);
    EXPECT_DOUBLE_EQ(s.shadowing_sigma_db, 0.0);
    EXPECT_EQ(cfg.traffic.weight_ms, 1.0);
    EXPECT_EQ(cfg.traffic.weight_relay, 1.0);
    EXPECT_EQ(cfg.traffic.weight_bs, 0.0);
    EXPECT_EQ(cfg.experiment.trials, 100000u);
    EXPECT_EQ(cfg.topology.relay_counts.size(), 8u);
    EXPECT_EQ(cfg.topology.mode, TopologyMode::geometry);
    EXPECT_FALSE(cfg.flags.p0_cap);
    EXPECT_EQ(cfg.flags.baseline_set, BaselineSet::sigma);
}

TEST(LoadConfig, KindSpecificDefaults)
{
    const auto zeta = load_config_string("experiment:\n  kind: energy-vs-zeta\n");
    EXPECT_EQ(zeta.traffic.zetas.size(), 11u);
    EXPECT_EQ(zeta.topology.relay_counts, std::vector<std::size_t>{8});
    const auto outage = load_config_string("experiment:\n  kind: outage-sweep\n");
    EXPECT_EQ(outage.topology.mode, TopologyMode::iid);
    EXPECT_FALSE(outage.experiment.rho_db.empty());
}

TEST(LoadConfig, ZetaOutOfRangeNamesKey)
{
    const auto err = expect_config_error("traffic:\n  zeta: 1.5\n");
    EXPECT_EQ(err.kind(), ConfigError::Kind::invalid_value);
    EXPECT_NE(std::string(err.what()).find("zeta"), std::string::npos);
    EXPECT_EQ(err.key(), "traffic.zeta");
}

TEST(LoadConfig, UnknownKeysRejected)
{
    auto err = expect_config_error("experiment:\n  kind: energy-vs-relays\n  foo: 3\n");
    EXPECT_EQ(err.kind(), ConfigError::Kind::unknown_key);
    EXPECT_NE(std::string(err.what()).find("foo"), std::string::npos);
    err = expect_config_error("foo: 1\n");
    EXPECT_EQ(err.kind(), ConfigError::Kind::unknown_key);
    EXPECT_EQ(err.key(), "foo");
}

TEST(LoadConfig, DistinctDiagnostics)
{
    EXPECT_EQ(expect_config_error("system: [1, 2\n").kind(), ConfigError::Kind::parse_failure);
    EXPECT_EQ(expect_config_error("experiment:\n  trials: lots\n").key(), "experiment.trials");
    EXPECT_EQ(expect_config_error("experiment:\n  kind: nonsense\n").key(), "experiment.kind");
    EXPECT_EQ(expect_config_error("experiment:\n  kind: outage-sweep\n  rho_db: []\n").key(), "experiment.rho_db");
    EXPECT_EQ(expect_config_error("topology:\n  relay_counts: []\n").key(), "topology.relay_counts");
    EXPECT_EQ(expect_config_error("experiment:\n  trials: 0\n").key(), "experiment.trials");
    EXPECT_EQ(expect_config_error("flags:\n  baseline_set: all\n").key(), "flags.baseline_set");
    EXPECT_EQ(expect_config_error("system:\n  path_loss_exponent: 1.0\n").key(), "system.path_loss_exponent");
    EXPECT_EQ(expect_config_error("traffic:\n  weight_ms: 0\n  weight_relay: 0\n").kind(),
              ConfigError::Kind::invalid_value);
    try {
        load_config("/nonexistent/relaysim.yaml");
        FAIL();
    } catch (const ConfigError& err) {
        EXPECT_EQ(err.kind(), ConfigError::Kind::missing_file);
    }
}

TEST(LoadConfig, ExplicitTopologyAndFlags)
{
    const auto cfg = load_config_string(R"(
topology:
  ms_position: [0, 0]
  bs_position: [500, 0]
  relay_positions: [[100, 10], [250, -20], [400, 5]]
  relay_counts: [1, 3]
traffic:
  zeta: 0.3
flags:
  p0_cap: true
  baseline_set: gamma
  outage_rule: judrs
  hard_zero_direct: true
)");
    EXPECT_EQ(cfg.topology.relay_positions.size(), 3u);
    EXPECT_EQ(cfg.traffic.zetas, std::vector<double>{0.3});
    EXPECT_TRUE(cfg.flags.p0_cap);
    EXPECT_EQ(cfg.flags.baseline_set, BaselineSet::gamma);
    EXPECT_EQ(cfg.flags.outage_rule, OutageRule::judrs);
    EXPECT_TRUE(cfg.flags.hard_zero_direct);
    const Topology topo = scenario_topology(cfg);
    EXPECT_EQ(topo.bs_position, (Point{500, 0}));
    EXPECT_EQ(expect_config_error("topology:\n  relay_positions: [[1, 1]]\n  relay_counts: [2]\n").key(),
              "topology.relay_counts");
}

TEST(LoadConfig, LaterDocumentsOverride)
{
    const auto cfg = load_config_documents({preset_document("fig3a"), "experiment:\n  trials: 7\n"});
    EXPECT_EQ(cfg.experiment.trials, 7u);
    EXPECT_DOUBLE_EQ(cfg.topology.ms_bs_distance_m, 450.0);
}

TEST(Presets, ShippedFilesMatchBuiltIns)
{
    for (const auto& [name, text] : preset_documents()) {
        const auto path = std::filesystem::path(RELAYSIM_SOURCE_DIR) / "presets" / (name + ".yaml");
        std::ifstream in(path);
        ASSERT_TRUE(in) << path;
        const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        EXPECT_EQ(file, text) << name;
    }
}

TEST(Presets, ScenarioValues)
{
    const auto a = load_preset("fig3a");
    EXPECT_DOUBLE_EQ(a.topology.ms_bs_distance_m, 450.0);
    EXPECT_DOUBLE_EQ(a.system.spectral_efficiency_r, 3.0);
    const auto b = load_preset("fig3b");
    EXPECT_DOUBLE_EQ(b.topology.ms_bs_distance_m, 1200.0);
    EXPECT_DOUBLE_EQ(b.system.spectral_efficiency_r, 1.0);
    const auto f = load_preset("fig4");
    EXPECT_EQ(f.topology.relay_counts, std::vector<std::size_t>{8});
    EXPECT_EQ(f.traffic.zetas.size(), 11u);
    EXPECT_THROW(load_preset("fig9"), ConfigError);
}

}  // namespace
}  // namespace relaysim
