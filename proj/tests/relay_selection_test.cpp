#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "relaysim/relay_selection.hpp"

namespace relaysim {
namespace {

using Indices = std::vector<std::size_t>;

SystemParams normalised(double noise_psd = 1.0, double rate = 0.5, double p0 = 1.0)
{
    SystemParams p;
    p.noise_psd_w_per_hz = noise_psd;
    p.bandwidth_hz = 1.0;
    p.p0_watts = p0;
    p.spectral_efficiency_r = rate;
    return p;
}

TEST(FormGamma, ThresholdExample)
{
    // N0 B (2^{2R} - 1) = 0.5 with N0 = 0.5, R = 0.5.
    const SystemParams p = normalised(0.5);
    const ChannelRealization real{0.0, {0.6, 0.4, 0.7}, {1, 1, 1}};
    EXPECT_EQ(form_gamma(p, real), (Indices{0, 2}));
}

TEST(FormGamma, EmptyAndBoundary)
{
    const SystemParams p = normalised();
    EXPECT_TRUE(form_gamma(p, ChannelRealization{0.0, {0, 0}, {1, 1}}).empty());
    // P0 |h|^2 == th1 exactly is a member.
    EXPECT_EQ(form_gamma(p, ChannelRealization{0.0, {1.0}, {1.0}}), (Indices{0}));
}

TEST(FormSigma, NoDirectLinkReducesToFirstThreshold)
{
    const SystemParams p = normalised();
    const ChannelRealization real{0.0, {2.0, 2.0}, {0.99, 1.0}};
    EXPECT_EQ(form_sigma(p, real, form_gamma(p, real)), (Indices{1}));
}

TEST(FormSigma, StrongDirectLinkAdmitsAnyRelay)
{
    const SystemParams p = normalised();
    const ChannelRealization real{3.0, {2.0}, {0.0}};
    EXPECT_EQ(form_sigma(p, real, form_gamma(p, real)), (Indices{0}));
}

TEST(FormSigma, ThresholdExampleIsEmpty)
{
    const SystemParams p = normalised();
    const ChannelRealization real{0.5, {1.0, 2.0}, {0.4, 0.6}};
    const auto gamma = form_gamma(p, real);
    EXPECT_EQ(gamma, (Indices{0, 1}));
    EXPECT_TRUE(form_sigma(p, real, gamma).empty());
}

TEST(SelectJudrs, PicksCheaperRelay)
{
    const TrafficProfile profile{1.0, 1e6, 1.0, 1.0, 0.0};
    const ChannelRealization real{0.0, {1.0, 2.0}, {1.0, 2.0}};
    const auto out = select_judrs(profile, normalised(), real);
    ASSERT_EQ(out.decision, Decision::relay);
    EXPECT_EQ(*out.relay, 1u);
    EXPECT_DOUBLE_EQ(*out.energy_per_bit, 1.0);
    EXPECT_EQ(out.scheme, Scheme::judrs);
}

TEST(SelectJudrs, TieGoesToLowestIndex)
{
    const TrafficProfile profile{0.5, 1e6, 1.0, 1.0, 0.0};
    const ChannelRealization real{0.0, {1.5, 1.5}, {1.2, 1.2}};
    const auto out = select_judrs(profile, normalised(), real);
    ASSERT_EQ(out.decision, Decision::relay);
    EXPECT_EQ(*out.relay, 0u);
}

TEST(SelectJudrs, DirectWinsTies)
{
    // R = 1, only the MS is weighted: relay costs 3 / (2 |h|^2) = 0.5 and
    // direct costs 1 / |h_direct|^2 = 0.5.
    const TrafficProfile profile{1.0, 1e6, 1.0, 0.0, 0.0};
    const ChannelRealization real{2.0, {3.0}, {2.0}};
    const SystemParams p = normalised(1.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(weighted_energy_direct(profile, p, real), 0.5);
    const auto out = select_judrs(profile, p, real);
    EXPECT_EQ(out.candidate_sets.sigma, (Indices{0}));
    EXPECT_EQ(out.decision, Decision::direct);
    EXPECT_DOUBLE_EQ(*out.energy_per_bit, 0.5);
}

TEST(SelectJudrs, OutageWhenNothingWorks)
{
    const TrafficProfile profile{0.5, 1e6, 1.0, 1.0, 0.0};
    // Sigma empty; direct needs P0 |hd|^2 >= 2^0.5 - 1.
    const ChannelRealization real{0.1, {0.2}, {3.0}};
    const auto out = select_judrs(profile, normalised(), real);
    EXPECT_EQ(out.decision, Decision::outage);
    EXPECT_FALSE(out.energy_per_bit.has_value());
    const ChannelRealization ok{0.5, {0.2}, {3.0}};
    EXPECT_EQ(select_judrs(profile, normalised(), ok).decision, Decision::direct);
}

TEST(SelectBestWorse, PicksLargerWeakerHop)
{
    const TrafficProfile profile{0.5, 1e6, 1.0, 1.0, 0.0};
    const ChannelRealization real{0.0, {0.81, 0.25}, {0.04, 0.36}};
    const auto p = normalised(1.0, 0.5, 100.0);
    const auto out = select_best_worse(profile, p, real);
    ASSERT_EQ(out.decision, Decision::relay);
    EXPECT_EQ(*out.relay, 1u);
    EXPECT_DOUBLE_EQ(*out.energy_per_bit, weighted_energy_coop(profile, p, real, 1));
}

TEST(SelectBestWorse, SingletonAndTie)
{
    const TrafficProfile profile{0.5, 1e6, 1.0, 1.0, 0.0};
    const auto p = normalised(1.0, 0.5, 100.0);
    EXPECT_EQ(*select_best_worse(profile, p, {0.0, {0.5}, {0.7}}).relay, 0u);
    EXPECT_EQ(*select_best_worse(profile, p, {0.0, {0.5, 0.9, 0.5}, {0.9, 0.5, 0.5}}).relay, 0u);
}

TEST(SelectHarmonicMean, MetricValues)
{
    EXPECT_NEAR(harmonic_mean_metric(0.81, 0.04), 0.038117647058823534, 1e-15);
    EXPECT_NEAR(harmonic_mean_metric(0.25, 0.36), 0.14754098360655737, 1e-15);
    EXPECT_DOUBLE_EQ(harmonic_mean_metric(0.6, 0.6), 0.3);
    EXPECT_EQ(harmonic_mean_metric(0.0, 5.0), 0.0);
}

TEST(SelectHarmonicMean, PicksLargerHarmonicMean)
{
    const TrafficProfile profile{0.5, 1e6, 1.0, 1.0, 0.0};
    const auto p = normalised(1.0, 0.5, 100.0);
    const auto out = select_harmonic_mean(profile, p, {0.0, {0.81, 0.25}, {0.04, 0.36}});
    ASSERT_EQ(out.decision, Decision::relay);
    EXPECT_EQ(*out.relay, 1u);
    EXPECT_EQ(*select_harmonic_mean(profile, p, {0.0, {0.3, 0.9}, {0.3, 0.9}}).relay, 1u);
}

TEST(Baselines, EmptySigmaFallsBackLikeJudrs)
{
    const TrafficProfile profile{0.5, 1e6, 1.0, 1.0, 0.0};
    const ChannelRealization real{0.5, {0.2}, {3.0}};
    EXPECT_EQ(select_best_worse(profile, normalised(), real).decision, Decision::direct);
    EXPECT_EQ(select_harmonic_mean(profile, normalised(), {0.01, {0.2}, {3.0}}).decision, Decision::outage);
}

TEST(Baselines, GammaPoolIgnoresSecondHopScreen)
{
    const TrafficProfile profile{0.5, 1e6, 1.0, 1.0, 0.0};
    const ChannelRealization real{0.0, {2.0}, {0.1}};
    EXPECT_NE(select_best_worse(profile, normalised(), real).decision, Decision::relay);
    const auto out = select_best_worse(profile, normalised(), real, {false, BaselineSet::gamma});
    EXPECT_EQ(out.decision, Decision::relay);
}

TEST(SchemeLabels, RoundTrip)
{
    for (Scheme s : {Scheme::judrs, Scheme::best_worse, Scheme::harmonic_mean, Scheme::direct_only}) {
        EXPECT_EQ(scheme_from_string(to_string(s)), s);
    }
    EXPECT_THROW(scheme_from_string("nope"), DomainError);
}

// Independent enumeration: every relay that passes both screens plus the
// direct link, costed from first principles.
struct BruteForce {
    Decision decision = Decision::outage;
    std::optional<std::size_t> relay;
    double energy = std::numeric_limits<double>::infinity();
};

BruteForce brute_force(const TrafficProfile& tp, const SystemParams& p, const ChannelRealization& real)
{
    const double n0b = p.noise_psd_w_per_hz * p.bandwidth_hz;
    const double t1 = n0b * (std::pow(2.0, 2.0 * p.spectral_efficiency_r) - 1.0);
    const double per_bit = 1.0 / (2.0 * p.spectral_efficiency_r * p.bandwidth_hz);
    BruteForce best;
    bool any_relay = false;
    for (std::size_t i = 0; i < real.h_sq.size(); ++i) {
        const double h = real.h_sq[i];
        const double g = real.g_sq[i];
        if (p.p0_watts * h < t1 || p.p0_watts * g < t1 * (1.0 - real.h_direct_sq / h) || g <= 0.0) {
            continue;
        }
        const double pm = t1 / h;
        const double pr_ul = std::max(0.0, t1 * (1.0 - real.h_direct_sq / h)) / g;
        const double pb = t1 / g;
        const double pr_dl = std::max(0.0, t1 * (1.0 - real.h_direct_sq / g)) / h;
        const double e = per_bit * (tp.zeta * (tp.weight_ms * pm + tp.weight_relay * pr_ul) +
                                    (1.0 - tp.zeta) * (tp.weight_relay * pr_dl + tp.weight_bs * pb));
        if (!any_relay || e < best.energy) {
            best = {Decision::relay, i, e};
            any_relay = true;
        }
    }
    const double direct_power = n0b * (std::pow(2.0, p.spectral_efficiency_r) - 1.0);
    const double e_direct = real.h_direct_sq > 0.0
                                ? (tp.zeta * tp.weight_ms + (1.0 - tp.zeta) * tp.weight_bs) * direct_power /
                                      real.h_direct_sq / (p.spectral_efficiency_r * p.bandwidth_hz)
                                : std::numeric_limits<double>::infinity();
    if (any_relay) {
        if (real.h_direct_sq > 0.0 && e_direct <= best.energy) {
            best = {Decision::direct, std::nullopt, e_direct};
        }
    } else if (p.p0_watts * real.h_direct_sq >= direct_power) {
        best = {Decision::direct, std::nullopt, e_direct};
    }
    return best;
}

TEST(SelectJudrs, MatchesBruteForceEnumeration)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    int relays = 0;
    int directs = 0;
    for (int k = 0; k < 5000; ++k) {
        const std::size_t n = rng() % 6;
        const TrafficProfile tp{u(rng), 1e6, 2.0 * u(rng), 2.0 * u(rng) + 0.01, 2.0 * u(rng)};
        const SystemParams p = normalised(1.0, 0.2 + 2.0 * u(rng), 1.0 + 10.0 * u(rng));
        ChannelRealization real{e(rng), {}, {}};
        for (std::size_t i = 0; i < n; ++i) {
            real.h_sq.push_back(e(rng));
            real.g_sq.push_back(e(rng));
        }
        const auto expected = brute_force(tp, p, real);
        const auto got = select_judrs(tp, p, real);
        ASSERT_EQ(got.decision, expected.decision) << "instance " << k;
        ASSERT_EQ(got.relay, expected.relay) << "instance " << k;
        if (expected.decision != Decision::outage) {
            EXPECT_NEAR(*got.energy_per_bit, expected.energy, 1e-12 * std::abs(expected.energy));
        }
        relays += got.decision == Decision::relay;
        directs += got.decision == Decision::direct;
    }
    EXPECT_GT(relays, 500);
    EXPECT_GT(directs, 500);
}

TEST(SelectJudrs, DominatesBaselinesAndRespectsSets)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    int strict = 0;
    for (int k = 0; k < 5000; ++k) {
        const std::size_t n = 1 + rng() % 8;
        const TrafficProfile tp{u(rng), 1e6, 1.0, 1.0, 0.0};
        const SystemParams p = normalised(1.0, 1.0, 5.0);
        ChannelRealization real{0.3 * e(rng), {}, {}};
        for (std::size_t i = 0; i < n; ++i) {
            real.h_sq.push_back(e(rng));
            real.g_sq.push_back(e(rng));
        }
        const auto j = select_judrs(tp, p, real);
        const auto bw = select_best_worse(tp, p, real);
        const auto hm = select_harmonic_mean(tp, p, real);
        const auto& sets = j.candidate_sets;
        EXPECT_TRUE(std::includes(sets.gamma.begin(), sets.gamma.end(), sets.sigma.begin(), sets.sigma.end()));
        if (j.decision == Decision::relay) {
            EXPECT_TRUE(std::find(sets.sigma.begin(), sets.sigma.end(), *j.relay) != sets.sigma.end());
        }
        ASSERT_EQ(j.decision == Decision::outage, bw.decision == Decision::outage);
        ASSERT_EQ(j.decision == Decision::outage, hm.decision == Decision::outage);
        if (j.decision == Decision::outage) {
            continue;
        }
        EXPECT_LE(*j.energy_per_bit, *bw.energy_per_bit);
        EXPECT_LE(*j.energy_per_bit, *hm.energy_per_bit);
        strict += *j.energy_per_bit < *bw.energy_per_bit;

        // Dropping the last relay cannot make JUDRS cheaper.
        ChannelRealization fewer = real;
        fewer.h_sq.pop_back();
        fewer.g_sq.pop_back();
        const auto jf = select_judrs(tp, p, fewer);
        if (jf.decision != Decision::outage) {
            EXPECT_GE(*jf.energy_per_bit, *j.energy_per_bit);
        }
    }
    EXPECT_GT(strict, 0);
}

TEST(SelectJudrs, CapExcludesOverPoweredOptions)
{
    const TrafficProfile profile{0.0, 1e6, 1.0, 1.0, 1.0};
    // Relay DL needs th1 / |g|^2 = 1 / 0.6 W at the BS, above P0 = 1.5; the
    // direct link cannot carry rate R at P0.
    const SystemParams p = normalised(1.0, 0.5, 1.5);
    const ChannelRealization real{0.25, {2.0}, {0.6}};
    EXPECT_EQ(select_judrs(profile, p, real).decision, Decision::relay);
    EXPECT_EQ(select_judrs(profile, p, real, {true, BaselineSet::sigma}).decision, Decision::outage);
}

}  // namespace
}  // namespace relaysim
