#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "awkward/harness.hpp"

#include <cmath>
#include <vector>

using namespace awkward;

namespace {

std::string fixturePath(const std::string& rel) { return std::string(AWKWARD_DATA_DIR) + "/" + rel; }

TrialInputs shippedInputs() {
    return loadTrialInputs(fixturePath("config/sim.json"), fixturePath("config/primitives.json"),
                           fixturePath("plans"), fixturePath("org"));
}

// The plotted position1 gold series from the first no-intervention trial.
const std::vector<std::pair<double, double>> kPlottedSeries = {
    {44.032661437988, 294},  {49.699241638184, 341},  {49.699241638184, 341},
    {56.36580657959, 352},   {75.132186889648, 471},  {75.132186889648, 471},
    {214.49133300781, 860},  {239.48522949219, 902},  {239.48522949219, 902},
    {268.47814941406, 950},  {269.47790527344, 952},  {269.47790527344, 952},
    {273.47692871094, 958},  {308.80163574219, 1018}, {308.80163574219, 1018},
    {394.6806640625, 1278},  {411.01000976562, 1354}, {411.01000976562, 1354},
};

// Independent route: raw normal equations accumulated in extended precision.
RegressionResult normalEquationsOracle(std::span<const std::pair<double, double>> pts) {
    long double n = static_cast<long double>(pts.size());
    long double st = 0, sg = 0, stt = 0, stg = 0;
    for (const auto& [t, g] : pts) {
        st += t;
        sg += g;
        stt += static_cast<long double>(t) * t;
        stg += static_cast<long double>(t) * g;
    }
    long double slope = (n * stg - st * sg) / (n * stt - st * st);
    long double intercept = (sg - slope * st) / n;
    return {static_cast<double>(slope), static_cast<double>(intercept), pts.size()};
}

}  // namespace

TEST_CASE("regression recovers an exact line") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 10; ++i) pts.emplace_back(i, 2.0 * i + 5.0);
    auto fit = linearRegression(pts);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("regression rejects degenerate input") {
    std::vector<std::pair<double, double>> single{{1.0, 2.0}};
    CHECK_THROWS_AS(linearRegression(single), DegenerateInput);
    std::vector<std::pair<double, double>> sameT{{1.0, 2.0}, {1.0, 4.0}};
    CHECK_THROWS_AS(linearRegression(sameT), DegenerateInput);
}

TEST_CASE("regression matches the normal-equations oracle on the plotted series") {
    auto fit = linearRegression(kPlottedSeries);
    auto oracle = normalEquationsOracle(kPlottedSeries);

    CHECK(std::abs(fit.slope - oracle.slope) / std::abs(oracle.slope) <= 1e-9);
    CHECK(std::abs(fit.intercept - oracle.intercept) / std::abs(oracle.intercept) <= 1e-9);

    // frozen values computed with the oracle ahead of time
    CHECK(fit.slope == doctest::Approx(2.717534127824548).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(222.77747157608377).epsilon(1e-9));
    CHECK(fit.sampleCount == 18);
}

TEST_CASE("regression matches the oracle on random well-conditioned inputs") {
    std::mt19937_64 rng(20240815);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<double, double>> pts;
        std::size_t n = 2 + rng() % 50;
        for (std::size_t k = 0; k < n; ++k) {
            double t = static_cast<double>(k) + static_cast<double>(rng() % 1000) / 1000.0;
            double g = static_cast<double>(rng() % 2000);
            pts.emplace_back(t, g);
        }
        auto fit = linearRegression(pts);
        auto oracle = normalEquationsOracle(pts);
        CHECK(std::abs(fit.slope - oracle.slope) <=
              1e-9 * std::max(1.0, std::abs(oracle.slope)));
        CHECK(std::abs(fit.intercept - oracle.intercept) <=
              1e-9 * std::max(1.0, std::abs(oracle.intercept)));
    }
}

TEST_CASE("shipped inputs load and cross-validate") {
    TrialInputs inputs = shippedInputs();
    CHECK(inputs.supportPlan.name == "position5");
    CHECK(inputs.org.scenes.size() == 1);
    CHECK(inputs.sim.totalTicks() == 1200);
}

TEST_CASE("an opera-on trial activates the scene and enforces at least once") {
    TrialInputs inputs = shippedInputs();
    TrialRecord record = runTrial(inputs, 1, true);

    CHECK(record.operaEnabled);
    REQUIRE_FALSE(record.enforcementLog.empty());
    bool sawMutation = false;
    for (const auto& entry : record.enforcementLog) {
        if (entry.action == "remove" || entry.action == "moveUp") sawMutation = true;
    }
    CHECK(sawMutation);
    REQUIRE(record.goldByHero.count("position1") == 1);
    REQUIRE(record.goldByHero.count("position5") == 1);
}

TEST_CASE("an opera-off trial only logs wouldEnforce entries") {
    TrialInputs inputs = shippedInputs();
    TrialRecord record = runTrial(inputs, 1, false);
    REQUIRE_FALSE(record.enforcementLog.empty());
    for (const auto& entry : record.enforcementLog) {
        CHECK(entry.action == "wouldEnforce");
    }
}

TEST_CASE("identical seed and arm reproduce the trial exactly") {
    TrialInputs inputs = shippedInputs();
    TrialRecord a = runTrial(inputs, 2, true);
    TrialRecord b = runTrial(inputs, 2, true);
    CHECK(a.goldByHero == b.goldByHero);
    CHECK(a.enforcementLog.size() == b.enforcementLog.size());
}

TEST_CASE("gold series stay within the trial time range") {
    TrialInputs inputs = shippedInputs();
    TrialRecord record = runTrial(inputs, 3, true);
    for (const auto& [heroId, series] : record.goldByHero) {
        REQUIRE(series.size() >= 2);
        for (const auto& [t, gold] : series) {
            CHECK(t >= 0.0);
            CHECK(t <= inputs.sim.durationSeconds);
        }
        for (std::size_t i = 1; i < series.size(); ++i) {
            CHECK(series[i].first >= series[i - 1].first);
        }
    }
}

TEST_CASE("experiment over two seeds produces the full trend table") {
    TrialInputs inputs = shippedInputs();
    std::vector<TrialRecord> trials;
    ExperimentSummary summary = runExperiment(inputs, {1, 2}, true, true, &trials);

    CHECK(trials.size() == 4);                   // 2 seeds x 2 arms
    CHECK(summary.trends.size() == 8);           // x 2 heroes
    CHECK(summary.seedCount == 2);

    std::string csv = goldSeriesCsv(trials);
    CHECK(csv.rfind("seed,arm,heroId,t,gold\n", 0) == 0);
    std::string trends = trendsCsv(summary);
    CHECK(trends.rfind("seed,arm,heroId,slope,intercept\n", 0) == 0);
    CHECK(summaryJson(summary).find("divergence") != std::string::npos);
}

TEST_CASE("experiment output is byte-identical across runs") {
    TrialInputs inputs = shippedInputs();
    std::vector<TrialRecord> trialsA, trialsB;
    ExperimentSummary a = runExperiment(inputs, {1}, true, true, &trialsA);
    ExperimentSummary b = runExperiment(inputs, {1}, true, true, &trialsB);
    CHECK(goldSeriesCsv(trialsA) == goldSeriesCsv(trialsB));
    CHECK(trendsCsv(a) == trendsCsv(b));
    CHECK(summaryJson(a) == summaryJson(b));
    CHECK(enforcementJsonl(trialsA) == enforcementJsonl(trialsB));
}
