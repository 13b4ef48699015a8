#include "awkward/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace awkward {

using nlohmann::json;

RegressionResult linearRegression(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw DegenerateInput("linear regression needs at least two points");
    }
    double meanT = 0.0;
    double meanG = 0.0;
    for (const auto& [t, g] : points) {
        meanT += t;
        meanG += g;
    }
    meanT /= static_cast<double>(points.size());
    meanG /= static_cast<double>(points.size());

    double covTG = 0.0;
    double varT = 0.0;
    for (const auto& [t, g] : points) {
        covTG += (t - meanT) * (g - meanG);
        varT += (t - meanT) * (t - meanT);
    }
    if (varT == 0.0) {
        throw DegenerateInput("linear regression needs at least two distinct t values");
    }
    RegressionResult out;
    out.slope = covTG / varT;
    out.intercept = meanG - out.slope * meanT;
    out.sampleCount = points.size();
    return out;
}

RegressionResult linearRegression(const std::vector<std::pair<double, int>>& series) {
    std::vector<std::pair<double, double>> points;
    points.reserve(series.size());
    for (const auto& [t, g] : series) points.emplace_back(t, static_cast<double>(g));
    return linearRegression(std::span<const std::pair<double, double>>(points));
}

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

TrialInputs loadTrialInputs(const std::string& simConfigPath, const std::string& primitivesPath,
                            const std::string& plansDir, const std::string& orgDir) {
    TrialInputs inputs;
    inputs.sim = loadSimConfig(readTextFile(simConfigPath));
    if (!primitivesPath.empty() && std::filesystem::exists(primitivesPath)) {
        inputs.prims = loadPrimitiveConfig(readTextFile(primitivesPath));
    }
    inputs.supportPlan = parsePlan(readTextFile(plansDir + "/position5.plan.json"));

    PrimitiveCatalog catalog;
    registerArenaPrimitives(catalog, inputs.prims);
    ValidationReport report = validatePlan(inputs.supportPlan, catalog);
    if (!report.ok()) {
        throw std::runtime_error("position5 plan does not validate: " +
                                 report.issues.front().kind + " " + report.issues.front().subject);
    }

    std::vector<std::string> behaviours;
    for (const auto& d : inputs.supportPlan.driveCollection.drives) {
        behaviours.push_back(d.behaviour);
    }
    inputs.org = loadOrganisation(readTextFile(orgDir + "/roles.json"),
                                  readTextFile(orgDir + "/scenes.json"),
                                  readTextFile(orgDir + "/norms.json"), catalog, behaviours);
    return inputs;
}

TrialRecord runTrial(const TrialInputs& inputs, std::uint64_t seed, bool operaEnabled,
                     const TrialOptions& options) {
    auto started = std::chrono::steady_clock::now();

    WorldState world = makeWorld(inputs.sim, seed);
    PrimitiveCatalog catalog;
    registerArenaPrimitives(catalog, inputs.prims);
    catalog.seal();

    AgentBinding supportBinding{"position5", &world};
    AgentMind mind("position5", inputs.supportPlan);
    OperaInstance opera(inputs.org, "position5", "position5", operaEnabled);

    SenseEvaluator senses = [&](const SenseRef& ref) { return catalog.evalSense(supportBinding, ref); };
    ActionExecutor actions = [&](const ActionRef& ref) { return catalog.execAction(supportBinding, ref); };

    TrialRecord record;
    record.seed = seed;
    record.operaEnabled = operaEnabled;

    std::optional<CompletionEvent> lastCompletion;
    const std::int64_t steps = inputs.sim.totalTicks();
    const SenseRef outrankedRef{"highestPriorityAround", false};

    for (std::int64_t t = 0; t < steps; ++t) {
        opera.onTick(mind, senses, lastCompletion, static_cast<std::uint64_t>(t));
        TickResult result = tick(mind, senses, actions);
        lastCompletion = result.driveCompleted;

        defaultBotPolicy(world, "position1");

        if (options.collectTrace) {
            TraceRow row;
            row.tick = t;
            row.activeScenes = opera.activeScenes();
            row.outranked = catalog.evalSense(supportBinding, outrankedRef);
            row.activeDrive = result.activeDrive;
            row.emittedAction = result.emittedAction;
            row.completed = result.driveCompleted;
            record.trace.push_back(std::move(row));
        }

        worldStep(world);
    }

    record.enforcementLog = opera.enforcementLog();
    for (const auto& hero : world.heroes) {
        record.goldByHero[hero.heroId] = goldSeries(world, hero.heroId);
    }
    if (options.collectEvents) record.events = world.eventLog;

    record.runtimeSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return record;
}

namespace {

double meanOf(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

ExperimentSummary runExperiment(const TrialInputs& inputs, const std::vector<std::uint64_t>& seeds,
                                bool armOn, bool armOff, std::vector<TrialRecord>* outTrials) {
    if (seeds.empty()) {
        throw DegenerateInput("experiment needs at least one seed");
    }

    ExperimentSummary summary;
    summary.seedCount = static_cast<int>(seeds.size());

    std::map<std::pair<std::uint64_t, bool>, std::map<std::string, double>> slopes;

    std::vector<bool> arms;
    if (armOn) arms.push_back(true);
    if (armOff) arms.push_back(false);

    for (std::uint64_t seed : seeds) {
        for (bool on : arms) {
            TrialRecord record;
            try {
                record = runTrial(inputs, seed, on);
            } catch (const std::exception& e) {
                throw std::runtime_error("trial failed (seed " + std::to_string(seed) + ", arm " +
                                         (on ? "on" : "off") + "): " + e.what());
            }
            for (const auto& [heroId, series] : record.goldByHero) {
                RegressionResult fit = linearRegression(series);
                summary.trends.push_back({seed, on, heroId, fit.slope, fit.intercept,
                                          fit.sampleCount});
                slopes[{seed, on}][heroId] = fit.slope;
            }
            if (outTrials) outTrials->push_back(std::move(record));
        }
    }

    std::vector<double> onP1, onP5, offP1, offP5;
    for (std::uint64_t seed : seeds) {
        if (armOn) {
            onP1.push_back(slopes[{seed, true}]["position1"]);
            onP5.push_back(slopes[{seed, true}]["position5"]);
        }
        if (armOff) {
            offP1.push_back(slopes[{seed, false}]["position1"]);
            offP5.push_back(slopes[{seed, false}]["position5"]);
        }
    }
    summary.meanSlopeOnP1 = meanOf(onP1);
    summary.meanSlopeOnP5 = meanOf(onP5);
    summary.meanSlopeOffP1 = meanOf(offP1);
    summary.meanSlopeOffP5 = meanOf(offP5);

    if (armOn && armOff) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            double onGap = onP1[i] - onP5[i];
            double offGap = offP1[i] - offP5[i];
            if (onGap > offGap) ++summary.orderingHolds;
        }
        summary.orderingOk = static_cast<double>(summary.orderingHolds) >=
                             kOrderingMinFraction * static_cast<double>(summary.seedCount);
    }
    if (armOn) {
        summary.divergenceOn = summary.meanSlopeOnP1 >= kDivergenceRatio * summary.meanSlopeOnP5;
    }
    if (armOff) {
        summary.balancedOff =
            summary.meanSlopeOffP1 != 0.0 &&
            std::abs(summary.meanSlopeOffP1 - summary.meanSlopeOffP5) /
                    std::abs(summary.meanSlopeOffP1) <=
                kBalanceTolerance;
    }
    summary.verdict = (!armOn || summary.divergenceOn) && (!armOff || summary.balancedOff) &&
                      (!(armOn && armOff) || summary.orderingOk);
    return summary;
}

namespace {

std::string formatDouble(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    return buf;
}

}  // namespace

std::string goldSeriesCsv(const std::vector<TrialRecord>& trials) {
    std::ostringstream out;
    out << "seed,arm,heroId,t,gold\n";
    for (const auto& trial : trials) {
        const char* arm = trial.operaEnabled ? "on" : "off";
        for (const auto& [heroId, series] : trial.goldByHero) {
            for (const auto& [t, gold] : series) {
                out << trial.seed << ',' << arm << ',' << heroId << ',' << formatDouble(t, 3)
                    << ',' << gold << '\n';
            }
        }
    }
    return out.str();
}

std::string trendsCsv(const ExperimentSummary& summary) {
    std::ostringstream out;
    out << "seed,arm,heroId,slope,intercept\n";
    for (const auto& row : summary.trends) {
        out << row.seed << ',' << (row.operaOn ? "on" : "off") << ',' << row.heroId << ','
            << formatDouble(row.slope, 9) << ',' << formatDouble(row.intercept, 9) << '\n';
    }
    return out.str();
}

std::string summaryJson(const ExperimentSummary& summary) {
    json trends = json::array();
    for (const auto& row : summary.trends) {
        trends.push_back(json{{"seed", row.seed},
                              {"arm", row.operaOn ? "on" : "off"},
                              {"heroId", row.heroId},
                              {"slope", row.slope},
                              {"intercept", row.intercept},
                              {"samples", row.sampleCount}});
    }
    json doc{
        {"meanSlopes",
         {{"on", {{"position1", summary.meanSlopeOnP1}, {"position5", summary.meanSlopeOnP5}}},
          {"off", {{"position1", summary.meanSlopeOffP1}, {"position5", summary.meanSlopeOffP5}}}}},
        {"divergence",
         {{"ratioThreshold", kDivergenceRatio},
          {"balanceTolerance", kBalanceTolerance},
          {"orderingHolds", summary.orderingHolds},
          {"seedCount", summary.seedCount},
          {"divergenceOn", summary.divergenceOn},
          {"balancedOff", summary.balancedOff},
          {"orderingOk", summary.orderingOk},
          {"verdict", summary.verdict}}},
        {"trends", trends}};
    return doc.dump(2) + "\n";
}

std::string enforcementJsonl(const std::vector<TrialRecord>& trials) {
    std::ostringstream out;
    for (const auto& trial : trials) {
        for (const auto& entry : trial.enforcementLog) {
            json j{{"seed", trial.seed},
                   {"arm", trial.operaEnabled ? "on" : "off"},
                   {"tick", entry.tick},
                   {"agentId", entry.agentId},
                   {"sceneId", entry.sceneId},
                   {"norm", entry.norm},
                   {"action", entry.action},
                   {"planOrderAfter", entry.planOrderAfter}};
            out << j.dump() << '\n';
        }
    }
    return out.str();
}

}  // namespace awkward
