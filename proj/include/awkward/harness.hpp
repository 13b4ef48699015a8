#pragma once

#include "awkward/arena.hpp"
#include "awkward/opera.hpp"
#include "awkward/plan.hpp"
#include "awkward/planner.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace awkward {

class DegenerateInput : public std::runtime_error {
public:
    explicit DegenerateInput(const std::string& message) : std::runtime_error(message) {}
};

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t sampleCount = 0;
};

// Ordinary least squares over (t, gold) points. Throws DegenerateInput
// unless at least two distinct t values are present.
RegressionResult linearRegression(std::span<const std::pair<double, double>> points);
RegressionResult linearRegression(const std::vector<std::pair<double, int>>& series);

struct TraceRow {
    std::int64_t tick = 0;
    std::vector<std::string> activeScenes;
    bool outranked = false;  // highestPriorityAround for the planner agent
    std::optional<std::string> activeDrive;
    std::optional<std::string> emittedAction;
    std::optional<CompletionEvent> completed;
};

struct TrialOptions {
    bool collectTrace = false;
    bool collectEvents = false;
};

struct TrialRecord {
    std::uint64_t seed = 0;
    bool operaEnabled = false;
    std::map<std::string, std::vector<std::pair<double, int>>> goldByHero;
    std::vector<EnforcementEntry> enforcementLog;
    double runtimeSeconds = 0.0;
    std::vector<TraceRow> trace;
    std::vector<WorldEvent> events;
};

struct TrialInputs {
    SimConfig sim;
    PrimitiveConfig prims;
    Plan supportPlan;  // ticked by the position5 AWKWARD agent
    Organisation org;
};

std::string readTextFile(const std::string& path);

// Loads sim config, primitive config, the position5 plan and the
// organisation files (roles.json, scenes.json, norms.json under orgDir),
// cross-validating plans and organisation against the arena catalog.
TrialInputs loadTrialInputs(const std::string& simConfigPath, const std::string& primitivesPath,
                            const std::string& plansDir, const std::string& orgDir);

// One seeded 600-second trial: position5 runs the planner plus its local
// OperA instance, position1 runs the scripted default bot. With
// operaEnabled=false the OperA instance observes and logs wouldEnforce
// entries but never swaps the plan.
TrialRecord runTrial(const TrialInputs& inputs, std::uint64_t seed, bool operaEnabled,
                     const TrialOptions& options = {});

struct TrendRow {
    std::uint64_t seed = 0;
    bool operaOn = false;
    std::string heroId;
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t sampleCount = 0;
};

struct ExperimentSummary {
    std::vector<TrendRow> trends;
    double meanSlopeOnP1 = 0.0;
    double meanSlopeOnP5 = 0.0;
    double meanSlopeOffP1 = 0.0;
    double meanSlopeOffP5 = 0.0;
    int orderingHolds = 0;  // seeds where the on-arm gap exceeds the off-arm gap
    int seedCount = 0;
    bool divergenceOn = false;
    bool balancedOff = false;
    bool orderingOk = false;
    bool verdict = false;
};

// Divergence thresholds for the experiment verdict.
inline constexpr double kDivergenceRatio = 1.4;
inline constexpr double kBalanceTolerance = 0.25;
inline constexpr double kOrderingMinFraction = 0.8;

ExperimentSummary runExperiment(const TrialInputs& inputs, const std::vector<std::uint64_t>& seeds,
                                bool armOn, bool armOff,
                                std::vector<TrialRecord>* outTrials = nullptr);

std::string goldSeriesCsv(const std::vector<TrialRecord>& trials);
std::string trendsCsv(const ExperimentSummary& summary);
std::string summaryJson(const ExperimentSummary& summary);
std::string enforcementJsonl(const std::vector<TrialRecord>& trials);

}  // namespace awkward
