#include "awkward/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace awkward;

std::vector<std::uint64_t> parseSeeds(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) seeds.push_back(std::stoull(token));
    }
    return seeds;
}

std::string defaultPrimitivesPath(const std::string& configPath) {
    auto sibling = std::filesystem::path(configPath).parent_path() / "primitives.json";
    return std::filesystem::exists(sibling) ? sibling.string() : std::string{};
}

void writeFile(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int runCommand(const std::string& configPath, std::string primitivesPath,
               const std::string& plansDir, const std::string& orgDir, const std::string& seedsCsv,
               const std::string& armsCsv, const std::string& outDir) {
    if (primitivesPath.empty()) primitivesPath = defaultPrimitivesPath(configPath);
    TrialInputs inputs = loadTrialInputs(configPath, primitivesPath, plansDir, orgDir);

    std::vector<std::uint64_t> seeds = parseSeeds(seedsCsv);
    bool armOn = armsCsv.find("on") != std::string::npos;
    bool armOff = armsCsv.find("off") != std::string::npos;
    if (seeds.empty() || (!armOn && !armOff)) {
        std::cerr << "nothing to run: need at least one seed and one arm\n";
        return 2;
    }

    std::vector<TrialRecord> trials;
    ExperimentSummary summary = runExperiment(inputs, seeds, armOn, armOff, &trials);

    std::filesystem::create_directories(outDir);
    writeFile(std::filesystem::path(outDir) / "gold_series.csv", goldSeriesCsv(trials));
    writeFile(std::filesystem::path(outDir) / "trends.csv", trendsCsv(summary));
    writeFile(std::filesystem::path(outDir) / "summary.json", summaryJson(summary));
    writeFile(std::filesystem::path(outDir) / "enforcement.jsonl", enforcementJsonl(trials));

    std::cout << "ran " << trials.size() << " trials over " << seeds.size() << " seeds\n";
    std::cout << "mean slopes on : position1 " << summary.meanSlopeOnP1 << "  position5 "
              << summary.meanSlopeOnP5 << "\n";
    std::cout << "mean slopes off: position1 " << summary.meanSlopeOffP1 << "  position5 "
              << summary.meanSlopeOffP5 << "\n";
    std::cout << "divergence verdict: " << (summary.verdict ? "holds" : "does not hold") << "\n";
    return 0;
}

int validateCommand(const std::string& plansDir, const std::string& orgDir,
                    std::string primitivesPath) {
    PrimitiveConfig prims;
    if (!primitivesPath.empty()) {
        prims = loadPrimitiveConfig(readTextFile(primitivesPath));
    }
    PrimitiveCatalog catalog;
    registerArenaPrimitives(catalog, prims);

    int problems = 0;
    std::vector<std::string> behaviours;
    for (const auto& entry : std::filesystem::directory_iterator(plansDir)) {
        if (entry.path().extension() != ".json") continue;
        try {
            Plan plan = parsePlan(readTextFile(entry.path().string()));
            ValidationReport report = validatePlan(plan, catalog);
            if (report.ok()) {
                std::cout << entry.path().filename().string() << ": ok ("
                          << plan.driveCollection.drives.size() << " drives)\n";
                if (plan.name == "position5") {
                    for (const auto& d : plan.driveCollection.drives) {
                        behaviours.push_back(d.behaviour);
                    }
                }
            } else {
                ++problems;
                std::cout << entry.path().filename().string() << ":\n";
                for (const auto& issue : report.issues) {
                    std::cout << "  " << issue.kind << " " << issue.subject << " (" << issue.detail
                              << ")\n";
                }
            }
        } catch (const std::exception& e) {
            ++problems;
            std::cout << entry.path().filename().string() << ": " << e.what() << "\n";
        }
    }

    try {
        Organisation org = loadOrganisation(readTextFile(orgDir + "/roles.json"),
                                            readTextFile(orgDir + "/scenes.json"),
                                            readTextFile(orgDir + "/norms.json"), catalog,
                                            behaviours);
        std::cout << "organisation: ok (" << org.roles.size() << " roles, " << org.scenes.size()
                  << " scenes, " << org.norms.size() << " norms)\n";
    } catch (const std::exception& e) {
        ++problems;
        std::cout << "organisation: " << e.what() << "\n";
    }

    return problems == 0 ? 0 : 1;
}

int traceCommand(const std::string& configPath, std::string primitivesPath,
                 const std::string& plansDir, const std::string& orgDir, std::uint64_t seed,
                 const std::string& arm) {
    if (primitivesPath.empty()) primitivesPath = defaultPrimitivesPath(configPath);
    TrialInputs inputs = loadTrialInputs(configPath, primitivesPath, plansDir, orgDir);

    TrialOptions options;
    options.collectTrace = true;
    TrialRecord record = runTrial(inputs, seed, arm == "on", options);

    for (const auto& row : record.trace) {
        TickResult result;
        result.activeDrive = row.activeDrive;
        result.emittedAction = row.emittedAction;
        result.driveCompleted = row.completed;
        std::cout << traceLine(static_cast<std::uint64_t>(row.tick), "position5", result) << "\n";
    }
    std::cerr << "# enforcement log\n";
    for (const auto& entry : record.enforcementLog) {
        std::cout << enforcementEntryJson(entry) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AWKWARD lane-farming experiment harness"};
    app.require_subcommand(1);

    std::string configPath;
    std::string primitivesPath;
    std::string plansDir;
    std::string orgDir;
    std::string seedsCsv = "1,2,3,4,5";
    std::string armsCsv = "on,off";
    std::string outDir = "out";
    std::uint64_t seed = 1;
    std::string arm = "on";

    auto* run = app.add_subcommand("run", "run seeded trials for both arms and write CSV/JSON");
    run->add_option("--config", configPath, "sim config JSON")->required();
    run->add_option("--primitives", primitivesPath, "primitive config JSON");
    run->add_option("--plans", plansDir, "directory with plan files")->required();
    run->add_option("--org", orgDir, "directory with roles/scenes/norms files")->required();
    run->add_option("--seeds", seedsCsv, "comma-separated seed list");
    run->add_option("--arms", armsCsv, "arms to run: on,off");
    run->add_option("--out", outDir, "output directory");

    auto* validate = app.add_subcommand("validate", "validate plan and organisation files");
    validate->add_option("--plans", plansDir, "directory with plan files")->required();
    validate->add_option("--org", orgDir, "directory with roles/scenes/norms files")->required();
    validate->add_option("--primitives", primitivesPath, "primitive config JSON");

    auto* trace = app.add_subcommand("trace", "emit planner trace and enforcement log");
    trace->add_option("--config", configPath, "sim config JSON")->required();
    trace->add_option("--primitives", primitivesPath, "primitive config JSON");
    trace->add_option("--plans", plansDir, "directory with plan files")->required();
    trace->add_option("--org", orgDir, "directory with roles/scenes/norms files")->required();
    trace->add_option("--seed", seed, "trial seed");
    trace->add_option("--arm", arm, "on or off");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return runCommand(configPath, primitivesPath, plansDir, orgDir, seedsCsv, armsCsv,
                              outDir);
        }
        if (validate->parsed()) {
            return validateCommand(plansDir, orgDir, primitivesPath);
        }
        if (trace->parsed()) {
            return traceCommand(configPath, primitivesPath, plansDir, orgDir, seed, arm);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
