#pragma once

#include "awkward/behaviour_library.hpp"
#include "awkward/plan.hpp"
#include "awkward/planner.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace awkward {

enum class DeonticOperator { Obliged, NotPermitted, Permitted };

std::string deonticOperatorName(DeonticOperator op);

struct NormSpec {
    std::string name;
    std::string behaviour;  // drive behaviour label, matched by string equality
    DeonticOperator op = DeonticOperator::Permitted;
    std::vector<SenseRef> condition;  // conjunction; empty = always applies
};

struct RoleSpec {
    std::string roleId;
    std::vector<std::string> objectives;
    std::vector<std::string> subObjectives;
    std::vector<std::string> rights;  // descriptive metadata only
    std::vector<NormSpec> rules;
};

struct ConditionalNorm {
    std::vector<SenseRef> guard;
    NormSpec thenNorm;
    std::optional<NormSpec> elseNorm;
};

// Interaction scene script: landmarks start it, results end it, rules bind
// the participants' behaviour while it runs.
struct SceneSpec {
    std::string sceneId;
    std::vector<std::string> roles;
    std::vector<SenseRef> landmarks;
    std::vector<SenseRef> results;
    std::vector<ConditionalNorm> rules;
};

enum class SceneStatus { Inactive, Active };

struct SceneInstance {
    SceneSpec spec;
    SceneStatus status = SceneStatus::Inactive;
    std::optional<std::uint64_t> activatedAtTick;
    // Captured at the first enforcement mutation; cleared on termination.
    std::optional<std::vector<std::string>> originalOrder;
    std::vector<Drive> archivedDrives;
};

struct ViolationReport {
    std::string norm;
    DeonticOperator op = DeonticOperator::Permitted;
    std::string expectedBehaviour;
    std::optional<std::string> observedBehaviour;
    std::uint64_t tick = 0;
};

struct Organisation {
    std::vector<RoleSpec> roles;
    std::vector<SceneSpec> scenes;
    std::vector<NormSpec> norms;  // standalone named norms

    const RoleSpec* findRole(const std::string& roleId) const;
};

enum class OrgErrorKind { Syntax, Schema, UnknownSense, UnknownDeonticOperator };

class OrgError : public std::runtime_error {
public:
    OrgError(OrgErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    OrgErrorKind kind() const { return kind_; }

private:
    OrgErrorKind kind_;
};

// Parses roles.json / scenes.json / norms.json. Every referenced sense must
// resolve in the catalog; behaviour labels are checked against
// knownBehaviours when that list is non-empty.
Organisation loadOrganisation(const std::string& rolesJson, const std::string& scenesJson,
                              const std::string& normsJson, const PrimitiveCatalog& catalog,
                              const std::vector<std::string>& knownBehaviours = {});

struct SceneEvent {
    enum class Kind { Activated, Terminated };
    std::string sceneId;
    Kind kind = Kind::Activated;
};

// Landmark/result check for every scene; at most one transition per scene
// per tick. Termination does not restore the plan by itself.
std::vector<SceneEvent> updateScenes(std::vector<SceneInstance>& scenes,
                                     const SenseEvaluator& senses, std::uint64_t tick);

// Validates the rules of an active scene, plus the role rules passed in,
// against the behaviour the planner would run this tick. OBLIGED(b) is
// violated when b is released but not selected; NOT_PERMITTED(b) when b is
// the selection; PERMITTED never. When an OBLIGED and a NOT_PERMITTED norm
// target the same behaviour, the prohibition wins and the obligation is
// reported through suppressedNorms.
std::vector<ViolationReport> evaluateNorms(const SceneInstance& scene,
                                           const std::vector<NormSpec>& roleRules,
                                           const Plan& plan,
                                           const std::optional<std::string>& activeBehaviour,
                                           const SenseEvaluator& senses, std::uint64_t tick,
                                           std::vector<std::string>* suppressedNorms = nullptr);

struct EnforcementEntry {
    std::uint64_t tick = 0;
    std::string agentId;
    std::string sceneId;
    std::string norm;
    std::string action;  // moveUp | remove | reinsert | wouldEnforce | suppressed | unenforceable
    std::vector<std::string> planOrderAfter;
};

std::string enforcementEntryJson(const EnforcementEntry& entry);

struct EnforceOutcome {
    Plan plan;
    std::string action;  // moveUp | remove | none | unenforceable
    bool mutated = false;
};

// Applies one enforcement step. OBLIGED moves the target drive up exactly
// one position; NOT_PERMITTED removes it and archives it in the scene
// instance for reinsertion at termination.
EnforceOutcome enforce(const ViolationReport& violation, const Plan& plan, SceneInstance& scene);

struct ComplianceOutcome {
    Plan plan;
    std::vector<EnforcementEntry> log;
    bool compliant = false;
    std::size_t mutations = 0;
};

// enforce -> re-select -> re-evaluate until no violation remains or the
// mutation budget (default: drive count at entry) is spent.
ComplianceOutcome complianceLoop(Plan plan, SceneInstance& scene,
                                 const std::vector<NormSpec>& roleRules,
                                 const SenseEvaluator& senses, std::uint64_t tick,
                                 const std::string& agentId,
                                 std::optional<std::size_t> maxIterations = std::nullopt);

// Rebuilds the drive list to the ordering archived at the scene's first
// mutation, reviving removed drives, then clears the archive.
Plan restoreScene(SceneInstance& scene, const Plan& plan);

// Per-agent OperA instance: owns the agent's scene instances and applies
// scene checks every tick, norm validation at drive-completion boundaries
// and on scene activation. With enforcement disabled it logs wouldEnforce
// entries and never touches the plan.
class OperaInstance {
public:
    OperaInstance(Organisation org, std::string agentId, std::string roleId,
                  bool enforcementEnabled = true);

    void onTick(AgentMind& mind, const SenseEvaluator& senses,
                const std::optional<CompletionEvent>& lastCompletion, std::uint64_t tick);

    const std::vector<EnforcementEntry>& enforcementLog() const { return log_; }
    bool sceneActive(const std::string& sceneId) const;
    std::vector<std::string> activeScenes() const;
    const std::vector<SceneInstance>& scenes() const { return scenes_; }
    const Organisation& organisation() const { return org_; }

private:
    Organisation org_;
    std::string agentId_;
    std::string roleId_;
    bool enforce_ = true;
    std::vector<SceneInstance> scenes_;
    std::vector<NormSpec> roleRules_;
    std::vector<EnforcementEntry> log_;
};

}  // namespace awkward
