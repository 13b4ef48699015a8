#include "awkward/opera.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace awkward {

using nlohmann::json;

std::string deonticOperatorName(DeonticOperator op) {
    switch (op) {
        case DeonticOperator::Obliged: return "OBLIGED";
        case DeonticOperator::NotPermitted: return "NOT_PERMITTED";
        case DeonticOperator::Permitted: return "PERMITTED";
    }
    return "?";
}

const RoleSpec* Organisation::findRole(const std::string& roleId) const {
    for (const auto& r : roles) {
        if (r.roleId == roleId) return &r;
    }
    return nullptr;
}

namespace {

DeonticOperator parseOperator(const std::string& text) {
    if (text == "OBLIGED") return DeonticOperator::Obliged;
    if (text == "NOT_PERMITTED") return DeonticOperator::NotPermitted;
    if (text == "PERMITTED") return DeonticOperator::Permitted;
    throw OrgError(OrgErrorKind::UnknownDeonticOperator, "unknown deontic operator: " + text);
}

std::vector<SenseRef> parseSenseList(const json& node, const std::string& where) {
    if (!node.is_array()) {
        throw OrgError(OrgErrorKind::Schema, where + " must be an array of senses");
    }
    std::vector<SenseRef> out;
    for (const auto& entry : node) {
        if (entry.is_string()) {
            out.push_back(SenseRef{entry.get<std::string>(), false});
        } else if (entry.is_object() && entry.contains("sense") && entry["sense"].is_string()) {
            out.push_back(SenseRef{entry["sense"].get<std::string>(), entry.value("negate", false)});
        } else {
            throw OrgError(OrgErrorKind::Schema, where + " sense entry must be string or object");
        }
    }
    return out;
}

std::vector<std::string> parseStringList(const json& node, const char* key) {
    std::vector<std::string> out;
    if (!node.contains(key)) return out;
    for (const auto& entry : node[key]) {
        if (entry.is_string()) out.push_back(entry.get<std::string>());
    }
    return out;
}

NormSpec parseNorm(const json& node, const std::string& where) {
    if (!node.is_object() || !node.contains("behaviour") || !node["behaviour"].is_string()) {
        throw OrgError(OrgErrorKind::Schema, where + " norm needs a \"behaviour\" string");
    }
    if (!node.contains("operator") || !node["operator"].is_string()) {
        throw OrgError(OrgErrorKind::Schema, where + " norm needs an \"operator\" string");
    }
    NormSpec norm;
    norm.behaviour = node["behaviour"].get<std::string>();
    norm.op = parseOperator(node["operator"].get<std::string>());
    norm.name = node.contains("name") && node["name"].is_string()
                    ? node["name"].get<std::string>()
                    : deonticOperatorName(norm.op) + ":" + norm.behaviour;
    if (node.contains("condition")) {
        norm.condition = parseSenseList(node["condition"], where + " norm " + norm.name);
    }
    return norm;
}

json parseDocument(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw OrgError(OrgErrorKind::Syntax, std::string(what) + ": " + e.what());
    }
}

bool conjunctionHolds(const std::vector<SenseRef>& refs, const SenseEvaluator& senses) {
    for (const auto& ref : refs) {
        if (!senses(ref)) return false;
    }
    return true;
}

}  // namespace

Organisation loadOrganisation(const std::string& rolesJson, const std::string& scenesJson,
                              const std::string& normsJson, const PrimitiveCatalog& catalog,
                              const std::vector<std::string>& knownBehaviours) {
    Organisation org;

    json rolesDoc = parseDocument(rolesJson, "roles file");
    if (!rolesDoc.is_array()) throw OrgError(OrgErrorKind::Schema, "roles file must be an array");
    std::set<std::string> roleIds;
    for (const auto& rnode : rolesDoc) {
        RoleSpec role;
        if (!rnode.contains("roleId") || !rnode["roleId"].is_string()) {
            throw OrgError(OrgErrorKind::Schema, "role needs a \"roleId\" string");
        }
        role.roleId = rnode["roleId"].get<std::string>();
        if (!roleIds.insert(role.roleId).second) {
            throw OrgError(OrgErrorKind::Schema, "duplicate roleId: " + role.roleId);
        }
        role.objectives = parseStringList(rnode, "objectives");
        role.subObjectives = parseStringList(rnode, "subObjectives");
        role.rights = parseStringList(rnode, "rights");
        if (rnode.contains("rules")) {
            for (const auto& rule : rnode["rules"]) {
                role.rules.push_back(parseNorm(rule, "role " + role.roleId));
            }
        }
        org.roles.push_back(std::move(role));
    }

    json scenesDoc = parseDocument(scenesJson, "scenes file");
    if (!scenesDoc.is_array()) throw OrgError(OrgErrorKind::Schema, "scenes file must be an array");
    for (const auto& snode : scenesDoc) {
        SceneSpec scene;
        if (!snode.contains("sceneId") || !snode["sceneId"].is_string()) {
            throw OrgError(OrgErrorKind::Schema, "scene needs a \"sceneId\" string");
        }
        scene.sceneId = snode["sceneId"].get<std::string>();
        scene.roles = parseStringList(snode, "roles");
        scene.landmarks = parseSenseList(snode.value("landmarks", json::array()),
                                         "scene " + scene.sceneId + " landmarks");
        scene.results = parseSenseList(snode.value("results", json::array()),
                                       "scene " + scene.sceneId + " results");
        if (scene.landmarks.empty() || scene.results.empty()) {
            throw OrgError(OrgErrorKind::Schema,
                           "scene " + scene.sceneId + " needs non-empty landmarks and results");
        }
        if (snode.contains("rules")) {
            for (const auto& rule : snode["rules"]) {
                ConditionalNorm cn;
                cn.guard = parseSenseList(rule.value("guard", json::array()),
                                          "scene " + scene.sceneId + " rule guard");
                if (!rule.contains("then")) {
                    throw OrgError(OrgErrorKind::Schema,
                                   "scene " + scene.sceneId + " rule needs a \"then\" norm");
                }
                cn.thenNorm = parseNorm(rule["then"], "scene " + scene.sceneId);
                if (rule.contains("else") && !rule["else"].is_null()) {
                    cn.elseNorm = parseNorm(rule["else"], "scene " + scene.sceneId);
                }
                scene.rules.push_back(std::move(cn));
            }
        }
        org.scenes.push_back(std::move(scene));
    }

    json normsDoc = parseDocument(normsJson, "norms file");
    if (!normsDoc.is_array()) throw OrgError(OrgErrorKind::Schema, "norms file must be an array");
    for (const auto& nnode : normsDoc) {
        org.norms.push_back(parseNorm(nnode, "norms file"));
    }

    // Cross-checks: every sense must resolve in the behaviour library and
    // every behaviour label must name a known drive behaviour.
    auto checkSenses = [&](const std::vector<SenseRef>& refs, const std::string& where) {
        for (const auto& ref : refs) {
            if (!catalog.hasSense(ref.name)) {
                throw OrgError(OrgErrorKind::UnknownSense,
                               "unknown sense \"" + ref.name + "\" in " + where);
            }
        }
    };
    auto checkNorm = [&](const NormSpec& norm, const std::string& where) {
        checkSenses(norm.condition, where);
        if (!knownBehaviours.empty() &&
            std::find(knownBehaviours.begin(), knownBehaviours.end(), norm.behaviour) ==
                knownBehaviours.end()) {
            throw OrgError(OrgErrorKind::Schema,
                           "norm " + norm.name + " references unknown behaviour " + norm.behaviour);
        }
    };
    for (const auto& role : org.roles) {
        for (const auto& rule : role.rules) checkNorm(rule, "role " + role.roleId);
    }
    for (const auto& scene : org.scenes) {
        checkSenses(scene.landmarks, "scene " + scene.sceneId + " landmarks");
        checkSenses(scene.results, "scene " + scene.sceneId + " results");
        for (const auto& rule : scene.rules) {
            checkSenses(rule.guard, "scene " + scene.sceneId + " rule guard");
            checkNorm(rule.thenNorm, "scene " + scene.sceneId);
            if (rule.elseNorm) checkNorm(*rule.elseNorm, "scene " + scene.sceneId);
        }
    }
    for (const auto& norm : org.norms) checkNorm(norm, "norms file");

    return org;
}

std::vector<SceneEvent> updateScenes(std::vector<SceneInstance>& scenes,
                                     const SenseEvaluator& senses, std::uint64_t tick) {
    std::vector<SceneEvent> events;
    for (auto& scene : scenes) {
        if (scene.status == SceneStatus::Inactive) {
            if (conjunctionHolds(scene.spec.landmarks, senses)) {
                scene.status = SceneStatus::Active;
                scene.activatedAtTick = tick;
                events.push_back({scene.spec.sceneId, SceneEvent::Kind::Activated});
            }
        } else {
            if (conjunctionHolds(scene.spec.results, senses)) {
                scene.status = SceneStatus::Inactive;
                scene.activatedAtTick.reset();
                events.push_back({scene.spec.sceneId, SceneEvent::Kind::Terminated});
            }
        }
    }
    return events;
}

std::vector<ViolationReport> evaluateNorms(const SceneInstance& scene,
                                           const std::vector<NormSpec>& roleRules,
                                           const Plan& plan,
                                           const std::optional<std::string>& activeBehaviour,
                                           const SenseEvaluator& senses, std::uint64_t tick,
                                           std::vector<std::string>* suppressedNorms) {
    std::vector<ViolationReport> violations;
    if (scene.status != SceneStatus::Active) return violations;

    // Collect the norms that apply under the current sense readings.
    std::vector<NormSpec> applicable;
    for (const auto& rule : scene.spec.rules) {
        if (conjunctionHolds(rule.guard, senses)) {
            if (conjunctionHolds(rule.thenNorm.condition, senses)) {
                applicable.push_back(rule.thenNorm);
            }
        } else if (rule.elseNorm && conjunctionHolds(rule.elseNorm->condition, senses)) {
            applicable.push_back(*rule.elseNorm);
        }
    }
    for (const auto& rule : roleRules) {
        if (conjunctionHolds(rule.condition, senses)) {
            applicable.push_back(rule);
        }
    }

    // Prohibition wins over obligation on the same behaviour.
    std::set<std::string> prohibited;
    for (const auto& norm : applicable) {
        if (norm.op == DeonticOperator::NotPermitted) prohibited.insert(norm.behaviour);
    }

    for (const auto& norm : applicable) {
        switch (norm.op) {
            case DeonticOperator::Permitted:
                break;  // induces no change
            case DeonticOperator::Obliged: {
                if (prohibited.count(norm.behaviour)) {
                    if (suppressedNorms) suppressedNorms->push_back(norm.name);
                    break;
                }
                auto idx = findDriveByBehaviour(plan, norm.behaviour);
                if (!idx) break;  // nothing to oblige; the behaviour is not in the plan
                const Drive& target = plan.driveCollection.drives[*idx];
                if (activeBehaviour == norm.behaviour) break;
                if (conjunctionHolds(target.release, senses)) {
                    violations.push_back(
                        {norm.name, norm.op, norm.behaviour, activeBehaviour, tick});
                }
                break;
            }
            case DeonticOperator::NotPermitted:
                if (activeBehaviour && *activeBehaviour == norm.behaviour) {
                    violations.push_back(
                        {norm.name, norm.op, norm.behaviour, activeBehaviour, tick});
                }
                break;
        }
    }
    return violations;
}

std::string enforcementEntryJson(const EnforcementEntry& entry) {
    json j{{"tick", entry.tick},
           {"agentId", entry.agentId},
           {"sceneId", entry.sceneId},
           {"norm", entry.norm},
           {"action", entry.action},
           {"planOrderAfter", entry.planOrderAfter}};
    return j.dump();
}

EnforceOutcome enforce(const ViolationReport& violation, const Plan& plan, SceneInstance& scene) {
    EnforceOutcome out{plan, "none", false};

    auto captureOrder = [&]() {
        if (!scene.originalOrder) scene.originalOrder = plan.driveOrder();
    };

    switch (violation.op) {
        case DeonticOperator::Permitted:
            break;
        case DeonticOperator::Obliged: {
            auto idx = findDriveByBehaviour(plan, violation.expectedBehaviour);
            if (!idx) break;  // behaviour label absent; logged by the caller, plan unchanged
            if (*idx == 0) break;
            captureOrder();
            out.plan = moveDrive(plan, *idx, *idx - 1);
            out.action = "moveUp";
            out.mutated = true;
            break;
        }
        case DeonticOperator::NotPermitted: {
            auto idx = findDriveByBehaviour(plan, violation.expectedBehaviour);
            if (!idx) break;
            if (plan.driveCollection.drives.size() <= 1) {
                out.action = "unenforceable";  // cannot remove the last remaining drive
                break;
            }
            captureOrder();
            auto [mutated, removed] = removeDrive(plan, *idx);
            scene.archivedDrives.push_back(std::move(removed));
            out.plan = std::move(mutated);
            out.action = "remove";
            out.mutated = true;
            break;
        }
    }
    return out;
}

ComplianceOutcome complianceLoop(Plan plan, SceneInstance& scene,
                                 const std::vector<NormSpec>& roleRules,
                                 const SenseEvaluator& senses, std::uint64_t tick,
                                 const std::string& agentId,
                                 std::optional<std::size_t> maxIterations) {
    ComplianceOutcome out;
    const std::size_t budget = maxIterations.value_or(plan.driveCollection.drives.size());
    std::set<std::string> suppressedLogged;

    while (true) {
        auto candidate = selectDrive(plan.driveCollection, senses);
        std::optional<std::string> activeBehaviour;
        if (candidate) {
            activeBehaviour = plan.driveCollection.drives[*candidate].behaviour;
        }

        std::vector<std::string> suppressed;
        auto violations =
            evaluateNorms(scene, roleRules, plan, activeBehaviour, senses, tick, &suppressed);
        for (const auto& name : suppressed) {
            if (suppressedLogged.insert(name).second) {
                out.log.push_back(
                    {tick, agentId, scene.spec.sceneId, name, "suppressed", plan.driveOrder()});
            }
        }
        if (violations.empty()) {
            out.compliant = true;
            break;
        }
        if (out.mutations >= budget) {
            out.log.push_back({tick, agentId, scene.spec.sceneId, violations.front().norm,
                               "unenforceable", plan.driveOrder()});
            break;
        }

        EnforceOutcome step = enforce(violations.front(), plan, scene);
        if (!step.mutated) {
            out.log.push_back({tick, agentId, scene.spec.sceneId, violations.front().norm,
                               step.action, plan.driveOrder()});
            break;  // no progress is possible on this violation
        }
        plan = std::move(step.plan);
        ++out.mutations;
        out.log.push_back(
            {tick, agentId, scene.spec.sceneId, violations.front().norm, step.action,
             plan.driveOrder()});
    }

    out.plan = std::move(plan);
    return out;
}

Plan restoreScene(SceneInstance& scene, const Plan& plan) {
    if (!scene.originalOrder) {
        scene.archivedDrives.clear();
        return plan;
    }

    std::map<std::string, Drive> pool;
    for (const auto& d : plan.driveCollection.drives) pool[d.name] = d;
    for (const auto& d : scene.archivedDrives) pool[d.name] = d;

    Plan restored = plan;
    restored.driveCollection.drives.clear();
    for (const auto& name : *scene.originalOrder) {
        if (auto it = pool.find(name); it != pool.end()) {
            restored.driveCollection.drives.push_back(it->second);
            pool.erase(it);
        }
    }
    // keep any drives that appeared after the archive was taken
    for (const auto& d : plan.driveCollection.drives) {
        if (auto it = pool.find(d.name); it != pool.end()) {
            restored.driveCollection.drives.push_back(it->second);
            pool.erase(it);
        }
    }

    scene.originalOrder.reset();
    scene.archivedDrives.clear();
    return restored;
}

OperaInstance::OperaInstance(Organisation org, std::string agentId, std::string roleId,
                             bool enforcementEnabled)
    : org_(std::move(org)),
      agentId_(std::move(agentId)),
      roleId_(std::move(roleId)),
      enforce_(enforcementEnabled) {
    for (const auto& spec : org_.scenes) {
        scenes_.push_back(SceneInstance{spec});
    }
    if (const RoleSpec* role = org_.findRole(roleId_)) {
        roleRules_ = role->rules;
    }
}

bool OperaInstance::sceneActive(const std::string& sceneId) const {
    for (const auto& s : scenes_) {
        if (s.spec.sceneId == sceneId) return s.status == SceneStatus::Active;
    }
    return false;
}

std::vector<std::string> OperaInstance::activeScenes() const {
    std::vector<std::string> out;
    for (const auto& s : scenes_) {
        if (s.status == SceneStatus::Active) out.push_back(s.spec.sceneId);
    }
    return out;
}

void OperaInstance::onTick(AgentMind& mind, const SenseEvaluator& senses,
                           const std::optional<CompletionEvent>& lastCompletion,
                           std::uint64_t tick) {
    auto events = updateScenes(scenes_, senses, tick);

    bool anyActivation = false;
    for (const auto& event : events) {
        if (event.kind == SceneEvent::Kind::Activated) {
            anyActivation = true;
            continue;
        }
        // termination: put the plan back the way the scene found it
        for (auto& scene : scenes_) {
            if (scene.spec.sceneId != event.sceneId) continue;
            if (!scene.originalOrder) {
                scene.archivedDrives.clear();
                break;
            }
            std::vector<std::string> archivedNames;
            for (const auto& d : scene.archivedDrives) archivedNames.push_back(d.name);
            Plan restored = restoreScene(scene, mind.plan());
            bool changed = restored.driveOrder() != mind.plan().driveOrder();
            if (enforce_ && changed) {
                mind.swapPlan(restored);
                if (archivedNames.empty()) archivedNames.push_back("scene-termination");
                for (const auto& name : archivedNames) {
                    log_.push_back({tick, agentId_, event.sceneId, name, "reinsert",
                                    mind.plan().driveOrder()});
                }
            }
            break;
        }
    }

    if (!anyActivation && !lastCompletion) return;

    bool participates = true;
    for (auto& scene : scenes_) {
        if (scene.status != SceneStatus::Active) continue;
        participates = scene.spec.roles.empty() ||
                       std::find(scene.spec.roles.begin(), scene.spec.roles.end(), roleId_) !=
                           scene.spec.roles.end();
        const std::vector<NormSpec> noRules;
        const auto& rules = participates ? roleRules_ : noRules;

        if (enforce_) {
            auto outcome = complianceLoop(mind.plan(), scene, rules, senses, tick, agentId_);
            for (auto& entry : outcome.log) log_.push_back(std::move(entry));
            if (outcome.mutations > 0) mind.swapPlan(outcome.plan);
        } else {
            SceneInstance scratch = scene;  // observe only; keep no archival state
            auto outcome = complianceLoop(mind.plan(), scratch, rules, senses, tick, agentId_);
            for (const auto& entry : outcome.log) {
                log_.push_back({entry.tick, entry.agentId, entry.sceneId, entry.norm,
                                "wouldEnforce", mind.plan().driveOrder()});
            }
        }
    }
}

}  // namespace awkward
