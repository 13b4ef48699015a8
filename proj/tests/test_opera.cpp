#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "awkward/arena.hpp"
#include "awkward/opera.hpp"
#include "awkward/plan.hpp"

#include "support/generators.hpp"

#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace awkward;

namespace {

std::string fixturePath(const std::string& rel) { return std::string(AWKWARD_DATA_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

SenseEvaluator fixedSenses(std::map<std::string, bool> values) {
    return [values](const SenseRef& ref) {
        auto it = values.find(ref.name);
        bool v = it != values.end() && it->second;
        return ref.negate ? !v : v;
    };
}

Plan supportPlan() {
    Plan plan;
    plan.name = "support";
    plan.driveCollection.name = "dc";
    plan.actionPatterns.emplace("AP", ActionPattern{"AP", {{"act"}}});
    plan.driveCollection.drives.push_back(Drive{"DE-Retreat", "DE-Retreat",
                                                {{"lowHealth", false}, {"takingDamage", false}},
                                                "AP"});
    plan.driveCollection.drives.push_back(Drive{"DE-Heal", "DE-Heal", {{"lowHealth", false}}, "AP"});
    plan.driveCollection.drives.push_back(
        Drive{"DE-FarmLane", "DE-FarmLane", {{"isFarmingTime", false}}, "AP"});
    return plan;
}

SceneSpec farmingScene() {
    SceneSpec scene;
    scene.sceneId = "priority-lane-farming";
    scene.roles = {"position1", "position5"};
    scene.landmarks = {{"partnerNearby", false}, {"creepsNearby", false}};
    scene.results = {{"partnerNotNearby", false}};
    ConditionalNorm rule;
    rule.guard = {{"highestPriorityAround", false}};
    rule.thenNorm = NormSpec{"yield-farm-to-priority", "DE-FarmLane", DeonticOperator::NotPermitted, {}};
    rule.elseNorm = NormSpec{"farm-as-priority", "DE-FarmLane", DeonticOperator::Obliged, {}};
    scene.rules.push_back(rule);
    return scene;
}

PrimitiveCatalog arenaCatalog() {
    PrimitiveCatalog catalog;
    registerArenaPrimitives(catalog, PrimitiveConfig{});
    return catalog;
}

}  // namespace

TEST_CASE("shipped organisation files load and match the role tables") {
    PrimitiveCatalog catalog = arenaCatalog();
    Organisation org = loadOrganisation(slurp(fixturePath("org/roles.json")),
                                        slurp(fixturePath("org/scenes.json")),
                                        slurp(fixturePath("org/norms.json")), catalog,
                                        {"DE-Retreat", "DE-Heal", "DE-FarmLane"});

    REQUIRE(org.roles.size() == 2);
    const RoleSpec* carry = org.findRole("position1");
    REQUIRE(carry != nullptr);
    CHECK(carry->objectives == std::vector<std::string>{"carry team to victory"});
    REQUIRE(carry->rules.size() == 1);
    CHECK(carry->rules[0].op == DeonticOperator::Obliged);
    CHECK(carry->rules[0].behaviour == "DE-FarmLane");

    const RoleSpec* support = org.findRole("position5");
    REQUIRE(support != nullptr);
    CHECK(support->objectives == std::vector<std::string>{"support team to victory"});
    REQUIRE(support->rules.size() == 1);
    CHECK(support->rules[0].op == DeonticOperator::NotPermitted);
    CHECK(support->rules[0].behaviour == "DE-FarmLane");

    REQUIRE(org.scenes.size() == 1);
    CHECK(org.scenes[0].sceneId == "priority-lane-farming");
    REQUIRE(org.scenes[0].rules.size() == 1);
    CHECK(org.scenes[0].rules[0].thenNorm.op == DeonticOperator::NotPermitted);
    REQUIRE(org.scenes[0].rules[0].elseNorm.has_value());
    CHECK(org.scenes[0].rules[0].elseNorm->op == DeonticOperator::Obliged);

    REQUIRE(org.norms.size() == 1);
    CHECK(org.norms[0].op == DeonticOperator::Permitted);
}

TEST_CASE("unknown deontic operator is rejected") {
    PrimitiveCatalog catalog = arenaCatalog();
    const char* roles = R"([{"roleId": "r", "rules": [
        {"name": "n", "behaviour": "DE-Heal", "operator": "MUST", "condition": []}]}])";
    try {
        loadOrganisation(roles, "[]", "[]", catalog);
        FAIL("expected OrgError");
    } catch (const OrgError& e) {
        CHECK(e.kind() == OrgErrorKind::UnknownDeonticOperator);
    }
}

TEST_CASE("scene with empty landmarks is a schema error") {
    PrimitiveCatalog catalog = arenaCatalog();
    const char* scenes = R"([{"sceneId": "s", "roles": [], "landmarks": [],
        "results": ["partnerNotNearby"], "rules": []}])";
    try {
        loadOrganisation("[]", scenes, "[]", catalog);
        FAIL("expected OrgError");
    } catch (const OrgError& e) {
        CHECK(e.kind() == OrgErrorKind::Schema);
    }
}

TEST_CASE("unknown sense in a landmark is rejected") {
    PrimitiveCatalog catalog = arenaCatalog();
    const char* scenes = R"([{"sceneId": "s", "roles": [], "landmarks": ["noSuchSense"],
        "results": ["partnerNotNearby"], "rules": []}])";
    try {
        loadOrganisation("[]", scenes, "[]", catalog);
        FAIL("expected OrgError");
    } catch (const OrgError& e) {
        CHECK(e.kind() == OrgErrorKind::UnknownSense);
    }
}

TEST_CASE("scene activation and termination follow landmarks and results") {
    std::vector<SceneInstance> scenes{SceneInstance{farmingScene()}};

    SUBCASE("activates when all landmarks hold") {
        auto events = updateScenes(scenes, fixedSenses({{"partnerNearby", true},
                                                        {"creepsNearby", true},
                                                        {"partnerNotNearby", false}}),
                                   7);
        REQUIRE(events.size() == 1);
        CHECK(events[0].kind == SceneEvent::Kind::Activated);
        CHECK(scenes[0].status == SceneStatus::Active);
        CHECK(scenes[0].activatedAtTick == 7);
    }

    SUBCASE("stays inactive while a landmark is missing") {
        auto events = updateScenes(scenes, fixedSenses({{"partnerNearby", true},
                                                        {"creepsNearby", false},
                                                        {"partnerNotNearby", false}}),
                                   7);
        CHECK(events.empty());
        CHECK(scenes[0].status == SceneStatus::Inactive);
    }

    SUBCASE("terminates when the results hold") {
        scenes[0].status = SceneStatus::Active;
        scenes[0].activatedAtTick = 3;
        auto events = updateScenes(scenes, fixedSenses({{"partnerNearby", false},
                                                        {"creepsNearby", true},
                                                        {"partnerNotNearby", true}}),
                                   9);
        REQUIRE(events.size() == 1);
        CHECK(events[0].kind == SceneEvent::Kind::Terminated);
        CHECK(scenes[0].status == SceneStatus::Inactive);
    }

    SUBCASE("active scene with landmarks still true emits nothing") {
        scenes[0].status = SceneStatus::Active;
        auto events = updateScenes(scenes, fixedSenses({{"partnerNearby", true},
                                                        {"creepsNearby", true},
                                                        {"partnerNotNearby", false}}),
                                   9);
        CHECK(events.empty());
        CHECK(scenes[0].status == SceneStatus::Active);
    }
}

TEST_CASE("norm evaluation against the priority farming scene") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;

    SUBCASE("support farming while outranked violates the prohibition") {
        auto senses = fixedSenses(
            {{"highestPriorityAround", true}, {"isFarmingTime", true}, {"lowHealth", false}});
        auto violations = evaluateNorms(scene, {}, plan, std::string("DE-FarmLane"), senses, 5);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].norm == "yield-farm-to-priority");
        CHECK(violations[0].op == DeonticOperator::NotPermitted);
        CHECK(violations[0].expectedBehaviour == "DE-FarmLane");
        CHECK(violations[0].tick == 5);
    }

    SUBCASE("carry farming while unchallenged satisfies the obligation") {
        auto senses = fixedSenses(
            {{"highestPriorityAround", false}, {"isFarmingTime", true}, {"lowHealth", false}});
        auto violations = evaluateNorms(scene, {}, plan, std::string("DE-FarmLane"), senses, 5);
        CHECK(violations.empty());
    }

    SUBCASE("carry idling while farm is released violates the obligation") {
        auto senses = fixedSenses(
            {{"highestPriorityAround", false}, {"isFarmingTime", true}, {"lowHealth", false}});
        auto violations = evaluateNorms(scene, {}, plan, std::string("DE-Heal"), senses, 5);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].op == DeonticOperator::Obliged);
    }

    SUBCASE("obligation does not fire when the obliged release is false") {
        auto senses = fixedSenses(
            {{"highestPriorityAround", false}, {"isFarmingTime", false}, {"lowHealth", false}});
        auto violations = evaluateNorms(scene, {}, plan, std::string("DE-Heal"), senses, 5);
        CHECK(violations.empty());
    }

    SUBCASE("inactive scene reports nothing") {
        scene.status = SceneStatus::Inactive;
        auto senses = fixedSenses({{"highestPriorityAround", true}, {"isFarmingTime", true}});
        CHECK(evaluateNorms(scene, {}, plan, std::string("DE-FarmLane"), senses, 5).empty());
    }
}

TEST_CASE("role rules from the carry table evaluate through the scene") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    scene.spec.rules.clear();  // isolate the role rule
    scene.status = SceneStatus::Active;

    NormSpec carryRule{"carry-farms-when-creeps-around", "DE-FarmLane", DeonticOperator::Obliged,
                       {{"enemyCreepAround", false}}};

    auto farming = fixedSenses({{"enemyCreepAround", true}, {"isFarmingTime", true}});
    CHECK(evaluateNorms(scene, {carryRule}, plan, std::string("DE-FarmLane"), farming, 1).empty());

    auto healingInstead = fixedSenses({{"enemyCreepAround", true}, {"isFarmingTime", true}});
    auto violations =
        evaluateNorms(scene, {carryRule}, plan, std::string("DE-Heal"), healingInstead, 1);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].norm == "carry-farms-when-creeps-around");

    auto noCreeps = fixedSenses({{"enemyCreepAround", false}, {"isFarmingTime", true}});
    CHECK(evaluateNorms(scene, {carryRule}, plan, std::string("DE-Heal"), noCreeps, 1).empty());
}

TEST_CASE("PERMITTED norms never produce violations or plan changes") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;
    scene.spec.rules.clear();
    ConditionalNorm rule;
    rule.thenNorm = NormSpec{"healing-permitted", "DE-Heal", DeonticOperator::Permitted, {}};
    scene.spec.rules.push_back(rule);

    auto senses = fixedSenses({{"isFarmingTime", true}, {"lowHealth", true}});
    for (const char* active : {"DE-Heal", "DE-FarmLane", "DE-Retreat"}) {
        CHECK(evaluateNorms(scene, {}, plan, std::string(active), senses, 1).empty());
    }

    auto outcome = complianceLoop(plan, scene, {}, senses, 1, "agent");
    CHECK(outcome.compliant);
    CHECK(outcome.mutations == 0);
    CHECK(outcome.plan == plan);
    CHECK_FALSE(scene.originalOrder.has_value());
}

TEST_CASE("enforce moves an obliged drive up exactly one position") {
    Plan plan = supportPlan();  // [Retreat, Heal, Farm]
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;

    ViolationReport violation{"norm", DeonticOperator::Obliged, "DE-Heal",
                              std::string("DE-Retreat"), 1};
    auto out = enforce(violation, plan, scene);
    CHECK(out.mutated);
    CHECK(out.action == "moveUp");
    CHECK(out.plan.driveOrder() ==
          std::vector<std::string>{"DE-Heal", "DE-Retreat", "DE-FarmLane"});
    REQUIRE(scene.originalOrder.has_value());
    CHECK(*scene.originalOrder ==
          std::vector<std::string>{"DE-Retreat", "DE-Heal", "DE-FarmLane"});
}

TEST_CASE("enforce removes a prohibited drive and archives it") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;

    ViolationReport violation{"norm", DeonticOperator::NotPermitted, "DE-FarmLane",
                              std::string("DE-FarmLane"), 1};
    auto out = enforce(violation, plan, scene);
    CHECK(out.mutated);
    CHECK(out.action == "remove");
    CHECK(out.plan.driveOrder() == std::vector<std::string>{"DE-Retreat", "DE-Heal"});
    REQUIRE(scene.archivedDrives.size() == 1);
    CHECK(scene.archivedDrives[0].name == "DE-FarmLane");

    SUBCASE("termination restores the archived drive at its original index") {
        Plan restored = restoreScene(scene, out.plan);
        CHECK(restored == plan);
        CHECK_FALSE(scene.originalOrder.has_value());
        CHECK(scene.archivedDrives.empty());
    }
}

TEST_CASE("enforce on a missing behaviour leaves the plan unchanged") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    ViolationReport violation{"norm", DeonticOperator::Obliged, "DE-Ghost", std::nullopt, 1};
    auto out = enforce(violation, plan, scene);
    CHECK_FALSE(out.mutated);
    CHECK(out.plan == plan);
    CHECK_FALSE(scene.originalOrder.has_value());
}

TEST_CASE("prohibition on the last remaining drive is unenforceable") {
    Plan plan;
    plan.name = "single";
    plan.driveCollection.name = "dc";
    plan.actionPatterns.emplace("AP", ActionPattern{"AP", {{"act"}}});
    plan.driveCollection.drives.push_back(Drive{"D", "D", {}, "AP"});

    SceneInstance scene{farmingScene()};
    ViolationReport violation{"norm", DeonticOperator::NotPermitted, "D", std::string("D"), 1};
    auto out = enforce(violation, plan, scene);
    CHECK_FALSE(out.mutated);
    CHECK(out.action == "unenforceable");
    CHECK(out.plan == plan);
}

TEST_CASE("compliance loop walks an obliged drive to selection") {
    Plan plan = supportPlan();  // [Retreat, Heal, Farm]
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;
    scene.spec.rules.clear();
    ConditionalNorm rule;
    rule.thenNorm = NormSpec{"heal-now", "DE-Heal", DeonticOperator::Obliged, {}};
    scene.spec.rules.push_back(rule);

    // retreat outranks heal and both are released
    auto senses = fixedSenses(
        {{"lowHealth", true}, {"takingDamage", true}, {"isFarmingTime", true}});
    auto outcome = complianceLoop(plan, scene, {}, senses, 3, "agent");
    CHECK(outcome.compliant);
    CHECK(outcome.mutations == 1);  // one upward move suffices
    CHECK(outcome.plan.driveOrder() ==
          std::vector<std::string>{"DE-Heal", "DE-Retreat", "DE-FarmLane"});
    REQUIRE(outcome.log.size() == 1);
    CHECK(outcome.log[0].action == "moveUp");
    CHECK(outcome.log[0].norm == "heal-now");

    // enforcement soundness: no violations remain on the same snapshot
    auto candidate = selectDrive(outcome.plan.driveCollection, senses);
    REQUIRE(candidate.has_value());
    auto after = evaluateNorms(scene, {}, outcome.plan,
                               outcome.plan.driveCollection.drives[*candidate].behaviour, senses,
                               3);
    CHECK(after.empty());
}

TEST_CASE("compliance loop with no violations is the identity") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;
    auto senses = fixedSenses({{"highestPriorityAround", false}, {"isFarmingTime", true}});
    auto outcome = complianceLoop(plan, scene, {}, senses, 3, "agent");
    CHECK(outcome.compliant);
    CHECK(outcome.mutations == 0);
    CHECK(outcome.plan == plan);
    CHECK(outcome.log.empty());
}

TEST_CASE("compliance loop removes the banned selection and re-selects") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;

    auto senses = fixedSenses({{"highestPriorityAround", true},
                               {"isFarmingTime", true},
                               {"lowHealth", false},
                               {"takingDamage", false}});
    // selection oracle before: farm is the only released drive
    CHECK(selectDrive(plan.driveCollection, senses) == std::size_t{2});

    auto outcome = complianceLoop(plan, scene, {}, senses, 3, "agent");
    CHECK(outcome.compliant);
    CHECK(outcome.mutations == 1);
    CHECK(outcome.plan.driveOrder() == std::vector<std::string>{"DE-Retreat", "DE-Heal"});

    // selection after: nothing is released, which violates nothing
    CHECK_FALSE(selectDrive(outcome.plan.driveCollection, senses).has_value());
}

TEST_CASE("conflicting norms: prohibition wins and obligation is suppressed") {
    Plan plan = supportPlan();
    SceneInstance scene{farmingScene()};
    scene.status = SceneStatus::Active;
    scene.spec.rules.clear();
    ConditionalNorm oblige;
    oblige.thenNorm = NormSpec{"must-farm", "DE-FarmLane", DeonticOperator::Obliged, {}};
    ConditionalNorm forbid;
    forbid.thenNorm = NormSpec{"no-farm", "DE-FarmLane", DeonticOperator::NotPermitted, {}};
    scene.spec.rules.push_back(oblige);
    scene.spec.rules.push_back(forbid);

    auto senses = fixedSenses({{"isFarmingTime", true}});
    auto outcome = complianceLoop(plan, scene, {}, senses, 4, "agent");
    CHECK(outcome.compliant);
    CHECK(outcome.plan.driveOrder() == std::vector<std::string>{"DE-Retreat", "DE-Heal"});
    bool suppressed = false;
    for (const auto& entry : outcome.log) {
        if (entry.action == "suppressed" && entry.norm == "must-farm") suppressed = true;
    }
    CHECK(suppressed);
}

TEST_CASE("operaInstance end to end: activation enforcement and restoration") {
    Plan plan = supportPlan();
    Organisation org;
    org.roles.push_back(RoleSpec{"position5", {}, {}, {}, {
        NormSpec{"support-defers-farm", "DE-FarmLane", DeonticOperator::NotPermitted,
                 {{"highestPriorityAround", false}}}}});
    org.scenes.push_back(farmingScene());

    AgentMind mind("position5", plan);
    OperaInstance opera(org, "position5", "position5", true);

    std::map<std::string, bool> world{{"partnerNearby", true},    {"creepsNearby", true},
                                      {"partnerNotNearby", false}, {"highestPriorityAround", true},
                                      {"isFarmingTime", true},     {"lowHealth", false},
                                      {"takingDamage", false}};
    auto senses = [&world](const SenseRef& ref) {
        bool v = world.at(ref.name);
        return ref.negate ? !v : v;
    };

    opera.onTick(mind, senses, std::nullopt, 0);
    CHECK(opera.sceneActive("priority-lane-farming"));
    CHECK(mind.plan().driveOrder() == std::vector<std::string>{"DE-Retreat", "DE-Heal"});
    CHECK_FALSE(opera.enforcementLog().empty());

    // partner walks away: scene terminates and the farm drive returns
    world["partnerNearby"] = false;
    world["partnerNotNearby"] = true;
    world["highestPriorityAround"] = false;
    opera.onTick(mind, senses, std::nullopt, 10);
    CHECK_FALSE(opera.sceneActive("priority-lane-farming"));
    CHECK(mind.plan().driveOrder() ==
          std::vector<std::string>{"DE-Retreat", "DE-Heal", "DE-FarmLane"});
    bool reinserted = false;
    for (const auto& entry : opera.enforcementLog()) {
        if (entry.action == "reinsert") reinserted = true;
    }
    CHECK(reinserted);
}

TEST_CASE("disabled enforcement logs wouldEnforce and never mutates") {
    Plan plan = supportPlan();
    Organisation org;
    org.scenes.push_back(farmingScene());

    AgentMind mind("position5", plan);
    OperaInstance opera(org, "position5", "position5", false);

    auto senses = fixedSenses({{"partnerNearby", true},
                               {"creepsNearby", true},
                               {"partnerNotNearby", false},
                               {"highestPriorityAround", true},
                               {"isFarmingTime", true},
                               {"lowHealth", false},
                               {"takingDamage", false}});

    opera.onTick(mind, senses, std::nullopt, 0);
    CHECK(opera.sceneActive("priority-lane-farming"));
    CHECK(mind.plan() == plan);
    REQUIRE_FALSE(opera.enforcementLog().empty());
    for (const auto& entry : opera.enforcementLog()) {
        CHECK(entry.action == "wouldEnforce");
    }
}

TEST_CASE("enforcement algebra property suite") {
    std::mt19937_64 rng(20240814);
    int permittedChecked = 0;

    for (int i = 0; i < 10000; ++i) {
        Plan plan = testing::randomPlan(rng);
        SceneInstance scene{testing::randomScene(rng, plan)};
        scene.status = SceneStatus::Active;
        auto assignment = testing::randomAssignment(rng);
        auto senses = testing::evaluatorFor(assignment);

        Plan original = plan;
        std::size_t driveCount = plan.driveCollection.drives.size();

        auto outcome = complianceLoop(plan, scene, {}, senses, i, "agent");

        // mutation budget
        CHECK(outcome.mutations <= driveCount);

        bool permittedOnly = true;
        for (const auto& rule : scene.spec.rules) {
            if (rule.thenNorm.op != DeonticOperator::Permitted) permittedOnly = false;
            if (rule.elseNorm && rule.elseNorm->op != DeonticOperator::Permitted) {
                permittedOnly = false;
            }
        }
        if (permittedOnly) {
            CHECK(outcome.plan == original);
            CHECK(outcome.mutations == 0);
            ++permittedChecked;
        }

        // enforcement soundness whenever the loop reports compliance
        if (outcome.compliant) {
            auto candidate = selectDrive(outcome.plan.driveCollection, senses);
            std::optional<std::string> behaviour;
            if (candidate) {
                behaviour = outcome.plan.driveCollection.drives[*candidate].behaviour;
            }
            CHECK(evaluateNorms(scene, {}, outcome.plan, behaviour, senses, i).empty());
        }

        // termination restores the pre-scene ordering exactly
        Plan restored = restoreScene(scene, outcome.plan);
        CHECK(restored.driveOrder() == original.driveOrder());
        CHECK(restored == original);
    }
    CHECK(permittedChecked > 100);  // the generator produced permitted-only scenes too
}
