#pragma once

#include "awkward/behaviour_library.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace awkward {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// Desk-scale one-lane arena constants. Values are tuned so that one greedy
// farmer captures most of a wave's bounty.
struct SimConfig {
    double durationSeconds = 600.0;
    double tickSeconds = 0.5;

    double wavePeriodSeconds = 30.0;
    int waveSize = 4;
    double creepMaxHealth = 550.0;
    double creepHealthJitter = 40.0;
    double creepSpawnJitter = 3.0;
    double creepDecayPerSecond = 10.0;
    double creepChipDamagePerSecond = 0.25;
    int bounty = 40;

    double heroMaxHealth = 600.0;
    double heroAttackDamage = 50.0;
    double attackRange = 2.0;
    double moveSpeed = 3.0;
    int startingGold = 300;

    int healingItemCost = 50;
    double healingItemHeal = 250.0;
    double innateHealAmount = 250.0;
    double innateHealCooldownSeconds = 60.0;
    std::vector<std::string> innateHealRoles{"position5"};

    double laneLength = 100.0;
    double fountainPosition = 0.0;
    double fountainRadius = 1.0;
    double fountainRegenPerSecond = 50.0;
    double nearbyRadius = 6.0;
    double botRetreatHealthFraction = 0.30;

    double position1Anchor = 48.0;
    double position5Anchor = 52.0;

    std::uint64_t seed = 1;

    std::int64_t totalTicks() const;
    std::int64_t ticksPerWave() const;
};

SimConfig loadSimConfig(const std::string& jsonText);

// Thresholds consumed by sense primitives; kept in their own file so
// experiments can vary them without touching the arena constants.
struct PrimitiveConfig {
    double lowHealthFraction = 0.30;
    double farmTimeEndSeconds = 600.0;
    double attackRange = 2.0;
    double nearbyRadius = 6.0;
};

PrimitiveConfig loadPrimitiveConfig(const std::string& jsonText);

struct HeroState {
    std::string heroId;
    std::string roleId;
    int positionRank = 99;  // 1 for position1, 5 for position5
    double lanePosition = 0.0;
    double health = 0.0;
    double maxHealth = 0.0;
    double attackDamage = 0.0;
    int gold = 0;
    int inventory = 0;
    std::optional<int> selectedTarget;
    double anchor = 0.0;
    bool hasInnateHeal = false;
    std::int64_t healReadyTick = 0;
    std::int64_t lastDamageTick = -1000;
    bool policyHealing = false;  // default-bot bookkeeping
};

struct CreepState {
    int creepId = 0;
    double lanePosition = 0.0;
    double health = 0.0;
    double maxHealth = 0.0;
    int bounty = 0;
    bool alive = true;
};

struct WorldEvent {
    double t = 0.0;
    std::string kind;  // spawn | creepSpawn | lastHit | purchase | creepExpired
    std::optional<std::string> heroId;
    std::optional<int> creepId;
    std::optional<int> delta;  // gold delta where applicable
};

std::string worldEventJson(const WorldEvent& event);

struct Command {
    enum class Kind { MoveToward, SetTarget, Attack, UseAbility, UseItem, Buy };
    Kind kind = Kind::MoveToward;
    double target = 0.0;  // MoveToward destination
    int creepId = -1;     // SetTarget (-1 clears) and Attack
};

// All mutation flows through per-agent command buffers applied in a fixed
// hero order at step end, so every sense evaluated within a tick observes
// the same snapshot.
struct WorldState {
    SimConfig config;
    std::int64_t tickIndex = 0;
    std::vector<HeroState> heroes;
    std::vector<CreepState> creeps;
    std::map<std::string, std::vector<Command>> commandBuffers;
    std::vector<WorldEvent> eventLog;
    int nextCreepId = 0;
    std::mt19937_64 rng;

    double clock() const { return static_cast<double>(tickIndex) * config.tickSeconds; }

    HeroState* hero(const std::string& heroId);
    const HeroState* hero(const std::string& heroId) const;
    const CreepState* creep(int creepId) const;

    void buffer(const std::string& heroId, Command command);
};

WorldState makeWorld(const SimConfig& config, std::uint64_t seed);

// Commands, wave spawning, attrition, chip damage, regeneration, expiry;
// advances the clock by one tick.
void worldStep(WorldState& world);

// Installs every sense/action primitive used by the shipped plan, role,
// scene and norm fixtures.
void registerArenaPrimitives(PrimitiveCatalog& catalog, const PrimitiveConfig& prims);

// Scripted greedy farmer for the position1 hero: approach the nearest
// creep, last-hit whenever possible, retreat below the health floor and
// come back after a full regen.
void defaultBotPolicy(WorldState& world, const std::string& heroId);

// Gold of one hero over time: a point at every gold-changing event plus a
// fixed five-second cadence.
std::vector<std::pair<double, int>> goldSeries(const WorldState& world, const std::string& heroId);

}  // namespace awkward
