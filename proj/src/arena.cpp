#include "awkward/arena.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace awkward {

using nlohmann::json;

std::int64_t SimConfig::totalTicks() const {
    return static_cast<std::int64_t>(std::llround(durationSeconds / tickSeconds));
}

std::int64_t SimConfig::ticksPerWave() const {
    return static_cast<std::int64_t>(std::llround(wavePeriodSeconds / tickSeconds));
}

namespace {

void requirePositive(double value, const char* name) {
    if (!(value > 0.0)) {
        throw ConfigError(std::string(name) + " must be positive");
    }
}

void validate(const SimConfig& c) {
    requirePositive(c.durationSeconds, "durationSeconds");
    requirePositive(c.tickSeconds, "tickSeconds");
    requirePositive(c.wavePeriodSeconds, "wavePeriodSeconds");
    requirePositive(static_cast<double>(c.waveSize), "waveSize");
    requirePositive(c.creepMaxHealth, "creepMaxHealth");
    requirePositive(c.creepDecayPerSecond, "creepDecayPerSecond");
    requirePositive(static_cast<double>(c.bounty), "bounty");
    requirePositive(c.heroMaxHealth, "heroMaxHealth");
    requirePositive(c.heroAttackDamage, "heroAttackDamage");
    requirePositive(c.attackRange, "attackRange");
    requirePositive(c.moveSpeed, "moveSpeed");
    requirePositive(c.laneLength, "laneLength");
    double ticks = c.durationSeconds / c.tickSeconds;
    if (std::abs(ticks - std::llround(ticks)) > 1e-9) {
        throw ConfigError("durationSeconds must be an integral number of ticks");
    }
}

}  // namespace

SimConfig loadSimConfig(const std::string& jsonText) {
    json doc;
    try {
        doc = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed sim config: ") + e.what());
    }
    SimConfig c;
    c.durationSeconds = doc.value("durationSeconds", c.durationSeconds);
    c.tickSeconds = doc.value("tickSeconds", c.tickSeconds);
    c.wavePeriodSeconds = doc.value("wavePeriodSeconds", c.wavePeriodSeconds);
    c.waveSize = doc.value("waveSize", c.waveSize);
    c.creepMaxHealth = doc.value("creepMaxHealth", c.creepMaxHealth);
    c.creepHealthJitter = doc.value("creepHealthJitter", c.creepHealthJitter);
    c.creepSpawnJitter = doc.value("creepSpawnJitter", c.creepSpawnJitter);
    c.creepDecayPerSecond = doc.value("creepDecayPerSecond", c.creepDecayPerSecond);
    c.creepChipDamagePerSecond = doc.value("creepChipDamagePerSecond", c.creepChipDamagePerSecond);
    c.bounty = doc.value("bounty", c.bounty);
    c.heroMaxHealth = doc.value("heroMaxHealth", c.heroMaxHealth);
    c.heroAttackDamage = doc.value("heroAttackDamage", c.heroAttackDamage);
    c.attackRange = doc.value("attackRange", c.attackRange);
    c.moveSpeed = doc.value("moveSpeed", c.moveSpeed);
    c.startingGold = doc.value("startingGold", c.startingGold);
    c.healingItemCost = doc.value("healingItemCost", c.healingItemCost);
    c.healingItemHeal = doc.value("healingItemHeal", c.healingItemHeal);
    c.innateHealAmount = doc.value("innateHealAmount", c.innateHealAmount);
    c.innateHealCooldownSeconds = doc.value("innateHealCooldownSeconds", c.innateHealCooldownSeconds);
    if (doc.contains("innateHealRoles")) {
        c.innateHealRoles.clear();
        for (const auto& r : doc["innateHealRoles"]) c.innateHealRoles.push_back(r.get<std::string>());
    }
    c.laneLength = doc.value("laneLength", c.laneLength);
    c.fountainPosition = doc.value("fountainPosition", c.fountainPosition);
    c.fountainRadius = doc.value("fountainRadius", c.fountainRadius);
    c.fountainRegenPerSecond = doc.value("fountainRegenPerSecond", c.fountainRegenPerSecond);
    c.nearbyRadius = doc.value("nearbyRadius", c.nearbyRadius);
    c.botRetreatHealthFraction = doc.value("botRetreatHealthFraction", c.botRetreatHealthFraction);
    c.position1Anchor = doc.value("position1Anchor", c.position1Anchor);
    c.position5Anchor = doc.value("position5Anchor", c.position5Anchor);
    c.seed = doc.value("seed", c.seed);
    validate(c);
    return c;
}

PrimitiveConfig loadPrimitiveConfig(const std::string& jsonText) {
    json doc;
    try {
        doc = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed primitive config: ") + e.what());
    }
    PrimitiveConfig p;
    p.lowHealthFraction = doc.value("lowHealthFraction", p.lowHealthFraction);
    p.farmTimeEndSeconds = doc.value("farmTimeEndSeconds", p.farmTimeEndSeconds);
    p.attackRange = doc.value("attackRange", p.attackRange);
    p.nearbyRadius = doc.value("nearbyRadius", p.nearbyRadius);
    return p;
}

std::string worldEventJson(const WorldEvent& event) {
    json j{{"t", event.t}, {"kind", event.kind}};
    if (event.heroId) j["heroId"] = *event.heroId;
    if (event.creepId) j["creepId"] = *event.creepId;
    if (event.delta) j["delta"] = *event.delta;
    return j.dump();
}

HeroState* WorldState::hero(const std::string& heroId) {
    for (auto& h : heroes) {
        if (h.heroId == heroId) return &h;
    }
    return nullptr;
}

const HeroState* WorldState::hero(const std::string& heroId) const {
    for (const auto& h : heroes) {
        if (h.heroId == heroId) return &h;
    }
    return nullptr;
}

const CreepState* WorldState::creep(int creepId) const {
    for (const auto& c : creeps) {
        if (c.creepId == creepId) return &c;
    }
    return nullptr;
}

void WorldState::buffer(const std::string& heroId, Command command) {
    commandBuffers[heroId].push_back(command);
}

namespace {

int parsePositionRank(const std::string& roleId) {
    std::size_t i = roleId.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(roleId[i - 1]))) --i;
    if (i == roleId.size()) return 99;
    return std::stoi(roleId.substr(i));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    // 53-bit mantissa draw; deterministic across platforms
    double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    return lo + u * (hi - lo);
}

double distance(double a, double b) { return std::abs(a - b); }

HeroState makeHero(const SimConfig& c, const std::string& roleId, double anchor) {
    HeroState h;
    h.heroId = roleId;
    h.roleId = roleId;
    h.positionRank = parsePositionRank(roleId);
    h.lanePosition = anchor;
    h.anchor = anchor;
    h.maxHealth = c.heroMaxHealth;
    h.health = c.heroMaxHealth;
    h.attackDamage = c.heroAttackDamage;
    h.gold = c.startingGold;
    h.hasInnateHeal = std::find(c.innateHealRoles.begin(), c.innateHealRoles.end(), roleId) !=
                      c.innateHealRoles.end();
    return h;
}

void spawnWave(WorldState& world) {
    const SimConfig& c = world.config;
    double center = c.laneLength / 2.0;
    for (int i = 0; i < c.waveSize; ++i) {
        CreepState creep;
        creep.creepId = world.nextCreepId++;
        creep.lanePosition = center + uniform(world.rng, -c.creepSpawnJitter, c.creepSpawnJitter);
        creep.maxHealth = c.creepMaxHealth - uniform(world.rng, 0.0, c.creepHealthJitter);
        creep.health = creep.maxHealth;
        creep.bounty = c.bounty;
        world.creeps.push_back(creep);
        world.eventLog.push_back({world.clock(), "creepSpawn", std::nullopt, creep.creepId, std::nullopt});
    }
}

void applyCommand(WorldState& world, HeroState& hero, const Command& cmd) {
    const SimConfig& c = world.config;
    switch (cmd.kind) {
        case Command::Kind::MoveToward: {
            double maxStep = c.moveSpeed * c.tickSeconds;
            double delta = std::clamp(cmd.target - hero.lanePosition, -maxStep, maxStep);
            hero.lanePosition = std::clamp(hero.lanePosition + delta, 0.0, c.laneLength);
            break;
        }
        case Command::Kind::SetTarget:
            if (cmd.creepId < 0) {
                hero.selectedTarget.reset();
            } else {
                hero.selectedTarget = cmd.creepId;
            }
            break;
        case Command::Kind::Attack: {
            for (auto& creep : world.creeps) {
                if (creep.creepId != cmd.creepId || !creep.alive) continue;
                creep.health -= hero.attackDamage;
                if (creep.health <= 0.0) {
                    creep.health = 0.0;
                    creep.alive = false;
                    hero.gold += creep.bounty;
                    world.eventLog.push_back(
                        {world.clock(), "lastHit", hero.heroId, creep.creepId, creep.bounty});
                }
                break;
            }
            hero.selectedTarget.reset();
            break;
        }
        case Command::Kind::UseAbility:
            if (hero.hasInnateHeal && world.tickIndex >= hero.healReadyTick) {
                hero.health = std::min(hero.health + c.innateHealAmount, hero.maxHealth);
                hero.healReadyTick =
                    world.tickIndex +
                    static_cast<std::int64_t>(std::llround(c.innateHealCooldownSeconds / c.tickSeconds));
            }
            break;
        case Command::Kind::UseItem:
            if (hero.inventory > 0) {
                hero.health = std::min(hero.health + c.healingItemHeal, hero.maxHealth);
                --hero.inventory;
            }
            break;
        case Command::Kind::Buy:
            if (hero.gold >= c.healingItemCost) {
                hero.gold -= c.healingItemCost;
                ++hero.inventory;
                world.eventLog.push_back(
                    {world.clock(), "purchase", hero.heroId, std::nullopt, -c.healingItemCost});
            }
            break;
    }
}

}  // namespace

WorldState makeWorld(const SimConfig& config, std::uint64_t seed) {
    WorldState world;
    world.config = config;
    world.rng.seed(seed);
    world.heroes.push_back(makeHero(config, "position1", config.position1Anchor));
    world.heroes.push_back(makeHero(config, "position5", config.position5Anchor));
    for (const auto& h : world.heroes) {
        world.eventLog.push_back({0.0, "spawn", h.heroId, std::nullopt, h.gold});
    }
    return world;
}

void worldStep(WorldState& world) {
    const SimConfig& c = world.config;

    // buffered commands, in fixed hero order
    for (auto& hero : world.heroes) {
        auto it = world.commandBuffers.find(hero.heroId);
        if (it == world.commandBuffers.end()) continue;
        for (const auto& cmd : it->second) applyCommand(world, hero, cmd);
        it->second.clear();
    }

    // wave spawning on schedule
    if (world.tickIndex % c.ticksPerWave() == 0 && world.clock() < c.durationSeconds) {
        spawnWave(world);
    }

    // ambient attrition opens the last-hit windows
    for (auto& creep : world.creeps) {
        if (!creep.alive) continue;
        creep.health -= c.creepDecayPerSecond * c.tickSeconds;
        if (creep.health <= 0.0) {
            creep.health = 0.0;
            creep.alive = false;
            world.eventLog.push_back(
                {world.clock(), "creepExpired", std::nullopt, creep.creepId, std::nullopt});
        }
    }

    // creep-vs-hero chip damage
    for (auto& hero : world.heroes) {
        double damage = 0.0;
        for (const auto& creep : world.creeps) {
            if (creep.alive && distance(creep.lanePosition, hero.lanePosition) <= c.attackRange) {
                damage += c.creepChipDamagePerSecond * c.tickSeconds;
            }
        }
        if (damage > 0.0) {
            hero.health = std::max(hero.health - damage, 0.0);
            hero.lastDamageTick = world.tickIndex;
        }
    }

    // fountain regeneration
    for (auto& hero : world.heroes) {
        if (distance(hero.lanePosition, c.fountainPosition) <= c.fountainRadius &&
            hero.health < hero.maxHealth) {
            hero.health = std::min(hero.health + c.fountainRegenPerSecond * c.tickSeconds,
                                   hero.maxHealth);
        }
    }

    ++world.tickIndex;
}

namespace {

const CreepState* lowestHealthLastHittable(const WorldState& world, const HeroState& hero,
                                           double range) {
    const CreepState* best = nullptr;
    for (const auto& creep : world.creeps) {
        if (!creep.alive) continue;
        if (creep.health >= hero.attackDamage) continue;
        if (distance(creep.lanePosition, hero.lanePosition) > range) continue;
        if (!best || creep.health < best->health) best = &creep;
    }
    return best;
}

const CreepState* nearestAliveCreep(const WorldState& world, const HeroState& hero) {
    const CreepState* best = nullptr;
    double bestDist = std::numeric_limits<double>::max();
    for (const auto& creep : world.creeps) {
        if (!creep.alive) continue;
        double d = distance(creep.lanePosition, hero.lanePosition);
        if (d < bestDist) {
            bestDist = d;
            best = &creep;
        }
    }
    return best;
}

const HeroState* partnerOf(const WorldState& world, const HeroState& hero) {
    for (const auto& other : world.heroes) {
        if (other.heroId != hero.heroId) return &other;
    }
    return nullptr;
}

const HeroState& heroFor(const AgentBinding& binding) {
    if (!binding.world) throw PrimitiveFault("binding has no world");
    const HeroState* hero = binding.world->hero(binding.agentId);
    if (!hero) throw PrimitiveFault("unknown agent in binding: " + binding.agentId);
    return *hero;
}

}  // namespace

void registerArenaPrimitives(PrimitiveCatalog& catalog, const PrimitiveConfig& prims) {
    auto sense = [&catalog](const std::string& name, auto fn) {
        catalog.registerSense(name, SenseFn(fn));
    };
    auto action = [&catalog](const std::string& name, auto fn) {
        catalog.registerAction(name, ActionFn(fn));
    };

    sense("isFarmingTime", [prims](const AgentBinding& b) {
        heroFor(b);
        return b.world->clock() < prims.farmTimeEndSeconds;
    });
    sense("isSafeToFarm", [](const AgentBinding& b) {
        heroFor(b);
        return true;
    });
    sense("laningPhaseEnded", [prims](const AgentBinding& b) {
        heroFor(b);
        return b.world->clock() >= prims.farmTimeEndSeconds;
    });
    sense("creepCanBeLastHit", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        return lowestHealthLastHittable(*b.world, hero, prims.attackRange) != nullptr;
    });
    sense("creepWaveFar", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        const CreepState* nearest = nearestAliveCreep(*b.world, hero);
        return nearest != nullptr &&
               distance(nearest->lanePosition, hero.lanePosition) > prims.attackRange;
    });
    sense("lowHealth", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        return hero.health < prims.lowHealthFraction * hero.maxHealth;
    });
    sense("fullHealth", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        return hero.health >= hero.maxHealth;
    });
    sense("takingDamage", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        return hero.lastDamageTick == b.world->tickIndex - 1;
    });
    sense("hasHealingAbility", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        return hero.hasInnateHeal && b.world->tickIndex >= hero.healReadyTick;
    });
    sense("hasHealingItem", [](const AgentBinding& b) { return heroFor(b).inventory > 0; });
    sense("enoughGold", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        return hero.gold >= b.world->config.healingItemCost;
    });
    sense("partnerNearby", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        const HeroState* partner = partnerOf(*b.world, hero);
        return partner != nullptr &&
               distance(partner->lanePosition, hero.lanePosition) <= prims.nearbyRadius;
    });
    sense("creepsNearby", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        for (const auto& creep : b.world->creeps) {
            if (creep.alive && distance(creep.lanePosition, hero.lanePosition) <= prims.nearbyRadius) {
                return true;
            }
        }
        return false;
    });
    sense("partnerNotNearby", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        const HeroState* partner = partnerOf(*b.world, hero);
        return !(partner != nullptr &&
                 distance(partner->lanePosition, hero.lanePosition) <= prims.nearbyRadius);
    });
    sense("highestPriorityAround", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        for (const auto& other : b.world->heroes) {
            if (other.heroId == hero.heroId) continue;
            if (other.positionRank < hero.positionRank &&
                distance(other.lanePosition, hero.lanePosition) <= prims.nearbyRadius) {
                return true;
            }
        }
        return false;
    });
    sense("enemyCreepAround", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        for (const auto& creep : b.world->creeps) {
            if (creep.alive && distance(creep.lanePosition, hero.lanePosition) <= prims.nearbyRadius) {
                return true;
            }
        }
        return false;
    });

    action("selectTarget", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        const CreepState* best = lowestHealthLastHittable(*b.world, hero, prims.attackRange);
        if (!best) return ActionStatus::Failure;
        b.world->buffer(hero.heroId, {Command::Kind::SetTarget, 0.0, best->creepId});
        return ActionStatus::Success;
    });
    action("rightClickAttack", [prims](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        if (!hero.selectedTarget) return ActionStatus::Failure;
        const CreepState* creep = b.world->creep(*hero.selectedTarget);
        if (!creep || !creep->alive ||
            distance(creep->lanePosition, hero.lanePosition) > prims.attackRange) {
            return ActionStatus::Failure;
        }
        b.world->buffer(hero.heroId, {Command::Kind::Attack, 0.0, creep->creepId});
        return ActionStatus::Success;
    });
    action("goToCreepWave", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        const CreepState* nearest = nearestAliveCreep(*b.world, hero);
        if (!nearest) return ActionStatus::Failure;
        b.world->buffer(hero.heroId, {Command::Kind::MoveToward, nearest->lanePosition, -1});
        return ActionStatus::Success;
    });
    action("goToAssignedLane", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        b.world->buffer(hero.heroId, {Command::Kind::MoveToward, hero.anchor, -1});
        return ActionStatus::Success;
    });
    action("useHealingAbility", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        if (!hero.hasInnateHeal || b.world->tickIndex < hero.healReadyTick) {
            return ActionStatus::Failure;
        }
        b.world->buffer(hero.heroId, {Command::Kind::UseAbility, 0.0, -1});
        return ActionStatus::Success;
    });
    action("useHealingItem", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        if (hero.inventory <= 0) return ActionStatus::Failure;
        b.world->buffer(hero.heroId, {Command::Kind::UseItem, 0.0, -1});
        return ActionStatus::Success;
    });
    action("buyHealingItem", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        if (hero.gold < b.world->config.healingItemCost) return ActionStatus::Failure;
        b.world->buffer(hero.heroId, {Command::Kind::Buy, 0.0, -1});
        return ActionStatus::Success;
    });
    action("retreat", [](const AgentBinding& b) {
        const HeroState& hero = heroFor(b);
        b.world->buffer(hero.heroId, {Command::Kind::MoveToward, b.world->config.fountainPosition, -1});
        return ActionStatus::Success;
    });
}

void defaultBotPolicy(WorldState& world, const std::string& heroId) {
    HeroState* hero = world.hero(heroId);
    if (!hero) return;
    const SimConfig& c = world.config;

    if (hero->policyHealing) {
        if (hero->health >= hero->maxHealth) {
            hero->policyHealing = false;
        } else {
            world.buffer(heroId, {Command::Kind::MoveToward, c.fountainPosition, -1});
            return;
        }
    }
    if (hero->health < c.botRetreatHealthFraction * hero->maxHealth) {
        hero->policyHealing = true;
        world.buffer(heroId, {Command::Kind::MoveToward, c.fountainPosition, -1});
        return;
    }

    if (hero->selectedTarget) {
        const CreepState* creep = world.creep(*hero->selectedTarget);
        if (creep && creep->alive &&
            distance(creep->lanePosition, hero->lanePosition) <= c.attackRange) {
            world.buffer(heroId, {Command::Kind::Attack, 0.0, creep->creepId});
            return;
        }
    }
    if (const CreepState* best = lowestHealthLastHittable(world, *hero, c.attackRange)) {
        world.buffer(heroId, {Command::Kind::SetTarget, 0.0, best->creepId});
        return;
    }
    if (hero->selectedTarget) {
        world.buffer(heroId, {Command::Kind::SetTarget, 0.0, -1});  // stale click
        return;
    }
    // greed: walk to a last-hit window anywhere in the lane
    if (const CreepState* ripe = lowestHealthLastHittable(world, *hero, c.laneLength)) {
        world.buffer(heroId, {Command::Kind::MoveToward, ripe->lanePosition, -1});
        return;
    }
    if (const CreepState* nearest = nearestAliveCreep(world, *hero)) {
        if (distance(nearest->lanePosition, hero->lanePosition) > c.attackRange) {
            world.buffer(heroId, {Command::Kind::MoveToward, nearest->lanePosition, -1});
            return;
        }
        return;  // parked inside the wave, waiting for a last-hit window
    }
    if (distance(hero->lanePosition, hero->anchor) > 1e-9) {
        world.buffer(heroId, {Command::Kind::MoveToward, hero->anchor, -1});
    }
}

std::vector<std::pair<double, int>> goldSeries(const WorldState& world, const std::string& heroId) {
    std::vector<std::pair<double, int>> deltas;
    for (const auto& event : world.eventLog) {
        if (event.heroId && *event.heroId == heroId && event.delta) {
            deltas.emplace_back(event.t, *event.delta);
        }
    }

    std::vector<double> times;
    double end = world.clock();
    for (double t = 0.0; t <= end + 1e-9; t += 5.0) times.push_back(t);
    for (const auto& [t, delta] : deltas) times.push_back(t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::vector<std::pair<double, int>> series;
    series.reserve(times.size());
    int gold = 0;
    std::size_t next = 0;
    for (double t : times) {
        while (next < deltas.size() && deltas[next].first <= t + 1e-12) {
            gold += deltas[next].second;
            ++next;
        }
        series.emplace_back(t, gold);
    }
    return series;
}

}  // namespace awkward
