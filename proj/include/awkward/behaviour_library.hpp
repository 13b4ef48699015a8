#pragma once

#include "awkward/plan.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace awkward {

struct WorldState;

enum class ActionStatus { Success, Failure };

// Identifies which agent a primitive call is for and where its world lives.
// The same catalog instance serves every agent; the binding is what makes
// the returned values agent-appropriate.
struct AgentBinding {
    std::string agentId;
    WorldState* world = nullptr;
};

// Raised by a primitive implementation itself (as opposed to an action
// merely reporting Failure). Aborts the surrounding tick.
class PrimitiveFault : public std::runtime_error {
public:
    explicit PrimitiveFault(const std::string& message) : std::runtime_error(message) {}
};

enum class CatalogErrorKind {
    DuplicateRegistration,
    RegistrationClosed,
    UnknownSense,
    UnknownAction,
};

class CatalogError : public std::runtime_error {
public:
    CatalogError(CatalogErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    CatalogErrorKind kind() const { return kind_; }

private:
    CatalogErrorKind kind_;
};

using SenseFn = std::function<bool(const AgentBinding&)>;
using ActionFn = std::function<ActionStatus(const AgentBinding&)>;

// Single shared collection of all sense and action primitives. Registration
// happens once at startup; the first dispatch seals the catalog and any
// later registration fails with RegistrationClosed.
class PrimitiveCatalog {
public:
    void registerSense(const std::string& name, SenseFn fn);
    void registerAction(const std::string& name, ActionFn fn);

    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_; }

    bool hasSense(const std::string& name) const { return senses_.count(name) > 0; }
    bool hasAction(const std::string& name) const { return actions_.count(name) > 0; }

    // Evaluates the named sense for the bound agent, applying the ref's
    // negation flag. Senses are side-effect free by contract.
    bool evalSense(const AgentBinding& binding, const SenseRef& ref) const;

    ActionStatus execAction(const AgentBinding& binding, const ActionRef& ref) const;

    std::vector<std::string> senseNames() const;
    std::vector<std::string> actionNames() const;

private:
    std::map<std::string, SenseFn> senses_;
    std::map<std::string, ActionFn> actions_;
    mutable bool sealed_ = false;
};

}  // namespace awkward
