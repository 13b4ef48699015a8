#include "awkward/behaviour_library.hpp"

namespace awkward {

void PrimitiveCatalog::registerSense(const std::string& name, SenseFn fn) {
    if (sealed_) {
        throw CatalogError(CatalogErrorKind::RegistrationClosed,
                           "catalog sealed; cannot register sense " + name);
    }
    if (!senses_.emplace(name, std::move(fn)).second) {
        throw CatalogError(CatalogErrorKind::DuplicateRegistration,
                           "sense already registered: " + name);
    }
}

void PrimitiveCatalog::registerAction(const std::string& name, ActionFn fn) {
    if (sealed_) {
        throw CatalogError(CatalogErrorKind::RegistrationClosed,
                           "catalog sealed; cannot register action " + name);
    }
    if (!actions_.emplace(name, std::move(fn)).second) {
        throw CatalogError(CatalogErrorKind::DuplicateRegistration,
                           "action already registered: " + name);
    }
}

bool PrimitiveCatalog::evalSense(const AgentBinding& binding, const SenseRef& ref) const {
    sealed_ = true;
    auto it = senses_.find(ref.name);
    if (it == senses_.end()) {
        throw CatalogError(CatalogErrorKind::UnknownSense, "unknown sense: " + ref.name);
    }
    bool value = it->second(binding);
    return ref.negate ? !value : value;
}

ActionStatus PrimitiveCatalog::execAction(const AgentBinding& binding, const ActionRef& ref) const {
    sealed_ = true;
    auto it = actions_.find(ref.name);
    if (it == actions_.end()) {
        throw CatalogError(CatalogErrorKind::UnknownAction, "unknown action: " + ref.name);
    }
    return it->second(binding);
}

std::vector<std::string> PrimitiveCatalog::senseNames() const {
    std::vector<std::string> names;
    names.reserve(senses_.size());
    for (const auto& [n, fn] : senses_) names.push_back(n);
    return names;
}

std::vector<std::string> PrimitiveCatalog::actionNames() const {
    std::vector<std::string> names;
    names.reserve(actions_.size());
    for (const auto& [n, fn] : actions_) names.push_back(n);
    return names;
}

}  // namespace awkward
