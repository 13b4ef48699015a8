#include "awkward/plan.hpp"

#include "awkward/behaviour_library.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace awkward {

using nlohmann::json;

const Competence* Plan::findCompetence(const std::string& n) const {
    auto it = competences.find(n);
    return it == competences.end() ? nullptr : &it->second;
}

const ActionPattern* Plan::findActionPattern(const std::string& n) const {
    auto it = actionPatterns.find(n);
    return it == actionPatterns.end() ? nullptr : &it->second;
}

std::vector<std::string> Plan::driveOrder() const {
    std::vector<std::string> names;
    names.reserve(driveCollection.drives.size());
    for (const auto& d : driveCollection.drives) names.push_back(d.name);
    return names;
}

namespace {

// Walks competence -> competence child edges looking for a cycle.
bool hasCompetenceCycle(const Plan& plan) {
    enum class Mark { Unseen, InProgress, Done };
    std::map<std::string, Mark> marks;
    for (const auto& [name, c] : plan.competences) marks[name] = Mark::Unseen;

    std::function<bool(const std::string&)> visit = [&](const std::string& name) {
        auto it = marks.find(name);
        if (it == marks.end()) return false;  // child is an action pattern
        if (it->second == Mark::InProgress) return true;
        if (it->second == Mark::Done) return false;
        it->second = Mark::InProgress;
        for (const auto& el : plan.competences.at(name).elements) {
            if (visit(el.child)) return true;
        }
        it->second = Mark::Done;
        return false;
    };

    for (const auto& [name, c] : plan.competences) {
        if (visit(name)) return true;
    }
    return false;
}

void requireIdentifier(const std::string& value, const std::string& what) {
    if (value.empty()) {
        throw PlanError(PlanErrorKind::Schema, what + " must be a non-empty identifier");
    }
}

}  // namespace

void checkPlan(const Plan& plan) {
    requireIdentifier(plan.name, "plan name");
    requireIdentifier(plan.driveCollection.name, "drive collection name");
    if (plan.driveCollection.drives.empty()) {
        throw PlanError(PlanErrorKind::Schema, "drive collection needs at least one drive");
    }

    // Global name uniqueness across drives, competences, action patterns.
    std::set<std::string> names;
    auto claim = [&](const std::string& n, const char* what) {
        requireIdentifier(n, what);
        if (!names.insert(n).second) {
            throw PlanError(PlanErrorKind::DuplicateName, std::string("duplicate name: ") + n);
        }
    };
    for (const auto& d : plan.driveCollection.drives) claim(d.name, "drive name");
    for (const auto& [n, c] : plan.competences) claim(n, "competence name");
    for (const auto& [n, p] : plan.actionPatterns) claim(n, "action pattern name");

    std::set<std::string> behaviours;
    for (const auto& d : plan.driveCollection.drives) {
        requireIdentifier(d.behaviour, "drive behaviour label");
        if (!behaviours.insert(d.behaviour).second) {
            throw PlanError(PlanErrorKind::DuplicateName,
                            "duplicate behaviour label: " + d.behaviour);
        }
    }

    auto childResolves = [&](const std::string& child) {
        return plan.competences.count(child) > 0 || plan.actionPatterns.count(child) > 0;
    };
    for (const auto& d : plan.driveCollection.drives) {
        if (!childResolves(d.root)) {
            throw PlanError(PlanErrorKind::Reference,
                            "drive " + d.name + " root does not resolve: " + d.root);
        }
    }
    for (const auto& [n, c] : plan.competences) {
        if (c.elements.empty()) {
            throw PlanError(PlanErrorKind::Schema, "competence " + n + " needs at least one element");
        }
        for (const auto& el : c.elements) {
            if (!childResolves(el.child)) {
                throw PlanError(PlanErrorKind::Reference,
                                "competence " + n + " child does not resolve: " + el.child);
            }
        }
    }
    for (const auto& [n, p] : plan.actionPatterns) {
        if (p.actions.empty()) {
            throw PlanError(PlanErrorKind::Schema, "action pattern " + n + " needs at least one action");
        }
        for (const auto& a : p.actions) requireIdentifier(a.name, "action name");
    }
    for (const auto& [n, c] : plan.competences) {
        for (const auto& s : c.goal) requireIdentifier(s.name, "sense name");
        for (const auto& el : c.elements) {
            for (const auto& s : el.condition) requireIdentifier(s.name, "sense name");
        }
    }
    for (const auto& d : plan.driveCollection.drives) {
        for (const auto& s : d.release) requireIdentifier(s.name, "sense name");
    }

    if (hasCompetenceCycle(plan)) {
        throw PlanError(PlanErrorKind::Cycle, "competence reference cycle");
    }
}

namespace {

std::vector<SenseRef> parseSenseList(const json& node, const std::string& where) {
    if (!node.is_array()) {
        throw PlanError(PlanErrorKind::Schema, where + " must be an array of senses");
    }
    std::vector<SenseRef> out;
    for (const auto& entry : node) {
        if (entry.is_string()) {
            out.push_back(SenseRef{entry.get<std::string>(), false});
        } else if (entry.is_object()) {
            if (!entry.contains("sense") || !entry["sense"].is_string()) {
                throw PlanError(PlanErrorKind::Schema, where + " sense entry needs a \"sense\" string");
            }
            bool neg = entry.value("negate", false);
            out.push_back(SenseRef{entry["sense"].get<std::string>(), neg});
        } else {
            throw PlanError(PlanErrorKind::Schema, where + " sense entry must be string or object");
        }
    }
    return out;
}

std::string requireString(const json& node, const char* key, const std::string& where) {
    if (!node.contains(key) || !node[key].is_string()) {
        throw PlanError(PlanErrorKind::Schema, where + " needs string field \"" + key + "\"");
    }
    return node[key].get<std::string>();
}

const json& requireArray(const json& node, const char* key, const std::string& where) {
    if (!node.contains(key) || !node[key].is_array()) {
        throw PlanError(PlanErrorKind::Schema, where + " needs array field \"" + key + "\"");
    }
    return node[key];
}

}  // namespace

Plan parsePlan(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw PlanError(PlanErrorKind::Syntax, std::string("malformed plan document: ") + e.what());
    }
    if (!doc.is_object()) {
        throw PlanError(PlanErrorKind::Schema, "plan document must be a JSON object");
    }

    Plan plan;
    plan.name = requireString(doc, "name", "plan");

    if (!doc.contains("driveCollection") || !doc["driveCollection"].is_object()) {
        throw PlanError(PlanErrorKind::Schema, "plan needs object field \"driveCollection\"");
    }
    const json& dc = doc["driveCollection"];
    plan.driveCollection.name = requireString(dc, "name", "driveCollection");
    for (const auto& dnode : requireArray(dc, "drives", "driveCollection")) {
        Drive d;
        d.name = requireString(dnode, "name", "drive");
        // behaviour label defaults to the drive name when omitted
        d.behaviour = dnode.contains("behaviour") ? requireString(dnode, "behaviour", "drive")
                                                  : d.name;
        d.release = parseSenseList(requireArray(dnode, "release", "drive " + d.name),
                                   "drive " + d.name + " release");
        d.root = requireString(dnode, "root", "drive " + d.name);
        plan.driveCollection.drives.push_back(std::move(d));
    }

    if (doc.contains("competences")) {
        for (const auto& cnode : requireArray(doc, "competences", "plan")) {
            Competence c;
            c.name = requireString(cnode, "name", "competence");
            c.goal = parseSenseList(requireArray(cnode, "goal", "competence " + c.name),
                                    "competence " + c.name + " goal");
            for (const auto& enode : requireArray(cnode, "elements", "competence " + c.name)) {
                CompetenceElement el;
                el.condition = parseSenseList(requireArray(enode, "condition", "competence element"),
                                              "competence " + c.name + " element condition");
                el.child = requireString(enode, "child", "competence " + c.name + " element");
                c.elements.push_back(std::move(el));
            }
            if (plan.competences.count(c.name)) {
                throw PlanError(PlanErrorKind::DuplicateName, "duplicate competence: " + c.name);
            }
            plan.competences.emplace(c.name, std::move(c));
        }
    }

    if (doc.contains("actionPatterns")) {
        for (const auto& pnode : requireArray(doc, "actionPatterns", "plan")) {
            ActionPattern p;
            p.name = requireString(pnode, "name", "action pattern");
            for (const auto& anode : requireArray(pnode, "actions", "action pattern " + p.name)) {
                if (!anode.is_string()) {
                    throw PlanError(PlanErrorKind::Schema,
                                    "action pattern " + p.name + " actions must be strings");
                }
                p.actions.push_back(ActionRef{anode.get<std::string>()});
            }
            if (plan.actionPatterns.count(p.name)) {
                throw PlanError(PlanErrorKind::DuplicateName, "duplicate action pattern: " + p.name);
            }
            plan.actionPatterns.emplace(p.name, std::move(p));
        }
    }

    checkPlan(plan);
    return plan;
}

namespace {

json senseListToJson(const std::vector<SenseRef>& senses) {
    json arr = json::array();
    for (const auto& s : senses) {
        if (s.negate) {
            arr.push_back(json{{"sense", s.name}, {"negate", true}});
        } else {
            arr.push_back(s.name);
        }
    }
    return arr;
}

}  // namespace

std::string serializePlan(const Plan& plan) {
    json doc;
    doc["name"] = plan.name;

    json drives = json::array();
    for (const auto& d : plan.driveCollection.drives) {
        drives.push_back(json{{"name", d.name},
                              {"behaviour", d.behaviour},
                              {"release", senseListToJson(d.release)},
                              {"root", d.root}});
    }
    doc["driveCollection"] = json{{"name", plan.driveCollection.name}, {"drives", drives}};

    json comps = json::array();
    for (const auto& [n, c] : plan.competences) {
        json els = json::array();
        for (const auto& el : c.elements) {
            els.push_back(json{{"condition", senseListToJson(el.condition)}, {"child", el.child}});
        }
        comps.push_back(json{{"name", n}, {"goal", senseListToJson(c.goal)}, {"elements", els}});
    }
    doc["competences"] = comps;

    json pats = json::array();
    for (const auto& [n, p] : plan.actionPatterns) {
        json acts = json::array();
        for (const auto& a : p.actions) acts.push_back(a.name);
        pats.push_back(json{{"name", n}, {"actions", acts}});
    }
    doc["actionPatterns"] = pats;

    return doc.dump(2) + "\n";
}

ValidationReport validatePlan(const Plan& plan, const PrimitiveCatalog& library) {
    ValidationReport report;
    auto add = [&](std::string kind, std::string subject, std::string detail) {
        report.issues.push_back({std::move(kind), std::move(subject), std::move(detail)});
    };

    try {
        checkPlan(plan);
    } catch (const PlanError& e) {
        const char* kind = "Invariant";
        switch (e.kind()) {
            case PlanErrorKind::Reference: kind = "UnresolvedReference"; break;
            case PlanErrorKind::Cycle: kind = "Cycle"; break;
            case PlanErrorKind::DuplicateName: kind = "DuplicateName"; break;
            default: break;
        }
        add(kind, plan.name, e.what());
    }

    auto checkSenses = [&](const std::vector<SenseRef>& senses, const std::string& where) {
        for (const auto& s : senses) {
            if (!library.hasSense(s.name)) {
                add("UnresolvedSense", s.name, where);
            }
        }
    };
    for (const auto& d : plan.driveCollection.drives) {
        checkSenses(d.release, "release of drive " + d.name);
    }
    for (const auto& [n, c] : plan.competences) {
        checkSenses(c.goal, "goal of competence " + n);
        for (std::size_t i = 0; i < c.elements.size(); ++i) {
            checkSenses(c.elements[i].condition,
                        "condition of competence " + n + " element " + std::to_string(i));
        }
    }
    for (const auto& [n, p] : plan.actionPatterns) {
        for (const auto& a : p.actions) {
            if (!library.hasAction(a.name)) {
                add("UnresolvedAction", a.name, "action pattern " + n);
            }
        }
    }
    return report;
}

std::optional<std::size_t> findDriveByBehaviour(const Plan& plan, std::string_view behaviour) {
    const auto& drives = plan.driveCollection.drives;
    for (std::size_t i = 0; i < drives.size(); ++i) {
        if (drives[i].behaviour == behaviour) return i;
    }
    return std::nullopt;
}

Plan moveDrive(const Plan& plan, std::size_t from, std::size_t to) {
    const auto n = plan.driveCollection.drives.size();
    if (from >= n || to >= n) {
        throw PlanError(PlanErrorKind::IndexOutOfBounds, "moveDrive index out of bounds");
    }
    Plan out = plan;
    auto& drives = out.driveCollection.drives;
    Drive d = std::move(drives[from]);
    drives.erase(drives.begin() + static_cast<std::ptrdiff_t>(from));
    drives.insert(drives.begin() + static_cast<std::ptrdiff_t>(to), std::move(d));
    return out;
}

std::pair<Plan, Drive> removeDrive(const Plan& plan, std::size_t index) {
    const auto& drives = plan.driveCollection.drives;
    if (index >= drives.size()) {
        throw PlanError(PlanErrorKind::IndexOutOfBounds, "removeDrive index out of bounds");
    }
    if (drives.size() == 1) {
        throw PlanError(PlanErrorKind::Schema, "cannot remove the last remaining drive");
    }
    Plan out = plan;
    Drive removed = out.driveCollection.drives[index];
    out.driveCollection.drives.erase(out.driveCollection.drives.begin() +
                                     static_cast<std::ptrdiff_t>(index));
    return {std::move(out), std::move(removed)};
}

Plan insertDrive(const Plan& plan, Drive drive, std::size_t index) {
    const auto& drives = plan.driveCollection.drives;
    if (index > drives.size()) {
        throw PlanError(PlanErrorKind::IndexOutOfBounds, "insertDrive index out of bounds");
    }
    for (const auto& d : drives) {
        if (d.name == drive.name) {
            throw PlanError(PlanErrorKind::DuplicateName, "drive name already present: " + drive.name);
        }
        if (d.behaviour == drive.behaviour) {
            throw PlanError(PlanErrorKind::DuplicateName,
                            "behaviour label already present: " + drive.behaviour);
        }
    }
    Plan out = plan;
    out.driveCollection.drives.insert(out.driveCollection.drives.begin() +
                                          static_cast<std::ptrdiff_t>(index),
                                      std::move(drive));
    return out;
}

}  // namespace awkward
