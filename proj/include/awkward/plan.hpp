#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace awkward {

class PrimitiveCatalog;

// A guarded reading of the world. Conditions are conjunctions of these.
struct SenseRef {
    std::string name;
    bool negate = false;

    friend bool operator==(const SenseRef&, const SenseRef&) = default;
};

struct ActionRef {
    std::string name;

    friend bool operator==(const ActionRef&, const ActionRef&) = default;
};

// Fixed sequence of actions executed in order, one per tick.
struct ActionPattern {
    std::string name;
    std::vector<ActionRef> actions;

    friend bool operator==(const ActionPattern&, const ActionPattern&) = default;
};

// An empty condition means "always eligible" (fallback element).
struct CompetenceElement {
    std::vector<SenseRef> condition;
    std::string child;  // names a Competence or ActionPattern

    friend bool operator==(const CompetenceElement&, const CompetenceElement&) = default;
};

struct Competence {
    std::string name;
    std::vector<SenseRef> goal;  // conjunction; success condition
    std::vector<CompetenceElement> elements;  // priority order, index 0 first

    friend bool operator==(const Competence&, const Competence&) = default;
};

struct Drive {
    std::string name;
    std::string behaviour;  // label the norm module matches by string equality
    std::vector<SenseRef> release;
    std::string root;  // names a Competence or ActionPattern

    friend bool operator==(const Drive&, const Drive&) = default;
};

// Priority is encoded purely by list position; index 0 is highest.
struct DriveCollection {
    std::string name;
    std::vector<Drive> drives;

    friend bool operator==(const DriveCollection&, const DriveCollection&) = default;
};

struct Plan {
    std::string name;
    DriveCollection driveCollection;
    std::map<std::string, Competence> competences;
    std::map<std::string, ActionPattern> actionPatterns;

    const Competence* findCompetence(const std::string& n) const;
    const ActionPattern* findActionPattern(const std::string& n) const;
    std::vector<std::string> driveOrder() const;

    friend bool operator==(const Plan&, const Plan&) = default;
};

enum class PlanErrorKind {
    Syntax,
    Schema,
    Reference,
    Cycle,
    DuplicateName,
    IndexOutOfBounds,
};

class PlanError : public std::runtime_error {
public:
    PlanError(PlanErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    PlanErrorKind kind() const { return kind_; }

private:
    PlanErrorKind kind_;
};

// Throws PlanError if any structural invariant is broken: empty names,
// dangling child/root references, duplicate names, competence cycles.
void checkPlan(const Plan& plan);

// Parses the JSON plan file format. The returned plan satisfies checkPlan.
Plan parsePlan(const std::string& text);

// Canonical serialization: drives in priority order, competences and
// action patterns sorted by name. parsePlan(serializePlan(p)) == p.
std::string serializePlan(const Plan& plan);

struct ValidationIssue {
    std::string kind;     // "UnresolvedSense", "DuplicateName", ...
    std::string subject;  // offending name
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
};

// Report-style validation: structural invariants plus resolution of every
// sense/action name against the behaviour library. Never throws.
ValidationReport validatePlan(const Plan& plan, const PrimitiveCatalog& library);

// Exact string-equality lookup over drive behaviour labels.
std::optional<std::size_t> findDriveByBehaviour(const Plan& plan, std::string_view behaviour);

// List surgery on the drive collection. All three return fresh plans and
// leave the input untouched; the plan manager swaps the result in.
Plan moveDrive(const Plan& plan, std::size_t from, std::size_t to);
std::pair<Plan, Drive> removeDrive(const Plan& plan, std::size_t index);
Plan insertDrive(const Plan& plan, Drive drive, std::size_t index);

}  // namespace awkward
