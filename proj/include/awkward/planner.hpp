#pragma once

#include "awkward/behaviour_library.hpp"
#include "awkward/plan.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace awkward {

using SenseEvaluator = std::function<bool(const SenseRef&)>;
using ActionExecutor = std::function<ActionStatus(const ActionRef&)>;

enum class FrameKind { Competence, ActionPattern };

// One level of the resumable execution pointer: which plan element the
// drive is inside and, for action patterns, which action comes next.
struct Frame {
    std::string element;
    FrameKind kind = FrameKind::Competence;
    std::size_t cursor = 0;

    friend bool operator==(const Frame&, const Frame&) = default;
};

enum class DriveStatus { Fresh, Running, Paused };

struct DriveState {
    std::string driveName;
    std::vector<Frame> stack;
    DriveStatus status = DriveStatus::Fresh;
};

enum class DriveOutcome { Success, Failure };

struct CompletionEvent {
    std::string driveName;
    DriveOutcome outcome = DriveOutcome::Success;

    friend bool operator==(const CompletionEvent&, const CompletionEvent&) = default;
};

struct TickResult {
    std::optional<std::string> activeDrive;
    std::optional<std::string> emittedAction;
    std::optional<CompletionEvent> driveCompleted;
    std::vector<std::pair<std::string, bool>> senseTrace;
};

// Per-agent planner state: the current plan (swappable by the norm module)
// plus one resumable DriveState per drive, enabling quasi-parallel pursuit.
class AgentMind {
public:
    AgentMind(std::string agentId, Plan plan);

    const std::string& agentId() const { return agentId_; }
    const Plan& plan() const { return plan_; }
    std::uint64_t tickCount() const { return tickCount_; }
    const std::optional<std::string>& lastActiveDrive() const { return lastActiveDrive_; }

    const DriveState* driveState(const std::string& driveName) const;
    const DriveState* archivedState(const std::string& driveName) const;

    // Replaces the plan between ticks. States for drives present in both
    // plans are retained by name; states for removed drives are archived
    // and revived if the drive is later reinserted.
    void swapPlan(Plan newPlan);

private:
    friend TickResult tick(AgentMind&, const SenseEvaluator&, const ActionExecutor&);

    std::string agentId_;
    Plan plan_;
    std::map<std::string, DriveState> driveStates_;
    std::map<std::string, DriveState> archivedStates_;
    std::optional<std::string> lastActiveDrive_;
    std::uint64_t tickCount_ = 0;
};

// Returns the smallest index whose release conjunction is fully true.
// The scan stops at the first hit; release conditions of lower-priority
// drives are not evaluated that tick.
std::optional<std::size_t> selectDrive(const DriveCollection& dc, const SenseEvaluator& senses);

enum class CompetenceStepKind { DescendChild, GoalMet, DeadEnd };

struct CompetenceStep {
    CompetenceStepKind kind = CompetenceStepKind::DeadEnd;
    std::size_t elementIndex = 0;  // valid when kind == DescendChild
};

// Goal first, then the highest-priority element whose condition holds.
CompetenceStep stepCompetence(const Competence& competence, const SenseEvaluator& senses);

struct PatternStep {
    std::string emittedAction;
    ActionStatus status = ActionStatus::Success;
    bool patternComplete = false;
};

// Executes the action at the frame cursor and advances it.
PatternStep stepActionPattern(Frame& frame, const ActionPattern& pattern,
                              const ActionExecutor& actions);

// One plan cycle: re-select the highest-priority released drive, pause the
// previously active one if it differs, and advance the selection by one
// step (at most one action emission per tick). A PrimitiveFault aborts the
// tick and leaves the mind unchanged.
TickResult tick(AgentMind& mind, const SenseEvaluator& senses, const ActionExecutor& actions);

// Tab-separated trace line: tick, agent, activeDrive, emittedAction, completion.
std::string traceLine(std::uint64_t tick, const std::string& agentId, const TickResult& result);

}  // namespace awkward
