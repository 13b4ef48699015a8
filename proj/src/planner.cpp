#include "awkward/planner.hpp"

#include <sstream>

namespace awkward {

AgentMind::AgentMind(std::string agentId, Plan plan)
    : agentId_(std::move(agentId)), plan_(std::move(plan)) {
    checkPlan(plan_);
}

const DriveState* AgentMind::driveState(const std::string& driveName) const {
    auto it = driveStates_.find(driveName);
    return it == driveStates_.end() ? nullptr : &it->second;
}

const DriveState* AgentMind::archivedState(const std::string& driveName) const {
    auto it = archivedStates_.find(driveName);
    return it == archivedStates_.end() ? nullptr : &it->second;
}

void AgentMind::swapPlan(Plan newPlan) {
    checkPlan(newPlan);

    std::map<std::string, DriveState> retained;
    for (const auto& d : newPlan.driveCollection.drives) {
        if (auto it = driveStates_.find(d.name); it != driveStates_.end()) {
            retained[d.name] = std::move(it->second);
            driveStates_.erase(it);
        } else if (auto arch = archivedStates_.find(d.name); arch != archivedStates_.end()) {
            retained[d.name] = std::move(arch->second);
            archivedStates_.erase(arch);
        }
    }
    // whatever is left belonged to drives the new plan no longer has
    for (auto& [name, state] : driveStates_) {
        state.status = DriveStatus::Paused;
        archivedStates_[name] = std::move(state);
    }
    driveStates_ = std::move(retained);
    plan_ = std::move(newPlan);

    if (lastActiveDrive_ && !driveStates_.count(*lastActiveDrive_)) {
        lastActiveDrive_.reset();
    }
}

std::optional<std::size_t> selectDrive(const DriveCollection& dc, const SenseEvaluator& senses) {
    for (std::size_t i = 0; i < dc.drives.size(); ++i) {
        bool released = true;
        for (const auto& ref : dc.drives[i].release) {
            if (!senses(ref)) {
                released = false;
                break;
            }
        }
        if (released) return i;  // the planner stops its search here
    }
    return std::nullopt;
}

namespace {

bool conjunctionHolds(const std::vector<SenseRef>& refs, const SenseEvaluator& senses) {
    for (const auto& ref : refs) {
        if (!senses(ref)) return false;
    }
    return true;
}

}  // namespace

CompetenceStep stepCompetence(const Competence& competence, const SenseEvaluator& senses) {
    if (!competence.goal.empty() && conjunctionHolds(competence.goal, senses)) {
        return {CompetenceStepKind::GoalMet, 0};
    }
    for (std::size_t i = 0; i < competence.elements.size(); ++i) {
        if (conjunctionHolds(competence.elements[i].condition, senses)) {
            return {CompetenceStepKind::DescendChild, i};
        }
    }
    return {CompetenceStepKind::DeadEnd, 0};
}

PatternStep stepActionPattern(Frame& frame, const ActionPattern& pattern,
                              const ActionExecutor& actions) {
    PatternStep step;
    const auto& action = pattern.actions.at(frame.cursor);
    step.emittedAction = action.name;
    step.status = actions(action);
    ++frame.cursor;
    step.patternComplete = frame.cursor >= pattern.actions.size();
    return step;
}

namespace {

// Advances one drive by a single observable step: descends through
// competences until an action fires, or resolves a goal/dead-end. Works on
// a scratch DriveState so a PrimitiveFault leaves the real state intact.
void advanceDrive(const Plan& plan, const Drive& drive, DriveState& state, TickResult& result,
                  const SenseEvaluator& senses, const ActionExecutor& actions) {
    auto pushChild = [&](const std::string& child) {
        if (plan.findCompetence(child)) {
            state.stack.push_back(Frame{child, FrameKind::Competence, 0});
        } else {
            state.stack.push_back(Frame{child, FrameKind::ActionPattern, 0});
        }
    };

    auto complete = [&](DriveOutcome outcome) {
        result.driveCompleted = CompletionEvent{drive.name, outcome};
        state.stack.clear();
        state.status = DriveStatus::Fresh;
    };

    if (state.stack.empty()) pushChild(drive.root);

    // Depth is bounded by the acyclic competence graph, so this terminates.
    while (true) {
        Frame& top = state.stack.back();
        if (top.kind == FrameKind::Competence) {
            const Competence* comp = plan.findCompetence(top.element);
            CompetenceStep step = stepCompetence(*comp, senses);
            switch (step.kind) {
                case CompetenceStepKind::GoalMet:
                    state.stack.pop_back();
                    if (state.stack.empty()) {
                        complete(DriveOutcome::Success);
                    }
                    return;  // control-flow step; no action this tick
                case CompetenceStepKind::DeadEnd:
                    complete(DriveOutcome::Failure);
                    return;
                case CompetenceStepKind::DescendChild:
                    pushChild(comp->elements[step.elementIndex].child);
                    continue;
            }
        } else {
            const ActionPattern* pattern = plan.findActionPattern(top.element);
            PatternStep step = stepActionPattern(top, *pattern, actions);
            result.emittedAction = step.emittedAction;
            if (step.status == ActionStatus::Failure) {
                complete(DriveOutcome::Failure);
            } else if (step.patternComplete) {
                complete(DriveOutcome::Success);
            }
            return;
        }
    }
}

}  // namespace

TickResult tick(AgentMind& mind, const SenseEvaluator& senses, const ActionExecutor& actions) {
    TickResult result;
    SenseEvaluator tracing = [&](const SenseRef& ref) {
        bool value = senses(ref);
        result.senseTrace.emplace_back(ref.name, value);
        return value;
    };

    auto selected = selectDrive(mind.plan_.driveCollection, tracing);
    if (!selected) {
        // pause whatever ran last; nothing is active this tick
        if (mind.lastActiveDrive_) {
            if (auto it = mind.driveStates_.find(*mind.lastActiveDrive_);
                it != mind.driveStates_.end() && it->second.status == DriveStatus::Running) {
                it->second.status = DriveStatus::Paused;
            }
            mind.lastActiveDrive_.reset();
        }
        ++mind.tickCount_;
        return result;
    }

    const Drive& drive = mind.plan_.driveCollection.drives[*selected];

    DriveState scratch;
    if (auto it = mind.driveStates_.find(drive.name); it != mind.driveStates_.end()) {
        scratch = it->second;
    } else {
        scratch.driveName = drive.name;
    }
    scratch.status = DriveStatus::Running;
    advanceDrive(mind.plan_, drive, scratch, result, tracing, actions);  // may throw

    // commit only after the step succeeded
    if (mind.lastActiveDrive_ && *mind.lastActiveDrive_ != drive.name) {
        if (auto it = mind.driveStates_.find(*mind.lastActiveDrive_);
            it != mind.driveStates_.end() && it->second.status == DriveStatus::Running) {
            it->second.status = DriveStatus::Paused;
        }
    }
    mind.driveStates_[drive.name] = std::move(scratch);
    result.activeDrive = drive.name;
    mind.lastActiveDrive_ = drive.name;
    ++mind.tickCount_;
    return result;
}

std::string traceLine(std::uint64_t tick, const std::string& agentId, const TickResult& result) {
    std::ostringstream out;
    out << tick << '\t' << agentId << '\t' << result.activeDrive.value_or("-") << '\t'
        << result.emittedAction.value_or("-") << '\t';
    if (result.driveCompleted) {
        out << result.driveCompleted->driveName << ':'
            << (result.driveCompleted->outcome == DriveOutcome::Success ? "success" : "failure");
    } else {
        out << '-';
    }
    return out.str();
}

}  // namespace awkward
