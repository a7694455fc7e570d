#pragma once

#include <array>
#include <deque>
#include <functional>
#include <vector>

#include "marlin/util/rng.hpp"

namespace marlin {

constexpr int kGoalDim = 4;

// One stored interaction. Plans are sampled repeatedly against a fixed epoch
// snapshot, so the successor state equals the state and is not stored.
struct Transition {
    std::vector<double> state;    // environment features
    std::vector<double> context;  // modulation context (forecast + phase)
    std::array<double, kGoalDim> goal{};      // normalized target metrics
    std::vector<double> action;               // simplex-projected plan, flat
    std::array<double, kGoalDim> achieved{};  // normalized achieved metrics
    double reward = 0.0;
    double base_reward = 0.0;  // reward minus the goal-distance term
    // One-step-episode flag: a terminal transition regresses the critics to
    // the immediate reward with no bootstrap, which is the right target for
    // what-if rounds played against a frozen epoch snapshot. Continuing
    // (self-loop) transitions keep the full discounted recursion.
    bool terminal = false;
};

// Two FIFO stores: a large buffer cleared every epoch and a smaller
// cross-epoch buffer fed by hindsight relabeling. Batches draw a fixed
// fraction from the current buffer (default 70%), the rest from cross.
class DualReplayBuffer {
  public:
    DualReplayBuffer(std::size_t current_capacity = 20000,
                     std::size_t cross_capacity = 5000,
                     double current_fraction = 0.7);

    void push_current(Transition t);
    void push_cross(Transition t);
    void clear_current() { current_.clear(); }

    std::size_t current_size() const { return current_.size(); }
    std::size_t cross_size() const { return cross_.size(); }
    double current_fraction() const { return current_fraction_; }

    const Transition& current_at(std::size_t i) const { return current_[i]; }
    const Transition& cross_at(std::size_t i) const { return cross_[i]; }

    // Draws n transitions with replacement, split current/cross within one
    // item of the configured ratio; falls back to whichever buffer is
    // non-empty. Empty result only when both buffers are empty.
    std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

  private:
    std::size_t current_capacity_;
    std::size_t cross_capacity_;
    double current_fraction_;
    std::deque<Transition> current_;
    std::deque<Transition> cross_;
};

// Hindsight relabeling: draws k transitions from the current-epoch buffer,
// substitutes the achieved epoch outcome as their goal, recomputes the reward
// through the supplied goal-distance term, and pushes them to the cross
// buffer. goal_distance(t, g) must return the penalty subtracted from the
// base reward.
void her_relabel(DualReplayBuffer& buffer,
                 const std::array<double, kGoalDim>& achieved_goal, std::size_t k,
                 Rng& rng,
                 const std::function<double(const Transition&,
                                            const std::array<double, kGoalDim>&)>&
                     goal_distance);

}  // namespace marlin
