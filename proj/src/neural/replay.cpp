#include "marlin/neural/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace marlin {

DualReplayBuffer::DualReplayBuffer(std::size_t current_capacity,
                                   std::size_t cross_capacity,
                                   double current_fraction)
    : current_capacity_(current_capacity),
      cross_capacity_(cross_capacity),
      current_fraction_(current_fraction) {
    if (current_capacity_ == 0 || cross_capacity_ == 0)
        throw std::invalid_argument("replay capacities must be positive");
    if (current_fraction_ < 0.0 || current_fraction_ > 1.0)
        throw std::invalid_argument("sampling fraction must be in [0, 1]");
}

void DualReplayBuffer::push_current(Transition t) {
    current_.push_back(std::move(t));
    if (current_.size() > current_capacity_) current_.pop_front();
}

void DualReplayBuffer::push_cross(Transition t) {
    cross_.push_back(std::move(t));
    if (cross_.size() > cross_capacity_) cross_.pop_front();
}

std::vector<const Transition*> DualReplayBuffer::sample(std::size_t n,
                                                        Rng& rng) const {
    std::vector<const Transition*> out;
    if (n == 0 || (current_.empty() && cross_.empty())) return out;
    out.reserve(n);
    std::size_t from_current =
        static_cast<std::size_t>(std::llround(n * current_fraction_));
    if (cross_.empty()) from_current = n;
    if (current_.empty()) from_current = 0;
    for (std::size_t i = 0; i < from_current; ++i)
        out.push_back(&current_[rng.below(current_.size())]);
    for (std::size_t i = from_current; i < n; ++i)
        out.push_back(&cross_[rng.below(cross_.size())]);
    return out;
}

void her_relabel(DualReplayBuffer& buffer,
                 const std::array<double, kGoalDim>& achieved_goal, std::size_t k,
                 Rng& rng,
                 const std::function<double(const Transition&,
                                            const std::array<double, kGoalDim>&)>&
                     goal_distance) {
    const std::size_t n = buffer.current_size();
    if (n == 0) return;
    for (std::size_t i = 0; i < k; ++i) {
        Transition t = buffer.current_at(rng.below(n));
        t.goal = achieved_goal;
        t.reward = t.base_reward - goal_distance(t, achieved_goal);
        buffer.push_cross(std::move(t));
    }
}

}  // namespace marlin
