#include "sorl/baseline.hpp"

#include <algorithm>

namespace sorl::baseline {

double MetaPolicy::q(PropMask s, std::size_t goal) const {
    const auto it = table_.find(s);
    return it == table_.end() ? 0.0 : it->second[goal];
}

std::size_t MetaPolicy::greedy(const SymbolicState& s) const {
    const auto it = table_.find(s.bits);
    if (it == table_.end()) return 0;
    std::size_t best = 0;
    for (std::size_t g = 1; g < n_goals_; ++g) {
        if (it->second[g] > it->second[best]) best = g;
    }
    return best;
}

std::size_t MetaPolicy::select(const SymbolicState& s, std::mt19937& rng) {
    const std::uint64_t step = selections_++;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < eps_.at(step)) {
        std::uniform_int_distribution<std::size_t> pick(0, n_goals_ - 1);
        return pick(rng);
    }
    return greedy(s);
}

std::size_t MetaPolicy::greedy_masked(const SymbolicState& s, const std::vector<char>& valid) const {
    std::size_t best = n_goals_;
    const auto it = table_.find(s.bits);
    for (std::size_t g = 0; g < n_goals_; ++g) {
        if (!valid[g]) continue;
        if (best == n_goals_) {
            best = g;
            continue;
        }
        if (it != table_.end() && it->second[g] > it->second[best]) best = g;
    }
    if (best == n_goals_) throw std::logic_error("greedy_masked: no valid goal");
    return best;
}

std::size_t MetaPolicy::select_masked(const SymbolicState& s, const std::vector<char>& valid,
                                      std::mt19937& rng) {
    const std::uint64_t step = selections_++;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < eps_.at(step)) {
        std::vector<std::size_t> ids;
        for (std::size_t g = 0; g < n_goals_; ++g) {
            if (valid[g]) ids.push_back(g);
        }
        std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
        return ids[pick(rng)];
    }
    return greedy_masked(s, valid);
}

void MetaPolicy::update(const SymbolicState& s, std::size_t goal, double cumulative_reward,
                        const SymbolicState& next) {
    auto& row = table_[s.bits];
    if (row.empty()) row.assign(n_goals_, 0.0);
    double next_max = 0.0;
    const auto it = table_.find(next.bits);
    if (it != table_.end()) {
        next_max = *std::max_element(it->second.begin(), it->second.end());
    }
    row[goal] += alpha_ * (cumulative_reward + gamma_ * next_max - row[goal]);
}

std::size_t meta_select(MetaPolicy& meta, const SymbolicState& s, std::mt19937& rng) {
    return meta.select(s, rng);
}

void meta_update(MetaPolicy& meta, const SymbolicState& s, std::size_t goal,
                 double cumulative_reward, const SymbolicState& next) {
    meta.update(s, goal, cumulative_reward, next);
}

}  // namespace sorl::baseline
