#include "sorl/options.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace sorl::options {

int TabularPolicy::greedy_action(envs::LowState s) const {
    const auto it = table_.find(s);
    if (it == table_.end()) return 0;
    int best = 0;
    for (int a = 1; a < envs::kNumMoves; ++a) {
        if (it->second[a] > it->second[best]) best = a;
    }
    return best;
}

int TabularPolicy::select(envs::LowState s, std::mt19937& rng, std::uint64_t step,
                          bool greedy) const {
    if (!greedy) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < eps_.at(step)) {
            std::uniform_int_distribution<int> pick(0, envs::kNumMoves - 1);
            return pick(rng);
        }
    }
    return greedy_action(s);
}

double TabularPolicy::q(envs::LowState s, int action) const {
    const auto it = table_.find(s);
    return it == table_.end() ? 0.0 : it->second[action];
}

double TabularPolicy::max_q(envs::LowState s) const {
    const auto it = table_.find(s);
    if (it == table_.end()) return 0.0;
    return *std::max_element(it->second.begin(), it->second.end());
}

void TabularPolicy::update(envs::LowState s, int action, double reward, envs::LowState next) {
    auto& row = table_[s];
    row[action] += alpha_ * (reward + gamma_ * max_q(next) - row[action]);
}

void q_update(TabularPolicy& policy, envs::LowState s, int action, double reward,
              envs::LowState next) {
    policy.update(s, action, reward, next);
}

void SymbolicOption::remember(const Transition& t) {
    if (replay.size() < kReplayCapacity) {
        replay.push_back(t);
    } else {
        replay[replay_next] = t;
        replay_next = (replay_next + 1) % kReplayCapacity;
    }
}

bool initiation(PropMask pre_pos, PropMask pre_neg, const SymbolicState& mapped) {
    return mask_subset(pre_pos, mapped.bits) && (mapped.bits & pre_neg) == 0;
}

bool initiation(const SymbolicOption& o, const SymbolicState& mapped) {
    return initiation(o.pre_pos, o.pre_neg, mapped);
}

bool termination(const SymbolicOption& o, const SymbolicState& mapped) {
    return mask_subset(o.eff_pos, mapped.bits) && (mapped.bits & o.eff_neg) == 0;
}

double intrinsic_reward(const SymbolicOption& o, const SymbolicState& mapped_next,
                        double env_reward, double phi) {
    return termination(o, mapped_next) ? phi : env_reward;
}

OptionOutcome execute_option(const envs::Env& env, envs::EnvState& state, SymbolicOption& opt,
                             std::mt19937& rng, const ExecuteParams& params) {
    OptionOutcome out;
    const SymbolicState s1 = env.map_symbolic(state);
    const PropMask gate_pos = params.gate ? params.gate->first : opt.pre_pos;
    const PropMask gate_neg = params.gate ? params.gate->second : opt.pre_neg;
    if (!initiation(gate_pos, gate_neg, s1)) return out;

    double external = 0.0;
    SymbolicState current = s1;
    bool terminated = termination(opt, current);
    while (!terminated && out.steps_used < params.max_steps && !state.terminal) {
        const envs::LowState ls = env.encode(state);
        const int action = opt.policy.select(ls, rng, opt.trained_steps, params.greedy);
        const envs::StepResult sr = env.step(state, static_cast<envs::Move>(action));
        state = sr.next;
        ++out.steps_used;
        external += sr.reward;
        current = env.map_symbolic(state);
        terminated = termination(opt, current);
        if (params.learn) {
            const double ri = intrinsic_reward(opt, current, sr.reward, params.phi);
            const envs::LowState ls2 = env.encode(state);
            opt.remember({ls, action, ri, ls2});
            opt.policy.update(ls, action, ri, ls2);
            ++opt.trained_steps;
        }
    }

    out.pair = StatePair{s1, current};
    out.external_reward = external;
    out.success = terminated;
    return out;
}

OptionOutcome execute_global_option(const envs::Env& env, envs::EnvState& state,
                                    std::mt19937& rng, int max_steps) {
    OptionOutcome out;
    const SymbolicState s1 = env.map_symbolic(state);
    SymbolicState current = s1;
    std::uniform_int_distribution<int> pick(0, envs::kNumMoves - 1);
    double external = 0.0;
    while (current == s1 && out.steps_used < max_steps && !state.terminal) {
        const envs::StepResult sr = env.step(state, static_cast<envs::Move>(pick(rng)));
        state = sr.next;
        ++out.steps_used;
        external += sr.reward;
        current = env.map_symbolic(state);
    }
    out.pair = StatePair{s1, current};
    out.external_reward = external;
    out.success = current != s1;
    return out;
}

int OptionSet::find_by_effects(PropMask eff_pos, PropMask eff_neg) const {
    for (const auto& o : opts_) {
        if (o.eff_pos == eff_pos && o.eff_neg == eff_neg) return o.id;
    }
    return -1;
}

int OptionSet::add(PropMask pre_pos, PropMask pre_neg, PropMask eff_pos, PropMask eff_neg) {
    SymbolicOption o;
    o.id = static_cast<int>(opts_.size());
    o.pre_pos = pre_pos;
    o.pre_neg = pre_neg;
    o.eff_pos = eff_pos;
    o.eff_neg = eff_neg;
    o.policy = TabularPolicy(alpha_, gamma_, eps_);
    opts_.push_back(std::move(o));
    return opts_.back().id;
}

void OptionSet::union_preconditions(int id, PropMask pre_pos, PropMask pre_neg) {
    auto& o = opts_.at(static_cast<std::size_t>(id));
    o.pre_pos |= pre_pos;
    o.pre_neg |= pre_neg;
}

namespace {

constexpr const char* kSnapshotHeader = "sorl-options v1";

void emit_prop_list(std::ostringstream& out, const Vocabulary& vocab, PropMask mask) {
    for (const auto& p : vocab.props_of(mask)) out << " " << p;
}

}  // namespace

std::string save_options(const OptionSet& set, const Vocabulary& vocab) {
    std::ostringstream out;
    out << kSnapshotHeader << "\n";
    out << "vocab";
    for (const auto& n : vocab.names()) out << " " << n;
    out << "\n";
    for (const auto& o : set.all()) {
        out << "option " << o.id << "\n";
        out << "pre+";
        emit_prop_list(out, vocab, o.pre_pos);
        out << "\npre-";
        emit_prop_list(out, vocab, o.pre_neg);
        out << "\neff+";
        emit_prop_list(out, vocab, o.eff_pos);
        out << "\neff-";
        emit_prop_list(out, vocab, o.eff_neg);
        out << "\ntrained_steps " << o.trained_steps << "\n";
        std::vector<envs::LowState> keys;
        keys.reserve(o.policy.table().size());
        for (const auto& [k, v] : o.policy.table()) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        for (const auto k : keys) {
            const auto& row = o.policy.table().at(k);
            for (int a = 0; a < envs::kNumMoves; ++a) {
                if (row[a] == 0.0) continue;
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", row[a]);
                out << "q " << k << " " << a << " " << buf << "\n";
            }
        }
    }
    return out.str();
}

OptionSet load_options(const std::string& text, const Vocabulary& vocab, double alpha,
                       double gamma, EpsilonSchedule eps) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kSnapshotHeader) {
        throw std::runtime_error("option snapshot: bad or missing header");
    }
    OptionSet set(alpha, gamma, eps);
    auto parse_props = [&](std::istringstream& ls) {
        PropMask m = 0;
        std::string p;
        while (ls >> p) {
            const auto i = vocab.find(p);
            if (!i) {
                throw std::runtime_error("option snapshot: proposition '" + p +
                                         "' not in environment vocabulary");
            }
            m |= PropMask{1} << *i;
        }
        return m;
    };
    SymbolicOption* cur = nullptr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "vocab") {
            std::string p;
            while (ls >> p) {
                if (!vocab.find(p)) {
                    throw std::runtime_error("option snapshot: proposition '" + p +
                                             "' not in environment vocabulary");
                }
            }
        } else if (key == "option") {
            const int id = set.add(0, 0, 0, 0);
            cur = &set.at(id);
        } else if (key == "pre+") {
            if (!cur) throw std::runtime_error("option snapshot: fields before option line");
            cur->pre_pos = parse_props(ls);
        } else if (key == "pre-") {
            cur->pre_neg = parse_props(ls);
        } else if (key == "eff+") {
            cur->eff_pos = parse_props(ls);
        } else if (key == "eff-") {
            cur->eff_neg = parse_props(ls);
        } else if (key == "trained_steps") {
            ls >> cur->trained_steps;
        } else if (key == "q") {
            envs::LowState s;
            int a;
            double v;
            ls >> s >> a >> v;
            cur->policy.set_q(s, a, v);
        } else {
            throw std::runtime_error("option snapshot: unknown record '" + key + "'");
        }
    }
    return set;
}

}  // namespace sorl::options
