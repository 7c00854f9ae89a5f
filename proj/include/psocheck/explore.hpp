#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "psocheck/local_sem.hpp"
#include "psocheck/ppso.hpp"
#include "psocheck/pso.hpp"

namespace psocheck {

/// One node of the combined program+memory transition system.
template <class Sem>
struct Config {
    std::vector<CommandPtr> residue;
    RegFile regs;
    typename Sem::State mem;

    bool terminal() const {
        for (const auto& c : residue)
            if (c->kind != Command::Kind::Skip) return false;
        return true;
    }

    bool operator==(const Config& o) const {
        if (regs != o.regs || !(mem == o.mem)) return false;
        for (std::size_t i = 0; i < residue.size(); ++i)
            if (!command_equal(*residue[i], *o.residue[i])) return false;
        return true;
    }
};

template <class Sem>
struct ConfigHash {
    std::size_t operator()(const Config<Sem>& c) const {
        std::size_t h = hash_range(c.regs.begin(), c.regs.end());
        hash_combine(h, hash_value(c.mem));
        for (const auto& r : c.residue) hash_combine(h, command_hash(*r));
        return h;
    }
};

template <class Sem>
struct CombinedStep {
    int thread;
    ExtAction label;
    Config<Sem> target;
};

/// All successors of a config under the lifted semantics: silent/local steps keep
/// the memory state, memory steps compose the thread step with T(thread, action).
template <class Sem>
std::vector<CombinedStep<Sem>> combined_steps(const Sem& sem, const Config<Sem>& c) {
    std::vector<CombinedStep<Sem>> out;
    for (int t = 0; t < (int)c.residue.size(); ++t) {
        for (auto& ps : thread_steps(c.residue, c.regs, t, sem.sig().dom)) {
            if (ps.label.is_memory()) {
                for (auto& m : transition_successors(sem, c.mem, t, ps.label.act))
                    out.push_back({t, ps.label,
                                   Config<Sem>{ps.next_residue, ps.next_regs, std::move(m)}});
            } else {
                out.push_back({t, ps.label, Config<Sem>{std::move(ps.next_residue),
                                                        std::move(ps.next_regs), c.mem}});
            }
        }
    }
    return out;
}

/// A memory-level transition actually taken during exploration.
template <class Sem>
struct MemTransition {
    typename Sem::State from;
    int thread;
    Action action;
    typename Sem::State to;

    bool operator==(const MemTransition&) const = default;
};

template <class Sem>
struct MemTransitionHash {
    std::size_t operator()(const MemTransition<Sem>& t) const {
        std::size_t h = hash_value(t.from);
        hash_combine(h, (std::size_t)t.thread);
        hash_combine(h, hash_value(t.action));
        hash_combine(h, hash_value(t.to));
        return h;
    }
};

struct ExploreOptions {
    int depth = 10000;
    long max_configs = 4'000'000;
    unsigned shuffle_seed = 0;  // 0: keep natural successor order
};

template <class Sem>
struct ReachResult {
    std::vector<Config<Sem>> configs;      // in discovery order
    std::vector<int> terminal;             // indices of terminal configs
    bool complete = false;
    int depth_reached = 0;

    // First-discovery tree for witness reconstruction.
    std::vector<int> parent;
    std::vector<std::pair<int, ExtAction>> parent_label;

    // Every memory transition traversed by a Memory-rule application.
    std::vector<MemTransition<Sem>> mem_transitions;
    std::vector<typename Sem::State> mem_states;  // every memory state seen
};

template <class Sem>
ReachResult<Sem> reach(const Sem& sem, const Program& p, ExploreOptions opt = {}) {
    using Cfg = Config<Sem>;
    ReachResult<Sem> res;

    std::optional<std::mt19937> rng;
    if (opt.shuffle_seed != 0) rng.emplace(opt.shuffle_seed);

    long cap_hits_before = 0;
    if constexpr (Sem::has_timestamps) cap_hits_before = sem.cap_hits();

    Cfg init{p.threads, RegFile(p.sig.nregisters(), 0), sem.initial()};
    std::unordered_map<Cfg, int, ConfigHash<Sem>> index;
    std::unordered_set<MemTransition<Sem>, MemTransitionHash<Sem>> seen_trans;
    std::unordered_set<typename Sem::State> seen_states;

    auto add_state = [&](const typename Sem::State& s) {
        if (seen_states.insert(s).second) res.mem_states.push_back(s);
    };

    index.emplace(init, 0);
    res.configs.push_back(init);
    res.parent.push_back(-1);
    res.parent_label.push_back({-1, ExtAction::tau()});
    add_state(init.mem);

    std::vector<int> frontier{0};
    int depth = 0;
    bool truncated = false;
    while (!frontier.empty() && depth < opt.depth) {
        std::vector<int> next_frontier;
        for (int ci : frontier) {
            auto steps = combined_steps(sem, res.configs[ci]);
            if (rng) std::shuffle(steps.begin(), steps.end(), *rng);
            for (auto& st : steps) {
                if (st.label.is_memory()) {
                    MemTransition<Sem> mt{res.configs[ci].mem, st.thread, st.label.act,
                                          st.target.mem};
                    if (seen_trans.insert(mt).second) res.mem_transitions.push_back(mt);
                    add_state(st.target.mem);
                }
                auto [it, fresh] = index.emplace(st.target, (int)res.configs.size());
                if (fresh) {
                    if ((long)res.configs.size() >= opt.max_configs) {
                        truncated = true;
                        index.erase(it);
                        continue;
                    }
                    res.configs.push_back(st.target);
                    res.parent.push_back(ci);
                    res.parent_label.push_back({st.thread, st.label});
                    next_frontier.push_back(it->second);
                }
            }
        }
        frontier = std::move(next_frontier);
        ++depth;
    }
    res.depth_reached = depth;
    res.complete = frontier.empty() && !truncated;
    if constexpr (Sem::has_timestamps) {
        if (sem.cap_hits() != cap_hits_before) res.complete = false;
    }
    for (int i = 0; i < (int)res.configs.size(); ++i)
        if (res.configs[i].terminal()) res.terminal.push_back(i);
    return res;
}

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

struct Outcome {
    RegFile regs;
    bool buffers_empty = false;  // representative terminal config had nothing pending
    std::vector<std::pair<int, ExtAction>> witness;  // (thread, label) from the initial config

    bool operator<(const Outcome& o) const { return regs < o.regs; }
    bool operator==(const Outcome& o) const { return regs == o.regs; }
};

template <class Sem>
std::vector<Outcome> final_outcomes(const Sem& sem, const ReachResult<Sem>& r) {
    std::map<RegFile, Outcome> by_regs;
    for (int ti : r.terminal) {
        const auto& cfg = r.configs[ti];
        auto [it, fresh] = by_regs.try_emplace(cfg.regs);
        bool empty_bufs = true;
        for (const auto& b : cfg.mem.buf)
            if (!b.empty()) empty_bufs = false;
        if (fresh) {
            it->second.regs = cfg.regs;
            it->second.buffers_empty = empty_bufs;
            for (int c = ti; r.parent[c] >= 0; c = r.parent[c])
                it->second.witness.push_back(r.parent_label[c]);
            std::reverse(it->second.witness.begin(), it->second.witness.end());
        } else {
            it->second.buffers_empty = it->second.buffers_empty || empty_bufs;
        }
    }
    std::vector<Outcome> out;
    for (auto& [_, o] : by_regs) out.push_back(std::move(o));
    return out;
}

/// Re-run a witness label sequence from the initial config; nullopt when some
/// step is not licensed by the semantics.
template <class Sem>
std::optional<Config<Sem>> replay_witness(const Sem& sem, const Program& p,
                                          const std::vector<std::pair<int, ExtAction>>& witness) {
    Config<Sem> cur{p.threads, RegFile(p.sig.nregisters(), 0), sem.initial()};
    for (const auto& [t, label] : witness) {
        bool moved = false;
        for (auto& st : combined_steps(sem, cur)) {
            if (st.thread == t && st.label == label) {
                cur = st.target;
                moved = true;
                break;
            }
        }
        if (!moved) return std::nullopt;
    }
    return cur;
}

struct PostconditionResult {
    enum class Verdict { Holds, Fails, Unknown } verdict;
    std::optional<Outcome> counterexample;
};

template <class Sem>
PostconditionResult check_postcondition(const Sem& sem, const Program& p,
                                        const ReachResult<Sem>& r) {
    if (!r.complete) return {PostconditionResult::Verdict::Unknown, std::nullopt};
    for (const auto& o : final_outcomes(sem, r))
        if (!eval_bool(*p.post, o.regs)) return {PostconditionResult::Verdict::Fails, o};
    return {PostconditionResult::Verdict::Holds, std::nullopt};
}

// ---------------------------------------------------------------------------
// Traces: Act-labelled sequences of complete (terminal) runs. Tau and register
// loads are internal and do not appear.
// ---------------------------------------------------------------------------

using Trace = std::vector<Action>;
using TraceSet = std::set<Trace>;

struct TraceResult {
    TraceSet traces;
    bool complete = true;
};

namespace detail {

template <class Sem>
struct TraceCollector {
    const Sem& sem;
    int depth_limit;
    std::unordered_map<Config<Sem>, std::shared_ptr<TraceSet>, ConfigHash<Sem>> memo;
    std::unordered_set<Config<Sem>, ConfigHash<Sem>> on_stack;
    bool cyclic = false;

    std::shared_ptr<TraceSet> suffixes(const Config<Sem>& c, int depth) {
        if (auto it = memo.find(c); it != memo.end()) return it->second;
        auto out = std::make_shared<TraceSet>();
        if (c.terminal()) out->insert(Trace{});
        if (depth >= depth_limit) {
            cyclic = true;  // ran out of budget: result incomplete
            return out;     // not memoized: budget-dependent
        }
        if (!on_stack.insert(c).second) {
            cyclic = true;
            return out;
        }
        for (auto& st : combined_steps(sem, c)) {
            auto tails = suffixes(st.target, depth + 1);
            for (const auto& tail : *tails) {
                if (st.label.is_memory()) {
                    Trace tr;
                    tr.reserve(tail.size() + 1);
                    tr.push_back(st.label.act);
                    tr.insert(tr.end(), tail.begin(), tail.end());
                    out->insert(std::move(tr));
                } else {
                    out->insert(tail);
                }
            }
        }
        on_stack.erase(c);
        if (!cyclic) memo.emplace(c, out);
        return out;
    }
};

} // namespace detail

template <class Sem>
TraceResult traces(const Sem& sem, const Program& p, int depth = 10000) {
    long cap_hits_before = 0;
    if constexpr (Sem::has_timestamps) cap_hits_before = sem.cap_hits();
    // Recursion depth is capped to protect the stack; loop-free programs stay
    // far below it and loops are reported incomplete anyway.
    detail::TraceCollector<Sem> col{sem, std::min(depth, 1500), {}, {}, false};
    Config<Sem> init{p.threads, RegFile(p.sig.nregisters(), 0), sem.initial()};
    auto set = col.suffixes(init, 0);
    TraceResult res;
    res.traces = *set;
    res.complete = !col.cyclic;
    if constexpr (Sem::has_timestamps) {
        if (sem.cap_hits() != cap_hits_before) res.complete = false;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Convenience entry points per model
// ---------------------------------------------------------------------------

enum class Model { Pso, Ppso };

inline int default_pending_cap(const Program& p) {
    // Loop-free programs never hold more pending writes than they contain write
    // statements; loops get a fixed fallback bound.
    int writes = 0;
    bool loops = false;
    auto walk = [&](auto&& self, const Command& c) -> void {
        switch (c.kind) {
        case Command::Kind::WriteGlobal: ++writes; break;
        case Command::Kind::While:
            loops = true;
            self(self, *c.left);
            break;
        case Command::Kind::Seq:
        case Command::Kind::If:
            self(self, *c.left);
            self(self, *c.right);
            break;
        default: break;
        }
    };
    for (const auto& t : p.threads) walk(walk, *t);
    return loops ? std::max(writes, 8) : writes;
}

inline PsoSemantics make_pso(const Program& p) { return PsoSemantics(p.sig); }
inline PpsoSemantics make_ppso(const Program& p, int cap = -2) {
    return PpsoSemantics(p.sig, cap == -2 ? default_pending_cap(p) : cap);
}

} // namespace psocheck
