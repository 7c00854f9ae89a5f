#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "psocheck/explore.hpp"

namespace psocheck {

// ---------------------------------------------------------------------------
// Trace equivalence
// ---------------------------------------------------------------------------

struct TraceEquivResult {
    enum class Verdict { Equivalent, Different, Unknown } verdict;
    std::optional<Trace> distinguishing;  // trace present in exactly one side
    std::string side;                     // which machine admits it
    std::size_t trace_count = 0;
};

inline TraceEquivResult trace_equiv(const Program& p, int depth = 10000,
                                    bool mutant_pso = false) {
    PsoSemantics pso(p.sig, mutant_pso);
    PpsoSemantics ppso = make_ppso(p);
    auto tp = traces(pso, p, depth);
    auto tq = traces(ppso, p, depth);
    if (!tp.complete || !tq.complete) return {TraceEquivResult::Verdict::Unknown, {}, "", 0};
    for (const auto& t : tp.traces)
        if (!tq.traces.count(t))
            return {TraceEquivResult::Verdict::Different, t, "pso-only", tp.traces.size()};
    for (const auto& t : tq.traces)
        if (!tp.traces.count(t))
            return {TraceEquivResult::Verdict::Different, t, "ppso-only", tq.traces.size()};
    return {TraceEquivResult::Verdict::Equivalent, {}, "", tp.traces.size()};
}

// ---------------------------------------------------------------------------
// Simulations between the explored fragments of the two machines.
//
// F relates a timestamped state to its stamp-erasure; B is the converse. Both
// checks quantify over the transitions actually traversed during exploration
// and certify the simulation conditions there.
// ---------------------------------------------------------------------------

struct SimResult {
    bool holds = true;
    std::string detail;  // description of the first failing obligation
    long checked = 0;
};

/// Forward: every explored timestamped transition erases to a legal plain
/// transition, and initial states are related.
inline SimResult check_forward_sim(const Program& p, int depth = 10000) {
    SimResult res;
    PpsoSemantics ppso = make_ppso(p);
    PsoSemantics pso(p.sig);
    auto r = reach(ppso, p, {depth});
    if (!r.complete) return {false, "exploration incomplete", 0};

    if (!(erase_stamps(ppso.initial()) == pso.initial()))
        return {false, "initial-state condition fails", 0};

    for (const auto& tr : r.mem_transitions) {
        PsoState from = erase_stamps(tr.from);
        PsoState to = erase_stamps(tr.to);
        auto succ = transition_successors(pso, from, tr.thread, tr.action);
        ++res.checked;
        if (std::find(succ.begin(), succ.end(), to) == succ.end()) {
            res.holds = false;
            res.detail = "no matching plain transition for " + to_string(tr.action, p.sig) +
                         " from " + to_string(from, p.sig);
            return res;
        }
    }
    return res;
}

namespace detail {

/// Find one flush path from `from` to a state whose a-step yields `to`;
/// returns the sequence of (thread, global, value flushed) along it.
inline std::optional<std::vector<std::tuple<int, int, Val>>> pso_flush_path(
    const PsoSemantics& sem, const PsoState& from, int t, const Action& a, const PsoState& to) {
    struct Node {
        PsoState state;
        std::vector<std::tuple<int, int, Val>> path;
    };
    std::vector<Node> frontier{{from, {}}};
    std::unordered_set<PsoState> seen{from};
    const auto& sig = sem.sig();
    while (!frontier.empty()) {
        std::vector<Node> next;
        for (auto& node : frontier) {
            for (const auto& stepped : sem.action_step(node.state, t, a))
                if (stepped == to) return node.path;
            for (int ft = 0; ft < sig.nthreads; ++ft)
                for (int fx = 0; fx < sig.nglobals(); ++fx) {
                    const auto& b = node.state.buf[sig.buf_index(ft, fx)];
                    if (b.empty()) continue;
                    Val v = b.front();
                    auto flushed = pso_flush(sig, node.state, ft, fx);
                    if (flushed && seen.insert(*flushed).second) {
                        auto path = node.path;
                        path.emplace_back(ft, fx, v);
                        next.push_back({std::move(*flushed), std::move(path)});
                    }
                }
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

/// The a-step preimage of `to` under the timestamped machine with the same
/// buffer values as `mid_plain` (the plain state just before the a-step).
inline std::optional<PpsoState> pp_action_preimage(const Signature& sig, const PpsoState& to,
                                                   int t, const Action& a) {
    if (!a.is_write()) return to;  // reads and fences leave the state unchanged
    PpsoState pre = to;
    auto& b = pre.buf[sig.buf_index(t, a.var)];
    if (b.empty() || b.back().value != a.value) return std::nullopt;
    int q = b.back().rank;
    b.pop_back();
    for (auto& buf : pre.buf)
        for (auto& e : buf)
            if (e.rank > q) --e.rank;
    return pre;
}

} // namespace detail

/// Backward: for every explored plain transition into sigma1' and every explored
/// timestamped state related to sigma1', a related predecessor exists whose
/// timestamped transition matches. Candidates come from explored states first;
/// otherwise the predecessor is constructed by un-flushing with fresh minimal
/// stamps and verified by replay. Also certifies totality and the initial-state
/// condition on the explored fragment.
inline SimResult check_backward_sim(const Program& p, int depth = 10000) {
    SimResult res;
    PsoSemantics pso(p.sig);
    PpsoSemantics ppso = make_ppso(p);
    auto rp = reach(pso, p, {depth});
    auto rq = reach(ppso, p, {depth});
    if (!rp.complete || !rq.complete) return {false, "exploration incomplete", 0};

    // B-partners of a plain state among explored timestamped states.
    std::unordered_map<PsoState, std::vector<const PpsoState*>> partners;
    for (const auto& s : rq.mem_states) partners[erase_stamps(s)].push_back(&s);

    // Totality over the explored plain fragment: stamp buffers in buffer order.
    for (const auto& s : rp.mem_states) {
        PpsoState w;
        w.mem = s.mem;
        w.buf.resize(s.buf.size());
        int rank = 0;
        for (std::size_t i = 0; i < s.buf.size(); ++i)
            for (Val v : s.buf[i]) w.buf[i].push_back({v, ++rank});
        if (!(erase_stamps(w) == s)) return {false, "totality witness construction failed", res.checked};
    }

    // Initial-state condition: explored partners of the plain initial state
    // must be initial (empty buffers, zeroed memory).
    for (const PpsoState* s : partners[pso.initial()])
        if (!(*s == ppso.initial()))
            return {false, "initial-state condition fails", res.checked};

    std::unordered_map<PpsoState, std::vector<const MemTransition<PpsoSemantics>*>> into;
    for (const auto& tr : rq.mem_transitions) into[tr.to].push_back(&tr);

    for (const auto& tr : rp.mem_transitions) {
        auto it = partners.find(tr.to);
        if (it == partners.end()) continue;
        for (const PpsoState* s2p : it->second) {
            ++res.checked;
            // Explored candidates first.
            bool found = false;
            if (auto jt = into.find(*s2p); jt != into.end()) {
                for (const auto* cand : jt->second)
                    if (cand->thread == tr.thread && cand->action == tr.action &&
                        erase_stamps(cand->from) == tr.from) {
                        found = true;
                        break;
                    }
            }
            if (found) continue;

            // Construct the predecessor: undo the action step, then un-flush the
            // plain flush path with globally minimal fresh stamps.
            auto path = detail::pso_flush_path(pso, tr.from, tr.thread, tr.action, tr.to);
            if (!path) return {false, "no flush path explains a plain transition", res.checked};
            auto mid = detail::pp_action_preimage(p.sig, *s2p, tr.thread, tr.action);
            if (!mid) {
                res.holds = false;
                res.detail = "action preimage does not exist for " + to_string(tr.action, p.sig);
                return res;
            }
            PpsoState cur = *mid;
            {
                // memories along the plain flush path from tr.from
                std::vector<PsoState> plain_states{tr.from};
                for (auto& [ft, fx, v] : *path)
                    plain_states.push_back(*pso_flush(p.sig, plain_states.back(), ft, fx));
                // walk the path backwards, prepending each flushed entry with a
                // globally minimal fresh stamp
                for (int i = (int)path->size() - 1; i >= 0; --i) {
                    auto [ft, fx, v] = (*path)[i];
                    for (auto& buf : cur.buf)
                        for (auto& e : buf) ++e.rank;
                    auto& b = cur.buf[p.sig.buf_index(ft, fx)];
                    b.insert(b.begin(), {v, 1});
                    cur.mem = plain_states[i].mem;
                }
            }
            if (!(erase_stamps(cur) == tr.from)) {
                res.holds = false;
                res.detail = "constructed predecessor is not related to the plain source";
                return res;
            }
            auto succ = transition_successors(ppso, cur, tr.thread, tr.action);
            if (std::find(succ.begin(), succ.end(), *s2p) == succ.end()) {
                res.holds = false;
                res.detail = "constructed predecessor cannot reach the target via " +
                             to_string(tr.action, p.sig);
                return res;
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Timestamp freshness invariant over reachable timestamped states
// ---------------------------------------------------------------------------

struct FreshnessResult {
    bool holds = true;
    std::optional<PpsoState> violation;
    long states_checked = 0;
};

/// The last stamp of every nonempty buffer exceeds all earlier stamps in its own
/// buffer and appears in no other buffer.
inline bool freshness_invariant_holds(const Signature& sig, const PpsoState& s) {
    for (int t = 0; t < sig.nthreads; ++t)
        for (int x = 0; x < sig.nglobals(); ++x) {
            const auto& b = s.buf[sig.buf_index(t, x)];
            if (b.empty()) continue;
            int last = b.back().rank;
            for (std::size_t i = 0; i + 1 < b.size(); ++i)
                if (b[i].rank >= last) return false;
            for (int t2 = 0; t2 < sig.nthreads; ++t2)
                for (int x2 = 0; x2 < sig.nglobals(); ++x2) {
                    if (t2 == t && x2 == x) continue;
                    for (const auto& e : s.buf[sig.buf_index(t2, x2)])
                        if (e.rank == last) return false;
                }
        }
    return true;
}

inline FreshnessResult check_freshness_invariant(const Program& p, int depth = 10000) {
    FreshnessResult res;
    PpsoSemantics ppso = make_ppso(p);
    auto r = reach(ppso, p, {depth});
    for (const auto& s : r.mem_states) {
        ++res.states_checked;
        if (!freshness_invariant_holds(p.sig, s)) {
            res.holds = false;
            res.violation = s;
            return res;
        }
    }
    return res;
}

} // namespace psocheck
