#pragma once

#include <memory>
#include <string>
#include <vector>

#include "psocheck/logic.hpp"
#include "psocheck/ppso.hpp"
#include "psocheck/pso.hpp"

namespace psocheck {

/// View-based assertion over memory states, plus register predicates for proof
/// outlines. Memory forms:
///   Impossible  [x != v]@t   - no flush sequence lets t read v for x
///   Definite    [x == v]@t   - every other value is impossible
///   MaxView     max(x)@t     - t holds the maximal view on x
///   Synced      [x = v]@t    - definite and maximal
///   CondObs     <y = u>[x = v]@t - after any rd(y,u) by t, synced holds
struct Assertion;
using AssertionPtr = std::shared_ptr<const Assertion>;

struct Assertion {
    enum class Kind {
        ConstTrue,
        ConstFalse,
        Impossible,
        Definite,
        MaxView,
        Synced,
        CondObs,
        RegPred,
        And,
        Or,
        Not
    };

    Kind kind = Kind::ConstTrue;
    int x = -1;       // memory forms
    Val v = 0;        // memory forms
    int y = -1;       // CondObs observed variable
    Val u = 0;        // CondObs observed value
    int thread = -1;  // memory forms (0-based)
    BoolExprPtr pred; // RegPred
    AssertionPtr a, b;

    static AssertionPtr constant(bool val) {
        auto n = std::make_shared<Assertion>();
        n->kind = val ? Kind::ConstTrue : Kind::ConstFalse;
        return n;
    }
    static AssertionPtr impossible(int x, Val v, int t) { return mem(Kind::Impossible, x, v, t); }
    static AssertionPtr definite(int x, Val v, int t) { return mem(Kind::Definite, x, v, t); }
    static AssertionPtr max_view(int x, int t) { return mem(Kind::MaxView, x, 0, t); }
    static AssertionPtr synced(int x, Val v, int t) { return mem(Kind::Synced, x, v, t); }
    static AssertionPtr cond_obs(int y, Val u, int x, Val v, int t) {
        auto n = mem(Kind::CondObs, x, v, t);
        n->y = y;
        n->u = u;
        return n;
    }
    static AssertionPtr reg_pred(BoolExprPtr p) {
        auto n = std::make_shared<Assertion>();
        n->kind = Kind::RegPred;
        n->pred = std::move(p);
        return n;
    }
    static AssertionPtr conj(AssertionPtr l, AssertionPtr r) { return bin(Kind::And, l, r); }
    static AssertionPtr disj(AssertionPtr l, AssertionPtr r) { return bin(Kind::Or, l, r); }
    static AssertionPtr negate(AssertionPtr l) {
        auto n = std::make_shared<Assertion>();
        n->kind = Kind::Not;
        n->a = std::move(l);
        return n;
    }

  private:
    static std::shared_ptr<Assertion> mem(Kind k, int x, Val v, int t) {
        auto n = std::make_shared<Assertion>();
        n->kind = k;
        n->x = x;
        n->v = v;
        n->thread = t;
        return n;
    }
    static AssertionPtr bin(Kind k, AssertionPtr l, AssertionPtr r) {
        auto n = std::make_shared<Assertion>();
        n->kind = k;
        n->a = std::move(l);
        n->b = std::move(r);
        return n;
    }
};

inline std::string to_string(const Assertion& a, const Signature& sig) {
    auto at = [&](int t) { return "@" + std::to_string(t + 1); };
    switch (a.kind) {
    case Assertion::Kind::ConstTrue: return "true";
    case Assertion::Kind::ConstFalse: return "false";
    case Assertion::Kind::Impossible:
        return "[" + sig.globals[a.x] + " != " + std::to_string(a.v) + "]" + at(a.thread);
    case Assertion::Kind::Definite:
        return "[" + sig.globals[a.x] + " == " + std::to_string(a.v) + "]" + at(a.thread);
    case Assertion::Kind::MaxView: return "max(" + sig.globals[a.x] + ")" + at(a.thread);
    case Assertion::Kind::Synced:
        return "[" + sig.globals[a.x] + " = " + std::to_string(a.v) + "]" + at(a.thread);
    case Assertion::Kind::CondObs:
        return "<" + sig.globals[a.y] + " = " + std::to_string(a.u) + ">[" + sig.globals[a.x] +
               " = " + std::to_string(a.v) + "]" + at(a.thread);
    case Assertion::Kind::RegPred: return to_string(*a.pred, sig);
    case Assertion::Kind::And:
        return "(" + to_string(*a.a, sig) + " & " + to_string(*a.b, sig) + ")";
    case Assertion::Kind::Or:
        return "(" + to_string(*a.a, sig) + " | " + to_string(*a.b, sig) + ")";
    case Assertion::Kind::Not: return "!(" + to_string(*a.a, sig) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Evaluation. Memory forms are decided exactly and state-locally: the flush
// closure of a state is finite, so dis/wlp over T(t,a) need no ambient universe.
// ---------------------------------------------------------------------------

namespace detail {

template <class Sem>
bool impossible_value(const Sem& sem, const typename Sem::State& s, int t, int x, Val v) {
    for (const auto& m : flush_closure_of(sem, s)) {
        Val seen;
        if constexpr (Sem::has_timestamps)
            seen = pp_read_value(sem.sig(), m, t, x);
        else
            seen = pso_read_value(sem.sig(), m, t, x);
        if (seen == v) return false;
    }
    return true;
}

} // namespace detail

/// Evaluate on a memory state; `regs` may be null when the assertion contains no
/// register predicate (pure memory contexts like the axiom checker).
template <class Sem>
bool assertion_holds(const Assertion& a, const Sem& sem, const typename Sem::State& s,
                     const RegFile* regs) {
    switch (a.kind) {
    case Assertion::Kind::ConstTrue: return true;
    case Assertion::Kind::ConstFalse: return false;
    case Assertion::Kind::Impossible:
        return detail::impossible_value(sem, s, a.thread, a.x, a.v);
    case Assertion::Kind::Definite:
        for (Val u : sem.sig().dom.values())
            if (u != a.v && !detail::impossible_value(sem, s, a.thread, a.x, u)) return false;
        return true;
    case Assertion::Kind::MaxView:
        if constexpr (Sem::has_timestamps)
            return max_ts(sem.sig(), s, a.thread, a.x);
        else
            throw SemanticsError("maximal-view assertion needs the timestamped machine");
    case Assertion::Kind::Synced:
        if constexpr (Sem::has_timestamps) {
            if (!max_ts(sem.sig(), s, a.thread, a.x)) return false;
            for (Val u : sem.sig().dom.values())
                if (u != a.v && !detail::impossible_value(sem, s, a.thread, a.x, u)) return false;
            return true;
        } else {
            throw SemanticsError("synced-value assertion needs the timestamped machine");
        }
    case Assertion::Kind::CondObs: {
        if constexpr (Sem::has_timestamps) {
            Assertion synced;
            synced.kind = Assertion::Kind::Synced;
            synced.x = a.x;
            synced.v = a.v;
            synced.thread = a.thread;
            for (const auto& m :
                 transition_successors(sem, s, a.thread, Action::read(a.y, -1, a.u)))
                if (!assertion_holds(synced, sem, m, regs)) return false;
            return true;
        } else {
            throw SemanticsError("conditional-observation assertion needs the timestamped machine");
        }
    }
    case Assertion::Kind::RegPred:
        if (!regs) throw SemanticsError("register predicate evaluated without registers");
        return eval_bool(*a.pred, *regs);
    case Assertion::Kind::And:
        return assertion_holds(*a.a, sem, s, regs) && assertion_holds(*a.b, sem, s, regs);
    case Assertion::Kind::Or:
        return assertion_holds(*a.a, sem, s, regs) || assertion_holds(*a.b, sem, s, regs);
    case Assertion::Kind::Not: return !assertion_holds(*a.a, sem, s, regs);
    }
    throw SemanticsError("bad assertion node");
}

/// Extensional view: the subset of an indexed universe satisfying the assertion.
template <class Sem>
StateSet eval_assertion(const Assertion& a, const Sem& sem,
                        const IndexedUniverse<typename Sem::State>& u) {
    StateSet out(u.size());
    for (int i = 0; i < u.size(); ++i)
        if (assertion_holds(a, sem, u.states[i], nullptr)) out.insert(i);
    return out;
}

// ---------------------------------------------------------------------------
// Stability under internal steps
// ---------------------------------------------------------------------------

/// P subseteq wlp(FL*, P) for the predicate "assertion holds", decided exactly:
/// every flush-closure member of a satisfying state must satisfy it too.
template <class Sem>
bool assertion_beta_stable(const Assertion& a, const Sem& sem,
                           const std::vector<typename Sem::State>& universe) {
    for (const auto& s : universe) {
        if (!assertion_holds(a, sem, s, nullptr)) continue;
        for (const auto& m : flush_closure_of(sem, s))
            if (!assertion_holds(a, sem, m, nullptr)) return false;
    }
    return true;
}

struct StabilityLemmaReport {
    std::string lemma;
    bool pass = true;
    long antecedents = 0;  // states/predicates where the premise applied
};

namespace detail {

/// Largest beta-stable subset of a sampled predicate: keep states whose whole
/// flush closure satisfies it.
template <class Sem>
std::vector<char> beta_stable_core(const Sem& sem,
                                   const std::vector<typename Sem::State>& universe,
                                   const std::vector<char>& p) {
    std::vector<char> out(p.size(), 0);
    for (std::size_t i = 0; i < universe.size(); ++i) {
        if (!p[i]) continue;
        bool ok = true;
        for (const auto& m : flush_closure_of(sem, universe[i])) {
            auto it = std::find(universe.begin(), universe.end(), m);
            if (it == universe.end() || !p[it - universe.begin()]) {
                ok = false;
                break;
            }
        }
        out[i] = ok;
    }
    return out;
}

} // namespace detail

/// Over a flush-closed universe, checks the derived stability facts for
/// beta-stable predicates P:
///   interf-stability: P subseteq wlp(interf(t,a),P) implies P subseteq wlp(T(t,a),P)
///   fence-stability:  P subseteq wlp(T(t,fence),P)
///   read-stability:   P subseteq wlp(T(t,ar),P)
inline std::vector<StabilityLemmaReport> check_stability_lemmas(
    const PpsoSemantics& sem, const std::vector<PpsoState>& universe,
    const std::vector<std::vector<char>>& sampled_predicates) {
    StabilityLemmaReport interf_lemma{"interf-stability"}, fence_lemma{"fence-stability"},
        read_lemma{"read-stability"};
    auto actions = action_universe(sem.sig());

    auto holds_at = [&](const std::vector<char>& p, const PpsoState& s) {
        auto it = std::find(universe.begin(), universe.end(), s);
        // Successors outside the sampled universe count as violations: the
        // sampled predicate simply does not contain them.
        return it != universe.end() && p[it - universe.begin()];
    };

    for (const auto& raw : sampled_predicates) {
        auto p = detail::beta_stable_core(sem, universe, raw);
        for (int t = 0; t < sem.sig().nthreads; ++t) {
            // fence-stability
            for (std::size_t i = 0; i < universe.size(); ++i) {
                if (!p[i]) continue;
                ++fence_lemma.antecedents;
                for (const auto& m :
                     transition_successors(sem, universe[i], t, Action::fence()))
                    if (!holds_at(p, m)) fence_lemma.pass = false;
            }
            for (const auto& a : actions) {
                // read-stability
                if (a.is_read()) {
                    for (std::size_t i = 0; i < universe.size(); ++i) {
                        if (!p[i]) continue;
                        ++read_lemma.antecedents;
                        for (const auto& m : transition_successors(sem, universe[i], t, a))
                            if (!holds_at(p, m)) read_lemma.pass = false;
                    }
                }
                // interf-stability premise, then conclusion
                bool premise = true;
                for (std::size_t i = 0; i < universe.size() && premise; ++i) {
                    if (!p[i]) continue;
                    for (const auto& m : interf_successors(sem, universe[i], t, a))
                        if (!holds_at(p, m)) {
                            premise = false;
                            break;
                        }
                }
                if (!premise) continue;
                ++interf_lemma.antecedents;
                for (std::size_t i = 0; i < universe.size(); ++i) {
                    if (!p[i]) continue;
                    for (const auto& m : transition_successors(sem, universe[i], t, a))
                        if (!holds_at(p, m)) interf_lemma.pass = false;
                }
            }
        }
    }
    return {interf_lemma, fence_lemma, read_lemma};
}

} // namespace psocheck
