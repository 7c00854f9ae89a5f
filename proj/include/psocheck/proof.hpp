#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "psocheck/assertion.hpp"
#include "psocheck/explore.hpp"
#include "psocheck/parser.hpp"

namespace psocheck {

/// The state a proof assertion talks about: a register valuation plus a
/// timestamped memory state. Control location is deliberately absent;
/// interference checks quantify over all of these.
struct ProofState {
    RegFile regs;
    PpsoState mem;
    bool operator==(const ProofState&) const = default;
};

struct ProofStateHash {
    std::size_t operator()(const ProofState& s) const {
        std::size_t h = hash_range(s.regs.begin(), s.regs.end());
        hash_combine(h, hash_value(s.mem));
        return h;
    }
};

inline bool proof_assertion_holds(const Assertion& a, const PpsoSemantics& sem,
                                  const ProofState& s) {
    return assertion_holds(a, sem, s.mem, &s.regs);
}

// ---------------------------------------------------------------------------
// Universe construction
// ---------------------------------------------------------------------------

struct ProofUniverseOptions {
    enum class Kind { Reachable, PendingCap } kind = Kind::Reachable;
    int pending_cap = 2;  // PendingCap mode
    int depth = 10000;
};

struct ProofUniverse {
    PpsoSemantics sem;
    std::vector<ProofState> states;
    bool complete = true;
};

namespace detail {

/// Actions an atom can perform from a given register valuation.
inline std::vector<Action> atom_actions(const Command& atom, const RegFile& regs,
                                        const ValueDomain& dom) {
    switch (atom.kind) {
    case Command::Kind::Fence: return {Action::fence()};
    case Command::Kind::WriteGlobal: return {Action::write(atom.global, eval_expr(*atom.expr, regs))};
    case Command::Kind::ReadGlobal: {
        std::vector<Action> out;
        for (Val v : dom.values()) out.push_back(Action::read(atom.global, atom.reg, v));
        return out;
    }
    default: return {};  // skip and register assignment touch no memory
    }
}

} // namespace detail

/// Reachable mode: every (registers, memory) pair seen during exploration,
/// closed under flushes and under one application of each program action.
/// PendingCap mode: all register valuations crossed with every canonical
/// memory state of at most `pending_cap` pending entries.
inline ProofUniverse build_proof_universe(const Program& p, const ProofUniverseOptions& opt = {}) {
    ProofUniverse u{make_ppso(p), {}, true};
    const Signature& sig = p.sig;

    std::unordered_set<ProofState, ProofStateHash> seen;
    auto add = [&](ProofState s) {
        if (seen.insert(s).second) u.states.push_back(std::move(s));
    };

    if (opt.kind == ProofUniverseOptions::Kind::PendingCap) {
        // all register valuations
        std::vector<RegFile> regfiles;
        RegFile cur(sig.nregisters(), sig.dom.lo);
        while (true) {
            regfiles.push_back(cur);
            int i = 0;
            for (; i < (int)cur.size(); ++i) {
                if (cur[i] < sig.dom.hi) {
                    ++cur[i];
                    break;
                }
                cur[i] = sig.dom.lo;
            }
            if (i == (int)cur.size()) break;
        }
        // all canonical memory states up to the cap, by rank-ordered placement
        std::vector<PpsoState> mems;
        std::vector<Val> memv(sig.nglobals(), sig.dom.lo);
        while (true) {
            PpsoState base;
            base.mem = memv;
            base.buf.assign(sig.buffer_count(), {});
            std::vector<PpsoState> level{base};
            mems.push_back(base);
            for (int k = 1; k <= opt.pending_cap; ++k) {
                std::vector<PpsoState> next;
                for (const auto& s : level)
                    for (int b = 0; b < sig.buffer_count(); ++b)
                        for (Val v : sig.dom.values()) {
                            PpsoState n = s;
                            n.buf[b].push_back({v, k});
                            next.push_back(std::move(n));
                        }
                for (const auto& s : next) mems.push_back(s);
                level = std::move(next);
            }
            int i = 0;
            for (; i < (int)memv.size(); ++i) {
                if (memv[i] < sig.dom.hi) {
                    ++memv[i];
                    break;
                }
                memv[i] = sig.dom.lo;
            }
            if (i == (int)memv.size()) break;
        }
        for (const auto& rf : regfiles)
            for (const auto& m : mems) add({rf, m});
        return u;
    }

    auto r = reach(u.sem, p, {opt.depth});
    u.complete = r.complete;
    for (const auto& cfg : r.configs) add({cfg.regs, cfg.mem});

    // close under flushes
    for (std::size_t i = 0; i < u.states.size(); ++i) {
        auto cur = u.states[i];
        for (const auto& m : flush_closure_of(u.sem, cur.mem)) add({cur.regs, m});
    }

    // one application of every program action, then flushes again
    std::vector<std::pair<int, CommandPtr>> atoms;
    auto collect = [&](auto&& self, int t, const CommandPtr& c) -> void {
        switch (c->kind) {
        case Command::Kind::Seq:
            self(self, t, c->left);
            self(self, t, c->right);
            break;
        case Command::Kind::If:
            self(self, t, c->left);
            self(self, t, c->right);
            break;
        case Command::Kind::While: self(self, t, c->left); break;
        case Command::Kind::Skip: break;
        default: atoms.emplace_back(t, c); break;
        }
    };
    for (int t = 0; t < sig.nthreads; ++t) collect(collect, t, p.threads[t]);

    std::size_t base_count = u.states.size();
    for (std::size_t i = 0; i < base_count; ++i) {
        auto cur = u.states[i];
        for (const auto& [t, atom] : atoms) {
            if (atom->kind == Command::Kind::AssignReg) {
                RegFile next = cur.regs;
                next[atom->reg] = eval_expr(*atom->expr, cur.regs);
                add({next, cur.mem});
                continue;
            }
            for (const auto& a : detail::atom_actions(*atom, cur.regs, sig.dom)) {
                for (const auto& m : transition_successors(u.sem, cur.mem, t, a)) {
                    RegFile next = cur.regs;
                    if (a.is_read()) next[a.reg] = a.value;
                    for (const auto& m2 : flush_closure_of(u.sem, m)) add({next, m2});
                }
            }
        }
    }
    return u;
}

// ---------------------------------------------------------------------------
// Hoare triples
// ---------------------------------------------------------------------------

struct TripleResult {
    bool holds = true;
    std::optional<ProofState> witness;          // state satisfying pre
    std::optional<Action> action;               // memory action taken, if any
    std::optional<ProofState> bad_successor;    // successor violating post
    long states_checked = 0;
};

/// { pre } atom@t { post } over the universe: every universe state satisfying
/// pre has all its atom-successors satisfy post. Register assignment and skip
/// use the substitution rule (a deterministic local step); memory commands
/// check every action the atom can emit.
inline TripleResult check_hoare_triple(const AssertionPtr& pre, int t, const CommandPtr& atom,
                                       const AssertionPtr& post, const ProofUniverse& u) {
    TripleResult res;
    const Signature& sig = u.sem.sig();
    for (const auto& s : u.states) {
        if (!proof_assertion_holds(*pre, u.sem, s)) continue;
        ++res.states_checked;
        switch (atom->kind) {
        case Command::Kind::Skip: {
            if (!proof_assertion_holds(*post, u.sem, s)) {
                return {false, s, {}, s, res.states_checked};
            }
            break;
        }
        case Command::Kind::AssignReg: {
            ProofState next{s.regs, s.mem};
            next.regs[atom->reg] = eval_expr(*atom->expr, s.regs);
            if (!proof_assertion_holds(*post, u.sem, next)) {
                return {false, s, {}, next, res.states_checked};
            }
            break;
        }
        default:
            for (const auto& a : detail::atom_actions(*atom, s.regs, sig.dom)) {
                for (const auto& m : transition_successors(u.sem, s.mem, t, a)) {
                    ProofState next{s.regs, m};
                    if (a.is_read()) next.regs[a.reg] = a.value;
                    if (!proof_assertion_holds(*post, u.sem, next)) {
                        return {false, s, a, next, res.states_checked};
                    }
                }
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Outline checking
// ---------------------------------------------------------------------------

struct ProofFailure {
    enum class Kind { Local, Interference, Init, Final } kind;
    int thread = -1;       // thread whose command was checked
    int atom = -1;         // its index within that thread
    int assert_thread = -1;  // interference: thread owning the assertion
    int assert_index = -1;   // interference: index of that assertion
    std::string triple;
    TripleResult result;
};

struct ProofReport {
    bool valid = true;
    long triples_checked = 0;
    std::optional<ProofFailure> failure;  // first failure in source order
    bool universe_complete = true;
};

inline std::optional<ProofFailure> check_local_correctness(const ProofOutline& o,
                                                           const ProofUniverse& u,
                                                           long* triples = nullptr) {
    const Signature& sig = o.program.sig;
    for (int t = 0; t < sig.nthreads; ++t) {
        for (std::size_t i = 0; i < o.atoms[t].size(); ++i) {
            auto r = check_hoare_triple(o.asserts[t][i], t, o.atoms[t][i], o.asserts[t][i + 1], u);
            if (triples) ++*triples;
            if (!r.holds) {
                std::string desc = "{" + to_string(*o.asserts[t][i], sig) + "} " + "statement " +
                                   std::to_string(i + 1) + " of thread " + std::to_string(t + 1) +
                                   " {" + to_string(*o.asserts[t][i + 1], sig) + "}";
                return ProofFailure{ProofFailure::Kind::Local, t, (int)i, -1, -1, desc, r};
            }
        }
    }
    return std::nullopt;
}

inline std::optional<ProofFailure> check_global_correctness(const ProofOutline& o,
                                                            const ProofUniverse& u,
                                                            long* triples = nullptr) {
    const Signature& sig = o.program.sig;
    for (int t = 0; t < sig.nthreads; ++t) {          // thread owning assertion R
        for (int t2 = 0; t2 < sig.nthreads; ++t2) {   // interfering thread
            if (t == t2) continue;
            for (std::size_t ri = 0; ri < o.asserts[t].size(); ++ri) {
                const auto& r_assert = o.asserts[t][ri];
                for (std::size_t ci = 0; ci < o.atoms[t2].size(); ++ci) {
                    auto pre = Assertion::conj(r_assert, o.asserts[t2][ci]);
                    auto res = check_hoare_triple(pre, t2, o.atoms[t2][ci], r_assert, u);
                    if (triples) ++*triples;
                    if (!res.holds) {
                        std::string desc = "{" + to_string(*r_assert, sig) + " & pre} statement " +
                                           std::to_string(ci + 1) + " of thread " +
                                           std::to_string(t2 + 1) + " {" +
                                           to_string(*r_assert, sig) + "}";
                        return ProofFailure{ProofFailure::Kind::Interference, t2,    (int)ci,
                                            t,                               (int)ri, desc,  res};
                    }
                }
            }
        }
    }
    return std::nullopt;
}

inline ProofReport check_outline(const ProofOutline& o, const ProofUniverse& u) {
    ProofReport rep;
    rep.universe_complete = u.complete;

    // initial configurations satisfy the init assertion
    ProofState init{RegFile(o.program.sig.nregisters(), 0), u.sem.initial()};
    if (!proof_assertion_holds(*o.init_assert, u.sem, init)) {
        rep.valid = false;
        rep.failure = ProofFailure{ProofFailure::Kind::Init, -1, -1, -1, -1,
                                   "init: " + to_string(*o.init_assert, o.program.sig),
                                   TripleResult{false, init, {}, init, 1}};
        return rep;
    }

    if (auto f = check_local_correctness(o, u, &rep.triples_checked)) {
        rep.valid = false;
        rep.failure = std::move(f);
        return rep;
    }
    if (auto f = check_global_correctness(o, u, &rep.triples_checked)) {
        rep.valid = false;
        rep.failure = std::move(f);
        return rep;
    }

    // on terminal configurations the thread-final assertions imply the final one
    auto r = reach(u.sem, o.program, {});
    for (int ti : r.terminal) {
        const auto& cfg = r.configs[ti];
        ProofState s{cfg.regs, cfg.mem};
        bool all_finals = true;
        for (int t = 0; t < o.program.sig.nthreads; ++t)
            if (!proof_assertion_holds(*o.asserts[t].back(), u.sem, s)) all_finals = false;
        if (all_finals && !proof_assertion_holds(*o.final_assert, u.sem, s)) {
            rep.valid = false;
            rep.failure = ProofFailure{ProofFailure::Kind::Final, -1, -1, -1, -1,
                                       "final: " + to_string(*o.final_assert, o.program.sig),
                                       TripleResult{false, s, {}, s, 1}};
            return rep;
        }
    }
    return rep;
}

} // namespace psocheck
