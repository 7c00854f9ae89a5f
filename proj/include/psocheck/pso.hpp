#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psocheck/action.hpp"
#include "psocheck/ast.hpp"

namespace psocheck {

/// Shared memory plus one FIFO buffer of pending values per (thread, global).
/// Head of a buffer (front) is the oldest write and the one a flush moves to
/// memory; a thread reads the last (newest) entry of its own buffer.
struct PsoState {
    std::vector<Val> mem;                   // by global id
    std::vector<std::vector<Val>> buf;      // by Signature::buf_index(t, x)

    bool operator==(const PsoState&) const = default;

    int pending() const {
        int n = 0;
        for (auto& b : buf) n += (int)b.size();
        return n;
    }

    bool operator<(const PsoState& o) const {
        if (pending() != o.pending()) return pending() < o.pending();
        if (mem != o.mem) return mem < o.mem;
        return buf < o.buf;
    }
};

inline std::size_t hash_value(const PsoState& s) {
    std::size_t h = hash_range(s.mem.begin(), s.mem.end());
    for (auto& b : s.buf) hash_combine(h, hash_range(b.begin(), b.end()));
    return h;
}

inline std::string to_string(const PsoState& s, const Signature& sig) {
    std::string out = "s=[";
    for (int x = 0; x < sig.nglobals(); ++x)
        out += (x ? "," : "") + sig.globals[x] + "=" + std::to_string(s.mem[x]);
    out += "]";
    for (int t = 0; t < sig.nthreads; ++t)
        for (int x = 0; x < sig.nglobals(); ++x) {
            const auto& b = s.buf[sig.buf_index(t, x)];
            if (b.empty()) continue;
            out += " wb(" + std::to_string(t + 1) + "," + sig.globals[x] + ")=<";
            for (std::size_t i = 0; i < b.size(); ++i) out += (i ? "," : "") + std::to_string(b[i]);
            out += ">";
        }
    return out;
}

/// What thread t observes for x: last pending entry of its own buffer if any,
/// shared memory otherwise.
inline Val pso_read_value(const Signature& sig, const PsoState& s, int t, int x) {
    const auto& b = s.buf[sig.buf_index(t, x)];
    return b.empty() ? s.mem[x] : b.back();
}

/// Move the head of wb(t,x) to shared memory; nullopt when the buffer is empty.
inline std::optional<PsoState> pso_flush(const Signature& sig, const PsoState& s, int t, int x) {
    const auto& b = s.buf[sig.buf_index(t, x)];
    if (b.empty()) return std::nullopt;
    PsoState next = s;
    next.mem[x] = b.front();
    auto& nb = next.buf[sig.buf_index(t, x)];
    nb.erase(nb.begin());
    return next;
}

inline bool pso_fence_enabled(const Signature& sig, const PsoState& s, int t) {
    for (int x = 0; x < sig.nglobals(); ++x)
        if (!s.buf[sig.buf_index(t, x)].empty()) return false;
    return true;
}

/// PSO machine over a fixed signature. `direct_read_mutant` bypasses the own-buffer
/// lookup on reads; it exists as a fault-injection hook for the equivalence checker
/// and is never enabled in normal operation.
class PsoSemantics {
  public:
    using State = PsoState;

    explicit PsoSemantics(Signature sig, bool direct_read_mutant = false)
        : sig_(std::move(sig)), mutant_(direct_read_mutant) {}

    const Signature& sig() const { return sig_; }
    static constexpr bool has_timestamps = false;

    State initial() const {
        State s;
        s.mem.assign(sig_.nglobals(), 0);
        s.buf.assign(sig_.buffer_count(), {});
        return s;
    }

    void flush_successors(const State& s, std::vector<State>& out) const {
        for (int t = 0; t < sig_.nthreads; ++t)
            for (int x = 0; x < sig_.nglobals(); ++x)
                if (auto n = pso_flush(sig_, s, t, x)) out.push_back(std::move(*n));
    }

    /// One action step (no flushes); empty result means the action is disabled here.
    std::vector<State> action_step(const State& s, int t, const Action& a) const {
        std::vector<State> out;
        switch (a.kind) {
        case Action::Kind::Read: {
            Val seen = mutant_ ? s.mem[a.var] : pso_read_value(sig_, s, t, a.var);
            if (seen == a.value) out.push_back(s);
            break;
        }
        case Action::Kind::Write: {
            State next = s;
            next.buf[sig_.buf_index(t, a.var)].push_back(a.value);
            out.push_back(std::move(next));
            break;
        }
        case Action::Kind::Fence:
            if (pso_fence_enabled(sig_, s, t)) out.push_back(s);
            break;
        }
        return out;
    }

  private:
    Signature sig_;
    bool mutant_;
};

} // namespace psocheck

template <>
struct std::hash<psocheck::PsoState> {
    std::size_t operator()(const psocheck::PsoState& s) const { return hash_value(s); }
};
