#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psocheck/action.hpp"
#include "psocheck/ast.hpp"
#include "psocheck/pso.hpp"

namespace psocheck {

/// A buffered write together with its timestamp rank. Only the relative order of
/// timestamps is observable, so states keep them in canonical form: the ranks in
/// use are exactly 1..n for n pending entries across all buffers.
struct StampedVal {
    Val value = 0;
    int rank = 0;

    bool operator==(const StampedVal&) const = default;
    bool operator<(const StampedVal& o) const {
        return value != o.value ? value < o.value : rank < o.rank;
    }
};

/// PSO state whose buffer entries carry timestamp ranks fixing the global flush
/// order in advance. Within each buffer ranks increase front-to-back and every
/// rank is unique across all buffers.
struct PpsoState {
    std::vector<Val> mem;
    std::vector<std::vector<StampedVal>> buf;

    bool operator==(const PpsoState&) const = default;

    int pending() const {
        int n = 0;
        for (auto& b : buf) n += (int)b.size();
        return n;
    }

    /// Pending entries listed in rank order as (buffer index, value) pairs.
    /// Together with `mem` this encodes a canonical state bijectively, and its
    /// lexicographic order is the canonical state order used everywhere a
    /// deterministic "least" state or counterexample is reported.
    std::vector<std::pair<int, Val>> rank_description() const {
        std::vector<std::pair<int, Val>> by_rank(pending());
        for (int b = 0; b < (int)buf.size(); ++b)
            for (const auto& e : buf[b]) by_rank[e.rank - 1] = {b, e.value};
        return by_rank;
    }

    bool operator<(const PpsoState& o) const {
        int p = pending(), q = o.pending();
        if (p != q) return p < q;
        if (mem != o.mem) return mem < o.mem;
        return rank_description() < o.rank_description();
    }
};

inline std::size_t hash_value(const PpsoState& s) {
    std::size_t h = hash_range(s.mem.begin(), s.mem.end());
    for (auto& b : s.buf) {
        hash_combine(h, b.size());
        for (auto& e : b) {
            hash_combine(h, (std::size_t)e.value);
            hash_combine(h, (std::size_t)e.rank);
        }
    }
    return h;
}

inline std::string to_string(const PpsoState& s, const Signature& sig) {
    std::string out = "s=[";
    for (int x = 0; x < sig.nglobals(); ++x)
        out += (x ? "," : "") + sig.globals[x] + "=" + std::to_string(s.mem[x]);
    out += "]";
    for (int t = 0; t < sig.nthreads; ++t)
        for (int x = 0; x < sig.nglobals(); ++x) {
            const auto& b = s.buf[sig.buf_index(t, x)];
            if (b.empty()) continue;
            out += " wb(" + std::to_string(t + 1) + "," + sig.globals[x] + ")=<";
            for (std::size_t i = 0; i < b.size(); ++i)
                out += (i ? "," : "") + ("(" + std::to_string(b[i].value) + "," +
                                         std::to_string(b[i].rank) + ")");
            out += ">";
        }
    return out;
}

/// Remap ranks to 1..n preserving their relative order. Idempotent.
inline PpsoState canonicalize(PpsoState s) {
    std::vector<int> ranks;
    for (auto& b : s.buf)
        for (auto& e : b) ranks.push_back(e.rank);
    std::sort(ranks.begin(), ranks.end());
    for (auto& b : s.buf)
        for (auto& e : b)
            e.rank = 1 + (int)(std::lower_bound(ranks.begin(), ranks.end(), e.rank) - ranks.begin());
    return s;
}

inline Val pp_read_value(const Signature& sig, const PpsoState& s, int t, int x) {
    const auto& b = s.buf[sig.buf_index(t, x)];
    return b.empty() ? s.mem[x] : b.back().value;
}

inline bool pp_fence_enabled(const Signature& sig, const PpsoState& s, int t) {
    for (int x = 0; x < sig.nglobals(); ++x)
        if (!s.buf[sig.buf_index(t, x)].empty()) return false;
    return true;
}

/// All states reachable by appending (v, fresh stamp) to wb(t,x): one successor
/// per admissible position of the fresh stamp in the global order, i.e. every
/// position strictly above all stamps already in wb(t,x).
inline std::vector<PpsoState> pp_write(const Signature& sig, const PpsoState& s, int t, int x,
                                       Val v) {
    int n = s.pending();
    const auto& own = s.buf[sig.buf_index(t, x)];
    int own_max = own.empty() ? 0 : own.back().rank;
    std::vector<PpsoState> out;
    for (int q = own_max + 1; q <= n + 1; ++q) {
        PpsoState next = s;
        for (auto& b : next.buf)
            for (auto& e : b)
                if (e.rank >= q) ++e.rank;
        next.buf[sig.buf_index(t, x)].push_back({v, q});
        out.push_back(std::move(next));
    }
    return out;
}

/// Flush head of wb(t,x); allowed only when its stamp is below every stamp in
/// every other buffer. Ranks are renormalized back to canonical form.
inline std::optional<PpsoState> pp_flush(const Signature& sig, const PpsoState& s, int t, int x) {
    int bi = sig.buf_index(t, x);
    const auto& b = s.buf[bi];
    if (b.empty()) return std::nullopt;
    int q = b.front().rank;
    for (int o = 0; o < (int)s.buf.size(); ++o) {
        if (o == bi) continue;
        for (const auto& e : s.buf[o])
            if (e.rank < q) return std::nullopt;
    }
    PpsoState next = s;
    next.mem[x] = b.front().value;
    auto& nb = next.buf[bi];
    nb.erase(nb.begin());
    for (auto& nb2 : next.buf)
        for (auto& e : nb2)
            if (e.rank > q) --e.rank;
    return next;
}

/// Forget the stamps, keeping buffer value order and memory.
inline PsoState erase_stamps(const PpsoState& s) {
    PsoState out;
    out.mem = s.mem;
    out.buf.resize(s.buf.size());
    for (std::size_t i = 0; i < s.buf.size(); ++i)
        for (const auto& e : s.buf[i]) out.buf[i].push_back(e.value);
    return out;
}

/// s has the maximal view on x for thread t: either no buffer holds a pending
/// x-write at all, or t's own x-buffer holds the highest-stamped one.
inline bool max_ts(const Signature& sig, const PpsoState& s, int t, int x) {
    const auto& own = s.buf[sig.buf_index(t, x)];
    if (own.empty()) {
        for (int t2 = 0; t2 < sig.nthreads; ++t2)
            if (!s.buf[sig.buf_index(t2, x)].empty()) return false;
        return true;
    }
    int last = own.back().rank;
    for (int t2 = 0; t2 < sig.nthreads; ++t2)
        for (const auto& e : s.buf[sig.buf_index(t2, x)])
            if (e.rank > last) return false;
    return true;
}

inline bool vmax(const Signature& sig, const PpsoState& s, int t, const Action& a) {
    if (a.is_fence()) return true;
    return max_ts(sig, s, t, a.var);
}

/// The timestamped machine. Writes may be capped on total pending entries to keep
/// exploration of loops finite; `cap_hits()` reports whether the cap ever bit.
class PpsoSemantics {
  public:
    using State = PpsoState;

    explicit PpsoSemantics(Signature sig, int pending_cap = -1)
        : sig_(std::move(sig)), cap_(pending_cap) {}

    const Signature& sig() const { return sig_; }
    static constexpr bool has_timestamps = true;

    long cap_hits() const { return cap_hits_; }
    int pending_cap() const { return cap_; }

    State initial() const {
        State s;
        s.mem.assign(sig_.nglobals(), 0);
        s.buf.assign(sig_.buffer_count(), {});
        return s;
    }

    void flush_successors(const State& s, std::vector<State>& out) const {
        for (int t = 0; t < sig_.nthreads; ++t)
            for (int x = 0; x < sig_.nglobals(); ++x)
                if (auto n = pp_flush(sig_, s, t, x)) out.push_back(std::move(*n));
    }

    std::vector<State> action_step(const State& s, int t, const Action& a) const {
        std::vector<State> out;
        switch (a.kind) {
        case Action::Kind::Read:
            if (pp_read_value(sig_, s, t, a.var) == a.value) out.push_back(s);
            break;
        case Action::Kind::Write:
            if (cap_ >= 0 && s.pending() >= cap_) {
                ++cap_hits_;
                break;
            }
            out = pp_write(sig_, s, t, a.var, a.value);
            break;
        case Action::Kind::Fence:
            if (pp_fence_enabled(sig_, s, t)) out.push_back(s);
            break;
        }
        return out;
    }

  private:
    Signature sig_;
    int cap_;
    mutable long cap_hits_ = 0;
};

// ---------------------------------------------------------------------------
// Shared helpers over either machine
// ---------------------------------------------------------------------------

/// Smallest flush-closed superset of {s}, in deterministic BFS order starting at s.
/// Terminates because each flush removes exactly one pending entry.
template <class Sem>
std::vector<typename Sem::State> flush_closure_of(const Sem& sem,
                                                  const typename Sem::State& s) {
    std::vector<typename Sem::State> states{s};
    std::vector<typename Sem::State> frontier{s};
    while (!frontier.empty()) {
        std::vector<typename Sem::State> next;
        for (const auto& cur : frontier) {
            std::vector<typename Sem::State> succ;
            sem.flush_successors(cur, succ);
            for (auto& n : succ)
                if (std::find(states.begin(), states.end(), n) == states.end()) {
                    states.push_back(n);
                    next.push_back(std::move(n));
                }
        }
        frontier = std::move(next);
    }
    return states;
}

/// T(t,a)-successors: any flush sequence, then one a-step. Deterministic order,
/// duplicate-free.
template <class Sem>
std::vector<typename Sem::State> transition_successors(const Sem& sem,
                                                       const typename Sem::State& s, int t,
                                                       const Action& a) {
    std::vector<typename Sem::State> out;
    for (const auto& mid : flush_closure_of(sem, s))
        for (auto& n : sem.action_step(mid, t, a))
            if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
    return out;
}

/// interf-successors: identity for reads and fence; T(t,a) then any flush
/// sequence for writes.
inline std::vector<PpsoState> interf_successors(const PpsoSemantics& sem, const PpsoState& s,
                                                int t, const Action& a) {
    if (!a.is_write()) return {s};
    std::vector<PpsoState> out;
    for (const auto& mid : transition_successors(sem, s, t, a))
        for (auto& n : flush_closure_of(sem, mid))
            if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
    return out;
}

} // namespace psocheck

template <>
struct std::hash<psocheck::PpsoState> {
    std::size_t operator()(const psocheck::PpsoState& s) const { return hash_value(s); }
};
