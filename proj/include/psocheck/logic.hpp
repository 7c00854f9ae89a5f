#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "psocheck/ppso.hpp"
#include "psocheck/pso.hpp"

namespace psocheck {

/// Subset of a fixed finite universe 0..n-1.
struct StateSet {
    std::vector<bool> bits;

    StateSet() = default;
    explicit StateSet(int n, bool full = false) : bits(n, full) {}

    int size() const { return (int)bits.size(); }
    bool contains(int i) const { return bits[i]; }
    void insert(int i) { bits[i] = true; }
    int count() const { return (int)std::count(bits.begin(), bits.end(), true); }
    bool empty() const { return count() == 0; }

    bool operator==(const StateSet&) const = default;
};

inline StateSet set_union(const StateSet& a, const StateSet& b) {
    StateSet r(a.size());
    for (int i = 0; i < a.size(); ++i) r.bits[i] = a.bits[i] || b.bits[i];
    return r;
}

inline StateSet set_intersect(const StateSet& a, const StateSet& b) {
    StateSet r(a.size());
    for (int i = 0; i < a.size(); ++i) r.bits[i] = a.bits[i] && b.bits[i];
    return r;
}

inline StateSet set_complement(const StateSet& a) {
    StateSet r(a.size());
    for (int i = 0; i < a.size(); ++i) r.bits[i] = !a.bits[i];
    return r;
}

inline bool subset(const StateSet& a, const StateSet& b) {
    for (int i = 0; i < a.size(); ++i)
        if (a.bits[i] && !b.bits[i]) return false;
    return true;
}

/// Finite relation over the same universe, kept as sorted successor lists.
struct Rel {
    int n = 0;
    std::vector<std::vector<int>> succ;

    Rel() = default;
    explicit Rel(int n_) : n(n_), succ(n_) {}

    void add(int i, int j) {
        auto& row = succ[i];
        auto it = std::lower_bound(row.begin(), row.end(), j);
        if (it == row.end() || *it != j) row.insert(it, j);
    }
    bool has(int i, int j) const {
        const auto& row = succ[i];
        return std::binary_search(row.begin(), row.end(), j);
    }
    long pair_count() const {
        long c = 0;
        for (auto& row : succ) c += (long)row.size();
        return c;
    }

    bool operator==(const Rel&) const = default;
};

inline Rel identity_rel(int n) {
    Rel r(n);
    for (int i = 0; i < n; ++i) r.succ[i].push_back(i);
    return r;
}

inline Rel rel_union(const Rel& a, const Rel& b) {
    Rel r(a.n);
    for (int i = 0; i < a.n; ++i) {
        std::set_union(a.succ[i].begin(), a.succ[i].end(), b.succ[i].begin(), b.succ[i].end(),
                       std::back_inserter(r.succ[i]));
    }
    return r;
}

/// a ; b (first a, then b).
inline Rel compose(const Rel& a, const Rel& b) {
    Rel r(a.n);
    std::vector<bool> mark(a.n);
    for (int i = 0; i < a.n; ++i) {
        std::fill(mark.begin(), mark.end(), false);
        for (int j : a.succ[i])
            for (int k : b.succ[j]) mark[k] = true;
        for (int k = 0; k < a.n; ++k)
            if (mark[k]) r.succ[i].push_back(k);
    }
    return r;
}

inline bool subset(const Rel& a, const Rel& b) {
    for (int i = 0; i < a.n; ++i)
        for (int j : a.succ[i])
            if (!b.has(i, j)) return false;
    return true;
}

inline Rel converse(const Rel& a) {
    Rel r(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j : a.succ[i]) r.add(j, i);
    return r;
}

/// Reflexive-transitive closure.
inline Rel star(const Rel& a) {
    Rel r = a;
    for (int i = 0; i < r.n; ++i) r.add(i, i);
    // Floyd-Warshall style saturation; universes here are small.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < r.n; ++i) {
            std::vector<int> extra;
            for (int j : r.succ[i])
                for (int k : r.succ[j])
                    if (!r.has(i, k)) extra.push_back(k);
            for (int k : extra) {
                r.add(i, k);
                changed = true;
            }
        }
    }
    return r;
}

/// Relational image a[P].
inline StateSet image(const Rel& a, const StateSet& p) {
    StateSet r(a.n);
    for (int i = 0; i < a.n; ++i)
        if (p.contains(i))
            for (int j : a.succ[i]) r.insert(j);
    return r;
}

/// wlp(R,P): states all of whose R-successors lie in P.
inline StateSet wlp(const Rel& r, const StateSet& p) {
    StateSet out(r.n);
    for (int i = 0; i < r.n; ++i) {
        bool ok = true;
        for (int j : r.succ[i])
            if (!p.contains(j)) {
                ok = false;
                break;
            }
        out.bits[i] = ok;
    }
    return out;
}

/// dis(R) = wlp(R, empty): states where R is disabled.
inline StateSet dis(const Rel& r) { return wlp(r, StateSet(r.n)); }

// ---------------------------------------------------------------------------
// Indexed universes of memory states with materialized transition relations
// ---------------------------------------------------------------------------

template <class State>
struct IndexedUniverse {
    std::vector<State> states;  // sorted by the state's canonical order
    std::unordered_map<State, int> index;

    int size() const { return (int)states.size(); }
    std::optional<int> find(const State& s) const {
        auto it = index.find(s);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

template <class State>
IndexedUniverse<State> index_states(std::vector<State> states) {
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    IndexedUniverse<State> u;
    u.states = std::move(states);
    for (int i = 0; i < (int)u.states.size(); ++i) u.index.emplace(u.states[i], i);
    return u;
}

template <class Sem>
bool is_flush_closed(const Sem& sem, const IndexedUniverse<typename Sem::State>& u) {
    for (const auto& s : u.states) {
        std::vector<typename Sem::State> succ;
        sem.flush_successors(s, succ);
        for (const auto& n : succ)
            if (!u.find(n)) return false;
    }
    return true;
}

/// Smallest flush-closed superset of the given states.
template <class Sem>
std::vector<typename Sem::State> flush_closure(const Sem& sem,
                                               std::vector<typename Sem::State> states) {
    std::unordered_set<typename Sem::State> seen(states.begin(), states.end());
    std::vector<typename Sem::State> todo = states;
    while (!todo.empty()) {
        auto cur = std::move(todo.back());
        todo.pop_back();
        std::vector<typename Sem::State> succ;
        sem.flush_successors(cur, succ);
        for (auto& n : succ)
            if (seen.insert(n).second) {
                states.push_back(n);
                todo.push_back(std::move(n));
            }
    }
    return states;
}

/// Single-flush step relation restricted to the universe.
template <class Sem>
Rel flush_rel(const Sem& sem, const IndexedUniverse<typename Sem::State>& u) {
    Rel r(u.size());
    for (int i = 0; i < u.size(); ++i) {
        std::vector<typename Sem::State> succ;
        sem.flush_successors(u.states[i], succ);
        for (const auto& n : succ)
            if (auto j = u.find(n)) r.add(i, *j);
    }
    return r;
}

/// FL*: the reflexive-transitive flush closure, the candidate view-preserving
/// simulation used throughout.
template <class Sem>
Rel beta_closure(const Sem& sem, const IndexedUniverse<typename Sem::State>& u) {
    if (!is_flush_closed(sem, u))
        throw SemanticsError("beta_closure: universe is not flush-closed");
    return star(flush_rel(sem, u));
}

/// T(t,a) materialized over a flush-closed universe. Successors that fall outside
/// the universe (writes at its pending boundary) are rejected with an error if
/// `strict`, silently dropped otherwise.
template <class Sem>
Rel transition_rel(const Sem& sem, const IndexedUniverse<typename Sem::State>& u, int t,
                   const Action& a, bool strict = false) {
    if (!is_flush_closed(sem, u))
        throw SemanticsError("transition_rel: universe is not flush-closed");
    Rel r(u.size());
    for (int i = 0; i < u.size(); ++i) {
        for (const auto& n : transition_successors(sem, u.states[i], t, a)) {
            if (auto j = u.find(n))
                r.add(i, *j);
            else if (strict)
                throw SemanticsError("transition_rel: successor outside the universe");
        }
    }
    return r;
}

/// P is stable under beta: P subseteq wlp(beta, P).
inline bool check_beta_stable(const StateSet& p, const Rel& beta) {
    return subset(p, wlp(beta, p));
}

// ---------------------------------------------------------------------------
// Algebraic laws of wlp, checked on randomly sampled relations and predicates
// ---------------------------------------------------------------------------

struct WlpLawReport {
    std::string law;
    bool pass = true;
    long samples = 0;
    std::string note;
};

inline Rel random_rel(std::mt19937& rng, int n, double density = 0.3) {
    std::bernoulli_distribution coin(density);
    Rel r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (coin(rng)) r.add(i, j);
    return r;
}

inline Rel random_subrel(std::mt19937& rng, const Rel& r) {
    std::bernoulli_distribution keep(0.6);
    Rel s(r.n);
    for (int i = 0; i < r.n; ++i)
        for (int j : r.succ[i])
            if (keep(rng)) s.add(i, j);
    return s;
}

inline StateSet random_set(std::mt19937& rng, int n, double density = 0.5) {
    std::bernoulli_distribution coin(density);
    StateSet p(n);
    for (int i = 0; i < n; ++i)
        if (coin(rng)) p.insert(i);
    return p;
}

inline StateSet random_superset(std::mt19937& rng, const StateSet& p) {
    std::bernoulli_distribution add(0.3);
    StateSet q = p;
    for (int i = 0; i < q.size(); ++i)
        if (!q.bits[i] && add(rng)) q.insert(i);
    return q;
}

inline std::vector<WlpLawReport> check_wlp_laws(int samples, int universe_size, unsigned seed) {
    std::mt19937 rng(seed);
    int n = universe_size;
    StateSet full(n, true);

    WlpLawReport non_aborting{"non-aborting"}, monotonicity{"(anti-)monotonicity"},
        composition{"composition"}, rel_application{"relation-application"},
        conjunctivity{"conjunctivity"}, disjunctivity{"disjunctivity"};

    for (int k = 0; k < samples; ++k) {
        Rel r = random_rel(rng, n);
        Rel r2 = random_rel(rng, n);
        Rel rsub = random_subrel(rng, r);
        StateSet p = random_set(rng, n);
        StateSet q = random_set(rng, n);
        StateSet psup = random_superset(rng, p);

        if (!(wlp(r, full) == full)) non_aborting.pass = false;
        if (!subset(wlp(r, p), wlp(rsub, psup))) monotonicity.pass = false;
        if (!(wlp(r, wlp(r2, p)) == wlp(compose(r, r2), p))) composition.pass = false;
        if (!subset(image(r, wlp(r, p)), p)) rel_application.pass = false;
        if (!(set_intersect(wlp(r, p), wlp(r, q)) == wlp(r, set_intersect(p, q))))
            conjunctivity.pass = false;
        if (!subset(set_union(wlp(r, p), wlp(r, q)), wlp(r, set_union(p, q))))
            disjunctivity.pass = false;
    }

    for (auto* rep : {&non_aborting, &monotonicity, &composition, &rel_application,
                      &conjunctivity, &disjunctivity})
        rep->samples = samples;

    return {non_aborting, monotonicity, composition, rel_application, conjunctivity,
            disjunctivity};
}

/// Concrete witness that the reverse of the disjunctivity inclusion is false:
/// a state whose successors cover P u Q without lying inside either part.
inline bool disjunctivity_reverse_fails_witness() {
    Rel r(3);
    r.add(0, 1);
    r.add(0, 2);
    StateSet p(3), q(3);
    p.insert(1);
    q.insert(2);
    StateSet lhs = set_union(wlp(r, p), wlp(r, q));
    StateSet rhs = wlp(r, set_union(p, q));
    return rhs.contains(0) && !lhs.contains(0) && !subset(rhs, lhs);
}

} // namespace psocheck
