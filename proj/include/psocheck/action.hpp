#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "psocheck/ast.hpp"

namespace psocheck {

/// Memory-visible action: rd(x,r,v), wr(x,v) or fence. Reads may carry reg = -1
/// when the register identity is irrelevant (assertion probes); the memory
/// semantics never look at it.
struct Action {
    enum class Kind { Write = 0, Read = 1, Fence = 2 };

    Kind kind = Kind::Fence;
    int var = -1;  // global id; -1 for fence
    int reg = -1;  // read target register; -1 for write/fence/probe
    Val value = 0; // rdval / wrval; unused for fence

    static Action read(int x, int r, Val v) { return {Kind::Read, x, r, v}; }
    static Action write(int x, Val v) { return {Kind::Write, x, -1, v}; }
    static Action fence() { return {Kind::Fence, -1, -1, 0}; }

    bool is_read() const { return kind == Kind::Read; }
    bool is_write() const { return kind == Kind::Write; }
    bool is_fence() const { return kind == Kind::Fence; }

    std::optional<int> var_of() const {
        if (is_fence()) return std::nullopt;
        return var;
    }
    std::optional<Val> rdval() const {
        if (!is_read()) return std::nullopt;
        return value;
    }
    std::optional<Val> wrval() const {
        if (!is_write()) return std::nullopt;
        return value;
    }

    auto key() const { return std::tuple((int)kind, var, value, reg); }
    bool operator==(const Action&) const = default;
    bool operator<(const Action& o) const { return key() < o.key(); }
};

inline std::size_t hash_value(const Action& a) {
    std::size_t h = (std::size_t)a.kind;
    hash_combine(h, (std::size_t)(a.var + 1));
    hash_combine(h, (std::size_t)(a.reg + 1));
    hash_combine(h, (std::size_t)(a.value + 1));
    return h;
}

inline std::string to_string(const Action& a, const Signature& sig) {
    switch (a.kind) {
    case Action::Kind::Read:
        return "rd(" + sig.globals[a.var] + "," + (a.reg >= 0 ? sig.registers[a.reg] : "_") + "," +
               std::to_string(a.value) + ")";
    case Action::Kind::Write:
        return "wr(" + sig.globals[a.var] + "," + std::to_string(a.value) + ")";
    case Action::Kind::Fence: return "fence";
    }
    return "?";
}

/// Thread-local step label: a memory action, a register load of a literal, or a
/// silent step. Only Action labels are visible in traces.
struct ExtAction {
    enum class Kind { Act, LocalAssign, Tau };

    Kind kind = Kind::Tau;
    Action act;   // Act
    int reg = -1; // LocalAssign
    Val value = 0;

    static ExtAction tau() { return {}; }
    static ExtAction local_assign(int r, Val v) {
        ExtAction e;
        e.kind = Kind::LocalAssign;
        e.reg = r;
        e.value = v;
        return e;
    }
    static ExtAction memory(Action a) {
        ExtAction e;
        e.kind = Kind::Act;
        e.act = a;
        return e;
    }

    bool is_memory() const { return kind == Kind::Act; }
    bool operator==(const ExtAction&) const = default;
};

inline std::string to_string(const ExtAction& a, const Signature& sig) {
    switch (a.kind) {
    case ExtAction::Kind::Act: return to_string(a.act, sig);
    case ExtAction::Kind::LocalAssign:
        return sig.registers[a.reg] + ":=" + std::to_string(a.value);
    case ExtAction::Kind::Tau: return "tau";
    }
    return "?";
}

/// All wr(x,v), rd(x,r,v) and fence over a signature, sorted, duplicate-free.
inline std::vector<Action> action_universe(const Signature& sig) {
    std::vector<Action> out;
    for (int x = 0; x < sig.nglobals(); ++x)
        for (Val v : sig.dom.values())
            out.push_back(Action::write(x, v));
    for (int x = 0; x < sig.nglobals(); ++x)
        for (Val v : sig.dom.values())
            for (int r = 0; r < sig.nregisters(); ++r)
                out.push_back(Action::read(x, r, v));
    out.push_back(Action::fence());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Action> action_universe(const Program& p) { return action_universe(p.sig); }

} // namespace psocheck

template <>
struct std::hash<psocheck::Action> {
    std::size_t operator()(const psocheck::Action& a) const { return hash_value(a); }
};
