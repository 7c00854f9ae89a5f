#pragma once

#include <vector>

#include "psocheck/action.hpp"
#include "psocheck/ast.hpp"

namespace psocheck {

/// One step of a single thread's command, before the memory model has any say.
/// Reads branch over every value in the domain; the memory model filters them later.
struct LocalStep {
    ExtAction label;
    CommandPtr next;
    RegFile next_regs;
};

inline void local_steps_into(const CommandPtr& c, const RegFile& regs, const ValueDomain& dom,
                             std::vector<LocalStep>& out) {
    switch (c->kind) {
    case Command::Kind::Skip:
        break;  // terminated: no steps
    case Command::Kind::Fence:
        out.push_back({ExtAction::memory(Action::fence()), Command::skip(), regs});
        break;
    case Command::Kind::AssignReg: {
        Val v = eval_expr(*c->expr, regs);
        RegFile next = regs;
        next[c->reg] = v;
        // Literal loads carry their own label; expression evaluation is silent.
        ExtAction label = c->expr->kind == Expr::Kind::Literal
                              ? ExtAction::local_assign(c->reg, v)
                              : ExtAction::tau();
        out.push_back({label, Command::skip(), std::move(next)});
        break;
    }
    case Command::Kind::ReadGlobal:
        for (Val v : dom.values()) {
            RegFile next = regs;
            next[c->reg] = v;
            out.push_back({ExtAction::memory(Action::read(c->global, c->reg, v)),
                           Command::skip(), std::move(next)});
        }
        break;
    case Command::Kind::WriteGlobal: {
        Val v = eval_expr(*c->expr, regs);
        if (!dom.contains(v))
            throw SemanticsError("written value " + std::to_string(v) +
                                 " outside the declared domain");
        out.push_back({ExtAction::memory(Action::write(c->global, v)), Command::skip(), regs});
        break;
    }
    case Command::Kind::Seq:
        if (c->left->kind == Command::Kind::Skip) {
            out.push_back({ExtAction::tau(), c->right, regs});
        } else {
            std::vector<LocalStep> inner;
            local_steps_into(c->left, regs, dom, inner);
            for (auto& s : inner)
                out.push_back({s.label, Command::seq(s.next, c->right), std::move(s.next_regs)});
        }
        break;
    case Command::Kind::If:
        out.push_back({ExtAction::tau(), eval_bool(*c->cond, regs) ? c->left : c->right, regs});
        break;
    case Command::Kind::While:
        if (eval_bool(*c->cond, regs))
            out.push_back({ExtAction::tau(), Command::seq(c->left, c), regs});
        else
            out.push_back({ExtAction::tau(), Command::skip(), regs});
        break;
    }
}

inline std::vector<LocalStep> local_steps(const CommandPtr& c, const RegFile& regs,
                                          const ValueDomain& dom) {
    std::vector<LocalStep> out;
    local_steps_into(c, regs, dom, out);
    return out;
}

/// A step of one thread of a residual program: the per-thread step lifted
/// pointwise over the thread map and the shared register file.
struct ProgramStep {
    ExtAction label;
    std::vector<CommandPtr> next_residue;
    RegFile next_regs;
};

inline std::vector<ProgramStep> thread_steps(const std::vector<CommandPtr>& residue,
                                             const RegFile& regs, int t, const ValueDomain& dom) {
    if (t < 0 || t >= (int)residue.size())
        throw SemanticsError("unknown thread id " + std::to_string(t + 1));
    std::vector<ProgramStep> out;
    for (auto& s : local_steps(residue[t], regs, dom)) {
        std::vector<CommandPtr> next = residue;
        next[t] = s.next;
        out.push_back({s.label, std::move(next), std::move(s.next_regs)});
    }
    return out;
}

} // namespace psocheck
