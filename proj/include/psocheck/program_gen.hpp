#pragma once

#include <random>
#include <string>
#include <vector>

#include "psocheck/ast.hpp"

namespace psocheck {

struct ProgramGenOptions {
    int threads = 2;
    int max_statements_per_thread = 4;
    std::vector<std::string> globals = {"x", "y"};
    ValueDomain dom = {0, 1};
    bool allow_if = true;
};

/// Deterministic loop-free litmus generator for differential testing: writes,
/// reads into fresh registers, fences, literal register loads and the odd
/// two-sided branch.
inline Program generate_program(unsigned seed, const ProgramGenOptions& opt = {}) {
    std::mt19937 rng(seed);
    Program p;
    p.name = "random-" + std::to_string(seed);
    p.sig.nthreads = opt.threads;
    p.sig.globals = opt.globals;
    p.sig.dom = opt.dom;

    auto fresh_reg = [&](int t) {
        std::string name = "r" + std::to_string(t + 1) + "_" +
                           std::to_string(p.sig.registers.size() + 1);
        p.sig.registers.push_back(name);
        p.sig.reg_owner.push_back(t);
        return (int)p.sig.registers.size() - 1;
    };

    std::uniform_int_distribution<int> count_dist(1, opt.max_statements_per_thread);
    std::uniform_int_distribution<int> global_dist(0, (int)opt.globals.size() - 1);
    std::uniform_int_distribution<Val> val_dist(opt.dom.lo, opt.dom.hi);

    for (int t = 0; t < opt.threads; ++t) {
        int n = count_dist(rng);
        std::vector<CommandPtr> stmts;
        for (int i = 0; i < n; ++i) {
            int pick = std::uniform_int_distribution<int>(0, 99)(rng);
            if (pick < 35) {
                stmts.push_back(
                    Command::write_global(global_dist(rng), Expr::literal(val_dist(rng))));
            } else if (pick < 70) {
                stmts.push_back(Command::read_global(fresh_reg(t), global_dist(rng)));
            } else if (pick < 80) {
                stmts.push_back(Command::fence());
            } else if (pick < 90) {
                stmts.push_back(
                    Command::assign_reg(fresh_reg(t), Expr::literal(val_dist(rng))));
            } else if (opt.allow_if) {
                int r = fresh_reg(t);
                stmts.push_back(Command::read_global(r, global_dist(rng)));
                auto cond = BoolExpr::cmp(BoolExpr::CmpOp::Eq, Expr::regref(r),
                                          Expr::literal(val_dist(rng)));
                auto then_branch = Command::write_global(global_dist(rng),
                                                         Expr::literal(val_dist(rng)));
                auto else_branch =
                    (std::uniform_int_distribution<int>(0, 1)(rng) == 0)
                        ? Command::skip()
                        : Command::fence();
                stmts.push_back(Command::if_then_else(cond, then_branch, else_branch));
                ++i;  // the branch counts as a statement too
            } else {
                stmts.push_back(Command::fence());
            }
        }
        p.threads.push_back(seq_of(stmts));
    }
    p.post = BoolExpr::constant(true);
    return p;
}

} // namespace psocheck
