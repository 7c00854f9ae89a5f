#include <catch2/catch_amalgamated.hpp>

#include "psocheck/local_sem.hpp"
#include "psocheck/parser.hpp"
#include "psocheck/program_gen.hpp"

#include "test_support.hpp"

using namespace psocheck;

namespace {

Program mp() { return parse_litmus(testsupport::kMpSource); }
Program mp_fence() { return parse_litmus(testsupport::kMpFenceSource); }

} // namespace

TEST_CASE("a read branches over every value in the domain") {
    Program p = mp();
    RegFile regs(2, 0);
    auto steps = local_steps(Command::read_global(0, 1), regs, p.sig.dom);  // r1 := y
    REQUIRE(steps.size() == 2);
    std::vector<Action> labels;
    for (const auto& s : steps) {
        REQUIRE(s.label.is_memory());
        REQUIRE(s.next->kind == Command::Kind::Skip);
        labels.push_back(s.label.act);
        REQUIRE(s.next_regs[0] == s.label.act.value);
    }
    REQUIRE(labels == std::vector<Action>{Action::read(1, 0, 0), Action::read(1, 0, 1)});
}

TEST_CASE("a write emits wr(x,v) and leaves registers untouched") {
    Program p = mp();
    RegFile regs(2, 0);
    auto steps = local_steps(Command::write_global(0, Expr::literal(1)), regs, p.sig.dom);
    REQUIRE(steps.size() == 1);
    REQUIRE(steps[0].label.is_memory());
    REQUIRE(steps[0].label.act == Action::write(0, 1));
    REQUIRE(steps[0].next->kind == Command::Kind::Skip);
    REQUIRE(steps[0].next_regs == regs);
}

TEST_CASE("skip; C takes a silent step to C") {
    Program p = mp();
    RegFile regs(2, 0);
    auto tail = Command::write_global(1, Expr::literal(1));
    auto steps = local_steps(Command::seq(Command::skip(), tail), regs, p.sig.dom);
    REQUIRE(steps.size() == 1);
    REQUIRE(steps[0].label.kind == ExtAction::Kind::Tau);
    REQUIRE(command_equal(*steps[0].next, *tail));
    REQUIRE(steps[0].next_regs == regs);
}

TEST_CASE("literal register loads carry their own label, expressions are silent") {
    ValueDomain dom{0, 2};
    RegFile regs(2, 0);
    auto lit = local_steps(Command::assign_reg(0, Expr::literal(2)), regs, dom);
    REQUIRE(lit.size() == 1);
    REQUIRE(lit[0].label.kind == ExtAction::Kind::LocalAssign);
    REQUIRE(lit[0].next_regs[0] == 2);

    regs[1] = 1;
    auto expr = local_steps(
        Command::assign_reg(0, Expr::binary(Expr::Kind::Add, Expr::regref(1), Expr::literal(1))),
        regs, dom);
    REQUIRE(expr.size() == 1);
    REQUIRE(expr[0].label.kind == ExtAction::Kind::Tau);
    REQUIRE(expr[0].next_regs[0] == 2);
}

TEST_CASE("branches and loops step silently on the condition") {
    ValueDomain dom{0, 1};
    RegFile regs{1};
    auto body = Command::write_global(0, Expr::literal(1));
    auto cond = BoolExpr::cmp(BoolExpr::CmpOp::Eq, Expr::regref(0), Expr::literal(1));

    auto taken = local_steps(Command::if_then_else(cond, body, Command::skip()), regs, dom);
    REQUIRE(taken.size() == 1);
    REQUIRE(taken[0].label.kind == ExtAction::Kind::Tau);
    REQUIRE(command_equal(*taken[0].next, *body));

    regs[0] = 0;
    auto skipped = local_steps(Command::if_then_else(cond, body, Command::skip()), regs, dom);
    REQUIRE(skipped[0].next->kind == Command::Kind::Skip);

    auto w = Command::while_do(cond, body);
    auto exit = local_steps(w, regs, dom);
    REQUIRE(exit[0].next->kind == Command::Kind::Skip);
    regs[0] = 1;
    auto unroll = local_steps(w, regs, dom);
    REQUIRE(unroll[0].next->kind == Command::Kind::Seq);
    REQUIRE(command_equal(*unroll[0].next->left, *body));
    REQUIRE(command_equal(*unroll[0].next->right, *w));
}

TEST_CASE("thread steps lift the local relation pointwise") {
    Program p = mp();
    RegFile regs(2, 0);

    SECTION("first step of the writer thread") {
        auto steps = thread_steps(p.threads, regs, 0, p.sig.dom);
        REQUIRE(steps.size() == 1);
        REQUIRE(steps[0].label.act == Action::write(0, 1));
        REQUIRE(command_equal(*steps[0].next_residue[1], *p.threads[1]));  // other untouched
    }
    SECTION("a finished thread has no steps") {
        std::vector<CommandPtr> residue{Command::skip(), Command::skip()};
        REQUIRE(thread_steps(residue, regs, 0, p.sig.dom).empty());
    }
    SECTION("fence litmus: after the first write the fence is next") {
        Program q = mp_fence();
        auto first = thread_steps(q.threads, regs, 0, q.sig.dom);
        REQUIRE(first.size() == 1);
        // skip; (fnc; y:=1) reduces by the silent seq step first
        auto mid = thread_steps(first[0].next_residue, first[0].next_regs, 0, q.sig.dom);
        REQUIRE(mid.size() == 1);
        REQUIRE(mid[0].label.kind == ExtAction::Kind::Tau);
        auto after = thread_steps(mid[0].next_residue, mid[0].next_regs, 0, q.sig.dom);
        REQUIRE(after.size() == 1);
        REQUIRE(after[0].label.act == Action::fence());
    }
    SECTION("unknown thread ids are rejected") {
        REQUIRE_THROWS_AS(thread_steps(p.threads, regs, 7, p.sig.dom), SemanticsError);
    }
}

TEST_CASE("loop-free commands terminate under any step choice") {
    // The AST size measure strictly decreases along every local step, so
    // repeatedly stepping a loop-free command reaches skip.
    for (unsigned seed = 1; seed <= 20; ++seed) {
        Program p = generate_program(seed);
        RegFile regs(p.sig.nregisters(), 0);
        for (int t = 0; t < p.sig.nthreads; ++t) {
            auto cur = p.threads[t];
            int guard = 0;
            while (cur->kind != Command::Kind::Skip) {
                auto steps = local_steps(cur, regs, p.sig.dom);
                REQUIRE_FALSE(steps.empty());
                REQUIRE(command_size(*steps[0].next) < command_size(*cur));
                regs = steps[0].next_regs;
                cur = steps[0].next;
                REQUIRE(++guard < 1000);
            }
        }
    }
}
