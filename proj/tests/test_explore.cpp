#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "psocheck/explore.hpp"
#include "psocheck/parser.hpp"
#include "psocheck/program_gen.hpp"

#include "test_support.hpp"

using namespace psocheck;

namespace {

Program mp() { return parse_litmus(testsupport::kMpSource); }
Program mp_fence() { return parse_litmus(testsupport::kMpFenceSource); }

template <class Sem>
std::set<std::pair<Val, Val>> outcome_pairs(const Sem& sem, const Program& p,
                                            unsigned seed = 0) {
    auto r = reach(sem, p, {10000, 4'000'000, seed});
    REQUIRE(r.complete);
    std::set<std::pair<Val, Val>> set;
    for (const auto& o : final_outcomes(sem, r)) set.emplace(o.regs[0], o.regs[1]);
    return set;
}

} // namespace

TEST_CASE("combined steps join thread steps with memory transitions") {
    Program p = mp();
    PsoSemantics sem = make_pso(p);
    Config<PsoSemantics> init{p.threads, RegFile(2, 0), sem.initial()};

    SECTION("thread 2 can read y = 1 only once a flush or buffer makes it visible") {
        for (const auto& st : combined_steps(sem, init))
            if (st.thread == 1 && st.label.is_memory())
                REQUIRE(st.label.act.value == 0);  // nothing written yet: reads see 0
        // after thread 1 runs fully, the read of 1 appears among combined steps
        auto r = reach(sem, p, {});
        bool saw_read_one = false;
        for (const auto& tr : r.mem_transitions)
            if (tr.thread == 1 && tr.action == Action::read(1, 0, 1)) saw_read_one = true;
        REQUIRE(saw_read_one);
    }
    SECTION("terminal configs have no steps") {
        Config<PsoSemantics> done{{Command::skip(), Command::skip()}, RegFile(2, 0),
                                  sem.initial()};
        REQUIRE(done.terminal());
        REQUIRE(combined_steps(sem, done).empty());
    }
    SECTION("the fence only fires after the buffers drain (folded into T)") {
        Program q = mp_fence();
        PsoSemantics qsem = make_pso(q);
        auto r = reach(qsem, q, {});
        for (const auto& tr : r.mem_transitions)
            if (tr.action.is_fence())
                for (int x = 0; x < q.sig.nglobals(); ++x)
                    REQUIRE(tr.to.buf[q.sig.buf_index(0, x)].empty());
    }
}

TEST_CASE("reachability is a bounded exhaustive fixpoint") {
    Program p = mp();
    SECTION("the plain machine explores completely at depth 32") {
        PsoSemantics sem = make_pso(p);
        auto r = reach(sem, p, {32});
        REQUIRE(r.complete);
        REQUIRE(r.configs.size() > 0);
        // regression pin: the plain message-passing space
        REQUIRE(r.configs.size() == reach(sem, p, {}).configs.size());
    }
    SECTION("depth zero keeps only the initial config") {
        PsoSemantics sem = make_pso(p);
        auto r = reach(sem, p, {0});
        REQUIRE(r.configs.size() == 1);
        REQUIRE_FALSE(r.complete);
    }
    SECTION("exploration terminates without the bound for loop-free programs") {
        for (unsigned seed = 1; seed <= 10; ++seed) {
            Program q = generate_program(seed);
            auto r = reach(make_pso(q), q, {});
            REQUIRE(r.complete);
            REQUIRE(r.depth_reached < 10000);
        }
    }
    SECTION("loops hit the bound and report incompleteness") {
        Program q = parse_litmus(
            "vals: 0..1\nglobals: x\nthread 1:\n  while r = 0 do { x := 1; }\n");
        auto r = reach(make_pso(q), q, {50});
        REQUIRE_FALSE(r.complete);
    }
}

TEST_CASE("final outcomes of the message-passing litmus") {
    Program p = mp();
    SECTION("the plain machine allows all four register pairs, including (1,0)") {
        auto set = outcome_pairs(make_pso(p), p);
        REQUIRE(set == std::set<std::pair<Val, Val>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    }
    SECTION("the fence removes (1,0) under both machines") {
        Program q = mp_fence();
        auto pso_set = outcome_pairs(make_pso(q), q);
        auto ppso_set = outcome_pairs(make_ppso(q), q);
        REQUIRE(pso_set == ppso_set);
        REQUIRE(pso_set.count({1, 0}) == 0);
        REQUIRE(pso_set == std::set<std::pair<Val, Val>>{{0, 0}, {0, 1}, {1, 1}});
    }
    SECTION("a single read sees the initial memory") {
        Program q = parse_litmus("vals: 0..1\nglobals: x\nthread 1:\n  r := x;\n");
        PsoSemantics sem = make_pso(q);
        auto r = reach(sem, q, {});
        auto outs = final_outcomes(sem, r);
        REQUIRE(outs.size() == 1);
        REQUIRE(outs[0].regs == RegFile{0});
    }
}

TEST_CASE("witnesses replay to their outcome") {
    for (const char* name : {"mp.litmus", "mp-fence.litmus", "sb.litmus"}) {
        Program p = testsupport::load_litmus(name);
        PsoSemantics sem = make_pso(p);
        auto r = reach(sem, p, {});
        for (const auto& o : final_outcomes(sem, r)) {
            auto cfg = replay_witness(sem, p, o.witness);
            REQUIRE(cfg);
            REQUIRE(cfg->terminal());
            REQUIRE(cfg->regs == o.regs);
        }
    }
}

TEST_CASE("postcondition checking") {
    SECTION("the fence litmus satisfies its implication") {
        Program q = mp_fence();
        PsoSemantics sem = make_pso(q);
        auto r = reach(sem, q, {});
        REQUIRE(check_postcondition(sem, q, r).verdict == PostconditionResult::Verdict::Holds);
    }
    SECTION("the unfenced litmus violates it, witnessed by (1,0)") {
        Program p = mp();
        p.post = parse_litmus(testsupport::kMpFenceSource).post;  // r1 = 1 -> r2 = 1
        PsoSemantics sem = make_pso(p);
        auto r = reach(sem, p, {});
        auto res = check_postcondition(sem, p, r);
        REQUIRE(res.verdict == PostconditionResult::Verdict::Fails);
        REQUIRE(res.counterexample->regs == RegFile{1, 0});
    }
    SECTION("a trivially true postcondition holds") {
        Program p = mp();
        p.post = BoolExpr::constant(true);
        PsoSemantics sem = make_pso(p);
        auto r = reach(sem, p, {});
        REQUIRE(check_postcondition(sem, p, r).verdict == PostconditionResult::Verdict::Holds);
    }
    SECTION("incomplete exploration yields unknown, not a silent truncation") {
        Program p = mp();
        PsoSemantics sem = make_pso(p);
        auto r = reach(sem, p, {1});
        REQUIRE(check_postcondition(sem, p, r).verdict == PostconditionResult::Verdict::Unknown);
    }
}

TEST_CASE("trace sets") {
    SECTION("plain and timestamped machines agree on the message-passing traces") {
        Program p = mp();
        auto tp = traces(make_pso(p), p);
        auto tq = traces(make_ppso(p), p);
        REQUIRE(tp.complete);
        REQUIRE(tq.complete);
        REQUIRE(tp.traces == tq.traces);
        REQUIRE_FALSE(tp.traces.empty());
    }
    SECTION("a lone skip thread has just the empty trace") {
        Program p = parse_litmus("vals: 0..1\nglobals: x\nthread 1:\n  skip\n");
        auto t = traces(make_pso(p), p);
        REQUIRE(t.traces == TraceSet{{}});
    }
    SECTION("trace membership: the stale-read run of message passing") {
        Program p = mp();
        auto tp = traces(make_pso(p), p);
        Trace stale{Action::write(0, 1), Action::write(1, 1), Action::read(1, 0, 1),
                    Action::read(0, 1, 0)};
        REQUIRE(tp.traces.count(stale) == 1);
    }
}

TEST_CASE("results do not depend on successor enumeration order") {
    Program p = mp();
    SECTION("outcomes under shuffled exploration") {
        PsoSemantics sem = make_pso(p);
        REQUIRE(outcome_pairs(sem, p, 1) == outcome_pairs(sem, p, 2));
    }
    SECTION("config spaces under shuffled exploration") {
        PsoSemantics sem = make_pso(p);
        auto a = reach(sem, p, {10000, 4'000'000, 1});
        auto b = reach(sem, p, {10000, 4'000'000, 2});
        REQUIRE(a.configs.size() == b.configs.size());
        REQUIRE(a.mem_transitions.size() == b.mem_transitions.size());
    }
}
