#include <catch2/catch_amalgamated.hpp>

#include "psocheck/equiv.hpp"
#include "psocheck/parser.hpp"
#include "psocheck/program_gen.hpp"

#include "test_support.hpp"

using namespace psocheck;

TEST_CASE("plain and timestamped machines are trace equivalent on the litmus corpus") {
    for (const char* name : {"mp.litmus", "mp-fence.litmus", "sb.litmus", "empty.litmus"}) {
        auto p = testsupport::load_litmus(name);
        auto r = trace_equiv(p);
        INFO(name);
        REQUIRE(r.verdict == TraceEquivResult::Verdict::Equivalent);
    }
}

TEST_CASE("the fault-injected plain machine is distinguishable") {
    // With own-buffer forwarding broken, a thread can read the stale value of
    // its own unflushed write; the timestamped machine never produces that trace.
    Program p = parse_litmus("vals: 0..1\nglobals: x\nthread 1:\n  x := 1; r := x;\n");
    auto ok = trace_equiv(p);
    REQUIRE(ok.verdict == TraceEquivResult::Verdict::Equivalent);
    auto bad = trace_equiv(p, 10000, /*mutant=*/true);
    REQUIRE(bad.verdict == TraceEquivResult::Verdict::Different);
    REQUIRE(bad.distinguishing);
    Trace stale{Action::write(0, 1), Action::read(0, 0, 0)};
    REQUIRE(*bad.distinguishing == stale);
    REQUIRE(bad.side == "pso-only");
}

TEST_CASE("forward simulation holds on explored spaces") {
    for (const char* name : {"mp.litmus", "mp-fence.litmus"}) {
        auto p = testsupport::load_litmus(name);
        auto r = check_forward_sim(p);
        INFO(name << " " << r.detail);
        REQUIRE(r.holds);
        REQUIRE(r.checked > 0);
    }
}

TEST_CASE("forward simulation: single-write program, successor by direct construction") {
    Program p = parse_litmus("vals: 0..1\nglobals: x\nthread 1:\n  x := 1;\n");
    // oracle: the erased successor of the only timestamped transition is exactly
    // the plain write successor
    PpsoSemantics ppso = make_ppso(p);
    PsoSemantics pso = make_pso(p);
    auto w = pp_write(p.sig, ppso.initial(), 0, 0, 1);
    REQUIRE(w.size() == 1);
    auto direct = pso.action_step(pso.initial(), 0, Action::write(0, 1));
    REQUIRE(erase_stamps(w[0]) == direct[0]);
    REQUIRE(check_forward_sim(p).holds);
}

TEST_CASE("backward simulation holds on explored spaces") {
    for (const char* name : {"mp.litmus", "mp-fence.litmus", "empty.litmus"}) {
        auto p = testsupport::load_litmus(name);
        auto r = check_backward_sim(p);
        INFO(name << " " << r.detail);
        REQUIRE(r.holds);
    }
}

TEST_CASE("simulations hold on random loop-free programs") {
    for (unsigned seed = 100; seed < 110; ++seed) {
        Program p = generate_program(seed);
        INFO("seed " << seed);
        REQUIRE(check_forward_sim(p).holds);
        REQUIRE(check_backward_sim(p).holds);
    }
}

TEST_CASE("the stamp freshness invariant holds in every reachable state") {
    for (const char* name : {"mp.litmus", "mp-fence.litmus", "sb.litmus"}) {
        auto p = testsupport::load_litmus(name);
        auto r = check_freshness_invariant(p);
        INFO(name);
        REQUIRE(r.holds);
        REQUIRE(r.states_checked > 0);
    }
}

TEST_CASE("a hand-built duplicate stamp violates freshness") {
    Program p = testsupport::load_litmus("mp.litmus");
    PpsoState bad = make_ppso(p).initial();
    bad.buf[p.sig.buf_index(0, 0)].push_back({1, 1});
    bad.buf[p.sig.buf_index(0, 1)].push_back({1, 1});  // same stamp elsewhere
    REQUIRE_FALSE(freshness_invariant_holds(p.sig, bad));

    PpsoState decreasing = make_ppso(p).initial();
    decreasing.buf[p.sig.buf_index(0, 0)] = {{1, 2}, {0, 1}};  // stamps must increase
    REQUIRE_FALSE(freshness_invariant_holds(p.sig, decreasing));
}

TEST_CASE("erasure and the simulation relations are mutually converse") {
    Program p = testsupport::load_litmus("mp.litmus");
    auto rq = reach(make_ppso(p), p, {});
    auto rp = reach(make_pso(p), p, {});

    // F pairs (timestamped, erased); B is its converse by definition. Checked
    // here as: erasure maps the explored timestamped states onto exactly the
    // explored plain states.
    std::set<PsoState> erased;
    for (const auto& s : rq.mem_states) erased.insert(erase_stamps(s));
    std::set<PsoState> plain(rp.mem_states.begin(), rp.mem_states.end());
    REQUIRE(erased == plain);
}
