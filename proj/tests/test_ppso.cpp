#include <catch2/catch_amalgamated.hpp>

#include "psocheck/explore.hpp"
#include "psocheck/parser.hpp"
#include "psocheck/ppso.hpp"

#include "test_support.hpp"

using namespace psocheck;

namespace {

Signature two_by_two() { return parse_litmus(testsupport::kMpSource).sig; }

PpsoState state_of(const Signature& sig,
                   std::vector<std::tuple<int, int, Val, int>> entries,  // (t, x, v, rank)
                   std::vector<Val> mem = {}) {
    PpsoSemantics sem(sig);
    PpsoState s = sem.initial();
    if (!mem.empty()) s.mem = std::move(mem);
    for (auto [t, x, v, q] : entries) s.buf[sig.buf_index(t, x)].push_back({v, q});
    return s;
}

} // namespace

TEST_CASE("writes enumerate every admissible stamp position") {
    Signature sig = two_by_two();
    PpsoSemantics sem(sig);
    PpsoState init = sem.initial();

    SECTION("first write has a single position") {
        auto succ = pp_write(sig, init, 0, 0, 1);
        REQUIRE(succ.size() == 1);
        REQUIRE(succ[0].buf[sig.buf_index(0, 0)] == std::vector<StampedVal>{{1, 1}});
    }
    SECTION("second write to another variable branches below or above") {
        auto after_x = pp_write(sig, init, 0, 0, 1)[0];
        auto succ = pp_write(sig, after_x, 0, 1, 1);
        REQUIRE(succ.size() == 2);
        // one branch stamps y below x: this is the choice that defeats message passing
        PpsoState below = state_of(sig, {{0, 0, 1, 2}, {0, 1, 1, 1}});
        PpsoState above = state_of(sig, {{0, 0, 1, 1}, {0, 1, 1, 2}});
        REQUIRE(std::find(succ.begin(), succ.end(), below) != succ.end());
        REQUIRE(std::find(succ.begin(), succ.end(), above) != succ.end());
    }
    SECTION("own buffer entries floor the fresh stamp") {
        // two pending entries elsewhere, own x-buffer empty: three positions
        PpsoState s = state_of(sig, {{1, 0, 1, 1}, {1, 1, 0, 2}});
        REQUIRE(pp_write(sig, s, 0, 0, 1).size() == 3);
        // entry in the own buffer: only positions above it remain
        PpsoState own = state_of(sig, {{0, 0, 0, 1}, {1, 1, 0, 2}});
        REQUIRE(pp_write(sig, own, 0, 0, 1).size() == 2);
    }
}

TEST_CASE("flush obeys the global stamp order") {
    Signature sig = two_by_two();
    SECTION("only the globally minimal stamp flushes") {
        PpsoState s = state_of(sig, {{0, 0, 1, 2}, {0, 1, 1, 1}});
        REQUIRE_FALSE(pp_flush(sig, s, 0, 0));  // x is stamped above y
        auto n = pp_flush(sig, s, 0, 1);
        REQUIRE(n);
        REQUIRE(n->mem[1] == 1);
        // ranks renormalize back to 1..n
        REQUIRE(n->buf[sig.buf_index(0, 0)] == std::vector<StampedVal>{{1, 1}});
    }
    SECTION("a single pending entry always flushes") {
        PpsoState s = state_of(sig, {{1, 1, 0, 1}});
        REQUIRE(pp_flush(sig, s, 1, 1));
    }
    SECTION("empty buffers cannot flush") {
        PpsoSemantics sem(sig);
        REQUIRE_FALSE(pp_flush(sig, sem.initial(), 0, 0));
    }
    SECTION("at most one flush is enabled anywhere") {
        PpsoSemantics sem(sig);
        Program p = parse_litmus(testsupport::kMpSource);
        auto r = reach(make_ppso(p), p, {});
        for (const auto& s : r.mem_states) {
            int enabled = 0;
            for (int t = 0; t < sig.nthreads; ++t)
                for (int x = 0; x < sig.nglobals(); ++x)
                    if (pp_flush(sig, s, t, x)) ++enabled;
            REQUIRE(enabled == (s.pending() == 0 ? 0 : 1));
        }
    }
}

TEST_CASE("reads and fences mirror the plain machine over stamped buffers") {
    Signature sig = two_by_two();
    PpsoSemantics sem(sig);
    PpsoState init = sem.initial();

    REQUIRE(sem.action_step(init, 0, Action::fence()) == std::vector<PpsoState>{init});

    // reading the last entry of the own buffer
    PpsoState s = state_of(sig, {{0, 0, 1, 1}});
    REQUIRE(pp_read_value(sig, s, 0, 0) == 1);
    REQUIRE(sem.action_step(s, 0, Action::read(0, 0, 1)) == std::vector<PpsoState>{s});
    // a stale read of the other thread succeeds while the write is unflushed
    REQUIRE(pp_read_value(sig, s, 1, 0) == 0);
    REQUIRE(sem.action_step(s, 1, Action::read(0, 1, 0)) == std::vector<PpsoState>{s});
    // fences block on pending buffers
    REQUIRE(sem.action_step(s, 0, Action::fence()).empty());
    REQUIRE_FALSE(sem.action_step(s, 1, Action::fence()).empty());
}

TEST_CASE("transitions force the prophesied flush order") {
    Signature sig = two_by_two();
    PpsoSemantics sem(sig);
    // x stamped above y: a read of y = 1 by thread 2 can fire only after y
    // flushed, and x stays pending in every successor
    PpsoState s = state_of(sig, {{0, 0, 1, 2}, {0, 1, 1, 1}});
    auto succ = transition_successors(sem, s, 1, Action::read(1, 1, 1));
    REQUIRE_FALSE(succ.empty());
    bool x_still_pending = false;
    for (const auto& n : succ) {
        REQUIRE(n.mem[1] == 1);  // the read happened after y flushed
        if (!n.buf[sig.buf_index(0, 0)].empty()) x_still_pending = true;
    }
    // the y-write flushes first, so the reader can observe y = 1 while the
    // x-write is still buffered
    REQUIRE(x_still_pending);
    // fence from the initial state relates it to itself
    auto id = transition_successors(sem, sem.initial(), 0, Action::fence());
    REQUIRE(id == std::vector<PpsoState>{sem.initial()});
}

TEST_CASE("view maximality") {
    Signature sig = two_by_two();
    PpsoSemantics sem(sig);
    auto acts = action_universe(sig);

    SECTION("initial state is maximal for every thread and action") {
        for (int t = 0; t < sig.nthreads; ++t)
            for (const auto& a : acts) REQUIRE(vmax(sig, sem.initial(), t, a));
    }
    SECTION("a pending own write is maximal for the writer, not the reader") {
        PpsoState s = state_of(sig, {{0, 0, 1, 1}});
        REQUIRE(vmax(sig, s, 0, Action::write(0, 1)));
        REQUIRE_FALSE(vmax(sig, s, 1, Action::read(0, 0, 1)));
        REQUIRE_FALSE(vmax(sig, s, 1, Action::write(0, 0)));
    }
    SECTION("pending writes on another variable do not matter") {
        PpsoState s = state_of(sig, {{0, 1, 1, 1}});  // y only
        for (int t = 0; t < sig.nthreads; ++t) {
            REQUIRE(vmax(sig, s, t, Action::write(0, 0)));
            REQUIRE(vmax(sig, s, t, Action::read(0, 0, 1)));
        }
    }
    SECTION("fence actions see the whole universe as maximal") {
        PpsoState s = state_of(sig, {{0, 0, 1, 1}});
        for (int t = 0; t < sig.nthreads; ++t) REQUIRE(vmax(sig, s, t, Action::fence()));
    }
}

TEST_CASE("interference successors") {
    Signature sig = two_by_two();
    PpsoSemantics sem(sig);
    PpsoState init = sem.initial();

    SECTION("reads and fences interfere as the identity") {
        REQUIRE(interf_successors(sem, init, 0, Action::read(0, 0, 0)) ==
                std::vector<PpsoState>{init});
        PpsoState s = state_of(sig, {{0, 0, 1, 1}});
        REQUIRE(interf_successors(sem, s, 1, Action::fence()) == std::vector<PpsoState>{s});
    }
    SECTION("writes compose the transition with trailing flushes") {
        auto succ = interf_successors(sem, init, 0, Action::write(0, 1));
        PpsoState buffered = state_of(sig, {{0, 0, 1, 1}});
        PpsoState flushed = sem.initial();
        flushed.mem[0] = 1;
        REQUIRE(std::find(succ.begin(), succ.end(), buffered) != succ.end());
        REQUIRE(std::find(succ.begin(), succ.end(), flushed) != succ.end());
    }
}

TEST_CASE("erasing stamps keeps values and order") {
    Signature sig = two_by_two();
    PpsoSemantics sem(sig);
    REQUIRE(erase_stamps(sem.initial()) == PsoSemantics(sig).initial());

    PpsoState s = state_of(sig, {{0, 0, 1, 2}});
    REQUIRE(erase_stamps(s).buf[sig.buf_index(0, 0)] == std::vector<Val>{1});

    PpsoState two = state_of(sig, {{0, 0, 1, 1}, {0, 0, 0, 3}, {1, 1, 1, 2}});
    auto e = erase_stamps(two);
    REQUIRE(e.buf[sig.buf_index(0, 0)] == std::vector<Val>{1, 0});
    REQUIRE(e.buf[sig.buf_index(1, 1)] == std::vector<Val>{1});
}

TEST_CASE("canonical form") {
    Signature sig = two_by_two();
    SECTION("renormalizing is idempotent") {
        PpsoState sparse = state_of(sig, {{0, 0, 1, 7}, {1, 1, 0, 3}});
        auto once = canonicalize(sparse);
        REQUIRE(once == canonicalize(once));
        REQUIRE(once == state_of(sig, {{0, 0, 1, 2}, {1, 1, 0, 1}}));
    }
    SECTION("equal relative order means equal canonical states") {
        PpsoState a = canonicalize(state_of(sig, {{0, 0, 1, 10}, {1, 0, 1, 20}}));
        PpsoState b = canonicalize(state_of(sig, {{0, 0, 1, 2}, {1, 0, 1, 5}}));
        REQUIRE(a == b);
    }
}

TEST_CASE("explored states satisfy the stamp invariants") {
    for (const char* name : {"mp.litmus", "mp-fence.litmus", "sb.litmus"}) {
        Program p = testsupport::load_litmus(name);
        auto sem = make_ppso(p);
        auto r = reach(sem, p, {});
        REQUIRE(r.complete);
        for (const auto& s : r.mem_states) {
            // in-buffer stamps increase and the rank set is exactly 1..n
            std::vector<int> ranks;
            for (const auto& b : s.buf) {
                for (std::size_t i = 0; i + 1 < b.size(); ++i) REQUIRE(b[i].rank < b[i + 1].rank);
                for (const auto& e : b) ranks.push_back(e.rank);
            }
            std::sort(ranks.begin(), ranks.end());
            for (int i = 0; i < (int)ranks.size(); ++i) REQUIRE(ranks[i] == i + 1);
        }
    }
}
