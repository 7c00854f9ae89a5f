// Command-line front end: run litmus tests under either machine, compare trace
// sets, check the axiom hierarchy, validate proof outlines, and exercise the
// simulation and wlp-law checks. Text output is for people, JSON for tools.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "psocheck/axioms.hpp"
#include "psocheck/equiv.hpp"
#include "psocheck/explore.hpp"
#include "psocheck/parser.hpp"
#include "psocheck/proof.hpp"

using nlohmann::json;
using namespace psocheck;

namespace {

constexpr int kSchemaVersion = 1;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParseError = 2;
constexpr int kExitIncomplete = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int worker_count() {
    if (const char* env = std::getenv("PSO_LITMUS_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)hw : 1;
}

std::string regs_to_string(const RegFile& regs, const Signature& sig) {
    std::string out = "(";
    for (int r = 0; r < sig.nregisters(); ++r)
        out += (r ? ", " : "") + sig.registers[r] + "=" + std::to_string(regs[r]);
    return out + ")";
}

json outcome_to_json(const Outcome& o, const Signature& sig) {
    json regs = json::object();
    for (int r = 0; r < sig.nregisters(); ++r) regs[sig.registers[r]] = o.regs[r];
    json witness = json::array();
    for (const auto& [t, label] : o.witness)
        witness.push_back({{"thread", t + 1}, {"label", to_string(label, sig)}});
    return {{"registers", regs}, {"buffers_empty", o.buffers_empty}, {"witness", witness}};
}

json trace_to_json(const Trace& tr, const Signature& sig) {
    json arr = json::array();
    for (const auto& a : tr) arr.push_back(to_string(a, sig));
    return arr;
}

struct RunFlags {
    std::string model = "pso";
    int depth = 10000;
    std::string format = "text";
    unsigned seed = 0;
    int pending_cap = -2;
};

template <class Sem>
int run_with(const Sem& sem, const Program& p, const RunFlags& flags, bool outcomes_only) {
    auto r = reach(sem, p, {flags.depth, 4'000'000, flags.seed});
    auto outs = final_outcomes(sem, r);
    auto post = check_postcondition(sem, p, r);

    if (flags.format == "json") {
        json j{{"schema", kSchemaVersion},
               {"command", outcomes_only ? "outcomes" : "run"},
               {"name", p.name},
               {"model", flags.model},
               {"complete", r.complete},
               {"configs", (long)r.configs.size()},
               {"outcomes", json::array()}};
        for (const auto& o : outs) j["outcomes"].push_back(outcome_to_json(o, p.sig));
        if (!outcomes_only) {
            j["postcondition"] = to_string(*p.post, p.sig);
            j["verdict"] = post.verdict == PostconditionResult::Verdict::Holds  ? "holds"
                           : post.verdict == PostconditionResult::Verdict::Fails ? "fails"
                                                                                 : "unknown";
            if (post.counterexample)
                j["counterexample"] = outcome_to_json(*post.counterexample, p.sig);
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (p.name.empty() ? "litmus" : p.name) << " under " << flags.model << ": "
                  << outs.size() << " outcome(s), " << r.configs.size() << " configuration(s)"
                  << (r.complete ? "" : " [incomplete]") << "\n";
        for (const auto& o : outs) {
            std::cout << "  " << regs_to_string(o.regs, p.sig)
                      << (o.buffers_empty ? "" : "  [pending writes in buffers]") << "\n";
        }
        if (!outcomes_only) {
            std::cout << "post " << to_string(*p.post, p.sig) << ": ";
            switch (post.verdict) {
            case PostconditionResult::Verdict::Holds: std::cout << "holds\n"; break;
            case PostconditionResult::Verdict::Fails:
                std::cout << "fails at " << regs_to_string(post.counterexample->regs, p.sig)
                          << "\n";
                break;
            case PostconditionResult::Verdict::Unknown:
                std::cout << "unknown (exploration incomplete)\n";
                break;
            }
        }
    }
    if (!r.complete) return kExitIncomplete;
    if (!outcomes_only && post.verdict != PostconditionResult::Verdict::Holds)
        return kExitCheckFailed;
    return kExitOk;
}

int cmd_run(const std::string& file, const RunFlags& flags, bool outcomes_only) {
    Program p = parse_litmus(read_file(file));
    if (flags.model == "ppso")
        return run_with(make_ppso(p, flags.pending_cap), p, flags, outcomes_only);
    return run_with(make_pso(p), p, flags, outcomes_only);
}

int cmd_equiv(const std::string& file, int depth, const std::string& format, bool mutant) {
    Program p = parse_litmus(read_file(file));
    auto r = trace_equiv(p, depth, mutant);
    if (format == "json") {
        json j{{"schema", kSchemaVersion},
               {"command", "equiv"},
               {"name", p.name},
               {"verdict", r.verdict == TraceEquivResult::Verdict::Equivalent ? "trace-equivalent"
                           : r.verdict == TraceEquivResult::Verdict::Different ? "different"
                                                                               : "unknown"},
               {"traces", (long)r.trace_count}};
        if (r.distinguishing) {
            j["distinguishing"] = trace_to_json(*r.distinguishing, p.sig);
            j["admitted_by"] = r.side;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        switch (r.verdict) {
        case TraceEquivResult::Verdict::Equivalent:
            std::cout << (p.name.empty() ? "litmus" : p.name) << ": trace-equivalent ("
                      << r.trace_count << " traces)\n";
            break;
        case TraceEquivResult::Verdict::Different: {
            std::cout << (p.name.empty() ? "litmus" : p.name) << ": trace sets differ ("
                      << r.side << "):";
            for (const auto& a : *r.distinguishing) std::cout << " " << to_string(a, p.sig);
            std::cout << "\n";
            break;
        }
        case TraceEquivResult::Verdict::Unknown:
            std::cout << "unknown (exploration incomplete)\n";
            break;
        }
    }
    if (r.verdict == TraceEquivResult::Verdict::Unknown) return kExitIncomplete;
    return r.verdict == TraceEquivResult::Verdict::Equivalent ? kExitOk : kExitCheckFailed;
}

json axiom_report_to_json(const AxiomReport& rep, const AxiomUniverse& u) {
    json j{{"axiom", rep.axiom},
           {"level", rep.level},
           {"verdict", rep.pass ? "pass" : "fail"},
           {"millis", rep.millis}};
    if (rep.cex) {
        json c{{"state", to_string(u.states.states[rep.cex->sigma], u.sig())}};
        if (rep.cex->t >= 0) c["t"] = rep.cex->t + 1;
        if (rep.cex->t2 >= 0) c["t'"] = rep.cex->t2 + 1;
        if (rep.cex->a) c["a"] = to_string(*rep.cex->a, u.sig());
        if (rep.cex->b) c["b"] = to_string(*rep.cex->b, u.sig());
        if (rep.cex->aw) c["a_w"] = to_string(*rep.cex->aw, u.sig());
        if (rep.cex->ar) c["a_r"] = to_string(*rep.cex->ar, u.sig());
        if (!rep.cex->note.empty()) c["note"] = rep.cex->note;
        json w = json::array();
        for (const auto& [what, st] : rep.cex->witnesses)
            w.push_back({{"role", what}, {"state", to_string(u.states.states[st], u.sig())}});
        c["witnesses"] = w;
        j["counterexample"] = c;
    }
    return j;
}

int cmd_axioms(int threads, const std::vector<std::string>& globals, const std::string& vals,
               int cap, const std::string& format) {
    ValueDomain dom;
    if (std::sscanf(vals.c_str(), "%d..%d", &dom.lo, &dom.hi) != 2)
        throw std::runtime_error("bad --vals range, expected LO..HI");
    auto u = build_universe(threads, globals, dom, cap);

    // axiom checks are independent; run them on the worker pool
    int workers = std::max(1, std::min(worker_count(), (int)axiom_names().size()));
    std::vector<std::future<AxiomReport>> futs;
    std::atomic<std::size_t> next{0};
    auto names = axiom_names();
    std::vector<AxiomReport> reports(names.size());
    auto work = [&]() {
        for (std::size_t i = next.fetch_add(1); i < names.size(); i = next.fetch_add(1)) {
            auto t0 = std::chrono::steady_clock::now();
            auto rep = check_axiom(names[i], u);
            rep.millis =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
            reports[i] = std::move(rep);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    json universe_sig{{"threads", threads},
                      {"globals", globals},
                      {"vals", vals},
                      {"pending_cap", cap},
                      {"states", (long)u.states.size()}};
    if (format == "json") {
        json j{{"schema", kSchemaVersion},
               {"command", "axioms"},
               {"universe", universe_sig},
               {"sync", "all same-variable equal-value write/read pairs"},
               {"note", "bounded certification over the stated finite universe"},
               {"reports", json::array()}};
        for (const auto& rep : reports) j["reports"].push_back(axiom_report_to_json(rep, u));
        j["expected_profile"] = matches_expected_profile(reports);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "axiom universe: " << threads << " thread(s), " << globals.size()
                  << " global(s), vals " << vals << ", pending cap " << cap << " ("
                  << u.states.size() << " states)\n";
        for (const auto& rep : reports) {
            std::printf("  %-4s [%-11s] %s  (%.1f ms)\n", rep.axiom.c_str(), rep.level.c_str(),
                        rep.pass ? "pass" : "FAIL", rep.millis);
            if (rep.cex) {
                std::cout << "       at " << to_string(u.states.states[rep.cex->sigma], u.sig());
                if (rep.cex->aw) std::cout << "  a_w=" << to_string(*rep.cex->aw, u.sig());
                if (rep.cex->ar) std::cout << " a_r=" << to_string(*rep.cex->ar, u.sig());
                if (rep.cex->a) std::cout << " a=" << to_string(*rep.cex->a, u.sig());
                if (rep.cex->b) std::cout << " b=" << to_string(*rep.cex->b, u.sig());
                std::cout << "\n";
                for (const auto& [what, st] : rep.cex->witnesses)
                    std::cout << "       " << what << ": "
                              << to_string(u.states.states[st], u.sig()) << "\n";
            }
        }
        std::cout << (matches_expected_profile(reports)
                          ? "profile: all pass except MsgPassing (as instantiated)\n"
                          : "profile: UNEXPECTED\n");
    }
    return matches_expected_profile(reports) ? kExitOk : kExitCheckFailed;
}

int cmd_prove(const std::string& file, const std::string& universe_spec,
              const std::string& format) {
    ProofOutline o = parse_outline(read_file(file));
    ProofUniverseOptions opt;
    if (universe_spec.rfind("cap:", 0) == 0) {
        opt.kind = ProofUniverseOptions::Kind::PendingCap;
        opt.pending_cap = std::atoi(universe_spec.c_str() + 4);
    } else if (universe_spec != "reachable") {
        throw std::runtime_error("bad --universe, expected 'reachable' or 'cap:N'");
    }
    auto u = build_proof_universe(o.program, opt);
    auto rep = check_outline(o, u);

    if (format == "json") {
        json j{{"schema", kSchemaVersion},
               {"command", "prove"},
               {"name", o.program.name},
               {"universe", universe_spec},
               {"universe_states", (long)u.states.size()},
               {"triples_checked", rep.triples_checked},
               {"valid", rep.valid}};
        if (rep.failure) {
            json f{{"kind", rep.failure->kind == ProofFailure::Kind::Local ? "local"
                            : rep.failure->kind == ProofFailure::Kind::Interference
                                ? "interference"
                            : rep.failure->kind == ProofFailure::Kind::Init ? "init"
                                                                            : "final"},
                   {"triple", rep.failure->triple}};
            if (rep.failure->thread >= 0) f["thread"] = rep.failure->thread + 1;
            if (rep.failure->atom >= 0) f["statement"] = rep.failure->atom + 1;
            if (rep.failure->assert_thread >= 0)
                f["assertion_thread"] = rep.failure->assert_thread + 1;
            if (rep.failure->result.witness)
                f["witness_regs"] = regs_to_string(rep.failure->result.witness->regs,
                                                   o.program.sig);
            if (rep.failure->result.witness)
                f["witness_state"] = to_string(rep.failure->result.witness->mem, o.program.sig);
            if (rep.failure->result.bad_successor)
                f["violating_successor"] =
                    to_string(rep.failure->result.bad_successor->mem, o.program.sig);
            j["failure"] = f;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (o.program.name.empty() ? "outline" : o.program.name) << ": "
                  << (rep.valid ? "valid" : "INVALID") << " (universe " << universe_spec << ", "
                  << u.states.size() << " states, " << rep.triples_checked << " triples)\n";
        if (rep.failure) {
            std::cout << "  failing " << rep.failure->triple << "\n";
            if (rep.failure->result.witness)
                std::cout << "  at " << regs_to_string(rep.failure->result.witness->regs,
                                                       o.program.sig)
                          << " " << to_string(rep.failure->result.witness->mem, o.program.sig)
                          << "\n";
            if (rep.failure->result.bad_successor)
                std::cout << "  successor "
                          << to_string(rep.failure->result.bad_successor->mem, o.program.sig)
                          << " violates the post-assertion\n";
        }
    }
    return rep.valid ? kExitOk : kExitCheckFailed;
}

int cmd_check_sim(const std::string& file, const std::string& direction, int depth,
                  const std::string& format) {
    Program p = parse_litmus(read_file(file));
    json j{{"schema", kSchemaVersion}, {"command", "check-sim"}, {"name", p.name}};
    bool ok = true;
    std::string text;
    if (direction == "forward" || direction == "both") {
        auto r = check_forward_sim(p, depth);
        ok = ok && r.holds;
        j["forward"] = {{"holds", r.holds}, {"checked", r.checked}, {"detail", r.detail}};
        text += "forward simulation (timestamped -> plain): " +
                std::string(r.holds ? "holds" : "FAILS " + r.detail) + " (" +
                std::to_string(r.checked) + " transitions)\n";
    }
    if (direction == "backward" || direction == "both") {
        auto r = check_backward_sim(p, depth);
        ok = ok && r.holds;
        j["backward"] = {{"holds", r.holds}, {"checked", r.checked}, {"detail", r.detail}};
        text += "backward simulation (plain -> timestamped): " +
                std::string(r.holds ? "holds" : "FAILS " + r.detail) + " (" +
                std::to_string(r.checked) + " obligations)\n";
    }
    auto fresh = check_freshness_invariant(p, depth);
    ok = ok && fresh.holds;
    j["freshness_invariant"] = {{"holds", fresh.holds}, {"states", fresh.states_checked}};
    text += "stamp freshness invariant: " + std::string(fresh.holds ? "holds" : "FAILS") + " (" +
            std::to_string(fresh.states_checked) + " states)\n";

    if (format == "json")
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_check_wlp_laws(int samples, int universe_size, unsigned seed, const std::string& format) {
    auto reports = check_wlp_laws(samples, universe_size, seed);
    bool all = true;
    for (const auto& r : reports) all = all && r.pass;
    bool reverse_witness = disjunctivity_reverse_fails_witness();
    if (format == "json") {
        json j{{"schema", kSchemaVersion},
               {"command", "check-wlp-laws"},
               {"samples", samples},
               {"universe_size", universe_size},
               {"laws", json::array()},
               {"disjunctivity_reverse_fails", reverse_witness}};
        for (const auto& r : reports)
            j["laws"].push_back({{"law", r.law}, {"verdict", r.pass ? "pass" : "fail"}});
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& r : reports)
            std::cout << "  " << r.law << ": " << (r.pass ? "pass" : "FAIL") << " ("
                      << r.samples << " samples)\n";
        std::cout << "  disjunctivity reverse inclusion: "
                  << (reverse_witness ? "refuted by witness (expected)" : "NOT refuted")
                  << "\n";
    }
    return all && reverse_witness ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"explicit-state litmus checking for store-buffer machines"};
    app.require_subcommand(1);

    RunFlags flags;
    std::string file;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("file", file, "litmus file")->required();
        cmd->add_option("--model", flags.model, "pso or ppso")
            ->check(CLI::IsMember({"pso", "ppso"}));
        cmd->add_option("--depth", flags.depth, "exploration depth bound");
        cmd->add_option("--format", flags.format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("--seed", flags.seed, "shuffle successor order (0 = off)");
        cmd->add_option("--pending-cap", flags.pending_cap,
                        "pending-entry cap for the timestamped machine");
    };

    auto* run = app.add_subcommand("run", "explore and check the postcondition");
    add_run_flags(run);
    auto* outcomes = app.add_subcommand("outcomes", "explore and list final register values");
    add_run_flags(outcomes);

    auto* equiv = app.add_subcommand("equiv", "compare plain and timestamped trace sets");
    int equiv_depth = 10000;
    std::string equiv_format = "text";
    bool equiv_mutant = false;
    equiv->add_option("file", file, "litmus file")->required();
    equiv->add_option("--depth", equiv_depth, "trace length bound");
    equiv->add_option("--format", equiv_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    equiv->add_flag("--mutant", equiv_mutant,
                    "fault-injection hook: break the plain machine's own-buffer reads");

    auto* axioms = app.add_subcommand("axioms", "check the axiom hierarchy on a finite universe");
    int ax_threads = 2, ax_cap = 2;
    std::vector<std::string> ax_globals = {"x", "y"};
    std::string ax_vals = "0..1", ax_format = "text";
    axioms->add_option("--threads", ax_threads, "thread count");
    axioms->add_option("--globals", ax_globals, "global variable names");
    axioms->add_option("--vals", ax_vals, "value range LO..HI");
    axioms->add_option("--cap", ax_cap, "max pending entries in the universe");
    axioms->add_option("--format", ax_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* prove = app.add_subcommand("prove", "validate an annotated proof outline");
    std::string universe_spec = "reachable", prove_format = "text";
    prove->add_option("file", file, "outline file")->required();
    prove->add_option("--universe", universe_spec, "reachable or cap:N");
    prove->add_option("--format", prove_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* checksim = app.add_subcommand("check-sim", "certify the simulations at desk scale");
    std::string direction = "both", sim_format = "text";
    int sim_depth = 10000;
    checksim->add_option("file", file, "litmus file")->required();
    checksim->add_option("--direction", direction, "forward, backward or both")
        ->check(CLI::IsMember({"forward", "backward", "both"}));
    checksim->add_option("--depth", sim_depth, "exploration depth bound");
    checksim->add_option("--format", sim_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* laws = app.add_subcommand("check-wlp-laws", "sample-check the wlp algebra");
    int law_samples = 1000, law_universe = 6;
    unsigned law_seed = 12345;
    std::string law_format = "text";
    laws->add_option("--samples", law_samples, "number of sampled relation/set tuples");
    laws->add_option("--universe-size", law_universe, "carrier size");
    laws->add_option("--seed", law_seed, "sampling seed");
    laws->add_option("--format", law_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(file, flags, false);
        if (outcomes->parsed()) return cmd_run(file, flags, true);
        if (equiv->parsed()) return cmd_equiv(file, equiv_depth, equiv_format, equiv_mutant);
        if (axioms->parsed()) return cmd_axioms(ax_threads, ax_globals, ax_vals, ax_cap, ax_format);
        if (prove->parsed()) return cmd_prove(file, universe_spec, prove_format);
        if (checksim->parsed()) return cmd_check_sim(file, direction, sim_depth, sim_format);
        if (laws->parsed()) return cmd_check_wlp_laws(law_samples, law_universe, law_seed,
                                                      law_format);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParseError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}
