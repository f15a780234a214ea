#include "parmc/checker.hpp"

#include "parmc/engine.hpp"

#include <chrono>
#include <sstream>

namespace parmc {

const char* reason_name(Reason r) {
    switch (r) {
        case Reason::ForwardWitness: return "forward-witness";
        case Reason::ForwardViolation: return "forward-violation";
        case Reason::DeadState: return "dead-state";
        case Reason::RootCleared: return "root-cleared";
        case Reason::ObligationsCleared: return "obligations-cleared";
        case Reason::NoClearableLeaf: return "no-clearable-leaf";
        case Reason::RegionExhausted: return "region-exhausted";
    }
    return "unknown";
}

Verdict check(const Model& model, const CheckTask& task, const CheckOptions& opt) {
    using clock = std::chrono::steady_clock;
    CheckRun run(model, task, opt);

    auto t0 = clock::now();
    bool forward_ok = run.run_forward();
    auto t1 = clock::now();
    if (forward_ok && task.kind != TaskKind::EU) run.run_backward();
    auto t2 = clock::now();

    Verdict v = run.finish();
    v.stats.forward_seconds = std::chrono::duration<double>(t1 - t0).count();
    v.stats.backward_seconds = std::chrono::duration<double>(t2 - t1).count();
    return v;
}

Verdict check(const Model& model, const Formula& formula, const CheckOptions& opt) {
    return check(model, normalize(formula), opt);
}

std::string stats_to_json(const Stats& s) {
    std::ostringstream os;
    os.precision(9);
    os << "{";
    os << "\"states\":" << s.states;
    os << ",\"forward_edges\":" << s.forward_edges;
    os << ",\"reverse_edges_stored\":" << s.reverse_edges_stored;
    os << ",\"parent_links_stored\":" << s.parent_links_stored;
    os << ",\"suc_decrements\":" << s.suc_decrements;
    os << ",\"collect_rounds\":" << s.collect_rounds;
    os << ",\"steals\":" << s.steals;
    os << ",\"forward_seconds\":" << std::fixed << s.forward_seconds;
    os.unsetf(std::ios_base::floatfield);
    os << ",\"backward_seconds\":" << std::fixed << s.backward_seconds;
    os.unsetf(std::ios_base::floatfield);
    os << ",\"peak_memory_estimate\":" << s.peak_memory_estimate;
    os << "}";
    return os.str();
}

}   // namespace parmc
