#pragma once

// Orchestration layer: normalizes a formula, runs the forward pass, runs the
// backward pass when the operator requires one, applies result negation and
// assembles the verdict with run statistics.

#include "parmc/formula.hpp"
#include "parmc/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace parmc {

enum class Variant : std::uint8_t { RG, RPG };

enum class Reason : std::uint8_t {
    ForwardWitness,        // EU: a phi-state was reached
    ForwardViolation,      // AU: a state satisfying neither psi nor phi
    DeadState,             // AU: a psi-state with no successors
    RootCleared,           // AU backward: initial state cleared
    ObligationsCleared,    // leadsto backward: all psi-obligations cleared
    NoClearableLeaf,       // backward exhausted without meeting its target
    RegionExhausted,       // EU: constrained region explored, no phi-state
};

const char* reason_name(Reason r);

struct Stats {
    std::uint64_t states = 0;
    std::uint64_t forward_edges = 0;
    std::uint64_t reverse_edges_stored = 0;   // always 0 under RPG
    std::uint64_t parent_links_stored = 0;    // always 0 under RG
    std::uint64_t suc_decrements = 0;
    std::uint64_t collect_rounds = 0;
    std::uint64_t steals = 0;
    double forward_seconds = 0.0;
    double backward_seconds = 0.0;
    std::uint64_t peak_memory_estimate = 0;
};

struct Verdict {
    bool holds = false;
    Reason reason = Reason::RegionExhausted;
    Stats stats;
    // Forward-phase witness/violation path from the initial state, as state
    // vectors (present only when requested and applicable).
    std::vector<StateVector> witness;
};

struct CheckOptions {
    Variant variant = Variant::RG;
    unsigned workers = 1;
    unsigned table_bits = 22;
    bool early_stop = true;
    bool want_witness = false;
    double timeout_seconds = 0.0;   // 0 = none
};

struct TimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checks `formula` on `model` at the initial state. The verdict is a pure
// function of (model, formula); variant, worker count and schedule only
// affect the statistics.
Verdict check(const Model& model, const Formula& formula, const CheckOptions& opt);
Verdict check(const Model& model, const CheckTask& task, const CheckOptions& opt);

// Flat snake_case JSON object with every Stats field.
std::string stats_to_json(const Stats& s);

}   // namespace parmc
