#pragma once

// Internal to the engine translation units.

#include "parmc/engine.hpp"

namespace parmc {

struct CheckRun::WorkerCtx {
    unsigned id = 0;
    // Local counters merged into Stats after each phase.
    std::uint64_t edges = 0;
    std::uint64_t reverse_edges = 0;
    std::uint64_t parent_links = 0;
    std::uint64_t decrements = 0;
    std::uint64_t steals = 0;
    // Scratch buffers, reused across states.
    std::vector<StateVector> succs;
    std::vector<StateId> fresh;   // newly interned ids of one expansion
    LabelBits labels;
    LabelBits succ_labels;
    unsigned deadline_tick = 0;
};

}   // namespace parmc
