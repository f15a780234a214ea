#pragma once

// Sequential reference checker: global fixpoint labeling on explicit
// models, plus a seeded random-model generator for property-based testing.
//
// Dead-state convention (matches the parallel engine): A(psi U phi) is
// false when a reachable psi-and-not-phi state has no successors — the
// finite maximal path through it never reaches phi.

#include "parmc/formula.hpp"
#include "parmc/model.hpp"

#include <cstdint>

namespace parmc {

// Verdict of `f` at the initial state of `m`.
bool oracle_check(const ExplicitModel& m, const Formula& f);
bool oracle_check_task(const ExplicitModel& m, const CheckTask& t);

// Reproducible random graph: out-degrees uniform in 0..max_out_degree
// (dead states included on purpose), distinct targets, each (state, prop)
// label set independently with probability p_label.
ExplicitModel random_model(std::uint64_t seed, std::size_t n_states,
                           unsigned max_out_degree, unsigned n_props, double p_label);

// Enumerates the full reachable graph of `model` into an explicit form
// (test utility; throws ModelError beyond `max_states`).
ExplicitModel enumerate_model(const Model& model, std::size_t max_states);

}   // namespace parmc
