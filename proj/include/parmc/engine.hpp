#pragma once

// SPMD exploration engine.
//
// Forward pass: `workers` identical loops over private LIFO stacks with
// round-robin batch stealing. Each state is interned once, evaluated once
// (at pop) and expanded according to the task kind. Cleared states are
// pushed onto per-worker seed stacks that the backward pass consumes.
//
// Backward pass, reverse-graph variant: fully concurrent propagation over
// the stored reverse edges. Reverse-parental-graph variant: alternating
// clearing and collecting phases separated by global barriers; collecting
// scans only states the worker owns and recomputes successors to test
// clearability.
//
// Shared effects go through the store's atomic labels, a global outstanding
// counter for termination detection and a write-once outcome cell for early
// termination.

#include "parmc/checker.hpp"
#include "parmc/formula.hpp"
#include "parmc/model.hpp"
#include "parmc/store.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace parmc {

// Per-worker work stacks with batch stealing.
class WorkStacks {
public:
    static constexpr std::size_t kStealBatch = 64;

    explicit WorkStacks(unsigned workers) : lanes_(workers), next_victim_(workers, 0) {
        for (unsigned w = 0; w < workers; ++w) next_victim_[w] = (w + 1) % workers;
    }

    void push(unsigned w, StateId id) {
        std::lock_guard<std::mutex> g(lanes_[w].m);
        lanes_[w].items.push_back(id);
    }

    bool pop(unsigned w, StateId& out) {
        std::lock_guard<std::mutex> g(lanes_[w].m);
        if (lanes_[w].items.empty()) return false;
        out = lanes_[w].items.back();
        lanes_[w].items.pop_back();
        return true;
    }

    // Transfers up to kStealBatch items from the next victim (round-robin)
    // into the thief's stack. Returns the number of items moved.
    std::size_t steal(unsigned thief);

    std::size_t size(unsigned w) const {
        std::lock_guard<std::mutex> g(lanes_[w].m);
        return lanes_[w].items.size();
    }

    std::uint64_t total_size() const {
        std::uint64_t n = 0;
        for (unsigned w = 0; w < lanes_.size(); ++w) n += size(w);
        return n;
    }

    unsigned workers() const { return static_cast<unsigned>(lanes_.size()); }

private:
    struct alignas(64) Lane {
        mutable std::mutex m;
        std::vector<StateId> items;
    };
    std::vector<Lane> lanes_;
    std::vector<unsigned> next_victim_;
};

// One full check run: owns the store, the stacks and the worker pool.
// Exposed (rather than hidden behind check()) so tests can drive the phases
// separately and inspect labels afterwards.
class CheckRun {
public:
    CheckRun(const Model& model, CheckTask task, CheckOptions opt);
    ~CheckRun();

    // Runs the forward pass. For AU returns false when a forward violation
    // ended the run; EU and leadsto always return true (the EU outcome is
    // picked up by finish()).
    bool run_forward();

    // Runs the backward pass (AU: root-cleared target; leadsto:
    // obligations-zero target). Returns the target outcome.
    bool run_backward();

    // Assembles the final verdict (negation applied, stats, witness).
    Verdict finish();

    // ── Introspection (tests, instrumentation) ──────────────────────────
    const StateStore& store() const { return *store_; }
    StateId root() const { return root_; }
    std::uint64_t seed_count() const { return seeds_->total_size(); }
    std::int64_t obligations() const { return obligations_.load(std::memory_order_acquire); }
    const CheckTask& task() const { return task_; }
    Stats stats_snapshot() const;

    // Discovery-parent chain from the initial state to `to`; every
    // consecutive pair is a real model transition.
    std::vector<StateId> witness_path(StateId to) const;

private:
    struct WorkerCtx;

    void run_workers(void (CheckRun::*fn)(unsigned));
    void forward_loop(unsigned w);
    void backward_rg_loop(unsigned w);
    void backward_rpg_loop(unsigned w);

    void process_forward(WorkerCtx& ctx, StateId id);
    void push_fresh(WorkerCtx& ctx);
    void process_eu(WorkerCtx& ctx, StateId id, std::span<const std::uint8_t> vec);
    void process_au(WorkerCtx& ctx, StateId id, std::span<const std::uint8_t> vec);
    void process_leadsto(WorkerCtx& ctx, StateId id, std::span<const std::uint8_t> vec);
    void process_backward_rg(WorkerCtx& ctx, StateId id);
    void process_backward_rpg_clear(WorkerCtx& ctx, StateId id);
    void collect_scan(WorkerCtx& ctx);
    bool test_cleared(WorkerCtx& ctx, StateId id);

    void clear_state(WorkerCtx& ctx, StateId id, bool obligation, bool backward);
    bool set_outcome(bool value, Reason reason, StateId at);
    bool outcome_ready() const { return outcome_flag_.load(std::memory_order_acquire) == 2; }
    bool stop_requested() const {
        return aborted_.load(std::memory_order_acquire) ||
               (opt_.early_stop && outcome_flag_.load(std::memory_order_acquire) != 0);
    }
    void check_deadline();

    const Model& model_;
    CheckTask task_;
    CheckOptions opt_;
    std::unique_ptr<StateStore> store_;
    CompiledPred psi_, phi_;
    bool psi_const_true_ = false;

    std::unique_ptr<WorkStacks> work_;    // forward frontier
    std::unique_ptr<WorkStacks> seeds_;   // cleared states (backward work)

    StateId root_ = kNoState;
    alignas(64) std::atomic<std::int64_t> outstanding_{0};
    alignas(64) std::atomic<std::int64_t> obligations_{0};
    alignas(64) std::atomic<std::uint64_t> round_pushes_{0};
    std::atomic<std::uint64_t> collect_rounds_{0};

    // Write-once outcome: 0 empty, 1 claimed, 2 published.
    std::atomic<int> outcome_flag_{0};
    struct Outcome {
        bool value;
        Reason reason;
        StateId at;
    } outcome_{};

    std::atomic<bool> aborted_{false};
    std::mutex error_mutex_;
    std::exception_ptr error_;
    std::chrono::steady_clock::time_point deadline_{};
    bool has_deadline_ = false;
    std::unique_ptr<std::barrier<>> rpg_barrier_;
    bool rpg_stop_ = false;   // written by worker 0 between barriers only

    std::vector<WorkerCtx> ctxs_;
};

}   // namespace parmc
