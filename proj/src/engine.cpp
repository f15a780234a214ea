// Run lifecycle shared by the exploration and clearing phases: worker pool,
// outcome cell, termination bookkeeping and verdict assembly.

#include "parmc/engine.hpp"

#include "engine_impl.hpp"

#include <algorithm>
#include <cassert>
#include <thread>

namespace parmc {

CheckRun::CheckRun(const Model& model, CheckTask task, CheckOptions opt)
    : model_(model), task_(std::move(task)), opt_(opt) {
    if (opt_.workers == 0 || opt_.workers > kMaxWorkers)
        throw StoreError("worker count must be in 1.." + std::to_string(kMaxWorkers));
    psi_ = CompiledPred(task_.psi, model_.propositions());
    phi_ = CompiledPred(task_.phi, model_.propositions());
    psi_const_true_ = psi_.is_const_true();
    store_ = std::make_unique<StateStore>(opt_.workers, model_.state_width(), opt_.table_bits);
    work_ = std::make_unique<WorkStacks>(opt_.workers);
    seeds_ = std::make_unique<WorkStacks>(opt_.workers);
    ctxs_.resize(opt_.workers);
    for (unsigned w = 0; w < opt_.workers; ++w) {
        ctxs_[w].id = w;
        ctxs_[w].labels.resize_for(model_.propositions().size());
        ctxs_[w].succ_labels.resize_for(model_.propositions().size());
    }
    if (opt_.timeout_seconds > 0) {
        deadline_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(opt_.timeout_seconds));
        has_deadline_ = true;
    }
}

CheckRun::~CheckRun() = default;

void CheckRun::check_deadline() {
    if (has_deadline_ && std::chrono::steady_clock::now() > deadline_) {
        {
            std::lock_guard<std::mutex> g(error_mutex_);
            if (!error_)
                error_ = std::make_exception_ptr(TimeoutError("timeout exceeded"));
        }
        aborted_.store(true, std::memory_order_release);
    }
}

bool CheckRun::set_outcome(bool value, Reason reason, StateId at) {
    int expected = 0;
    if (!outcome_flag_.compare_exchange_strong(expected, 1, std::memory_order_acq_rel))
        return false;
    outcome_ = {value, reason, at};
    outcome_flag_.store(2, std::memory_order_release);
    return true;
}

void CheckRun::run_workers(void (CheckRun::*fn)(unsigned)) {
    std::vector<std::thread> pool;
    pool.reserve(opt_.workers);
    for (unsigned w = 0; w < opt_.workers; ++w) {
        pool.emplace_back([this, fn, w] {
            try {
                (this->*fn)(w);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> g(error_mutex_);
                    if (!error_) error_ = std::current_exception();
                }
                aborted_.store(true, std::memory_order_release);
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error_) std::rethrow_exception(error_);
}

// One outstanding-counter update per expansion instead of one per child.
void CheckRun::push_fresh(WorkerCtx& ctx) {
    if (ctx.fresh.empty()) return;
    outstanding_.fetch_add(static_cast<std::int64_t>(ctx.fresh.size()),
                           std::memory_order_acq_rel);
    for (StateId id : ctx.fresh) work_->push(ctx.id, id);
}

// Transitions a state to cleared exactly once: sets the flag, zeroes suc,
// settles leadsto obligations and enqueues the state for propagation.
void CheckRun::clear_state(WorkerCtx& ctx, StateId id, bool obligation, bool backward) {
    StateMeta& m = store_->meta(id);
    std::uint8_t prev = m.flags.fetch_or(StateMeta::kCleared, std::memory_order_acq_rel);
    assert(!(prev & StateMeta::kCleared) && "state cleared twice");
    assert(!(prev & StateMeta::kBlocked) && "blocked state cleared");
    (void)prev;
    m.suc.store(0, std::memory_order_release);
    if (obligation) {
        std::int64_t left = obligations_.fetch_sub(1, std::memory_order_acq_rel) - 1;
        assert(left >= 0);
        if (left == 0 && backward && task_.kind == TaskKind::Leadsto)
            set_outcome(true, Reason::ObligationsCleared, id);
    }
    if (backward) {
        outstanding_.fetch_add(1, std::memory_order_acq_rel);
        round_pushes_.fetch_add(1, std::memory_order_relaxed);
    }
    seeds_->push(ctx.id, id);
}

// ── Assembly ────────────────────────────────────────────────────────────────

Stats CheckRun::stats_snapshot() const {
    Stats s;
    s.states = store_->state_count();
    for (const WorkerCtx& c : ctxs_) {
        s.forward_edges += c.edges;
        s.reverse_edges_stored += c.reverse_edges;
        s.parent_links_stored += c.parent_links;
        s.suc_decrements += c.decrements;
        s.steals += c.steals;
    }
    s.collect_rounds = collect_rounds_.load(std::memory_order_acquire);
    s.peak_memory_estimate = store_->memory_estimate();
    return s;
}

std::vector<StateId> CheckRun::witness_path(StateId to) const {
    std::vector<StateId> path;
    for (StateId cur = to; cur != kNoState; cur = store_->father_of(cur)) {
        path.push_back(cur);
        if (cur == root_) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

Verdict CheckRun::finish() {
    Verdict v;
    v.stats = stats_snapshot();
    bool raw;
    Reason reason;
    StateId at = kNoState;
    if (outcome_ready()) {
        raw = outcome_.value;
        reason = outcome_.reason;
        at = outcome_.at;
    } else {
        // Only the EU forward pass can end without an explicit outcome.
        raw = false;
        reason = Reason::RegionExhausted;
    }
    v.holds = task_.negate_result ? !raw : raw;
    v.reason = reason;
    if (opt_.want_witness && at != kNoState &&
        (reason == Reason::ForwardWitness || reason == Reason::ForwardViolation ||
         reason == Reason::DeadState)) {
        for (StateId id : witness_path(at)) {
            auto bytes = store_->vector_of(id);
            v.witness.emplace_back(bytes.begin(), bytes.end());
        }
    }
    return v;
}

}   // namespace parmc
