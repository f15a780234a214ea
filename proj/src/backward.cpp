// Backward pass: cycle detection by repeatedly removing leaf states.
//
// Reverse graph: cleared states propagate decrements to every stored
// predecessor; fully concurrent. Reverse parental graph: clearing follows
// only the father link, and globally synchronized collecting rounds scan
// owned states with no remaining parental children, recomputing their
// successors to test clearability.

#include "engine_impl.hpp"

#include <barrier>
#include <cassert>
#include <thread>

namespace parmc {

bool CheckRun::run_backward() {
    assert(task_.kind == TaskKind::AU || task_.kind == TaskKind::Leadsto);
    if (task_.kind == TaskKind::Leadsto &&
        obligations_.load(std::memory_order_acquire) == 0) {
        set_outcome(true, Reason::ObligationsCleared, kNoState);
        return true;
    }
    outstanding_.store(static_cast<std::int64_t>(seeds_->total_size()),
                       std::memory_order_release);
    if (opt_.variant == Variant::RG) {
        run_workers(&CheckRun::backward_rg_loop);
    } else {
        rpg_barrier_ = std::make_unique<std::barrier<>>(opt_.workers);
        run_workers(&CheckRun::backward_rpg_loop);
    }
    if (outcome_ready()) return outcome_.value;
    set_outcome(false, Reason::NoClearableLeaf, kNoState);
    return false;
}

void CheckRun::backward_rg_loop(unsigned w) {
    WorkerCtx& ctx = ctxs_[w];
    StateId id;
    for (;;) {
        if (aborted_.load(std::memory_order_acquire) ||
            outcome_flag_.load(std::memory_order_acquire) != 0)
            return;
        if (seeds_->pop(w, id)) {
            process_backward_rg(ctx, id);
            outstanding_.fetch_sub(1, std::memory_order_acq_rel);
            continue;
        }
        if (seeds_->steal(w)) {
            ++ctx.steals;
            continue;
        }
        if (outstanding_.load(std::memory_order_acquire) == 0) return;
        check_deadline();
        std::this_thread::yield();
    }
}

void CheckRun::process_backward_rg(WorkerCtx& ctx, StateId id) {
    if (++ctx.deadline_tick % 4096 == 0) check_deadline();
    if (task_.kind == TaskKind::AU && id == root_) {
        set_outcome(true, Reason::RootCleared, id);
        return;
    }
    for (PredNode* n = store_->meta(id).preds.load(std::memory_order_acquire); n;
         n = n->next) {
        std::int32_t v = store_->suc_dec_if_positive(n->pred);
        if (v < 0) continue;   // already cleared through another path
        ++ctx.decrements;
        if (v == 0)
            clear_state(ctx, n->pred, store_->meta(n->pred).obligation(), true);
    }
}

void CheckRun::backward_rpg_loop(unsigned w) {
    // Strict phase alternation. Every stop/continue decision is snapshotted
    // by worker 0 in a window between two barriers — while every worker is
    // parked and nothing can write the outcome cell — and then read by all
    // workers after the second barrier. Reading the live cell at the
    // decision points instead would race against workers that already
    // advanced into the next phase.
    WorkerCtx& ctx = ctxs_[w];
    std::barrier<>& bar = *rpg_barrier_;
    auto guarded = [&](auto&& body) {
        try {
            body();
        } catch (...) {
            {
                std::lock_guard<std::mutex> g(error_mutex_);
                if (!error_) error_ = std::current_exception();
            }
            aborted_.store(true, std::memory_order_release);
        }
    };
    for (;;) {
        // CLEARING: drain stacks (with stealing) until globally exhausted.
        guarded([&] {
            StateId id;
            for (;;) {
                if (aborted_.load(std::memory_order_acquire) ||
                    outcome_flag_.load(std::memory_order_acquire) != 0)
                    return;
                if (seeds_->pop(w, id)) {
                    process_backward_rpg_clear(ctx, id);
                    outstanding_.fetch_sub(1, std::memory_order_acq_rel);
                    continue;
                }
                if (seeds_->steal(w)) {
                    ++ctx.steals;
                    continue;
                }
                if (outstanding_.load(std::memory_order_acquire) == 0) return;
                check_deadline();
                std::this_thread::yield();
            }
        });
        bar.arrive_and_wait();
        if (w == 0) {
            rpg_stop_ = outcome_flag_.load(std::memory_order_acquire) != 0 ||
                        aborted_.load(std::memory_order_acquire);
            round_pushes_.store(0, std::memory_order_release);
        }
        bar.arrive_and_wait();
        if (rpg_stop_) return;
        // COLLECTING: only over owned states.
        guarded([&] { collect_scan(ctx); });
        bar.arrive_and_wait();
        if (w == 0) {
            collect_rounds_.fetch_add(1, std::memory_order_relaxed);
            rpg_stop_ = outcome_flag_.load(std::memory_order_acquire) != 0 ||
                        aborted_.load(std::memory_order_acquire) ||
                        round_pushes_.load(std::memory_order_acquire) == 0;
        }
        bar.arrive_and_wait();
        if (rpg_stop_) return;   // target met, aborted, or no candidate found
    }
}

void CheckRun::process_backward_rpg_clear(WorkerCtx& ctx, StateId id) {
    if (++ctx.deadline_tick % 4096 == 0) check_deadline();
    if (task_.kind == TaskKind::AU && id == root_) {
        set_outcome(true, Reason::RootCleared, id);
        return;
    }
    StateId p = store_->father_of(id);
    if (p == kNoState) return;
    store_->sons_dec(p);
    if (store_->meta(p).cleared()) return;   // nothing left to propagate
    std::int32_t v = store_->suc_dec_if_positive(p);
    if (v < 0) return;
    ++ctx.decrements;
    if (v == 0) clear_state(ctx, p, store_->meta(p).obligation(), true);
}

void CheckRun::collect_scan(WorkerCtx& ctx) {
    unsigned tick = 0;
    store_->for_each_owned(ctx.id, [&](StateId s) {
        if (aborted_.load(std::memory_order_relaxed)) return;
        if (++tick % 4096 == 0) check_deadline();
        if (outcome_flag_.load(std::memory_order_relaxed) != 0) return;
        StateMeta& m = store_->meta(s);
        if (m.cleared() || m.blocked()) return;
        if (m.sons.load(std::memory_order_acquire) != 0) return;
        if (test_cleared(ctx, s))
            clear_state(ctx, s, m.obligation(), true);
    });
}

bool CheckRun::test_cleared(WorkerCtx& ctx, StateId id) {
    model_.successors(store_->vector_of(id), ctx.succs);
    for (const StateVector& v : ctx.succs) {
        InternResult r = store_->intern(v, ctx.id);
        assert(!r.is_new && "collecting discovered an unknown state");
        if (store_->suc_value(r.id) != 0) return false;
    }
    return true;
}

}   // namespace parmc
