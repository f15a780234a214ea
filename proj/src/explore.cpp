// Forward pass: parallel constrained exploration over per-worker LIFO
// stacks with batch stealing. Each state is interned once and evaluated
// once, at pop. Termination is detected through a global count of
// outstanding work items; early verdicts go through the write-once outcome
// cell.

#include "engine_impl.hpp"

#include <cassert>
#include <thread>

namespace parmc {

// ── WorkStacks ──────────────────────────────────────────────────────────────

std::size_t WorkStacks::steal(unsigned thief) {
    const unsigned n = workers();
    if (n <= 1) return 0;
    unsigned victim = next_victim_[thief];
    for (unsigned tried = 0; tried + 1 < n; ++tried, victim = (victim + 1) % n) {
        if (victim == thief) continue;
        std::vector<StateId> batch;
        {
            std::lock_guard<std::mutex> g(lanes_[victim].m);
            auto& items = lanes_[victim].items;
            if (items.empty()) continue;
            std::size_t take = std::min(kStealBatch, items.size());
            batch.assign(items.end() - take, items.end());
            items.erase(items.end() - take, items.end());
        }
        {
            std::lock_guard<std::mutex> g(lanes_[thief].m);
            auto& mine = lanes_[thief].items;
            mine.insert(mine.end(), batch.begin(), batch.end());
        }
        next_victim_[thief] = (victim + 1) % n;
        return batch.size();
    }
    next_victim_[thief] = victim;
    return 0;
}

// ── Forward pass ────────────────────────────────────────────────────────────

bool CheckRun::run_forward() {
    StateVector init = model_.initial();
    InternResult r = store_->intern(init, 0);
    root_ = r.id;
    outstanding_.store(1, std::memory_order_release);
    work_->push(0, root_);
    run_workers(&CheckRun::forward_loop);
    if (task_.kind == TaskKind::AU && outcome_ready())
        return false;   // forward violation (dead state or neither-psi-nor-phi)
    return true;
}

void CheckRun::forward_loop(unsigned w) {
    WorkerCtx& ctx = ctxs_[w];
    StateId id;
    for (;;) {
        if (stop_requested()) return;
        if (work_->pop(w, id)) {
            process_forward(ctx, id);
            outstanding_.fetch_sub(1, std::memory_order_acq_rel);
            continue;
        }
        std::size_t got = work_->steal(w);
        if (got) {
            ++ctx.steals;
            continue;
        }
        if (outstanding_.load(std::memory_order_acquire) == 0) return;
        check_deadline();
        std::this_thread::yield();
    }
}

void CheckRun::process_forward(WorkerCtx& ctx, StateId id) {
    if (++ctx.deadline_tick % 4096 == 0) check_deadline();
    std::span<const std::uint8_t> vec = store_->vector_of(id);
    switch (task_.kind) {
        case TaskKind::EU: process_eu(ctx, id, vec); break;
        case TaskKind::AU: process_au(ctx, id, vec); break;
        case TaskKind::Leadsto: process_leadsto(ctx, id, vec); break;
    }
}

void CheckRun::process_eu(WorkerCtx& ctx, StateId id, std::span<const std::uint8_t> vec) {
    model_.labeling(vec, ctx.labels);
    if (phi_.eval(ctx.labels.words())) {
        set_outcome(true, Reason::ForwardWitness, id);
        return;
    }
    if (!psi_const_true_ && !psi_.eval(ctx.labels.words()))
        return;   // outside the psi-constrained region: prune this branch
    model_.successors(vec, ctx.succs);
    ctx.edges += ctx.succs.size();
    ctx.fresh.clear();
    for (const StateVector& v : ctx.succs) {
        InternResult r = store_->intern(v, ctx.id);
        if (r.is_new) {
            store_->father_set_once(r.id, id);   // witness chain
            ctx.fresh.push_back(r.id);
        }
    }
    push_fresh(ctx);
}

void CheckRun::process_au(WorkerCtx& ctx, StateId id, std::span<const std::uint8_t> vec) {
    model_.labeling(vec, ctx.labels);
    if (phi_.eval(ctx.labels.words())) {
        clear_state(ctx, id, false, false);
        return;   // phi-states terminate their path; successors stay unexplored
    }
    if (!psi_const_true_ && !psi_.eval(ctx.labels.words())) {
        set_outcome(false, Reason::ForwardViolation, id);
        return;
    }
    model_.successors(vec, ctx.succs);
    ctx.edges += ctx.succs.size();
    store_->suc_set(id, static_cast<std::int32_t>(ctx.succs.size()));
    if (ctx.succs.empty()) {
        set_outcome(false, Reason::DeadState, id);
        return;
    }
    ctx.fresh.clear();
    for (const StateVector& v : ctx.succs) {
        InternResult r = store_->intern(v, ctx.id);
        if (opt_.variant == Variant::RG) {
            store_->add_predecessor(r.id, id, ctx.id);
            ++ctx.reverse_edges;
        }
        if (r.is_new) {
            if (store_->father_set_once(r.id, id) && opt_.variant == Variant::RPG) {
                store_->sons_inc(id);
                ++ctx.parent_links;
            }
            ctx.fresh.push_back(r.id);
        }
    }
    push_fresh(ctx);
}

void CheckRun::process_leadsto(WorkerCtx& ctx, StateId id, std::span<const std::uint8_t> vec) {
    model_.labeling(vec, ctx.labels);
    const bool is_phi = phi_.eval(ctx.labels.words());
    model_.successors(vec, ctx.succs);
    ctx.edges += ctx.succs.size();

    if (is_phi) {
        // Propagation sink: cleared immediately; its outgoing edges are
        // traversed for discovery only and register no propagation edges.
        clear_state(ctx, id, false, false);
        ctx.fresh.clear();
        for (const StateVector& v : ctx.succs) {
            InternResult r = store_->intern(v, ctx.id);
            if (r.is_new) ctx.fresh.push_back(r.id);
        }
        push_fresh(ctx);
        return;
    }

    StateMeta& m = store_->meta(id);
    const bool is_psi = psi_const_true_ || psi_.eval(ctx.labels.words());
    if (is_psi) {
        m.flags.fetch_or(StateMeta::kObligation, std::memory_order_acq_rel);
        obligations_.fetch_add(1, std::memory_order_acq_rel);
    }
    if (ctx.succs.empty()) {
        // Dead non-phi state: permanently unclearable. The sentinel keeps
        // suc != 0 so clearability tests can stay uniform.
        m.flags.fetch_or(StateMeta::kBlocked, std::memory_order_acq_rel);
        store_->suc_set(id, 1);
        return;
    }
    std::int32_t counted = 0;
    ctx.fresh.clear();
    for (const StateVector& v : ctx.succs) {
        InternResult r = store_->intern(v, ctx.id);
        if (r.is_new) ctx.fresh.push_back(r.id);
        model_.labeling(v, ctx.succ_labels);
        if (phi_.eval(ctx.succ_labels.words()))
            continue;   // edges into phi-sinks carry no clearing obligation
        ++counted;
        if (opt_.variant == Variant::RG) {
            store_->add_predecessor(r.id, id, ctx.id);
            ++ctx.reverse_edges;
        } else if (r.is_new && store_->father_set_once(r.id, id)) {
            store_->sons_inc(id);
            ++ctx.parent_links;
        }
    }
    push_fresh(ctx);
    if (counted == 0) {
        // Every successor satisfies phi: this state is already discharged.
        clear_state(ctx, id, is_psi, false);
    } else {
        store_->suc_set(id, counted);
    }
}

}   // namespace parmc
