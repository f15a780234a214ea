#pragma once

// Concurrent state repository.
//
// Newly discovered states are dynamically assigned to the discovering
// worker through a lock-free localization table: a fixed-capacity,
// open-addressed array of slots mapping a state fingerprint to the owning
// worker and its local index. Each worker keeps the byte vectors and the
// per-state metadata of the states it owns in chunked, append-only arenas,
// so foreign workers can read both without synchronization once a state id
// has been published.
//
// Insert-or-query protocol (lock-free, collision-safe):
//   1. the candidate vector is appended speculatively to the caller's arena;
//   2. slots are probed linearly; a matching fingerprint tag triggers a full
//      byte comparison against the published owner's arena, so hash
//      collisions can never merge distinct states;
//   3. an empty slot is claimed by CAS; losing the race falls back to
//      re-examining the slot, and a duplicate rolls the speculative append
//      back (the tail entry is only ever touched by its own worker).
//
// Exactly one caller observes is_new == true per distinct state.

#include "parmc/model.hpp"

#include <atomic>
#include <cassert>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace parmc {

using StateId = std::uint32_t;
inline constexpr StateId kNoState = 0xFFFFFFFFu;

// StateId layout: [owner:6 | index:26].
inline constexpr unsigned kOwnerBits = 6;
inline constexpr unsigned kIndexBits = 26;
inline constexpr unsigned kMaxWorkers = 1u << kOwnerBits;

constexpr StateId make_state_id(unsigned owner, std::uint32_t index) {
    return static_cast<StateId>(owner) << kIndexBits | index;
}
constexpr unsigned owner_of(StateId id) { return id >> kIndexBits; }
constexpr std::uint32_t index_of(StateId id) { return id & ((1u << kIndexBits) - 1); }

struct StoreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reverse-edge list node; nodes live in per-worker arenas.
struct PredNode {
    StateId pred;
    PredNode* next;
};

// Per-state labels. `suc` is the remaining out-degree used by the clearing
// phase; `sons` counts children in the parental graph; `father` is the
// write-once discovery parent (also the witness-path link); `preds` is the
// reverse-edge list (reverse-graph variant only).
struct StateMeta {
    std::atomic<std::int32_t> suc{0};
    std::atomic<std::int32_t> sons{0};
    std::atomic<StateId> father{kNoState};
    std::atomic<PredNode*> preds{nullptr};
    std::atomic<std::uint8_t> flags{0};

    static constexpr std::uint8_t kCleared = 1;
    static constexpr std::uint8_t kBlocked = 2;
    static constexpr std::uint8_t kObligation = 4;

    bool cleared() const { return flags.load(std::memory_order_acquire) & kCleared; }
    bool blocked() const { return flags.load(std::memory_order_relaxed) & kBlocked; }
    bool obligation() const { return flags.load(std::memory_order_relaxed) & kObligation; }
};

struct InternResult {
    StateId id;
    bool is_new;
    unsigned owner;
};

class StateStore {
public:
    // `table_bits` sets the localization table to 2^table_bits slots.
    StateStore(unsigned workers, std::size_t state_width, unsigned table_bits);
    ~StateStore();

    StateStore(const StateStore&) = delete;
    StateStore& operator=(const StateStore&) = delete;

    // Insert-or-query; linearizable. Throws StoreError when the table
    // exceeds its load-factor limit.
    InternResult intern(std::span<const std::uint8_t> vec, unsigned worker);

    std::span<const std::uint8_t> vector_of(StateId id) const;
    StateMeta& meta(StateId id) const;

    // ── Label operations (atomic) ───────────────────────────────────────
    void suc_set(StateId id, std::int32_t k) {
        meta(id).suc.store(k, std::memory_order_release);
    }
    // Unconditional decrement; asserts the counter was positive.
    std::int32_t suc_dec(StateId id) {
        std::int32_t prev = meta(id).suc.fetch_sub(1, std::memory_order_acq_rel);
        assert(prev > 0 && "suc decrement on a cleared state");
        return prev - 1;
    }
    // Decrements only when positive; returns the new value, or -1 when the
    // counter was already zero.
    std::int32_t suc_dec_if_positive(StateId id) {
        auto& c = meta(id).suc;
        std::int32_t cur = c.load(std::memory_order_acquire);
        while (cur > 0) {
            if (c.compare_exchange_weak(cur, cur - 1, std::memory_order_acq_rel))
                return cur - 1;
        }
        return -1;
    }
    std::int32_t suc_value(StateId id) const {
        return meta(id).suc.load(std::memory_order_acquire);
    }

    // Write-once father link; returns true for the winning writer.
    bool father_set_once(StateId id, StateId parent) {
        StateId expected = kNoState;
        return meta(id).father.compare_exchange_strong(expected, parent,
                                                       std::memory_order_acq_rel);
    }
    StateId father_of(StateId id) const {
        return meta(id).father.load(std::memory_order_acquire);
    }
    void sons_inc(StateId id) { meta(id).sons.fetch_add(1, std::memory_order_acq_rel); }
    std::int32_t sons_dec(StateId id) {
        std::int32_t prev = meta(id).sons.fetch_sub(1, std::memory_order_acq_rel);
        assert(prev > 0 && "sons decrement below zero");
        return prev - 1;
    }
    std::int32_t sons_value(StateId id) const {
        return meta(id).sons.load(std::memory_order_acquire);
    }

    // Appends to the reverse-edge list of `id`; `worker` supplies the node.
    void add_predecessor(StateId id, StateId pred, unsigned worker);

    // ── Ownership iteration ─────────────────────────────────────────────
    std::uint32_t owned_count(unsigned worker) const {
        return repos_[worker]->count.load(std::memory_order_acquire);
    }
    // Enumerates the states owned by `worker` (stable once a phase ended).
    template <typename Fn>
    void for_each_owned(unsigned worker, Fn&& fn) const {
        std::uint32_t n = owned_count(worker);
        for (std::uint32_t i = 0; i < n; ++i) fn(make_state_id(worker, i));
    }

    std::uint64_t state_count() const;
    unsigned workers() const { return workers_; }
    std::size_t state_width() const { return width_; }
    std::uint64_t pred_node_count() const;

    // Rough live-memory footprint (table + arenas + edge nodes).
    std::uint64_t memory_estimate() const;

private:
    static constexpr unsigned kChunkBits = 16;   // states per arena chunk
    static constexpr std::uint32_t kChunkSize = 1u << kChunkBits;
    static constexpr unsigned kMaxChunks = 1u << (kIndexBits - kChunkBits);

    struct Chunk {
        std::vector<std::uint8_t> bytes;   // kChunkSize * width
        std::unique_ptr<StateMeta[]> meta;
    };

    struct Repository {
        std::array<std::atomic<Chunk*>, kMaxChunks> chunks{};
        std::atomic<std::uint32_t> count{0};   // committed states
        std::uint32_t tail = 0;                // committed + speculative (owner-only)
        // Pred-node arena (owner-allocated, freed on destruction).
        std::vector<std::unique_ptr<std::vector<PredNode>>> pred_chunks;
        std::uint64_t pred_count = 0;

        ~Repository() {
            for (auto& c : chunks) delete c.load(std::memory_order_relaxed);
        }
    };

    Chunk* chunk_for_write(Repository& repo, std::uint32_t index);
    const Chunk* chunk_of(unsigned owner, std::uint32_t index) const;

    std::uint32_t append_speculative(unsigned worker, std::span<const std::uint8_t> vec);
    void rollback_speculative(unsigned worker);
    void commit_speculative(unsigned worker);

    // Localization table slot: [tag:16 | owner:6 | index+1:42].
    static std::uint64_t pack_slot(std::uint64_t tag, unsigned owner, std::uint32_t index) {
        return tag << 48 | static_cast<std::uint64_t>(owner) << 42 |
               (static_cast<std::uint64_t>(index) + 1);
    }

    unsigned workers_;
    std::size_t width_;
    unsigned table_bits_;
    std::uint64_t table_mask_;
    std::vector<std::atomic<std::uint64_t>> slots_;
    std::atomic<std::uint64_t> occupied_{0};
    std::uint64_t occupancy_limit_;
    std::vector<std::unique_ptr<Repository>> repos_;
};

// 64-bit fingerprint of a canonical state encoding (FNV-1a with a final
// avalanche mix). Collisions are tolerated by design; they only cost extra
// byte comparisons.
std::uint64_t fingerprint(std::span<const std::uint8_t> bytes);

}   // namespace parmc
