#include "parmc/store.hpp"

#include <cstring>

namespace parmc {

std::uint64_t fingerprint(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    // splitmix64 finalizer: FNV alone clusters badly on short vectors.
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebull;
    h ^= h >> 31;
    return h;
}

StateStore::StateStore(unsigned workers, std::size_t state_width, unsigned table_bits)
    : workers_(workers), width_(state_width), table_bits_(table_bits),
      table_mask_((std::uint64_t{1} << table_bits) - 1),
      slots_(std::uint64_t{1} << table_bits) {
    if (workers == 0 || workers > kMaxWorkers)
        throw StoreError("worker count must be in 1.." + std::to_string(kMaxWorkers));
    if (table_bits < 4 || table_bits > 32)
        throw StoreError("table bits must be in 4..32");
    occupancy_limit_ = (slots_.size() / 4) * 3;
    repos_.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) repos_.push_back(std::make_unique<Repository>());
}

StateStore::~StateStore() = default;

StateStore::Chunk* StateStore::chunk_for_write(Repository& repo, std::uint32_t index) {
    std::uint32_t ci = index >> kChunkBits;
    if (ci >= kMaxChunks) throw StoreError("per-worker state capacity exhausted");
    Chunk* c = repo.chunks[ci].load(std::memory_order_acquire);
    if (!c) {
        auto fresh = std::make_unique<Chunk>();
        fresh->bytes.resize(static_cast<std::size_t>(kChunkSize) * width_);
        fresh->meta = std::make_unique<StateMeta[]>(kChunkSize);
        c = fresh.release();
        repo.chunks[ci].store(c, std::memory_order_release);
    }
    return c;
}

const StateStore::Chunk* StateStore::chunk_of(unsigned owner, std::uint32_t index) const {
    return repos_[owner]->chunks[index >> kChunkBits].load(std::memory_order_acquire);
}

std::uint32_t StateStore::append_speculative(unsigned worker, std::span<const std::uint8_t> vec) {
    Repository& repo = *repos_[worker];
    std::uint32_t idx = repo.tail;
    Chunk* c = chunk_for_write(repo, idx);
    std::memcpy(c->bytes.data() + static_cast<std::size_t>(idx & (kChunkSize - 1)) * width_,
                vec.data(), width_);
    // Meta slots come from make_unique<StateMeta[]> and are already
    // default-initialized; reset is only needed when a slot is reused after
    // a rollback, which new(placement) handles uniformly.
    new (&c->meta[idx & (kChunkSize - 1)]) StateMeta();
    repo.tail = idx + 1;
    return idx;
}

void StateStore::rollback_speculative(unsigned worker) { --repos_[worker]->tail; }

void StateStore::commit_speculative(unsigned worker) {
    Repository& repo = *repos_[worker];
    repo.count.store(repo.tail, std::memory_order_release);
}

InternResult StateStore::intern(std::span<const std::uint8_t> vec, unsigned worker) {
    assert(vec.size() == width_);
    const std::uint64_t fp = fingerprint(vec);
    const std::uint64_t tag = fp >> 48;

    // Speculative append: claimed by the CAS below or rolled back.
    std::uint32_t my_index = append_speculative(worker, vec);
    const std::uint64_t my_slot = pack_slot(tag, worker, my_index);

    std::uint64_t pos = fp & table_mask_;
    for (std::uint64_t probes = 0; probes <= table_mask_; ++probes, pos = (pos + 1) & table_mask_) {
        std::uint64_t cur = slots_[pos].load(std::memory_order_acquire);
        for (;;) {
            if (cur == 0) {
                if (occupied_.load(std::memory_order_relaxed) >= occupancy_limit_) {
                    rollback_speculative(worker);
                    throw StoreError(
                        "state table full (" + std::to_string(slots_.size()) +
                        " slots at 0.75 load); rerun with --table-bits " +
                        std::to_string(table_bits_ + 1) + " or higher");
                }
                if (slots_[pos].compare_exchange_strong(cur, my_slot,
                                                        std::memory_order_acq_rel,
                                                        std::memory_order_acquire)) {
                    occupied_.fetch_add(1, std::memory_order_relaxed);
                    commit_speculative(worker);
                    return {make_state_id(worker, my_index), true, worker};
                }
                continue;   // lost the race; cur now holds the winner
            }
            if ((cur >> 48) == tag) {
                unsigned owner = static_cast<unsigned>(cur >> 42) & (kMaxWorkers - 1);
                std::uint32_t index = static_cast<std::uint32_t>((cur & ((1ull << 42) - 1)) - 1);
                const Chunk* c = chunk_of(owner, index);
                const std::uint8_t* theirs =
                    c->bytes.data() + static_cast<std::size_t>(index & (kChunkSize - 1)) * width_;
                if (std::memcmp(theirs, vec.data(), width_) == 0) {
                    rollback_speculative(worker);
                    return {make_state_id(owner, index), false, owner};
                }
            }
            break;   // occupied by a different state; next probe
        }
    }
    rollback_speculative(worker);
    throw StoreError("state table full; rerun with --table-bits " +
                     std::to_string(table_bits_ + 1) + " or higher");
}

std::span<const std::uint8_t> StateStore::vector_of(StateId id) const {
    std::uint32_t index = index_of(id);
    const Chunk* c = chunk_of(owner_of(id), index);
    return {c->bytes.data() + static_cast<std::size_t>(index & (kChunkSize - 1)) * width_, width_};
}

StateMeta& StateStore::meta(StateId id) const {
    std::uint32_t index = index_of(id);
    const Chunk* c = chunk_of(owner_of(id), index);
    return c->meta[index & (kChunkSize - 1)];
}

void StateStore::add_predecessor(StateId id, StateId pred, unsigned worker) {
    Repository& repo = *repos_[worker];
    if (repo.pred_chunks.empty() || repo.pred_chunks.back()->size() == kChunkSize) {
        repo.pred_chunks.push_back(std::make_unique<std::vector<PredNode>>());
        // Nodes are linked by address; the reservation keeps them stable.
        repo.pred_chunks.back()->reserve(kChunkSize);
    }
    auto& chunk = *repo.pred_chunks.back();
    chunk.push_back({pred, nullptr});
    PredNode* node = &chunk.back();
    ++repo.pred_count;

    auto& head = meta(id).preds;
    PredNode* cur = head.load(std::memory_order_acquire);
    do {
        node->next = cur;
    } while (!head.compare_exchange_weak(cur, node, std::memory_order_acq_rel));
}

std::uint64_t StateStore::state_count() const {
    std::uint64_t n = 0;
    for (const auto& r : repos_) n += r->count.load(std::memory_order_acquire);
    return n;
}

std::uint64_t StateStore::pred_node_count() const {
    std::uint64_t n = 0;
    for (const auto& r : repos_) n += r->pred_count;
    return n;
}

std::uint64_t StateStore::memory_estimate() const {
    std::uint64_t bytes = slots_.size() * sizeof(std::uint64_t);
    for (unsigned w = 0; w < workers_; ++w) {
        std::uint64_t n = repos_[w]->count.load(std::memory_order_acquire);
        // Count whole chunks actually allocated.
        std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
        bytes += chunks * kChunkSize * (width_ + sizeof(StateMeta));
        bytes += repos_[w]->pred_count * sizeof(PredNode);
    }
    return bytes;
}

}   // namespace parmc
