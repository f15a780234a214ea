#include "parmc/store.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <thread>

using namespace parmc;

namespace {

StateVector vec4(std::uint32_t v) {
    return {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
            static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
}

}   // namespace

TEST_CASE("intern: first insertion, idempotence, ownership") {
    StateStore store(2, 4, 10);
    StateVector v = vec4(1234);
    InternResult a = store.intern(v, 1);
    CHECK(a.is_new);
    CHECK(a.owner == 1);
    InternResult b = store.intern(v, 0);
    CHECK_FALSE(b.is_new);
    CHECK(b.owner == 1);
    CHECK(b.id == a.id);
    CHECK(store.state_count() == 1);
    auto bytes = store.vector_of(a.id);
    CHECK(std::equal(bytes.begin(), bytes.end(), v.begin()));
}

TEST_CASE("intern: capacity exhaustion is a loud error") {
    StateStore store(1, 4, 4);   // 16 slots, limit 12
    for (std::uint32_t i = 0; i < 12; ++i) CHECK(store.intern(vec4(i), 0).is_new);
    CHECK_THROWS_WITH_AS(store.intern(vec4(999), 0), doctest::Contains("state table full"),
                         StoreError);
}

TEST_CASE("intern: racing workers agree on a single winner") {
    const unsigned workers = 4;
    const std::uint32_t n_states = 20000;
    StateStore store(workers, 4, 18);
    std::atomic<std::uint64_t> new_count{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::mt19937 rng(w);   // different orders, same value set
            std::vector<std::uint32_t> values(n_states);
            for (std::uint32_t i = 0; i < n_states; ++i) values[i] = i;
            std::shuffle(values.begin(), values.end(), rng);
            std::uint64_t local = 0;
            for (std::uint32_t v : values)
                if (store.intern(vec4(v), w).is_new) ++local;
            new_count.fetch_add(local);
        });
    }
    for (auto& t : pool) t.join();
    CHECK(new_count.load() == n_states);
    CHECK(store.state_count() == n_states);

    // Ownership partition: per-worker counts sum to the total, and every
    // interned id resolves to its owner's repository.
    std::uint64_t sum = 0;
    for (unsigned w = 0; w < workers; ++w) sum += store.owned_count(w);
    CHECK(sum == n_states);
    std::set<std::uint32_t> seen;
    for (unsigned w = 0; w < workers; ++w)
        store.for_each_owned(w, [&](StateId id) {
            CHECK(owner_of(id) == w);
            std::uint32_t value = 0;
            auto bytes = store.vector_of(id);
            for (int i = 3; i >= 0; --i) value = value << 8 | bytes[i];
            CHECK(seen.insert(value).second);
        });
    CHECK(seen.size() == n_states);
}

TEST_CASE("suc counter: set/dec and the unique zero observer") {
    StateStore store(1, 4, 8);
    StateId id = store.intern(vec4(0), 0).id;
    store.suc_set(id, 3);
    CHECK(store.suc_dec(id) == 2);
    CHECK(store.suc_dec(id) == 1);
    CHECK(store.suc_dec(id) == 0);
    CHECK(store.suc_dec_if_positive(id) == -1);
}

TEST_CASE("suc counter: parallel decrements each observe a distinct value") {
    const unsigned workers = 8;
    StateStore store(workers, 4, 8);
    StateId id = store.intern(vec4(0), 0).id;
    store.suc_set(id, static_cast<std::int32_t>(workers));
    std::vector<std::int32_t> observed(workers, -1);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] { observed[w] = store.suc_dec(id); });
    for (auto& t : pool) t.join();
    std::sort(observed.begin(), observed.end());
    for (unsigned w = 0; w < workers; ++w) CHECK(observed[w] == static_cast<std::int32_t>(w));
}

TEST_CASE("father: write-once under a race, exactly one winner") {
    const unsigned workers = 8;
    StateStore store(workers, 4, 8);
    StateId child = store.intern(vec4(0), 0).id;
    std::vector<StateId> parents;
    for (unsigned w = 0; w < workers; ++w)
        parents.push_back(store.intern(vec4(100 + w), 0).id);

    std::atomic<int> wins{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            if (store.father_set_once(child, parents[w])) wins.fetch_add(1);
        });
    for (auto& t : pool) t.join();
    CHECK(wins.load() == 1);
    StateId father = store.father_of(child);
    CHECK(std::find(parents.begin(), parents.end(), father) != parents.end());
    // Losers must not change it.
    CHECK_FALSE(store.father_set_once(child, parents[0]));
    CHECK(store.father_of(child) == father);
}

TEST_CASE("sons counter tracks father assignments") {
    StateStore store(1, 4, 8);
    StateId p = store.intern(vec4(0), 0).id;
    StateId a = store.intern(vec4(1), 0).id;
    StateId b = store.intern(vec4(2), 0).id;
    CHECK(store.father_set_once(a, p));
    store.sons_inc(p);
    CHECK(store.father_set_once(b, p));
    store.sons_inc(p);
    CHECK(store.sons_value(p) == 2);
    CHECK(store.sons_dec(p) == 1);
    CHECK(store.sons_dec(p) == 0);
}

TEST_CASE("predecessor lists: diamond shape and self-loop") {
    StateStore store(2, 4, 8);
    StateId s0 = store.intern(vec4(0), 0).id;
    StateId s1 = store.intern(vec4(1), 0).id;
    StateId s2 = store.intern(vec4(2), 1).id;
    StateId s3 = store.intern(vec4(3), 1).id;
    store.add_predecessor(s3, s1, 0);
    store.add_predecessor(s3, s2, 1);
    store.add_predecessor(s1, s0, 0);
    store.add_predecessor(s2, s0, 0);
    store.add_predecessor(s0, s0, 0);   // self-loop

    std::set<StateId> preds3;
    for (PredNode* n = store.meta(s3).preds.load(); n; n = n->next) preds3.insert(n->pred);
    CHECK(preds3 == std::set<StateId>{s1, s2});
    PredNode* n0 = store.meta(s0).preds.load();
    REQUIRE(n0 != nullptr);
    CHECK(n0->pred == s0);
    CHECK(store.pred_node_count() == 5);
}

TEST_CASE("concurrent predecessor appends lose nothing") {
    const unsigned workers = 4;
    const int per_worker = 5000;
    StateStore store(workers, 4, 16);
    StateId target = store.intern(vec4(0), 0).id;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = 0; i < per_worker; ++i) {
                StateId p = store.intern(vec4(1 + w * per_worker + i), w).id;
                store.add_predecessor(target, p, w);
            }
        });
    for (auto& t : pool) t.join();
    std::size_t count = 0;
    std::set<StateId> distinct;
    for (PredNode* n = store.meta(target).preds.load(); n; n = n->next) {
        ++count;
        distinct.insert(n->pred);
    }
    CHECK(count == workers * per_worker);
    CHECK(distinct.size() == count);
}

TEST_CASE("fingerprint collisions cannot merge distinct states") {
    // Tiny 16-slot table forces heavy probing and tag collisions (the tag is
    // only 16 bits, so distinct states sharing a tag must still separate).
    StateStore store(1, 4, 4);
    std::vector<StateId> ids;
    for (std::uint32_t i = 0; i < 10; ++i) ids.push_back(store.intern(vec4(i), 0).id);
    for (std::uint32_t i = 0; i < 10; ++i) {
        InternResult r = store.intern(vec4(i), 0);
        CHECK_FALSE(r.is_new);
        CHECK(r.id == ids[i]);
    }
    CHECK(store.state_count() == 10);
}
