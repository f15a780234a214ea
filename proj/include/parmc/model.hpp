#pragma once

// Kripke-structure abstraction shared by every model front end.
//
// A model exposes a fixed-width canonical byte encoding of configurations,
// an initial configuration, a deterministic ordered successor function and a
// per-state proposition labeling. All implementations are immutable after
// construction and safe to call from any number of workers concurrently.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace parmc {

// Canonically encoded configuration: equal byte strings iff equal states.
using StateVector = std::vector<std::uint8_t>;

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Labeling buffer: one bit per proposition index, reused across calls.
class LabelBits {
public:
    void resize_for(std::size_t prop_count) {
        words_.assign((prop_count + 63) / 64, 0);
    }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    std::span<const std::uint64_t> words() const { return {words_.data(), words_.size()}; }

private:
    std::vector<std::uint64_t> words_;
};

class Model {
public:
    virtual ~Model() = default;

    // Width in bytes of every state vector of this model.
    virtual std::size_t state_width() const = 0;

    virtual StateVector initial() const = 0;

    // Fills `out` with the ordered, duplicate-free successor list of `s`.
    // Deterministic: equal inputs produce identical lists.
    virtual void successors(std::span<const std::uint8_t> s,
                            std::vector<StateVector>& out) const = 0;

    virtual const std::vector<std::string>& propositions() const = 0;

    // Fills `out` (sized for propositions()) with the labeling of `s`.
    virtual void labeling(std::span<const std::uint8_t> s, LabelBits& out) const = 0;
};

// ── Explicit graph models ───────────────────────────────────────────────────
// Desk-scale test vehicle: states, adjacency and labels given extensionally.

struct ExplicitModel {
    std::size_t init = 0;                               // dense index
    std::vector<std::vector<std::uint32_t>> edges;      // adjacency, file order
    std::vector<std::vector<std::uint32_t>> labels;     // prop indices per state
    std::vector<std::string> props;

    std::size_t state_count() const { return edges.size(); }
    bool state_has_prop(std::size_t s, std::uint32_t p) const;
};

// Parses the `.ksg` text format:
//   init <id>
//   state <id> [<prop> <prop> ...]
//   edge <src> <dst>
//   # comment
// Declaration order defines dense indices and successor order. Errors carry
// the offending line number.
ExplicitModel parse_explicit(std::string_view text);
ExplicitModel load_explicit(const std::string& path);

// Model view over an ExplicitModel (4-byte little-endian dense index).
class ExplicitGraphModel final : public Model {
public:
    explicit ExplicitGraphModel(ExplicitModel m) : m_(std::move(m)) {}

    std::size_t state_width() const override { return 4; }
    StateVector initial() const override;
    void successors(std::span<const std::uint8_t> s,
                    std::vector<StateVector>& out) const override;
    const std::vector<std::string>& propositions() const override { return m_.props; }
    void labeling(std::span<const std::uint8_t> s, LabelBits& out) const override;

    const ExplicitModel& graph() const { return m_; }

    static std::uint32_t decode(std::span<const std::uint8_t> s);
    static StateVector encode(std::uint32_t idx);

private:
    ExplicitModel m_;
};

// ── Built-in generators ─────────────────────────────────────────────────────

// Token ring: n stations (idle/waiting/critical) and one circulating token.
// Propositions: cs_i (station i critical), wait_i (station i waiting).
// Reachable states: 3 * n * 2^(n-1). Requires 2 <= n <= 30.
std::unique_ptr<Model> generate_token_ring(unsigned n);

// Dining philosophers with left-then-right fork acquisition; contains the
// classic all-hold-left deadlock for every n >= 2. Propositions: eat_i,
// hungry_i (hungry or holding the left fork). Requires 2 <= n <= 16.
std::unique_ptr<Model> generate_philosophers(unsigned n);

}   // namespace parmc
