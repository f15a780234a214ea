#include "parmc/model.hpp"

namespace parmc {

namespace {

// ── Token ring ──────────────────────────────────────────────────────────────
// State vector: [token_pos, s_0 .. s_{n-1}], station status 0=idle,
// 1=waiting, 2=critical. Only the token holder can be critical. Moves:
//   request_i : idle -> waiting                      (any station i)
//   claim     : holder waiting -> critical
//   pass      : holder idle    -> token to next station
//   release   : holder critical -> idle, token to next station
// Every state enables exactly one of claim/pass/release, so there are no
// dead states and the reachable count is 3 * n * 2^(n-1).

constexpr std::uint8_t kIdle = 0, kWaiting = 1, kCritical = 2;

class TokenRingModel final : public Model {
public:
    explicit TokenRingModel(unsigned n) : n_(n) {
        for (unsigned i = 0; i < n_; ++i) props_.push_back("cs_" + std::to_string(i));
        for (unsigned i = 0; i < n_; ++i) props_.push_back("wait_" + std::to_string(i));
    }

    std::size_t state_width() const override { return n_ + 1; }

    StateVector initial() const override { return StateVector(n_ + 1, 0); }

    void successors(std::span<const std::uint8_t> s,
                    std::vector<StateVector>& out) const override {
        out.clear();
        const std::uint8_t t = s[0];
        for (unsigned i = 0; i < n_; ++i) {
            if (s[1 + i] == kIdle) {
                StateVector v(s.begin(), s.end());
                v[1 + i] = kWaiting;
                out.push_back(std::move(v));
            }
        }
        StateVector v(s.begin(), s.end());
        switch (s[1 + t]) {
            case kWaiting: v[1 + t] = kCritical; break;
            case kIdle: v[0] = static_cast<std::uint8_t>((t + 1) % n_); break;
            case kCritical:
                v[1 + t] = kIdle;
                v[0] = static_cast<std::uint8_t>((t + 1) % n_);
                break;
        }
        out.push_back(std::move(v));
    }

    const std::vector<std::string>& propositions() const override { return props_; }

    void labeling(std::span<const std::uint8_t> s, LabelBits& out) const override {
        out.clear();
        for (unsigned i = 0; i < n_; ++i) {
            if (s[1 + i] == kCritical) out.set(i);
            if (s[1 + i] == kWaiting) out.set(n_ + i);
        }
    }

private:
    unsigned n_;
    std::vector<std::string> props_;
};

// ── Dining philosophers ─────────────────────────────────────────────────────
// State vector: [s_0 .. s_{n-1}], 0=thinking, 1=hungry, 2=holds left fork,
// 3=eating. Philosopher i uses fork i (left) and fork (i+1)%n (right); fork
// ownership is derived from the statuses. Left-then-right acquisition keeps
// the all-hold-left deadlock reachable.

constexpr std::uint8_t kThinking = 0, kHungry = 1, kHasLeft = 2, kEating = 3;

class PhilosophersModel final : public Model {
public:
    explicit PhilosophersModel(unsigned n) : n_(n) {
        for (unsigned i = 0; i < n_; ++i) props_.push_back("eat_" + std::to_string(i));
        for (unsigned i = 0; i < n_; ++i) props_.push_back("hungry_" + std::to_string(i));
    }

    std::size_t state_width() const override { return n_; }

    StateVector initial() const override { return StateVector(n_, kThinking); }

    void successors(std::span<const std::uint8_t> s,
                    std::vector<StateVector>& out) const override {
        out.clear();
        auto fork_free = [&](unsigned f) {
            // Fork f is the left fork of philosopher f and the right fork of
            // philosopher (f + n - 1) % n.
            if (s[f] == kHasLeft || s[f] == kEating) return false;
            if (s[(f + n_ - 1) % n_] == kEating) return false;
            return true;
        };
        for (unsigned i = 0; i < n_; ++i) {
            switch (s[i]) {
                case kThinking: push_with(out, s, i, kHungry); break;
                case kHungry:
                    if (fork_free(i)) push_with(out, s, i, kHasLeft);
                    break;
                case kHasLeft:
                    if (fork_free((i + 1) % n_)) push_with(out, s, i, kEating);
                    break;
                case kEating: push_with(out, s, i, kThinking); break;
            }
        }
    }

    const std::vector<std::string>& propositions() const override { return props_; }

    void labeling(std::span<const std::uint8_t> s, LabelBits& out) const override {
        out.clear();
        for (unsigned i = 0; i < n_; ++i) {
            if (s[i] == kEating) out.set(i);
            if (s[i] == kHungry || s[i] == kHasLeft) out.set(n_ + i);
        }
    }

private:
    static void push_with(std::vector<StateVector>& out, std::span<const std::uint8_t> s,
                          unsigned i, std::uint8_t val) {
        StateVector v(s.begin(), s.end());
        v[i] = val;
        out.push_back(std::move(v));
    }

    unsigned n_;
    std::vector<std::string> props_;
};

}   // namespace

std::unique_ptr<Model> generate_token_ring(unsigned n) {
    if (n < 2 || n > 30)
        throw ModelError("token-ring size must be in 2..30, got " + std::to_string(n));
    return std::make_unique<TokenRingModel>(n);
}

std::unique_ptr<Model> generate_philosophers(unsigned n) {
    if (n < 2 || n > 16)
        throw ModelError("philosophers size must be in 2..16, got " + std::to_string(n));
    return std::make_unique<PhilosophersModel>(n);
}

}   // namespace parmc
