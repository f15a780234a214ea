#pragma once

// Surface syntax and normalization for the supported CTL fragment.
//
// The checker core understands three task kinds (EU, AU, leadsto); every
// operator of the surface logic maps onto one of them plus an optional
// negation of the final verdict:
//
//   E(p U q)      exists-until                 -> EU(p, q)
//   A(p U q)      forall-until                 -> AU(p, q)
//   E<> q         reachability                 -> EU(true, q)
//   A<> q         inevitability                -> AU(true, q)
//   E[] q         exists-globally              -> AU(true, !q), negated
//   A[] q         invariant                    -> EU(true, !q), negated
//   p ==> q       leadsto                      -> LEADSTO(p, q)
//   A[]<> q       recurrence                   -> LEADSTO(true, q)
//
// Operands are boolean combinations of atomic propositions; nesting of
// temporal operators is rejected by design.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parmc {

// ── AtomExpr ────────────────────────────────────────────────────────────────
// Boolean expression tree over proposition names. No temporal operators.

struct AtomExpr {
    enum class Kind : std::uint8_t { True, False, Atom, Not, And, Or };

    Kind kind = Kind::True;
    std::string name;                 // Atom nodes only
    std::vector<AtomExpr> children;   // Not: exactly 1; And/Or: >= 2

    static AtomExpr constant(bool v);
    static AtomExpr atom(std::string name);
    static AtomExpr negate(AtomExpr e);
    static AtomExpr conj(std::vector<AtomExpr> es);
    static AtomExpr disj(std::vector<AtomExpr> es);

    bool operator==(const AtomExpr& o) const;
};

enum class TemporalOp : std::uint8_t { EU, AU, EF, AF, EG, AG, Leadsto, AGAF };

struct Formula {
    TemporalOp op;
    std::optional<AtomExpr> left;   // psi; present for EU, AU, Leadsto
    AtomExpr right;                 // phi

    bool operator==(const Formula& o) const;
};

enum class TaskKind : std::uint8_t { EU, AU, Leadsto };

// Normalized core problem. Semantics of the source formula are recovered as
//   verdict(source) == run(kind, psi, phi) XOR negate_result.
struct CheckTask {
    TaskKind kind;
    AtomExpr psi;
    AtomExpr phi;
    bool negate_result = false;
};

struct FormulaError : std::runtime_error {
    explicit FormulaError(const std::string& msg, std::size_t offset = 0)
        : std::runtime_error(msg), offset(offset) {}
    std::size_t offset;   // byte offset into the source text, when known
};

// Parses the surface grammar. Whitespace-insensitive; `-` and `!` both
// negate; `and`/`&`, `or`/`|`; `true`/`false` are reserved literals.
// Throws FormulaError with a byte offset on syntax errors and on nested
// temporal operators ("unsupported nesting").
Formula parse_formula(std::string_view text);

// Maps a formula onto its core check task (table above).
CheckTask normalize(const Formula& f);

// Canonical text form; parse_formula(render(f)) reproduces f structurally.
std::string render(const Formula& f);
std::string render(const AtomExpr& e);

// Evaluates e against a labeling (the set of true propositions). Every atom
// of e must appear in `declared`; unknown names throw FormulaError.
bool eval_atom(const AtomExpr& e, std::span<const std::string> declared,
               const std::set<std::string>& labeling);

// ── CompiledPred ────────────────────────────────────────────────────────────
// An AtomExpr compiled against a model's proposition table, evaluated over a
// bitset labeling (one bit per proposition index). This is the hot path used
// by the exploration engine.

class CompiledPred {
public:
    // Compiles e, resolving atom names to indices into `propositions`.
    // Throws FormulaError on unknown proposition names.
    CompiledPred(const AtomExpr& e, std::span<const std::string> propositions);
    CompiledPred() = default;

    bool eval(std::span<const std::uint64_t> label_words) const;

    // True when the predicate is the constant `true` (lets callers skip
    // labeling work entirely).
    bool is_const_true() const { return ops_.size() == 1 && ops_[0].code == OpCode::PushTrue; }

private:
    enum class OpCode : std::uint8_t { PushTrue, PushFalse, PushProp, Not, And, Or };
    struct Op {
        OpCode code;
        std::uint32_t arg = 0;   // prop index, or operand count for And/Or
    };
    std::vector<Op> ops_;   // postfix program

    void emit(const AtomExpr& e, std::span<const std::string> propositions);
};

}   // namespace parmc
