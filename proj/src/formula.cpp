#include "parmc/formula.hpp"

#include <algorithm>
#include <cctype>

namespace parmc {

// ── AtomExpr construction ───────────────────────────────────────────────────

AtomExpr AtomExpr::constant(bool v) {
    AtomExpr e;
    e.kind = v ? Kind::True : Kind::False;
    return e;
}

AtomExpr AtomExpr::atom(std::string name) {
    AtomExpr e;
    e.kind = Kind::Atom;
    e.name = std::move(name);
    return e;
}

AtomExpr AtomExpr::negate(AtomExpr child) {
    AtomExpr e;
    e.kind = Kind::Not;
    e.children.push_back(std::move(child));
    return e;
}

AtomExpr AtomExpr::conj(std::vector<AtomExpr> es) {
    AtomExpr e;
    e.kind = Kind::And;
    e.children = std::move(es);
    return e;
}

AtomExpr AtomExpr::disj(std::vector<AtomExpr> es) {
    AtomExpr e;
    e.kind = Kind::Or;
    e.children = std::move(es);
    return e;
}

bool AtomExpr::operator==(const AtomExpr& o) const {
    return kind == o.kind && name == o.name && children == o.children;
}

bool Formula::operator==(const Formula& o) const {
    return op == o.op && left == o.left && right == o.right;
}

// ── Tokenizer ───────────────────────────────────────────────────────────────

namespace {

enum class Tok : std::uint8_t {
    Ident, LParen, RParen, Diamond, Box, Arrow, Neg, Amp, Pipe, End,
};

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }

    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw FormulaError(msg, cur_.offset);
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            cur_ = {Tok::End, {}, start};
            return;
        }
        char c = src_[pos_];
        auto make = [&](Tok k, std::size_t len) {
            cur_ = {k, src_.substr(start, len), start};
            pos_ += len;
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            make(Tok::Ident, end - pos_);
            return;
        }
        switch (c) {
            case '(': make(Tok::LParen, 1); return;
            case ')': make(Tok::RParen, 1); return;
            case '!': make(Tok::Neg, 1); return;
            case '&': make(Tok::Amp, 1); return;
            case '|': make(Tok::Pipe, 1); return;
            case '<':
                if (src_.substr(pos_, 2) == "<>") { make(Tok::Diamond, 2); return; }
                break;
            case '[':
                if (src_.substr(pos_, 2) == "[]") { make(Tok::Box, 2); return; }
                break;
            case '=':
                if (src_.substr(pos_, 3) == "==>") { make(Tok::Arrow, 3); return; }
                break;
            case '-': make(Tok::Neg, 1); return;
            default: break;
        }
        throw FormulaError("unexpected character '" + std::string(1, c) + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token cur_{Tok::End, {}, 0};
};

// Recursive-descent parser. Atom expressions may not contain temporal
// operators; an E/A path quantifier or `==>` inside an operand is reported
// as unsupported nesting.
class Parser {
public:
    explicit Parser(std::string_view src) : lx_(src) {}

    Formula formula() {
        Formula f = formula_inner();
        if (lx_.peek().kind != Tok::End)
            lx_.fail("trailing input after formula");
        return f;
    }

private:
    Formula formula_inner() {
        const Token& t = lx_.peek();
        if (t.kind == Tok::Ident && (t.text == "E" || t.text == "A")) {
            Lexer saved = lx_;
            bool universal = t.text == "A";
            lx_.next();
            switch (lx_.peek().kind) {
                case Tok::LParen: return until(universal);
                case Tok::Diamond:
                    lx_.next();
                    return Formula{universal ? TemporalOp::AF : TemporalOp::EF, {}, unary()};
                case Tok::Box: {
                    lx_.next();
                    if (universal && lx_.peek().kind == Tok::Diamond) {
                        lx_.next();
                        return Formula{TemporalOp::AGAF, {}, unary()};
                    }
                    return Formula{universal ? TemporalOp::AG : TemporalOp::EG, {}, unary()};
                }
                default:
                    lx_ = saved;   // a plain atom that happens to be named E or A
                    break;
            }
        }
        // Leadsto: <atom-expr> ==> <atom-expr>
        AtomExpr lhs = or_expr();
        if (lx_.peek().kind != Tok::Arrow)
            lx_.fail("expected a temporal operator or '==>'");
        lx_.next();
        AtomExpr rhs = or_expr();
        return Formula{TemporalOp::Leadsto, std::move(lhs), std::move(rhs)};
    }

    Formula until(bool universal) {
        expect(Tok::LParen, "expected '('");
        AtomExpr lhs = or_expr();
        const Token& sep = lx_.peek();
        if (!(sep.kind == Tok::Ident && sep.text == "U"))
            lx_.fail("expected 'U' in until formula");
        lx_.next();
        AtomExpr rhs = or_expr();
        expect(Tok::RParen, "expected ')'");
        return Formula{universal ? TemporalOp::AU : TemporalOp::EU, std::move(lhs),
                       std::move(rhs)};
    }

    AtomExpr or_expr() {
        std::vector<AtomExpr> parts;
        parts.push_back(and_expr());
        while (is_or(lx_.peek())) {
            lx_.next();
            parts.push_back(and_expr());
        }
        if (parts.size() == 1) return std::move(parts.front());
        return AtomExpr::disj(std::move(parts));
    }

    AtomExpr and_expr() {
        std::vector<AtomExpr> parts;
        parts.push_back(unary());
        while (is_and(lx_.peek())) {
            lx_.next();
            parts.push_back(unary());
        }
        if (parts.size() == 1) return std::move(parts.front());
        return AtomExpr::conj(std::move(parts));
    }

    AtomExpr unary() {
        const Token& t = lx_.peek();
        switch (t.kind) {
            case Tok::Neg:
                lx_.next();
                return AtomExpr::negate(unary());
            case Tok::LParen: {
                lx_.next();
                AtomExpr e = or_expr();
                if (lx_.peek().kind == Tok::Arrow)
                    lx_.fail("unsupported nesting: '==>' inside an operand");
                expect(Tok::RParen, "expected ')'");
                return e;
            }
            case Tok::Ident: {
                if (t.text == "E" || t.text == "A") {
                    // Lookahead: a quantifier applied to something is nesting.
                    Token q = lx_.next();
                    Tok nk = lx_.peek().kind;
                    if (nk == Tok::LParen || nk == Tok::Diamond || nk == Tok::Box)
                        throw FormulaError("unsupported nesting: temporal operator inside an operand",
                                           q.offset);
                    return AtomExpr::atom(std::string(q.text));
                }
                Token id = lx_.next();
                if (id.text == "true") return AtomExpr::constant(true);
                if (id.text == "false") return AtomExpr::constant(false);
                return AtomExpr::atom(std::string(id.text));
            }
            default:
                lx_.fail("expected an atom expression");
        }
    }

    bool is_or(const Token& t) const {
        return t.kind == Tok::Pipe || (t.kind == Tok::Ident && t.text == "or");
    }
    bool is_and(const Token& t) const {
        return t.kind == Tok::Amp || (t.kind == Tok::Ident && t.text == "and");
    }

    void expect(Tok k, const char* msg) {
        if (lx_.peek().kind != k) lx_.fail(msg);
        lx_.next();
    }

    Lexer lx_;
};

}   // namespace

Formula parse_formula(std::string_view text) { return Parser(text).formula(); }

// ── Normalization (one row per supported operator) ─────────────────────────

CheckTask normalize(const Formula& f) {
    const AtomExpr t = AtomExpr::constant(true);
    switch (f.op) {
        case TemporalOp::EU: return {TaskKind::EU, *f.left, f.right, false};
        case TemporalOp::AU: return {TaskKind::AU, *f.left, f.right, false};
        case TemporalOp::EF: return {TaskKind::EU, t, f.right, false};
        case TemporalOp::AF: return {TaskKind::AU, t, f.right, false};
        case TemporalOp::AG: return {TaskKind::EU, t, AtomExpr::negate(f.right), true};
        case TemporalOp::EG: return {TaskKind::AU, t, AtomExpr::negate(f.right), true};
        case TemporalOp::Leadsto: return {TaskKind::Leadsto, *f.left, f.right, false};
        case TemporalOp::AGAF: return {TaskKind::Leadsto, t, f.right, false};
    }
    throw FormulaError("unknown operator");
}

// ── Rendering ───────────────────────────────────────────────────────────────

std::string render(const AtomExpr& e) {
    switch (e.kind) {
        case AtomExpr::Kind::True: return "true";
        case AtomExpr::Kind::False: return "false";
        case AtomExpr::Kind::Atom: return e.name;
        case AtomExpr::Kind::Not: return "(-" + render(e.children[0]) + ")";
        case AtomExpr::Kind::And:
        case AtomExpr::Kind::Or: {
            const char* sep = e.kind == AtomExpr::Kind::And ? " and " : " or ";
            std::string out = "(";
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += sep;
                out += render(e.children[i]);
            }
            out += ")";
            return out;
        }
    }
    return {};
}

namespace {
std::string render_unary_operand(const AtomExpr& e) {
    std::string s = render(e);
    if (e.kind == AtomExpr::Kind::Atom || e.kind == AtomExpr::Kind::True ||
        e.kind == AtomExpr::Kind::False || s.front() == '(')
        return s;
    return "(" + s + ")";
}
}   // namespace

std::string render(const Formula& f) {
    switch (f.op) {
        case TemporalOp::EU: return "E(" + render(*f.left) + " U " + render(f.right) + ")";
        case TemporalOp::AU: return "A(" + render(*f.left) + " U " + render(f.right) + ")";
        case TemporalOp::EF: return "E<>" + render_unary_operand(f.right);
        case TemporalOp::AF: return "A<>" + render_unary_operand(f.right);
        case TemporalOp::EG: return "E[]" + render_unary_operand(f.right);
        case TemporalOp::AG: return "A[]" + render_unary_operand(f.right);
        case TemporalOp::AGAF: return "A[]<>" + render_unary_operand(f.right);
        case TemporalOp::Leadsto:
            return render_unary_operand(*f.left) + " ==> " + render_unary_operand(f.right);
    }
    return {};
}

// ── Evaluation ──────────────────────────────────────────────────────────────

bool eval_atom(const AtomExpr& e, std::span<const std::string> declared,
               const std::set<std::string>& labeling) {
    switch (e.kind) {
        case AtomExpr::Kind::True: return true;
        case AtomExpr::Kind::False: return false;
        case AtomExpr::Kind::Atom:
            if (std::find(declared.begin(), declared.end(), e.name) == declared.end())
                throw FormulaError("unknown proposition '" + e.name + "'");
            return labeling.count(e.name) != 0;
        case AtomExpr::Kind::Not: return !eval_atom(e.children[0], declared, labeling);
        case AtomExpr::Kind::And:
            for (const auto& c : e.children)
                if (!eval_atom(c, declared, labeling)) return false;
            return true;
        case AtomExpr::Kind::Or:
            for (const auto& c : e.children)
                if (eval_atom(c, declared, labeling)) return true;
            return false;
    }
    return false;
}

CompiledPred::CompiledPred(const AtomExpr& e, std::span<const std::string> propositions) {
    emit(e, propositions);
}

void CompiledPred::emit(const AtomExpr& e, std::span<const std::string> props) {
    switch (e.kind) {
        case AtomExpr::Kind::True: ops_.push_back({OpCode::PushTrue}); return;
        case AtomExpr::Kind::False: ops_.push_back({OpCode::PushFalse}); return;
        case AtomExpr::Kind::Atom: {
            auto it = std::find(props.begin(), props.end(), e.name);
            if (it == props.end())
                throw FormulaError("unknown proposition '" + e.name + "'");
            ops_.push_back({OpCode::PushProp, static_cast<std::uint32_t>(it - props.begin())});
            return;
        }
        case AtomExpr::Kind::Not:
            emit(e.children[0], props);
            ops_.push_back({OpCode::Not});
            return;
        case AtomExpr::Kind::And:
        case AtomExpr::Kind::Or: {
            // Left fold keeps the evaluation stack at tree depth + 1.
            const OpCode code = e.kind == AtomExpr::Kind::And ? OpCode::And : OpCode::Or;
            emit(e.children[0], props);
            for (std::size_t i = 1; i < e.children.size(); ++i) {
                emit(e.children[i], props);
                ops_.push_back({code});
            }
            return;
        }
    }
}

bool CompiledPred::eval(std::span<const std::uint64_t> words) const {
    // Binary reductions keep the stack at expression depth; 256 slots is far
    // beyond anything the parser produces for sane inputs.
    bool stack[256];
    int top = 0;
    for (const Op& op : ops_) {
        switch (op.code) {
            case OpCode::PushTrue: stack[top++] = true; break;
            case OpCode::PushFalse: stack[top++] = false; break;
            case OpCode::PushProp:
                stack[top++] = (words[op.arg >> 6] >> (op.arg & 63)) & 1u;
                break;
            case OpCode::Not: stack[top - 1] = !stack[top - 1]; break;
            case OpCode::And:
                --top;
                stack[top - 1] = stack[top - 1] && stack[top];
                break;
            case OpCode::Or:
                --top;
                stack[top - 1] = stack[top - 1] || stack[top];
                break;
        }
        if (top >= 250) throw FormulaError("atom expression too deep");
    }
    return stack[0];
}

}   // namespace parmc
