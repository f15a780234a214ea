#include "parmc/gts.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace parmc {

namespace {

// ── Expression trees ────────────────────────────────────────────────────────

struct IntExpr {
    enum class Kind : std::uint8_t { Const, Var, Add, Sub, Mul };
    Kind kind;
    std::int64_t value = 0;         // Const
    std::uint32_t var = 0;          // Var
    std::unique_ptr<IntExpr> lhs, rhs;
};

struct BoolExpr {
    enum class Kind : std::uint8_t { Const, Cmp, Not, And, Or };
    enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
    Kind kind;
    bool value = false;             // Const
    CmpOp cmp{};                    // Cmp
    std::unique_ptr<IntExpr> ilhs, irhs;
    std::unique_ptr<BoolExpr> lhs, rhs;
};

std::int64_t eval_int(const IntExpr& e, std::span<const std::int64_t> vals) {
    switch (e.kind) {
        case IntExpr::Kind::Const: return e.value;
        case IntExpr::Kind::Var: return vals[e.var];
        case IntExpr::Kind::Add: return eval_int(*e.lhs, vals) + eval_int(*e.rhs, vals);
        case IntExpr::Kind::Sub: return eval_int(*e.lhs, vals) - eval_int(*e.rhs, vals);
        case IntExpr::Kind::Mul: return eval_int(*e.lhs, vals) * eval_int(*e.rhs, vals);
    }
    return 0;
}

bool eval_bool(const BoolExpr& e, std::span<const std::int64_t> vals) {
    switch (e.kind) {
        case BoolExpr::Kind::Const: return e.value;
        case BoolExpr::Kind::Cmp: {
            std::int64_t a = eval_int(*e.ilhs, vals), b = eval_int(*e.irhs, vals);
            switch (e.cmp) {
                case BoolExpr::CmpOp::Eq: return a == b;
                case BoolExpr::CmpOp::Ne: return a != b;
                case BoolExpr::CmpOp::Lt: return a < b;
                case BoolExpr::CmpOp::Le: return a <= b;
                case BoolExpr::CmpOp::Gt: return a > b;
                case BoolExpr::CmpOp::Ge: return a >= b;
            }
            return false;
        }
        case BoolExpr::Kind::Not: return !eval_bool(*e.lhs, vals);
        case BoolExpr::Kind::And: return eval_bool(*e.lhs, vals) && eval_bool(*e.rhs, vals);
        case BoolExpr::Kind::Or: return eval_bool(*e.lhs, vals) || eval_bool(*e.rhs, vals);
    }
    return false;
}

struct VarDecl {
    std::string name;
    std::int64_t lo, hi, init;
    std::uint32_t width;   // encoded bytes
};

struct Assignment {
    std::uint32_t var;
    IntExpr expr;
};

struct Rule {
    BoolExpr guard;
    std::vector<Assignment> updates;
    std::size_t line;
};

struct PropDecl {
    std::string name;
    BoolExpr pred;
};

// ── Tokenizer (line-aware for error messages) ───────────────────────────────

struct GtsToken {
    std::string_view text;
    std::size_t line;
    bool eof = false;
};

class GtsLexer {
public:
    explicit GtsLexer(std::string_view src) : src_(src) { advance(); }

    const GtsToken& peek() const { return cur_; }
    GtsToken next() {
        GtsToken t = cur_;
        advance();
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ModelError("line " + std::to_string(cur_.line) + ": " + msg);
    }

private:
    void advance() {
        for (;;) {
            while (pos_ < src_.size() &&
                   std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                if (src_[pos_] == '\n') ++line_;
                ++pos_;
            }
            if (pos_ < src_.size() && src_[pos_] == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        if (pos_ >= src_.size()) {
            cur_ = {{}, line_, true};
            return;
        }
        std::size_t start = pos_;
        char c = src_[pos_];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
        } else {
            // Multi-char operators first.
            static constexpr std::string_view multi[] = {":=", "..", "->", "==", "!=",
                                                         "<=", ">=", "&&", "||"};
            std::string_view two = src_.substr(pos_, 2);
            bool matched = false;
            for (auto m : multi)
                if (two == m) {
                    pos_ += 2;
                    matched = true;
                    break;
                }
            if (!matched) ++pos_;
        }
        cur_ = {src_.substr(start, pos_ - start), line_, false};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    GtsToken cur_;
};

bool is_ident(std::string_view t) {
    if (t.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(t[0])) && t[0] != '_') return false;
    for (char c : t)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

bool is_number(std::string_view t) {
    if (t.empty()) return false;
    for (char c : t)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

class GtsParser {
public:
    explicit GtsParser(std::string_view src) : lx_(src) {}

    void parse() {
        while (!lx_.peek().eof) {
            auto kw = lx_.next();
            if (kw.text == "var") parse_var();
            else if (kw.text == "rule") parse_rule(kw.line);
            else if (kw.text == "prop") parse_prop();
            else throw ModelError("line " + std::to_string(kw.line) + ": expected var, rule or prop");
        }
        if (vars.empty()) throw ModelError("model declares no variables");
    }

    std::vector<VarDecl> vars;
    std::vector<Rule> rules;
    std::vector<PropDecl> props;
    std::unordered_map<std::string, std::uint32_t> var_index;

private:
    void parse_var() {
        auto name = expect_ident();
        expect(":");
        std::int64_t lo = expect_int();
        expect("..");
        std::int64_t hi = expect_int();
        expect("init");
        std::int64_t init = expect_int();
        expect(";");
        if (hi < lo) lx_.fail("empty range for variable '" + std::string(name) + "'");
        if (init < lo || init > hi) lx_.fail("init value outside range");
        if (var_index.count(std::string(name))) lx_.fail("duplicate variable");
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
        std::uint32_t width = span < 0x100 ? 1 : span < 0x10000 ? 2 : span < 0x100000000ull ? 4 : 8;
        var_index.emplace(std::string(name), static_cast<std::uint32_t>(vars.size()));
        vars.push_back({std::string(name), lo, hi, init, width});
    }

    void parse_rule(std::size_t line) {
        Rule r;
        r.line = line;
        r.guard = bool_expr();
        expect("->");
        for (;;) {
            auto name = expect_ident();
            expect(":=");
            Assignment a;
            a.var = var_of(name);
            a.expr = std::move(*int_expr());
            r.updates.push_back(std::move(a));
            if (lx_.peek().text == ",") {
                lx_.next();
                continue;
            }
            break;
        }
        expect(";");
        rules.push_back(std::move(r));
    }

    void parse_prop() {
        auto name = expect_ident();
        expect(":");
        PropDecl p;
        p.name = std::string(name);
        for (const auto& q : props)
            if (q.name == p.name) lx_.fail("duplicate proposition '" + p.name + "'");
        p.pred = bool_expr();
        expect(";");
        props.push_back(std::move(p));
    }

    // bool := band ('or' band)* ; band := bnot ('and' bnot)* ;
    // bnot := ('not'|'!') bnot | cmp | 'true' | 'false' | '(' bool ')'
    BoolExpr bool_expr() {
        BoolExpr e = band();
        while (lx_.peek().text == "or" || lx_.peek().text == "||" || lx_.peek().text == "|") {
            lx_.next();
            BoolExpr rhs = band();
            BoolExpr n;
            n.kind = BoolExpr::Kind::Or;
            n.lhs = std::make_unique<BoolExpr>(std::move(e));
            n.rhs = std::make_unique<BoolExpr>(std::move(rhs));
            e = std::move(n);
        }
        return e;
    }

    BoolExpr band() {
        BoolExpr e = bnot();
        while (lx_.peek().text == "and" || lx_.peek().text == "&&" || lx_.peek().text == "&") {
            lx_.next();
            BoolExpr rhs = bnot();
            BoolExpr n;
            n.kind = BoolExpr::Kind::And;
            n.lhs = std::make_unique<BoolExpr>(std::move(e));
            n.rhs = std::make_unique<BoolExpr>(std::move(rhs));
            e = std::move(n);
        }
        return e;
    }

    BoolExpr bnot() {
        if (lx_.peek().text == "not" || lx_.peek().text == "!") {
            lx_.next();
            BoolExpr n;
            n.kind = BoolExpr::Kind::Not;
            n.lhs = std::make_unique<BoolExpr>(bnot());
            return n;
        }
        if (lx_.peek().text == "true" || lx_.peek().text == "false") {
            BoolExpr n;
            n.kind = BoolExpr::Kind::Const;
            n.value = lx_.next().text == "true";
            return n;
        }
        if (lx_.peek().text == "(") {
            // Could be a parenthesised bool or the lhs of a comparison;
            // try comparison first by parsing an int expression.
            // Disambiguate: a '(' followed by a bool connective structure is
            // rare in guards; we parse an int expr and require a comparator,
            // falling back to bool when the comparator is absent.
            GtsLexer save = lx_;
            try {
                return comparison();
            } catch (const ModelError&) {
                lx_ = save;
                lx_.next();
                BoolExpr e = bool_expr();
                expect(")");
                return e;
            }
        }
        return comparison();
    }

    BoolExpr comparison() {
        BoolExpr n;
        n.kind = BoolExpr::Kind::Cmp;
        n.ilhs = int_expr();
        auto op = lx_.next();
        if (op.text == "==") n.cmp = BoolExpr::CmpOp::Eq;
        else if (op.text == "!=") n.cmp = BoolExpr::CmpOp::Ne;
        else if (op.text == "<") n.cmp = BoolExpr::CmpOp::Lt;
        else if (op.text == "<=") n.cmp = BoolExpr::CmpOp::Le;
        else if (op.text == ">") n.cmp = BoolExpr::CmpOp::Gt;
        else if (op.text == ">=") n.cmp = BoolExpr::CmpOp::Ge;
        else throw ModelError("line " + std::to_string(op.line) + ": expected a comparison operator");
        n.irhs = int_expr();
        return n;
    }

    std::unique_ptr<IntExpr> int_expr() {
        auto e = term();
        while (lx_.peek().text == "+" || lx_.peek().text == "-") {
            bool add = lx_.next().text == "+";
            auto rhs = term();
            auto n = std::make_unique<IntExpr>();
            n->kind = add ? IntExpr::Kind::Add : IntExpr::Kind::Sub;
            n->lhs = std::move(e);
            n->rhs = std::move(rhs);
            e = std::move(n);
        }
        return e;
    }

    std::unique_ptr<IntExpr> term() {
        auto e = factor();
        while (lx_.peek().text == "*") {
            lx_.next();
            auto rhs = factor();
            auto n = std::make_unique<IntExpr>();
            n->kind = IntExpr::Kind::Mul;
            n->lhs = std::move(e);
            n->rhs = std::move(rhs);
            e = std::move(n);
        }
        return e;
    }

    std::unique_ptr<IntExpr> factor() {
        auto t = lx_.peek();
        auto n = std::make_unique<IntExpr>();
        if (is_number(t.text)) {
            lx_.next();
            n->kind = IntExpr::Kind::Const;
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), n->value);
            return n;
        }
        if (t.text == "(") {
            lx_.next();
            auto e = int_expr();
            expect(")");
            return e;
        }
        if (is_ident(t.text)) {
            lx_.next();
            n->kind = IntExpr::Kind::Var;
            n->var = var_of(t.text);
            return n;
        }
        lx_.fail("expected an integer expression");
    }

    std::uint32_t var_of(std::string_view name) {
        auto it = var_index.find(std::string(name));
        if (it == var_index.end())
            lx_.fail("unknown variable '" + std::string(name) + "'");
        return it->second;
    }

    std::string_view expect_ident() {
        auto t = lx_.peek();
        if (!is_ident(t.text)) lx_.fail("expected an identifier");
        return lx_.next().text;
    }

    std::int64_t expect_int() {
        bool neg = false;
        if (lx_.peek().text == "-") {
            lx_.next();
            neg = true;
        }
        auto t = lx_.peek();
        if (!is_number(t.text)) lx_.fail("expected a number");
        lx_.next();
        std::int64_t v = 0;
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        return neg ? -v : v;
    }

    void expect(std::string_view text) {
        if (lx_.peek().text != text)
            lx_.fail("expected '" + std::string(text) + "'");
        lx_.next();
    }

    GtsLexer lx_;
};

// ── The model ───────────────────────────────────────────────────────────────

class GtsModel final : public Model {
public:
    GtsModel(std::vector<VarDecl> vars, std::vector<Rule> rules, std::vector<PropDecl> props)
        : vars_(std::move(vars)), rules_(std::move(rules)), props_(std::move(props)) {
        for (const auto& v : vars_) {
            offsets_.push_back(width_);
            width_ += v.width;
        }
        for (const auto& p : props_) prop_names_.push_back(p.name);
    }

    std::size_t state_width() const override { return width_; }

    StateVector initial() const override {
        std::vector<std::int64_t> vals;
        for (const auto& v : vars_) vals.push_back(v.init);
        return encode(vals);
    }

    void successors(std::span<const std::uint8_t> s,
                    std::vector<StateVector>& out) const override {
        out.clear();
        std::vector<std::int64_t> vals = decode(s);
        std::vector<std::int64_t> next(vals.size());
        for (const auto& r : rules_) {
            if (!eval_bool(r.guard, vals)) continue;
            next = vals;
            for (const auto& a : r.updates) {
                std::int64_t v = eval_int(a.expr, vals);   // simultaneous semantics
                const VarDecl& d = vars_[a.var];
                if (v < d.lo || v > d.hi)
                    throw ModelError("rule at line " + std::to_string(r.line) + ": variable '" +
                                     d.name + "' assigned " + std::to_string(v) +
                                     " outside range " + std::to_string(d.lo) + ".." +
                                     std::to_string(d.hi));
                next[a.var] = v;
            }
            StateVector enc = encode(next);
            if (std::find(out.begin(), out.end(), enc) == out.end())
                out.push_back(std::move(enc));
        }
    }

    const std::vector<std::string>& propositions() const override { return prop_names_; }

    void labeling(std::span<const std::uint8_t> s, LabelBits& out) const override {
        out.clear();
        std::vector<std::int64_t> vals = decode(s);
        for (std::size_t i = 0; i < props_.size(); ++i)
            if (eval_bool(props_[i].pred, vals)) out.set(i);
    }

private:
    StateVector encode(std::span<const std::int64_t> vals) const {
        StateVector out(width_);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            std::uint64_t u = static_cast<std::uint64_t>(vals[i] - vars_[i].lo);
            for (std::uint32_t b = 0; b < vars_[i].width; ++b)
                out[offsets_[i] + b] = static_cast<std::uint8_t>(u >> (8 * b));
        }
        return out;
    }

    std::vector<std::int64_t> decode(std::span<const std::uint8_t> s) const {
        std::vector<std::int64_t> vals(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            std::uint64_t u = 0;
            for (std::uint32_t b = 0; b < vars_[i].width; ++b)
                u |= static_cast<std::uint64_t>(s[offsets_[i] + b]) << (8 * b);
            vals[i] = static_cast<std::int64_t>(u) + vars_[i].lo;
        }
        return vals;
    }

    std::vector<VarDecl> vars_;
    std::vector<Rule> rules_;
    std::vector<PropDecl> props_;
    std::vector<std::string> prop_names_;
    std::vector<std::uint32_t> offsets_;
    std::size_t width_ = 0;
};

}   // namespace

std::unique_ptr<Model> parse_gts(std::string_view text) {
    GtsParser p(text);
    p.parse();
    return std::make_unique<GtsModel>(std::move(p.vars), std::move(p.rules), std::move(p.props));
}

std::unique_ptr<Model> load_gts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_gts(ss.str());
}

}   // namespace parmc
