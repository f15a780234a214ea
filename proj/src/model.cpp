#include "parmc/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace parmc {

bool ExplicitModel::state_has_prop(std::size_t s, std::uint32_t p) const {
    const auto& l = labels[s];
    return std::find(l.begin(), l.end(), p) != l.end();
}

// ── .ksg parser ─────────────────────────────────────────────────────────────

namespace {

[[noreturn]] void fail_line(std::size_t line, const std::string& msg) {
    throw ModelError("line " + std::to_string(line) + ": " + msg);
}

std::uint64_t parse_uint(std::string_view tok, std::size_t line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        fail_line(line, "expected a number, got '" + std::string(tok) + "'");
    return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}   // namespace

ExplicitModel parse_explicit(std::string_view text) {
    struct PendingEdge {
        std::uint64_t src, dst;
        std::size_t line;
    };
    std::unordered_map<std::uint64_t, std::uint32_t> index;   // declared id -> dense
    std::unordered_map<std::string, std::uint32_t> prop_index;
    ExplicitModel m;
    std::vector<PendingEdge> pending;
    bool have_init = false;
    std::uint64_t init_id = 0;
    std::size_t init_line = 0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        auto toks = split_ws(line);
        if (toks.empty()) continue;

        if (toks[0] == "init") {
            if (toks.size() != 2) fail_line(line_no, "init takes exactly one state id");
            if (have_init) fail_line(line_no, "duplicate init directive");
            init_id = parse_uint(toks[1], line_no);
            init_line = line_no;
            have_init = true;
        } else if (toks[0] == "state") {
            if (toks.size() < 2) fail_line(line_no, "state needs an id");
            std::uint64_t id = parse_uint(toks[1], line_no);
            if (index.count(id)) fail_line(line_no, "duplicate state " + std::to_string(id));
            // Remaining tokens form "[p q r]"; brackets may touch the names.
            std::string joined;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                joined += ' ';
                joined += toks[i];
            }
            std::string plist;
            for (char c : joined)
                plist += (c == '[' || c == ']' || c == ',') ? ' ' : c;
            std::vector<std::uint32_t> lp;
            for (auto p : split_ws(plist)) {
                std::string name(p);
                auto [it, fresh] = prop_index.try_emplace(name,
                                                          static_cast<std::uint32_t>(m.props.size()));
                if (fresh) m.props.push_back(name);
                if (std::find(lp.begin(), lp.end(), it->second) != lp.end())
                    fail_line(line_no, "duplicate proposition '" + name + "'");
                lp.push_back(it->second);
            }
            index.emplace(id, static_cast<std::uint32_t>(m.edges.size()));
            m.edges.emplace_back();
            m.labels.push_back(std::move(lp));
        } else if (toks[0] == "edge") {
            if (toks.size() != 3) fail_line(line_no, "edge takes source and destination");
            pending.push_back({parse_uint(toks[1], line_no), parse_uint(toks[2], line_no), line_no});
        } else {
            fail_line(line_no, "unknown directive '" + std::string(toks[0]) + "'");
        }
    }

    if (!have_init) throw ModelError("missing init directive");
    auto lookup = [&](std::uint64_t id, std::size_t line) {
        auto it = index.find(id);
        if (it == index.end())
            fail_line(line, "undeclared state " + std::to_string(id));
        return it->second;
    };
    m.init = lookup(init_id, init_line);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& e : pending) {
        std::uint32_t s = lookup(e.src, e.line), d = lookup(e.dst, e.line);
        if (!seen.insert({s, d}).second)
            fail_line(e.line, "duplicate edge " + std::to_string(e.src) + " -> " +
                                  std::to_string(e.dst));
        m.edges[s].push_back(d);
    }
    return m;
}

ExplicitModel load_explicit(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_explicit(ss.str());
}

// ── ExplicitGraphModel ──────────────────────────────────────────────────────

std::uint32_t ExplicitGraphModel::decode(std::span<const std::uint8_t> s) {
    return static_cast<std::uint32_t>(s[0]) | static_cast<std::uint32_t>(s[1]) << 8 |
           static_cast<std::uint32_t>(s[2]) << 16 | static_cast<std::uint32_t>(s[3]) << 24;
}

StateVector ExplicitGraphModel::encode(std::uint32_t idx) {
    return {static_cast<std::uint8_t>(idx), static_cast<std::uint8_t>(idx >> 8),
            static_cast<std::uint8_t>(idx >> 16), static_cast<std::uint8_t>(idx >> 24)};
}

StateVector ExplicitGraphModel::initial() const {
    return encode(static_cast<std::uint32_t>(m_.init));
}

void ExplicitGraphModel::successors(std::span<const std::uint8_t> s,
                                    std::vector<StateVector>& out) const {
    out.clear();
    for (std::uint32_t d : m_.edges[decode(s)]) out.push_back(encode(d));
}

void ExplicitGraphModel::labeling(std::span<const std::uint8_t> s, LabelBits& out) const {
    out.clear();
    for (std::uint32_t p : m_.labels[decode(s)]) out.set(p);
}

}   // namespace parmc
