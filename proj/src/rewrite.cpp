#include "mbagen/rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mbagen/detail/grammar.hpp"
#include "mbagen/errors.hpp"

namespace mbagen {

Pattern Pattern::hole(std::string name) {
    Pattern p;
    p.kind = Kind::Hole;
    p.name = std::move(name);
    return p;
}

Pattern Pattern::var(std::string name) {
    Pattern p;
    p.kind = Kind::Var;
    p.name = std::move(name);
    return p;
}

Pattern Pattern::constant(std::uint64_t value) {
    Pattern p;
    p.kind = Kind::Const;
    p.value = value;
    return p;
}

Pattern Pattern::apply(Op op, std::vector<Pattern> children) {
    Pattern p;
    p.kind = Kind::Apply;
    p.op = op;
    p.children = std::move(children);
    return p;
}

namespace {

struct PatternBuilder {
    using Node = Pattern;
    BitWidth width;

    Pattern make_var(std::string name) { return Pattern::var(std::move(name)); }
    Pattern make_const(std::uint64_t v) { return Pattern::constant(width.reduce(v)); }
    Pattern make_hole(std::string name, std::size_t) { return Pattern::hole(std::move(name)); }
    Pattern make_unary(Op op, Pattern a) { return Pattern::apply(op, {std::move(a)}); }
    Pattern make_binary(Op op, Pattern a, Pattern b) {
        return Pattern::apply(op, {std::move(a), std::move(b)});
    }
};

void print_into(const Pattern& p, std::string& out) {
    switch (p.kind) {
        case Pattern::Kind::Hole: out += '?'; out += p.name; return;
        case Pattern::Kind::Var: out += p.name; return;
        case Pattern::Kind::Const: out += std::to_string(p.value); return;
        case Pattern::Kind::Apply: break;
    }
    out += '(';
    if (p.children.size() == 1) {
        out += symbol(p.op);
        out += ' ';
        print_into(p.children[0], out);
    } else {
        print_into(p.children[0], out);
        out += ' ';
        out += symbol(p.op);
        out += ' ';
        print_into(p.children[1], out);
    }
    out += ')';
}

void collect(const Pattern& p, Pattern::Kind kind, std::set<std::string>& out) {
    if (p.kind == kind) out.insert(p.name);
    for (const Pattern& c : p.children) collect(c, kind, out);
}

}  // namespace

Pattern parse_pattern(std::string_view text, BitWidth width) {
    PatternBuilder builder{width};
    detail::GrammarParser<PatternBuilder> parser(text, builder);
    return parser.parse_all();
}

std::string print(const Pattern& p) {
    std::string out;
    print_into(p, out);
    return out;
}

std::set<std::string> holes(const Pattern& p) {
    std::set<std::string> out;
    collect(p, Pattern::Kind::Hole, out);
    return out;
}

Expr to_expr(const Pattern& p) {
    switch (p.kind) {
        case Pattern::Kind::Hole:
        case Pattern::Kind::Var: return Expr::var(p.name);
        case Pattern::Kind::Const: return Expr::constant(p.value);
        case Pattern::Kind::Apply: break;
    }
    if (p.children.size() == 1) return Expr::apply(p.op, to_expr(p.children[0]));
    return Expr::apply(p.op, to_expr(p.children[0]), to_expr(p.children[1]));
}

// ---------------------------------------------------------------------------
// Rule files

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Pattern parse_side(std::string_view line, std::size_t begin, std::size_t end, std::size_t line_no,
                   BitWidth width) {
    std::string_view side = line.substr(begin, end - begin);
    if (trim(side).empty()) throw SyntaxError(begin + 1, "empty pattern", line_no);
    try {
        return parse_pattern(side, width);
    } catch (const SyntaxError& e) {
        throw SyntaxError(begin + e.position(), e.detail(), line_no);
    }
}

void check_bound(const std::string& rule, const Pattern& from, const Pattern& to) {
    const auto bound = holes(from);
    for (const std::string& h : holes(to))
        if (!bound.contains(h)) throw UnboundRhsVar(rule, h);
}

}  // namespace

std::vector<Rule> parse_rules(std::string_view text, BitWidth width) {
    std::vector<Rule> rules;
    std::set<std::string> names;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        start = nl + 1;
        ++line_no;

        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;

        const std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) throw SyntaxError(1, "expected 'name : LHS => RHS'", line_no);
        const std::string name(trim(line.substr(0, colon)));
        if (name.empty()) throw SyntaxError(1, "missing rule name", line_no);
        for (char c : name)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
                throw SyntaxError(line.find(name) + 1, "invalid character in rule name", line_no);

        bool both = true;
        std::size_t arrow = line.find("<=>", colon);
        std::size_t arrow_len = 3;
        if (arrow == std::string_view::npos) {
            both = false;
            arrow = line.find("=>", colon);
            arrow_len = 2;
        }
        if (arrow == std::string_view::npos) throw SyntaxError(colon + 2, "expected '=>' or '<=>'", line_no);

        Pattern lhs = parse_side(line, colon + 1, arrow, line_no, width);
        Pattern rhs = parse_side(line, arrow + arrow_len, line.size(), line_no, width);

        std::set<std::string> vars;
        collect(lhs, Pattern::Kind::Var, vars);
        collect(rhs, Pattern::Kind::Var, vars);
        for (const std::string& h : holes(lhs))
            if (vars.contains(h))
                throw SyntaxError(colon + 2, "variable '" + h + "' also used as ?" + h, line_no);

        check_bound(name, lhs, rhs);
        if (both) check_bound(name, rhs, lhs);

        auto add = [&](std::string n, Pattern l, Pattern r) {
            if (!names.insert(n).second) throw SyntaxError(1, "duplicate rule name '" + n + "'", line_no);
            rules.push_back(Rule{std::move(n), std::move(l), std::move(r), both});
        };
        if (both) {
            add(name, lhs, rhs);
            add(name + "-rev", std::move(rhs), std::move(lhs));
        } else {
            add(name, std::move(lhs), std::move(rhs));
        }
    }
    return rules;
}

std::vector<Rule> load_rules(const std::string& path, BitWidth width) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rule file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rules(ss.str(), width);
}

// ---------------------------------------------------------------------------
// E-matching

namespace {

// Pattern flattened into an array with holes numbered by sorted name.
struct CompiledPattern {
    struct Node {
        Pattern::Kind kind;
        Label label;
        int hole = -1;
        std::vector<int> kids;
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    std::vector<std::string> hole_names;
    bool matchable = true;
};

CompiledPattern compile(const EGraph& g, const Pattern& p) {
    CompiledPattern cp;
    const auto hs = holes(p);
    cp.hole_names.assign(hs.begin(), hs.end());
    auto go = [&](auto&& self, const Pattern& q) -> int {
        const int idx = static_cast<int>(cp.nodes.size());
        cp.nodes.push_back({q.kind, {}, -1, {}});
        switch (q.kind) {
            case Pattern::Kind::Hole:
                cp.nodes[idx].hole = static_cast<int>(
                    std::lower_bound(cp.hole_names.begin(), cp.hole_names.end(), q.name) -
                    cp.hole_names.begin());
                break;
            case Pattern::Kind::Var:
                if (auto s = g.symbol(q.name))
                    cp.nodes[idx].label = Label::variable(*s);
                else
                    cp.matchable = false;
                break;
            case Pattern::Kind::Const: cp.nodes[idx].label = Label::constant(q.value); break;
            case Pattern::Kind::Apply: {
                cp.nodes[idx].label = Label::op_label(q.op);
                std::vector<int> kids;
                for (const Pattern& c : q.children) kids.push_back(self(self, c));
                cp.nodes[idx].kids = std::move(kids);
                break;
            }
        }
        return idx;
    };
    go(go, p);
    return cp;
}

class Searcher {
public:
    Searcher(const EGraph& g, const CompiledPattern& cp) : g_(g), cp_(cp), bound_(cp.hole_names.size()) {}

    std::vector<Substitution> run(ClassId root) {
        out_.clear();
        goals_.assign(1, {0, root});
        step();
        std::sort(out_.begin(), out_.end());
        out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
        return std::move(out_);
    }

private:
    void step() {
        if (goals_.empty()) {
            Substitution s;
            s.reserve(bound_.size());
            for (std::size_t i = 0; i < bound_.size(); ++i) s.emplace_back(cp_.hole_names[i], *bound_[i]);
            out_.push_back(std::move(s));
            return;
        }
        const auto [pi, cls] = goals_.back();
        goals_.pop_back();
        const auto& pn = cp_.nodes[static_cast<std::size_t>(pi)];
        if (pn.kind == Pattern::Kind::Hole) {
            auto& slot = bound_[static_cast<std::size_t>(pn.hole)];
            if (slot) {
                if (*slot == cls) step();
            } else {
                slot = cls;
                step();
                slot.reset();
            }
        } else {
            const auto& nodes = g_.eclass(cls).nodes;
            auto it = std::lower_bound(nodes.begin(), nodes.end(), pn.label,
                                       [](const ENode& n, const Label& l) { return n.label() < l; });
            for (; it != nodes.end() && it->label() == pn.label; ++it) {
                auto kids = it->children();
                if (kids.size() != pn.kids.size()) continue;
                for (std::size_t k = kids.size(); k-- > 0;) goals_.emplace_back(pn.kids[k], kids[k]);
                step();
                goals_.resize(goals_.size() - kids.size());
            }
        }
        goals_.emplace_back(pi, cls);
    }

    const EGraph& g_;
    const CompiledPattern& cp_;
    std::vector<std::optional<ClassId>> bound_;
    std::vector<std::pair<int, ClassId>> goals_;
    std::vector<Substitution> out_;
};

std::vector<Match> assemble(const std::vector<ClassId>& roots, std::vector<std::vector<Substitution>>& found) {
    std::vector<Match> out;
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (Substitution& s : found[i]) out.push_back(Match{{}, roots[i], std::move(s)});
    return out;
}

}  // namespace

std::vector<Match> ematch(const EGraph& g, const Pattern& pattern) {
    const CompiledPattern cp = compile(g, pattern);
    if (!cp.matchable) return {};
    const std::vector<ClassId> roots = g.class_ids();
    std::vector<std::vector<Substitution>> found(roots.size());
    const auto n = static_cast<std::ptrdiff_t>(roots.size());
#pragma omp parallel
    {
        Searcher searcher(g, cp);
#pragma omp for schedule(dynamic, 32)
        for (std::ptrdiff_t i = 0; i < n; ++i) found[static_cast<std::size_t>(i)] = searcher.run(roots[static_cast<std::size_t>(i)]);
    }
    return assemble(roots, found);
}

std::vector<Match> ematch(const EGraph& g, const Rule& rule) {
    std::vector<Match> out = ematch(g, rule.lhs);
    for (Match& m : out) m.rule = rule.name;
    return out;
}

std::vector<Match> reference::ematch(const EGraph& g, const Pattern& pattern) {
    const CompiledPattern cp = compile(g, pattern);
    if (!cp.matchable) return {};
    const std::vector<ClassId> roots = g.class_ids();
    std::vector<std::vector<Substitution>> found(roots.size());
    Searcher searcher(g, cp);
    for (std::size_t i = 0; i < roots.size(); ++i) found[i] = searcher.run(roots[i]);
    return assemble(roots, found);
}

// ---------------------------------------------------------------------------
// Application

namespace {

ClassId lookup_subst(const Substitution& s, const std::string& name) {
    auto it = std::lower_bound(s.begin(), s.end(), name,
                               [](const auto& kv, const std::string& n) { return kv.first < n; });
    if (it == s.end() || it->first != name) throw Error("substitution does not bind ?" + name);
    return it->second;
}

ClassId instantiate(EGraph& g, const Pattern& p, const Substitution& s) {
    switch (p.kind) {
        case Pattern::Kind::Hole: return lookup_subst(s, p.name);
        case Pattern::Kind::Var: return g.add(ENode(Label::variable(g.intern(p.name))));
        case Pattern::Kind::Const: return g.add(ENode(Label::constant(p.value)));
        case Pattern::Kind::Apply: break;
    }
    const ClassId a = instantiate(g, p.children[0], s);
    if (p.children.size() == 1) return g.add(ENode(p.op, a));
    const ClassId b = instantiate(g, p.children[1], s);
    return g.add(ENode(p.op, a, b));
}

}  // namespace

bool apply_match(EGraph& g, const Rule& rule, const Match& m) {
    const std::size_t before = g.node_count();
    const ClassId rhs = instantiate(g, rule.rhs, m.subst);
    const bool merged = g.merge(m.root, rhs).second;
    return merged || g.node_count() != before;
}

std::size_t count_new_nodes(const EGraph& g, const Pattern& pattern, const Substitution& subst) {
    // Nodes that would be created get ids above every real class so that
    // repeated subpatterns are counted once.
    constexpr std::uint32_t kVirtualBase = 0x80000000u;
    std::unordered_map<ENode, ClassId, ENodeHash> virtual_nodes;
    auto resolve = [&](const ENode& n) -> ClassId {
        bool is_virtual = false;
        for (ClassId c : n.children()) is_virtual |= c.value() >= kVirtualBase;
        if (!is_virtual)
            if (auto hit = g.lookup(n)) return *hit;
        auto [it, inserted] = virtual_nodes.try_emplace(
            n, ClassId{kVirtualBase + static_cast<std::uint32_t>(virtual_nodes.size())});
        return it->second;
    };
    auto go = [&](auto&& self, const Pattern& p) -> ClassId {
        switch (p.kind) {
            case Pattern::Kind::Hole: return g.find(lookup_subst(subst, p.name));
            case Pattern::Kind::Var: {
                if (auto s = g.symbol(p.name)) return resolve(ENode(Label::variable(*s)));
                // Unknown symbol: a label above every interned index.
                return resolve(ENode(Label::variable(~std::uint64_t{0} - std::hash<std::string>{}(p.name) % 0xffffffffu)));
            }
            case Pattern::Kind::Const: return resolve(ENode(Label::constant(p.value)));
            case Pattern::Kind::Apply: break;
        }
        const ClassId a = self(self, p.children[0]);
        if (p.children.size() == 1) return resolve(ENode(p.op, a));
        return resolve(ENode(p.op, a, self(self, p.children[1])));
    };
    go(go, pattern);
    return virtual_nodes.size();
}

}  // namespace mbagen
