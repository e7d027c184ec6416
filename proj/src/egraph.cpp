#include "mbagen/egraph.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "mbagen/errors.hpp"

namespace mbagen {

std::size_t ENode::hash() const noexcept {
    std::size_t h = static_cast<std::size_t>(label_.kind) * 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(label_.op));
    mix(label_.payload);
    for (ClassId c : children()) mix(c.value());
    return h;
}

void EGraph::check(ClassId c) const {
    if (c.value() >= parent_.size()) throw InvalidId(c.value());
}

ClassId EGraph::find(ClassId c) const {
    check(c);
    std::uint32_t x = c.value();
    while (parent_[x] != x) x = parent_[x];
    return ClassId{x};
}

ClassId EGraph::find_compress(ClassId c) {
    check(c);
    std::uint32_t x = c.value();
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return ClassId{x};
}

ENode EGraph::canonicalize(ENode node) const {
    for (ClassId& c : node.children()) c = find(c);
    return node;
}

std::optional<ClassId> EGraph::lookup(ENode node) const {
    auto it = memo_.find(canonicalize(node));
    if (it == memo_.end()) return std::nullopt;
    return find(it->second);
}

ClassId EGraph::add(ENode node) {
    for (ClassId& c : node.children()) c = find_compress(c);
    if (auto it = memo_.find(node); it != memo_.end()) return find_compress(it->second);
    if (node_count_ >= hard_cap_) throw CapacityExceeded(hard_cap_);

    const ClassId id{static_cast<std::uint32_t>(parent_.size())};
    parent_.push_back(id.value());
    classes_.push_back(EClass{id, {node}, {}});
    memo_.emplace(node, id);
    auto kids = node.children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i == 1 && kids[1] == kids[0]) break;
        classes_[kids[i].value()].parents.emplace_back(node, id);
    }
    ++node_count_;
    ++live_classes_;
    return id;
}

ClassId EGraph::add_expr(const Expr& e) {
    std::unordered_map<const void*, ClassId> done;
    auto go = [&](auto&& self, const Expr& x) -> ClassId {
        if (auto it = done.find(x.identity()); it != done.end()) return it->second;
        ClassId id;
        switch (x.kind()) {
            case Expr::Kind::Var: id = add(ENode(Label::variable(intern(x.name())))); break;
            case Expr::Kind::Const: id = add(ENode(Label::constant(x.value()))); break;
            case Expr::Kind::Apply: {
                auto kids = x.children();
                const ClassId a = self(self, kids[0]);
                id = kids.size() == 1 ? add(ENode(x.op(), a)) : add(ENode(x.op(), a, self(self, kids[1])));
                break;
            }
        }
        done.emplace(x.identity(), id);
        return id;
    };
    return go(go, e);
}

std::pair<ClassId, bool> EGraph::merge(ClassId a, ClassId b) {
    a = find_compress(a);
    b = find_compress(b);
    if (a == b) return {a, false};
    const ClassId root = std::min(a, b);
    const ClassId other = std::max(a, b);
    parent_[other.value()] = root.value();

    EClass& from = classes_[other.value()];
    EClass& into = classes_[root.value()];
    pending_.insert(pending_.end(), from.parents.begin(), from.parents.end());
    into.nodes.insert(into.nodes.end(), from.nodes.begin(), from.nodes.end());
    into.parents.insert(into.parents.end(), from.parents.begin(), from.parents.end());
    from.nodes = {};
    from.parents = {};
    --live_classes_;
    dirty_ = true;
    return {root, true};
}

std::size_t EGraph::rebuild() {
    std::size_t repairs = 0;
    while (!pending_.empty()) {
        auto todo = std::exchange(pending_, {});
        for (auto& [node, cls] : todo) {
            ++repairs;
            ENode canon = node;
            for (ClassId& c : canon.children()) c = find_compress(c);
            auto [it, inserted] = memo_.try_emplace(canon, cls);
            if (!inserted) merge(it->second, cls);
        }
    }
    if (dirty_) rebuild_classes();
    return repairs;
}

void EGraph::rebuild_classes() {
    memo_.clear();
    node_count_ = 0;
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (parent_[i] != i) continue;
        EClass& cls = classes_[i];
        for (ENode& n : cls.nodes)
            for (ClassId& c : n.children()) c = find_compress(c);
        std::sort(cls.nodes.begin(), cls.nodes.end());
        cls.nodes.erase(std::unique(cls.nodes.begin(), cls.nodes.end()), cls.nodes.end());
        for (auto& [n, owner] : cls.parents) {
            for (ClassId& c : n.children()) c = find_compress(c);
            owner = find_compress(owner);
        }
        std::sort(cls.parents.begin(), cls.parents.end());
        cls.parents.erase(std::unique(cls.parents.begin(), cls.parents.end()), cls.parents.end());
        for (const ENode& n : cls.nodes) memo_.emplace(n, cls.id);
        node_count_ += cls.nodes.size();
    }
    dirty_ = false;
}

const EClass& EGraph::eclass(ClassId c) const { return classes_[find(c).value()]; }

std::vector<ClassId> EGraph::class_ids() const {
    std::vector<ClassId> out;
    out.reserve(live_classes_);
    for (std::uint32_t i = 0; i < parent_.size(); ++i)
        if (parent_[i] == i) out.emplace_back(i);
    return out;
}

std::uint64_t EGraph::intern(std::string_view name) {
    auto [it, inserted] = symbol_index_.try_emplace(std::string(name), symbols_.size());
    if (inserted) symbols_.emplace_back(name);
    return it->second;
}

std::optional<std::uint64_t> EGraph::symbol(std::string_view name) const {
    auto it = symbol_index_.find(std::string(name));
    if (it == symbol_index_.end()) return std::nullopt;
    return it->second;
}

std::string EGraph::node_text(const ENode& n) const {
    const Label& l = n.label();
    switch (l.kind) {
        case Expr::Kind::Var: return symbols_.at(l.payload);
        case Expr::Kind::Const: return std::to_string(l.payload);
        case Expr::Kind::Apply: break;
    }
    std::string out(label_name(l.op));
    out += '(';
    bool first = true;
    for (ClassId c : n.children()) {
        if (!first) out += ", ";
        out += std::to_string(find(c).value());
        first = false;
    }
    return out + ')';
}

std::string EGraph::dump() const {
    std::ostringstream os;
    for (ClassId id : class_ids()) {
        std::vector<ENode> nodes = classes_[id.value()].nodes;
        for (ENode& n : nodes) n = canonicalize(n);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        os << "class " << id.value() << ": {";
        for (std::size_t i = 0; i < nodes.size(); ++i) os << (i ? ", " : "") << node_text(nodes[i]);
        os << "}\n";
    }
    return os.str();
}

std::string EGraph::to_dot() const {
    std::ostringstream os;
    os << "digraph egraph {\n  compound=true;\n  node [shape=box];\n";
    for (ClassId id : class_ids()) {
        const auto& nodes = classes_[id.value()].nodes;
        os << "  subgraph cluster_" << id.value() << " {\n    style=dashed;\n";
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const ENode& n = nodes[i];
            std::string text = n.is_leaf() ? node_text(n) : std::string(label_name(n.label().op));
            os << "    n" << id.value() << "_" << i << " [label=\"" << text << "\"];\n";
        }
        os << "  }\n";
    }
    for (ClassId id : class_ids()) {
        const auto& nodes = classes_[id.value()].nodes;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (ClassId c : nodes[i].children()) {
                const ClassId t = find(c);
                os << "  n" << id.value() << "_" << i << " -> n" << t.value() << "_0 [lhead=cluster_"
                   << t.value() << "];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace mbagen
