#include "mbagen/program.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include "mbagen/errors.hpp"

namespace mbagen {

namespace {

struct KeyHash {
    std::size_t operator()(const std::tuple<int, std::uint64_t, std::uint32_t, std::uint32_t>& k) const noexcept {
        std::size_t h = std::hash<int>{}(std::get<0>(k));
        h = h * 1000003u ^ std::hash<std::uint64_t>{}(std::get<1>(k));
        h = h * 1000003u ^ std::get<2>(k);
        h = h * 1000003u ^ std::get<3>(k);
        return h;
    }
};

}  // namespace

Program Program::compile(std::span<const Expr> roots, std::span<const std::string> inputs) {
    Program p;
    p.inputs_ = inputs.size();
    std::map<std::string, std::uint32_t, std::less<>> input_index;
    for (std::uint32_t i = 0; i < inputs.size(); ++i) input_index.emplace(inputs[i], i);

    // Value numbering: one slot per distinct (code, imm, a, b).
    std::vector<Instr> values;
    std::unordered_map<std::tuple<int, std::uint64_t, std::uint32_t, std::uint32_t>, std::uint32_t, KeyHash>
        numbering;
    std::unordered_map<const void*, std::uint32_t> by_node;

    auto intern = [&](Code code, std::uint64_t imm, std::uint32_t a, std::uint32_t b) {
        auto key = std::make_tuple(static_cast<int>(code), imm, a, b);
        auto [it, inserted] = numbering.try_emplace(key, static_cast<std::uint32_t>(values.size()));
        if (inserted) values.push_back(Instr{code, 0, a, b, imm});
        return it->second;
    };

    auto lower = [&](auto&& self, const Expr& e) -> std::uint32_t {
        if (auto it = by_node.find(e.identity()); it != by_node.end()) return it->second;
        std::uint32_t v = 0;
        switch (e.kind()) {
            case Expr::Kind::Var: {
                auto it = input_index.find(e.name());
                if (it == input_index.end()) throw UnboundVariable(e.name());
                v = intern(Code::Input, it->second, 0, 0);
                break;
            }
            case Expr::Kind::Const: v = intern(Code::Const, e.value(), 0, 0); break;
            case Expr::Kind::Apply: {
                auto kids = e.children();
                const std::uint32_t a = self(self, kids[0]);
                const std::uint32_t b = kids.size() == 2 ? self(self, kids[1]) : 0;
                Code code = Code::Add;
                switch (e.op()) {
                    case Op::Add: code = Code::Add; break;
                    case Op::Sub: code = Code::Sub; break;
                    case Op::Mul: code = Code::Mul; break;
                    case Op::Neg: code = Code::Neg; break;
                    case Op::And: code = Code::And; break;
                    case Op::Or: code = Code::Or; break;
                    case Op::Xor: code = Code::Xor; break;
                    case Op::Not: code = Code::Not; break;
                }
                v = intern(code, 0, a, b);
                break;
            }
        }
        by_node.emplace(e.identity(), v);
        return v;
    };

    std::vector<std::uint32_t> root_values;
    for (const Expr& r : roots) root_values.push_back(lower(lower, r));

    // Register allocation: a value's register is released after its last use.
    const std::size_t n = values.size();
    constexpr std::size_t kForever = ~std::size_t{0};
    std::vector<std::size_t> last_use(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Instr& in = values[i];
        if (in.code == Code::Input || in.code == Code::Const) continue;
        last_use[in.a] = i;
        if (in.code != Code::Neg && in.code != Code::Not) last_use[in.b] = i;
    }
    for (std::uint32_t r : root_values) last_use[r] = kForever;

    std::vector<std::uint32_t> reg(n);
    std::vector<std::uint32_t> free_regs;
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Instr in = values[i];
        const bool unary = in.code == Code::Neg || in.code == Code::Not;
        const bool leaf = in.code == Code::Input || in.code == Code::Const;
        if (!leaf) {
            in.a = reg[in.a];
            if (!unary) in.b = reg[in.b];
        }
        std::uint32_t dst;
        if (free_regs.empty()) {
            dst = next++;
        } else {
            dst = free_regs.back();
            free_regs.pop_back();
        }
        // Dying operands are released only after dst is chosen, so dst never
        // aliases an operand.
        if (!leaf) {
            const Instr& orig = values[i];
            if (last_use[orig.a] == i) free_regs.push_back(reg[orig.a]);
            if (!unary && orig.b != orig.a && last_use[orig.b] == i) free_regs.push_back(reg[orig.b]);
        }
        in.dst = dst;
        reg[i] = dst;
        p.code_.push_back(in);
    }
    p.registers_ = next;
    for (std::uint32_t r : root_values) p.outputs_.push_back(reg[r]);
    return p;
}

void Program::run(std::span<const std::uint64_t> inputs, std::size_t lanes, std::span<std::uint64_t> outputs,
                  Scratch& scratch) const {
    std::uint64_t* regs = scratch.regs_.data();
    const std::size_t stride = scratch.lanes_;
    for (const Instr& in : code_) {
        std::uint64_t* d = regs + in.dst * stride;
        const std::uint64_t* a = regs + in.a * stride;
        const std::uint64_t* b = regs + in.b * stride;
        switch (in.code) {
            case Code::Input: {
                const std::uint64_t* src = inputs.data() + in.imm * lanes;
                for (std::size_t j = 0; j < lanes; ++j) d[j] = src[j];
                break;
            }
            case Code::Const:
                for (std::size_t j = 0; j < lanes; ++j) d[j] = in.imm;
                break;
            case Code::Add: for (std::size_t j = 0; j < lanes; ++j) d[j] = a[j] + b[j]; break;
            case Code::Sub: for (std::size_t j = 0; j < lanes; ++j) d[j] = a[j] - b[j]; break;
            case Code::Mul: for (std::size_t j = 0; j < lanes; ++j) d[j] = a[j] * b[j]; break;
            case Code::Neg: for (std::size_t j = 0; j < lanes; ++j) d[j] = 0 - a[j]; break;
            case Code::And: for (std::size_t j = 0; j < lanes; ++j) d[j] = a[j] & b[j]; break;
            case Code::Or: for (std::size_t j = 0; j < lanes; ++j) d[j] = a[j] | b[j]; break;
            case Code::Xor: for (std::size_t j = 0; j < lanes; ++j) d[j] = a[j] ^ b[j]; break;
            case Code::Not: for (std::size_t j = 0; j < lanes; ++j) d[j] = ~a[j]; break;
        }
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k) {
        const std::uint64_t* src = regs + outputs_[k] * stride;
        std::copy(src, src + lanes, outputs.data() + k * lanes);
    }
}

}  // namespace mbagen
