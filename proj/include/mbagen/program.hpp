#pragma once

// Straight-line compilation of expressions for batched evaluation. Shared and
// structurally identical subterms are computed once, so a tree with heavy
// repetition (e.g. an unrolled extraction) costs only its distinct nodes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbagen/expr.hpp"

namespace mbagen {

class Program {
public:
    /// Compiles `roots` against the input order `inputs`. Throws
    /// UnboundVariable if a root mentions a variable not in `inputs`.
    static Program compile(std::span<const Expr> roots, std::span<const std::string> inputs);

    std::size_t instruction_count() const noexcept { return code_.size(); }
    std::size_t register_count() const noexcept { return registers_; }
    std::size_t input_count() const noexcept { return inputs_; }
    std::size_t output_count() const noexcept { return outputs_.size(); }

    /// Per-thread register file for blocks of up to `lanes` environments.
    class Scratch {
    public:
        Scratch(const Program& p, std::size_t lanes) : lanes_(lanes), regs_(p.registers_ * lanes) {}

    private:
        friend class Program;
        std::size_t lanes_;
        std::vector<std::uint64_t> regs_;
    };

    /// Evaluates `lanes` environments at once. `inputs` is input-major
    /// (inputs[v * lanes + j]); `outputs` receives output-major values,
    /// unreduced modulo 2^64.
    void run(std::span<const std::uint64_t> inputs, std::size_t lanes, std::span<std::uint64_t> outputs,
             Scratch& scratch) const;

private:
    enum class Code : std::uint8_t { Input, Const, Add, Sub, Mul, Neg, And, Or, Xor, Not };
    struct Instr {
        Code code;
        std::uint32_t dst;
        std::uint32_t a;
        std::uint32_t b;
        std::uint64_t imm;  // constant value or input index
    };

    std::vector<Instr> code_;
    std::vector<std::uint32_t> outputs_;  // registers holding each root
    std::size_t registers_ = 0;
    std::size_t inputs_ = 0;
};

}  // namespace mbagen
