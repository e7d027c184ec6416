#pragma once

// Recursive-descent parser shared by expressions and rule patterns. The
// builder decides what nodes are produced and whether "?name" holes are
// accepted.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "mbagen/errors.hpp"
#include "mbagen/expr.hpp"

namespace mbagen::detail {

inline constexpr std::size_t kMaxNesting = 1000;

template <class Builder>
class GrammarParser {
public:
    using Node = typename Builder::Node;

    GrammarParser(std::string_view text, Builder& builder) : text_(text), builder_(builder) {}

    Node parse_all() {
        Node n = parse_or();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_ + 1, msg); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    template <class Next>
    Node left_assoc(char sym, Op op, Next next) {
        Node lhs = (this->*next)();
        while (accept(sym)) lhs = builder_.make_binary(op, std::move(lhs), (this->*next)());
        return lhs;
    }

    Node parse_or() { return left_assoc('|', Op::Or, &GrammarParser::parse_xor); }
    Node parse_xor() { return left_assoc('^', Op::Xor, &GrammarParser::parse_and); }
    Node parse_and() { return left_assoc('&', Op::And, &GrammarParser::parse_sum); }
    Node parse_term() { return left_assoc('*', Op::Mul, &GrammarParser::parse_unary); }

    Node parse_sum() {
        Node lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = builder_.make_binary(Op::Add, std::move(lhs), parse_term());
            else if (accept('-'))
                lhs = builder_.make_binary(Op::Sub, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    Node parse_unary() {
        Guard guard(*this);
        if (accept('-')) return builder_.make_unary(Op::Neg, parse_unary());
        if (accept('~')) return builder_.make_unary(Op::Not, parse_unary());
        return parse_atom();
    }

    Node parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Node inner = parse_or();
            if (!accept(')')) fail(pos_ >= text_.size() ? "expected ')' before end of input"
                                                        : "expected ')'");
            return inner;
        }
        if (c == '?') {
            const std::size_t at = pos_;
            ++pos_;
            if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected identifier after '?'");
            std::string name = read_ident();
            return builder_.make_hole(std::move(name), at + 1);
        }
        if (ident_start(c)) return builder_.make_var(read_ident());
        if (std::isdigit(static_cast<unsigned char>(c))) return builder_.make_const(read_number());
        fail("unexpected '" + std::string(1, c) + "'");
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }

    std::string read_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    // Accumulates modulo 2^64; callers reduce to the engine width.
    std::uint64_t read_number() {
        std::uint64_t v = 0;
        if (text_.substr(pos_, 2) == "0x" || text_.substr(pos_, 2) == "0X") {
            pos_ += 2;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_]))) {
                const char d = static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
                v = v * 16 + static_cast<std::uint64_t>(d <= '9' ? d - '0' : d - 'a' + 10);
                ++pos_;
            }
            if (pos_ == start) fail("expected hex digits after '0x'");
        } else {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
                ++pos_;
            }
        }
        if (pos_ < text_.size() && ident_start(text_[pos_])) fail("malformed number");
        return v;
    }

    struct Guard {
        explicit Guard(GrammarParser& p) : p_(p) {
            if (++p_.nesting_ > kMaxNesting) p_.fail("expression nested too deeply");
        }
        ~Guard() { --p_.nesting_; }
        GrammarParser& p_;
    };

    std::string_view text_;
    Builder& builder_;
    std::size_t pos_ = 0;
    std::size_t nesting_ = 0;
};

}  // namespace mbagen::detail
