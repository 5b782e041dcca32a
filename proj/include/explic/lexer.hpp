#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "errors.hpp"

namespace explic::detail {

struct Token {
    enum Kind { Ident, Sym, End } kind;
    std::string text;
    std::size_t line, col;
};

// Identifiers are [A-Za-z_][A-Za-z0-9_]*; symbols are the longest match
// among the given multi-character operators, else a single character.
inline std::vector<Token> tokenize(const std::string& src, const std::vector<std::string>& multi) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto adv = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') adv(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') adv(1);
            continue;
        }
        std::size_t l0 = line, c0 = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Token::Ident, src.substr(i, j - i), l0, c0});
            adv(j - i);
            continue;
        }
        std::string best;
        for (auto& m : multi)
            if (m.size() > best.size() && src.compare(i, m.size(), m) == 0) best = m;
        if (best.empty()) best = std::string(1, c);
        out.push_back({Token::Sym, best, l0, c0});
        adv(best.size());
    }
    out.push_back({Token::End, "", line, col});
    return out;
}

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == Token::End; }
    bool is(const std::string& s) const { return peek().text == s && peek().kind != Token::End; }
    bool accept(const std::string& s) {
        if (is(s)) {
            next();
            return true;
        }
        return false;
    }
    void expect(const std::string& s) {
        if (!accept(s)) fail("expected '" + s + "' but found '" + describe(peek()) + "'");
    }
    std::string ident() {
        if (peek().kind != Token::Ident) fail("expected identifier but found '" + describe(peek()) + "'");
        return next().text;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().line, peek().col); }

private:
    static std::string describe(const Token& t) { return t.kind == Token::End ? "end of input" : t.text; }
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace explic::detail
