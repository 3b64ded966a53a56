#include <cctype>
#include <charconv>
#include <cmath>

#include "gavis/script/script.hpp"

namespace gavis::script {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexResult run() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                advance(1);
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                advance(1);
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                comment();
                continue;
            }
            if (digit(c)) {
                number();
                continue;
            }
            if (ident_start(c)) {
                identifier();
                continue;
            }
            switch (c) {
            case '+': case '-': case '*': case '.': case '^': case '/': case '~':
                single(TokenKind::Operator);
                continue;
            case '(': case ')': case ',': case ';': case '=': case '?': case ':':
                single(TokenKind::Punct);
                continue;
            default:
                illegal();
            }
        }
        Token end;
        end.kind = TokenKind::End;
        end.span = here(0);
        out_.tokens.push_back(end);
        return std::move(out_);
    }

private:
    char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    Span here(std::size_t len) const { return Span{line_, col_, pos_, len}; }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void push(TokenKind kind, std::size_t len, std::string lexeme, double value = 0.0) {
        Token t;
        t.kind = kind;
        t.span = here(len);
        t.lexeme = std::move(lexeme);
        t.number = value;
        out_.tokens.push_back(std::move(t));
        advance(len);
    }

    void single(TokenKind kind) { push(kind, 1, std::string(1, src_[pos_])); }

    void comment() {
        std::size_t end = src_.find('\n', pos_);
        if (end == std::string_view::npos) end = src_.size();
        std::string_view body = src_.substr(pos_ + 2, end - pos_ - 2);
        if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
        push(TokenKind::Comment, 2 + body.size(), std::string(body));
        advance(end - pos_);
    }

    void number() {
        std::size_t n = 0;
        while (digit(peek(n))) ++n;
        if (peek(n) == '.' && digit(peek(n + 1))) {
            ++n;
            while (digit(peek(n))) ++n;
        }
        if (peek(n) == 'e' || peek(n) == 'E') {
            std::size_t k = n + 1;
            if (peek(k) == '+' || peek(k) == '-') ++k;
            if (digit(peek(k))) {
                while (digit(peek(k))) ++k;
                n = k;
            }
        }
        std::string text(src_.substr(pos_, n));
        double value = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{} || !std::isfinite(value)) {
            out_.diagnostics.push_back(
                {Severity::Error, "LexError", "number out of range '" + text + "'", here(n)});
            advance(n);
            return;
        }
        push(TokenKind::Number, n, std::move(text), value);
    }

    void identifier() {
        std::size_t n = 0;
        while (ident_char(peek(n))) ++n;
        std::string text(src_.substr(pos_, n));
        TokenKind kind = is_color_keyword(text) ? TokenKind::ColorKeyword : TokenKind::Identifier;
        push(kind, n, std::move(text));
    }

    void illegal() {
        // Swallow a whole UTF-8 sequence so the span covers one character.
        auto lead = static_cast<unsigned char>(src_[pos_]);
        std::size_t n = 1;
        if (lead >= 0xC0) {
            while (n < 4 && pos_ + n < src_.size() && (static_cast<unsigned char>(src_[pos_ + n]) & 0xC0) == 0x80)
                ++n;
        }
        std::string shown(src_.substr(pos_, n));
        out_.diagnostics.push_back(
            {Severity::Error, "LexError", "illegal character '" + shown + "'", here(n)});
        advance(n);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    LexResult out_;
};

} // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

} // namespace gavis::script
