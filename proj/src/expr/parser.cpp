#include "pbh/expr/parser.hpp"

#include "pbh/error.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

namespace pbh {
namespace {

class Parser {
public:
    Parser(std::string_view text, int dim, const std::vector<std::string>& params, const std::string& prefix)
        : text_(text), dim_(dim), params_(params), prefix_(prefix) {}

    Expression run() {
        Expression e = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message, std::size_t at) const { throw ParseError(message, at + 1); }
    [[noreturn]] void fail(const std::string& message) const { fail(message, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    Expression expr() {
        Expression lhs = term();
        for (;;) {
            if (accept('+')) lhs = lhs + term();
            else if (accept('-')) lhs = lhs - term();
            else return lhs;
        }
    }

    Expression term() {
        Expression lhs = unary();
        for (;;) {
            if (accept('*')) lhs = lhs * unary();
            else if (accept('/')) lhs = lhs / unary();
            else return lhs;
        }
    }

    Expression unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expression power() {
        Expression base = primary();
        if (accept('^')) return pow(base, unary());
        return base;
    }

    Expression number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) fail("malformed number", start);
        return Expression::constant(value);
    }

    std::vector<Expression> arguments() {
        std::vector<Expression> args;
        expect('(');
        if (accept(')')) return args;
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        expect(')');
        return args;
    }

    Expression call(const std::string& name, std::size_t at) {
        auto args = arguments();
        const std::size_t want = name == "abspow" ? 2 : 1;
        if (args.size() != want)
            fail("function '" + name + "' takes " + std::to_string(want) + " argument(s), got " +
                     std::to_string(args.size()),
                 at);
        if (name == "sqrt") return sqrt(args[0]);
        if (name == "exp") return exp(args[0]);
        if (name == "log") return log(args[0]);
        if (name == "sin") return sin(args[0]);
        if (name == "cos") return cos(args[0]);
        if (name == "neg") return -args[0];
        if (!args[1].is_constant()) fail("abspow exponent must be a numeric constant", at);
        return abs_pow(args[0], args[1].node().value);
    }

    static bool is_function(const std::string& name) {
        return name == "sqrt" || name == "exp" || name == "log" || name == "sin" || name == "cos" || name == "neg" ||
               name == "abspow";
    }

    Expression identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        if (is_function(name)) return call(name, start);
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (params_[i] == name) return Expression::parameter(static_cast<int>(i), name);
        if (name == "pi") return Expression::constant(std::numbers::pi);

        if (name.size() > prefix_.size() && name.compare(0, prefix_.size(), prefix_) == 0) {
            const std::string digits = name.substr(prefix_.size());
            bool numeric = !digits.empty() && digits[0] != '0';
            for (char ch : digits) numeric = numeric && std::isdigit(static_cast<unsigned char>(ch));
            if (numeric) {
                const int index = std::stoi(digits);
                if (index > dim_)
                    fail("coordinate '" + name + "' out of range for dimension " + std::to_string(dim_), start);
                return Expression::coordinate(index - 1);
            }
        }
        fail("unknown identifier '" + name + "'", start);
    }

    Expression primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (accept('(')) {
            Expression e = expr();
            expect(')');
            return e;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    int dim_;
    const std::vector<std::string>& params_;
    std::string prefix_;
    std::size_t pos_ = 0;
};

} // namespace

Expression parse(std::string_view text, int dim, const std::vector<std::string>& params,
                 const std::string& coordinate_prefix) {
    if (dim < 0) throw ConfigError("parse: negative dimension");
    return Parser(text, dim, params, coordinate_prefix).run();
}

} // namespace pbh
