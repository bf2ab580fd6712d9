#include "thinflow/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "thinflow/errors.hpp"

namespace thinflow {

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    SmoothFunction1D parse() {
        SmoothFunction1D r = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    SmoothFunction1D expr() {
        SmoothFunction1D r = term();
        for (;;) {
            if (accept('+')) r = r + term();
            else if (accept('-')) r = r - term();
            else return r;
        }
    }

    SmoothFunction1D term() {
        SmoothFunction1D r = unary();
        for (;;) {
            if (accept('*')) r = r * unary();
            else if (accept('/')) r = r / unary();
            else return r;
        }
    }

    SmoothFunction1D unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    SmoothFunction1D power() {
        SmoothFunction1D base = atom();
        if (!accept('^')) return base;
        SmoothFunction1D ex = unary();
        if (auto c = ex.constant_value()) return thinflow::pow(base, *c);
        return thinflow::exp(ex * thinflow::log(base));
    }

    double constant_arg(const SmoothFunction1D& f, const char* fn) {
        auto c = f.constant_value();
        if (!c) fail(std::string(fn) + " expects constant edge arguments");
        return *c;
    }

    SmoothFunction1D atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            return SmoothFunction1D::constant(v);
        }
        if (accept('(')) {
            SmoothFunction1D r = expr();
            expect(')');
            return r;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return SmoothFunction1D::identity();
            if (name == "pi") return SmoothFunction1D::constant(std::numbers::pi);
            expect('(');
            std::vector<SmoothFunction1D> args{expr()};
            while (accept(',')) args.push_back(expr());
            expect(')');
            auto arity = [&](size_t n) {
                if (args.size() != n) fail(name + " takes " + std::to_string(n) + " argument(s)");
            };
            if (name == "sin") { arity(1); return thinflow::sin(args[0]); }
            if (name == "cos") { arity(1); return thinflow::cos(args[0]); }
            if (name == "exp") { arity(1); return thinflow::exp(args[0]); }
            if (name == "log") { arity(1); return thinflow::log(args[0]); }
            if (name == "sqrt") { arity(1); return thinflow::sqrt(args[0]); }
            if (name == "smoothstep") {
                arity(3);
                return SmoothFunction1D::smoothstep(constant_arg(args[0], "smoothstep"),
                                                    constant_arg(args[1], "smoothstep"), args[2]);
            }
            pos_ = start;
            fail("unknown function '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    size_t pos_ = 0;
};

}  // namespace

SmoothFunction1D parse_expression(const std::string& text) {
    SmoothFunction1D f = Parser(text).parse();
    return SmoothFunction1D(f.node(), text);
}

}  // namespace thinflow
