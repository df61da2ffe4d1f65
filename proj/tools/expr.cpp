#include "expr.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace freespec::cli {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    throw std::invalid_argument("cannot parse \"" + s_ + "\" at position " + std::to_string(pos_ + 1) + ": " +
                                what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  // Accepts ASCII '-' and U+2212.
  bool minus() {
    if (s_[pos_] == '-') return ++pos_, true;
    if (s_.compare(pos_, 3, "\xE2\x88\x92") == 0) return pos_ += 3, true;
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == '+') ++pos_, v += term();
      else if (pos_ < s_.size() && minus()) v -= term();
      else return v;
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == '*') ++pos_, v *= factor();
      else if (pos_ < s_.size() && s_[pos_] == '/') ++pos_, v /= factor();
      else return v;
    }
  }

  double factor() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    if (s_[pos_] == '+') return ++pos_, factor();
    if (minus()) return -factor();
    if (s_[pos_] == '(') {
      ++pos_;
      const double v = expr();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != ')') error("expected ')'");
      ++pos_;
      return v;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return 3.14159265358979323846;
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || !(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '.'))
      error("expected a number or pi");
    pos_ += static_cast<size_t>(end - begin);
    return v;
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

double parse_expression(const std::string& text) { return Parser(text).parse(); }

}  // namespace freespec::cli
