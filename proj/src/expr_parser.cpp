#include "fbl/expr_parser.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <vector>

#include "fbl/errors.hpp"

namespace fbl {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim, const std::map<std::string, LatticeExpr>& names)
      : text_(text), dim_(dim), names_(names) {}

  LatticeExpr parse() {
    LatticeExpr e = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression: column " << pos_ + 1 << ": " << what;
    throw ValidationError(os.str());
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a term");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_space();
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  std::vector<double> number_list() {
    expect('[');
    std::vector<double> out;
    if (!peek(']')) {
      out.push_back(number());
      while (peek(',')) {
        ++pos_;
        out.push_back(number());
      }
    }
    expect(']');
    return out;
  }

  LatticeExpr expression() {
    const std::size_t at = pos_;
    const std::string head = identifier();
    if (head == "delta") {
      const auto coords = number_list();
      if (static_cast<int>(coords.size()) != dim_) {
        pos_ = at;
        std::ostringstream os;
        os << "delta has " << coords.size() << " coordinates, space has dimension " << dim_;
        fail(os.str());
      }
      return LatticeExpr::generator(Eigen::Map<const Vec>(coords.data(), dim_));
    }
    if (head == "abs") {
      expect('(');
      LatticeExpr e = expression();
      expect(')');
      return LatticeExpr::abs(e);
    }
    if (head == "join" || head == "meet" || head == "add") {
      expect('(');
      LatticeExpr a = expression();
      expect(',');
      LatticeExpr b = expression();
      expect(')');
      if (head == "join") return LatticeExpr::join(a, b);
      if (head == "meet") return LatticeExpr::meet(a, b);
      return LatticeExpr::sum(a, b);
    }
    if (head == "scale") {
      expect('(');
      const double c = number();
      expect(',');
      LatticeExpr e = expression();
      expect(')');
      return LatticeExpr::scale(c, e);
    }
    if (head == "psum") {
      expect('(');
      const double p = number();
      expect(',');
      auto coeffs = number_list();
      std::vector<LatticeExpr> terms;
      while (peek(',')) {
        ++pos_;
        terms.push_back(expression());
      }
      expect(')');
      if (terms.size() != coeffs.size()) fail("psum needs one coefficient per term");
      return LatticeExpr::power_sum(p, std::move(coeffs), std::move(terms));
    }
    if (auto it = names_.find(head); it != names_.end()) {
      if (it->second.dim() != dim_) fail("named expression '" + head + "' has the wrong dimension");
      return it->second;
    }
    pos_ = at;
    fail("unknown term '" + head + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int dim_;
  const std::map<std::string, LatticeExpr>& names_;
};

}  // namespace

LatticeExpr parse_expression(std::string_view text, int dim,
                             const std::map<std::string, LatticeExpr>& names) {
  return Parser(text, dim, names).parse();
}

}  // namespace fbl
