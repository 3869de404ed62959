#include "cpcsys/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cpcsys {

namespace {

std::string strip_spaces(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

[[noreturn]] void bad_expr(const std::string& text, const std::string& why) {
  throw std::invalid_argument("cannot parse expression \"" + text + "\": " + why);
}

// Splits on sep at parenthesis depth zero.
std::vector<std::string> split_top_level(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

std::int64_t parse_int(const std::string& text, const std::string& context) {
  if (text.empty()) bad_expr(context, "empty integer");
  std::size_t used = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    bad_expr(context, "bad integer \"" + text + "\"");
  }
  if (used != text.size()) bad_expr(context, "bad integer \"" + text + "\"");
  return value;
}

double parse_real(const std::string& text, const std::string& context) {
  if (text.empty()) bad_expr(context, "empty coefficient");
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    bad_expr(context, "bad coefficient \"" + text + "\"");
  }
  if (used != text.size()) bad_expr(context, "bad coefficient \"" + text + "\"");
  return value;
}

// "(1,0)" or "3" -> group element coordinates.
GroupElement parse_group_element(std::string part, const std::string& context) {
  if (part.size() >= 2 && part.front() == '(' && part.back() == ')') {
    part = part.substr(1, part.size() - 2);
  }
  if (part.empty()) bad_expr(context, "empty group element");
  GroupElement g;
  for (const std::string& coord : split_top_level(part, ',')) {
    g.push_back(parse_int(coord, context));
  }
  return g;
}

// Argument list of a call expression "name(...)" with the name already
// matched; returns the inside of the outer parentheses.
std::string call_args(const std::string& text, const std::string& name) {
  const std::string prefix = name + "(";
  if (text.size() < prefix.size() + 1 || text.compare(0, prefix.size(), prefix) != 0 ||
      text.back() != ')') {
    bad_expr(text, "expected " + name + "(...)");
  }
  return text.substr(prefix.size(), text.size() - prefix.size() - 1);
}

}  // namespace

GroupAlgebraElement parse_group_sum(const std::string& raw, const Group& group) {
  const std::string text = strip_spaces(raw);
  if (text.empty()) bad_expr(raw, "empty group sum");

  GroupAlgebraElement result = GroupAlgebraElement::zero(group);
  std::size_t pos = 0;
  double sign = 1.0;
  if (text[0] == '+' || text[0] == '-') {
    sign = (text[0] == '-') ? -1.0 : 1.0;
    pos = 1;
  }

  while (pos < text.size()) {
    // Scan the term up to the next top-level +/-.
    int depth = 0;
    std::size_t end = pos;
    while (end < text.size()) {
      const char c = text[end];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      // A sign at depth zero separates terms unless it is a float exponent
      // ("1e-3*delta(1)").
      const bool exponent_sign =
          end > pos && (text[end - 1] == 'e' || text[end - 1] == 'E');
      if ((c == '+' || c == '-') && depth == 0 && end > pos && !exponent_sign) break;
      ++end;
    }
    std::string term = text.substr(pos, end - pos);
    if (term.empty()) bad_expr(raw, "empty term");

    double coef = sign;
    const std::size_t star = term.find('*');
    if (star != std::string::npos) {
      coef *= parse_real(term.substr(0, star), raw);
      term = term.substr(star + 1);
    }
    const std::string inner = call_args(term, "delta");
    const GroupElement g = parse_group_element(inner, raw);
    result.add_coeff(g, std::complex<double>(coef, 0.0));

    if (end < text.size()) {
      sign = (text[end] == '-') ? -1.0 : 1.0;
      pos = end + 1;
    } else {
      pos = end;
    }
  }
  return result;
}

AlgElement parse_element_expr(const std::string& raw, const ElementExprContext& ctx) {
  if (ctx.algebra == nullptr) {
    throw std::invalid_argument("element expression needs a target algebra");
  }
  const std::string text = strip_spaces(raw);
  if (text.empty()) bad_expr(raw, "empty expression");

  if (text == "unit") return AlgElement::unit(*ctx.algebra);
  if (text == "zero") return AlgElement::zero(*ctx.algebra);

  if (text.rfind("psi(", 0) == 0) {
    if (ctx.approx == nullptr) {
      bad_expr(raw, "psi(...) needs a window-sequence system");
    }
    const std::string args = call_args(text, "psi");
    const std::vector<std::string> parts = split_top_level(args, ',');
    if (parts.size() < 2) bad_expr(raw, "psi needs a stage and a group sum");
    const std::int64_t k = parse_int(parts[0], raw);
    if (k < 0 || static_cast<std::size_t>(k) != ctx.stage) {
      std::ostringstream msg;
      msg << "psi stage " << k << " does not match the evaluation stage " << ctx.stage;
      bad_expr(raw, msg.str());
    }
    // Re-join the remaining parts: the group sum itself contains no
    // top-level commas (terms are joined by +/-), so a comma beyond the
    // first separates lattice coordinates inside delta(...) only when the
    // author forgot parentheses; reject that explicitly.
    if (parts.size() != 2) {
      bad_expr(raw, "unexpected comma in the group sum (parenthesize coordinates)");
    }
    return psi(*ctx.approx, ctx.stage, parse_group_sum(parts[1], ctx.approx->group()));
  }

  if (text.rfind("e(", 0) == 0) {
    if (ctx.approx == nullptr) {
      bad_expr(raw, "e(g,h) needs a window-sequence system");
    }
    const std::string args = call_args(text, "e");
    std::vector<std::string> parts = split_top_level(args, ',');
    // Dimension-1 coordinates arrive unparenthesized as "e(1,0)".
    if (parts.size() != 2) bad_expr(raw, "e needs exactly two group elements");
    const GroupElement g = parse_group_element(parts[0], raw);
    const GroupElement h = parse_group_element(parts[1], raw);
    const FolnerSet& window = ctx.approx->stage(ctx.stage);
    const auto gi = window.index_of(g);
    const auto hi = window.index_of(h);
    if (!gi || !hi) bad_expr(raw, "group element outside the stage window");
    return AlgElement::matrix_unit(*ctx.algebra, 0, static_cast<int>(*gi),
                                   static_cast<int>(*hi));
  }

  if (text.rfind("random(", 0) == 0) {
    const std::string args = call_args(text, "random");
    const std::int64_t offset = parse_int(args, raw);
    if (offset < 0) bad_expr(raw, "random offset must be >= 0");
    std::mt19937_64 rng(ctx.seed + static_cast<std::uint64_t>(offset));
    std::normal_distribution<double> dist(0.0, 1.0);
    AlgElement x = AlgElement::zero(*ctx.algebra);
    for (int b = 0; b < ctx.algebra->block_count(); ++b) {
      const int d = ctx.algebra->block_dims()[b];
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          x.block(b)(i, j) = std::complex<double>(dist(rng), dist(rng));
        }
      }
    }
    const double norm = operator_norm(x);
    if (norm > 0.0) x = std::complex<double>(1.0 / norm, 0.0) * x;
    return x;
  }

  bad_expr(raw, "unknown form (expected unit, zero, psi, e, or random)");
}

}  // namespace cpcsys
