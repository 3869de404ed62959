#pragma once

// Tiny expression language for reproducible test elements in configs and
// reports.
//
// Stage-algebra elements:
//   unit | zero
//   psi(k, <group-sum>)   compression of the group-algebra element (k must
//                         name the stage the expression is evaluated at)
//   e(g, h)               matrix unit indexed by window elements; lattice
//                         coordinates of dimension > 1 are parenthesized,
//                         e.g. e((1,0),(0,0))
//   random(s)             seeded Gaussian element, normalized to norm 1;
//                         the engine seed offsets s
//
// Group sums: signed terms  [coef *] delta(g)  joined by + or -, with real
// coefficients, e.g. "delta(1)+delta(-1)" or "0.5*delta(2)-delta(0)".

#include <cstddef>
#include <cstdint>
#include <string>

#include "cpcsys/folner_system.hpp"
#include "cpcsys/groupalg.hpp"

namespace cpcsys {

struct ElementExprContext {
  const FiniteDimCstar* algebra = nullptr;      // required
  const ApproximationSystem* approx = nullptr;  // required for psi and e(g,h)
  std::size_t stage = 0;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument on syntax errors, on psi/e(g,h) without an
// approximation context, and on a psi stage mismatching ctx.stage.
AlgElement parse_element_expr(const std::string& text, const ElementExprContext& ctx);

GroupAlgebraElement parse_group_sum(const std::string& text, const Group& group);

}  // namespace cpcsys
