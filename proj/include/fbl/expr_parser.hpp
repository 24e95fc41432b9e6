#pragma once

#include <map>
#include <string>
#include <string_view>

#include "fbl/homfn.hpp"

namespace fbl {

/**
 * Parse a lattice expression in prefix syntax:
 *
 *   delta [x1,...,xn] | abs(e) | join(e,e) | meet(e,e) | add(e,e)
 *   | scale(c,e) | psum(p,[c1,...,cm],e1,...,em) | <name>
 *
 * Bare identifiers are looked up in `names`. Every generator must have
 * `dim` coordinates. Errors throw ValidationError with the column.
 */
LatticeExpr parse_expression(std::string_view text, int dim,
                             const std::map<std::string, LatticeExpr>& names = {});

}  // namespace fbl
