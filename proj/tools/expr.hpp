// Arithmetic on decimal literals and `pi` with + - * / and parentheses.
#pragma once

#include <string>

namespace freespec::cli {

/// Throws std::invalid_argument with the offending position.
double parse_expression(const std::string& text);

}  // namespace freespec::cli
