#pragma once

// Field parsers shared by the config loader and the builtin registry.

#include <functional>
#include <string>

#include "fde/problem.hpp"

namespace fde {

double parse_number(const std::string& key, const std::string& text);
std::function<double(double)> parse_function_of_t(const std::string& key,
                                                  const std::string& text);
DeviationSpec parse_deviation(const std::string& text);
FunctionalSpec parse_functional(const std::string& text);
Monotonicity parse_monotonicity(const std::string& text);

}  // namespace fde
