#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace topembed {

/// The exact binary value of a finite double.
mpq_class exact_dyadic(double value);

/// The shortest decimal that round-trips to `value`, as a rational.
/// 0.1 becomes 1/10 rather than its binary approximation.
mpq_class decimal_rational(double value);

/// Parses "-12.5e-3", "3/7" or an integer into a rational. Throws InputError.
mpq_class parse_rational(const std::string& text);

std::vector<mpq_class> exact_dyadic(const std::vector<double>& values);

}  // namespace topembed
