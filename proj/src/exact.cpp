#include "topembed/exact.hpp"

#include <charconv>
#include <cmath>

#include "topembed/error.hpp"

namespace topembed {

mpq_class exact_dyadic(double value) {
  if (!std::isfinite(value)) throw ContractError("non-finite coordinate");
  mpq_class q(value);
  q.canonicalize();
  return q;
}

std::vector<mpq_class> exact_dyadic(const std::vector<double>& values) {
  std::vector<mpq_class> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(exact_dyadic(v));
  return out;
}

mpq_class decimal_rational(double value) {
  if (!std::isfinite(value)) throw ContractError("non-finite coordinate");
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw ContractError("cannot format value");
  return parse_rational(std::string(buffer, end));
}

mpq_class parse_rational(const std::string& text) {
  if (text.empty()) throw InputError("empty number");
  if (auto slash = text.find('/'); slash != std::string::npos) {
    try {
      mpq_class q(mpz_class(text.substr(0, slash), 10), mpz_class(text.substr(slash + 1), 10));
      if (q.get_den() == 0) throw InputError("zero denominator in '" + text + "'");
      q.canonicalize();
      return q;
    } catch (const std::invalid_argument&) {
      throw InputError("malformed rational '" + text + "'");
    }
  }
  std::string mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mantissa = text.substr(0, e);
    try {
      exponent = std::stol(text.substr(e + 1));
    } catch (const std::exception&) {
      throw InputError("malformed exponent in '" + text + "'");
    }
  }
  bool negative = false;
  std::size_t pos = 0;
  if (pos < mantissa.size() && (mantissa[pos] == '-' || mantissa[pos] == '+')) {
    negative = mantissa[pos] == '-';
    ++pos;
  }
  std::string digits;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < mantissa.size(); ++pos) {
    const char c = mantissa[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) --exponent;
    } else {
      throw InputError("malformed number '" + text + "'");
    }
  }
  if (!any_digit) throw InputError("malformed number '" + text + "'");
  if (std::labs(exponent) > 4000) throw InputError("exponent out of range in '" + text + "'");
  mpz_class num(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  mpq_class q = exponent >= 0 ? mpq_class(num * scale) : mpq_class(num, scale);
  q.canonicalize();
  return negative ? mpq_class(-q) : q;
}

}  // namespace topembed
