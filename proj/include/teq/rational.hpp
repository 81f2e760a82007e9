#ifndef TEQ_RATIONAL_HPP
#define TEQ_RATIONAL_HPP

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace teq {

// All capacities, demands, flow values and costs are exact rationals.
// Saturation checks compare f_e == nu_e, so no floating point anywhere.
using rational = mpq_class;

// Accepts "3", "-7/2" and decimal strings like "1.25".
rational parse_rational(const std::string& text);

std::string to_string(const rational& value);

// Round towards -inf; value must fit into int64.
std::int64_t floor_to_int(const rational& value);

inline rational rat(long num, long den = 1) {
  rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace teq

#endif
