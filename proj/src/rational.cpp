#include "teq/rational.hpp"

#include <stdexcept>

namespace teq {

rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    // decimal form: sign, integer part, fractional part
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0) throw std::invalid_argument("bad rational literal: " + text);
    mpz_class num, den(1);
    if (num.set_str(digits, 10) != 0)
      throw std::invalid_argument("bad rational literal: " + text);
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    rational r(num, den);
    r.canonicalize();
    return r;
  }
  rational r;
  if (r.set_str(text, 10) != 0 || r.get_den() == 0)
    throw std::invalid_argument("bad rational literal: " + text);
  r.canonicalize();
  return r;
}

std::string to_string(const rational& value) { return value.get_str(); }

std::int64_t floor_to_int(const rational& value) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num().get_mpz_t(), value.get_den().get_mpz_t());
  if (!q.fits_slong_p()) throw std::overflow_error("rational out of int64 range");
  return q.get_si();
}

}  // namespace teq
