#pragma once

#include <gmpxx.h>

#include <string>

namespace fibdens {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// "num/den", or just "num" when the denominator is 1.
inline std::string rational_to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Integer pow_integer(const Integer& base, unsigned long exp) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
    return r;
}

inline Integer pow_u64(unsigned long long base, unsigned long exp) {
    return pow_integer(Integer(static_cast<unsigned long>(base)), exp);
}

} // namespace fibdens
