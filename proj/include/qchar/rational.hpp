#pragma once

#include <gmpxx.h>

#include <string>

namespace qchar {

// Exact rational numbers; mpq_class keeps values canonical after arithmetic.
using Rational = mpq_class;

// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& r);

// Accepts "p", "-p", "p/q". Throws ValidationError on malformed input or q = 0.
Rational parse_rational(const std::string& text);

Rational binomial(unsigned n, unsigned k);
Rational factorial(unsigned n);

}  // namespace qchar
