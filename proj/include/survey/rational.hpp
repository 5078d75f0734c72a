#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace survey {

// Exact rational arithmetic. mpq_class keeps values canonical (lowest terms,
// positive denominator), which we rely on for hashing and dedup by value.
using Rational = mpq_class;
using Integer = mpz_class;

// Parses "num", "num/den" or an exact decimal such as "0.69" (-> 69/100).
// Returns nullopt on malformed input. Decimals are parsed exactly; no
// floating point is involved.
std::optional<Rational> parse_rational(std::string_view text);

// Renders r as a decimal string with the given number of significant digits,
// by exact integer long division. Informational output only.
std::string decimal_string(const Rational& r, int significant_digits = 12);

// Largest multiple of 1/n not exceeding r (r >= 0, n >= 1).
Rational floor_to_denominator(const Rational& r, unsigned long n);

// True if r is canonical (lowest terms, positive denominator). mpq_class
// arithmetic guarantees this; the audit exists so tests can assert it.
bool is_canonical(const Rational& r);

}  // namespace survey
