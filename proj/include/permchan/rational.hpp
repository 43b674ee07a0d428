#pragma once

#include <optional>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace permchan {

// Exact arithmetic used for the desk-scale oracle mode. Values stay exact
// through sums and products; only the final log leaves the rationals.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "3/10" or a plain decimal string like "0.3" as an exact rational.
// Returns nullopt for tokens that are not exact (e.g. exponent notation).
std::optional<Rational> parse_rational_token(const std::string& token);

// Natural log of a positive rational, computed in extended precision so that
// huge numerators/denominators do not overflow a double on the way in.
double log_rational(const Rational& r);

double to_double(const Rational& r);

BigInt factorial_exact(long long n);
BigInt binomial_exact(long long n, long long k);

}  // namespace permchan
