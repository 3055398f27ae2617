#pragma once

#include <gmpxx.h>

#include <string>

#include "mtra/errors.hpp"

namespace mtra {

// Exact arbitrary-precision rational. All arithmetic in the library is
// exact; floating point never touches allocation values.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Parses "num/den" or "num". Decimal notation is rejected.
inline Rat rat_from_string(const std::string& s) {
  mpq_class r;
  if (s.empty() || r.set_str(s, 10) != 0)
    throw ParseError(ParseCode::bad_rational, "not a rational: '" + s + "'");
  if (r.get_den() == 0)
    throw ParseError(ParseCode::bad_rational, "zero denominator: '" + s + "'");
  r.canonicalize();
  return r;
}

// Canonical form: lowest terms, "/1" omitted ("0", "1", "1/12").
inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

}  // namespace mtra
