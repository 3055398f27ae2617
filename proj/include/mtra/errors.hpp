#pragma once

#include <stdexcept>
#include <string>

namespace mtra {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix/vector dimensions do not match what the operation expects.
struct ShapeError : Error {
  using Error::Error;
};

// An operation's stated precondition was violated by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

// An enumeration oracle was asked to exceed its configured cap.
struct CapacityError : Error {
  using Error::Error;
};

// An agent ran out of items before her eating horizon elapsed.
struct StarvationError : Error {
  using Error::Error;
};

// The assignment admits a generalized cycle and has no eating schedule.
struct NotRepresentableError : Error {
  using Error::Error;
};

// A provable internal invariant failed; indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

enum class ParseCode {
  malformed_json,
  unknown_item,
  unknown_type,
  non_square_type,
  duplicate_item,
  wrong_arity,
  incomplete_ranking,
  bad_rational,
  bad_schedule,
  missing_field,
};

inline const char* parse_code_name(ParseCode c) {
  switch (c) {
    case ParseCode::malformed_json: return "malformed-json";
    case ParseCode::unknown_item: return "unknown-item";
    case ParseCode::unknown_type: return "unknown-type";
    case ParseCode::non_square_type: return "non-square-type";
    case ParseCode::duplicate_item: return "duplicate-item";
    case ParseCode::wrong_arity: return "wrong-arity";
    case ParseCode::incomplete_ranking: return "incomplete-ranking";
    case ParseCode::bad_rational: return "bad-rational";
    case ParseCode::bad_schedule: return "bad-schedule";
    case ParseCode::missing_field: return "missing-field";
  }
  return "unknown";
}

struct ParseError : Error {
  ParseCode code;
  ParseError(ParseCode c, const std::string& msg)
      : Error(std::string(parse_code_name(c)) + ": " + msg), code(c) {}
};

}  // namespace mtra
