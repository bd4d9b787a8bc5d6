#pragma once

#include <stdexcept>
#include <string>

namespace camal {

enum class Err {
  RingMismatch,
  DimensionMismatch,
  NonInvertible,
  NonInvertiblePrime,
  CapExceeded,
  SearchExhausted,
  PreconditionFailed,
  IncompatibleImages,
  BasisError,
  AmalgamDisagreement,
  CommutationFailure,
  NotSubgroup,
  UnknownGenerator,
  UnknownElement,
  StateNotPositive,
  Config,
  Internal,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace camal
