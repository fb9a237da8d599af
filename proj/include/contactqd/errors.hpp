#ifndef CONTACTQD_ERRORS_HPP
#define CONTACTQD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cqd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The requested pivot component is (numerically) zero, so the chart does not
// contain the state.
struct ChartSingular : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Input outside the mathematical domain of a closed-form expression.
struct DomainError : Error {
  using Error::Error;
};

struct DegenerateV : Error {
  using Error::Error;
};

struct UnsupportedScenario : Error {
  using Error::Error;
};

// Density-operator evolution is only exposed for couplings linear in the
// fiber coordinate; anything else couples back through S.
struct NonMarkovian : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, int line_no = 0)
      : Error(what), line(line_no) {}
  int line;
};

}  // namespace cqd

#endif
