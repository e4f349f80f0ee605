#ifndef SKYLINE_ERROR_HPP
#define SKYLINE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace skyline {

// Invalid model parameters (non-positive rates, bad shapes).
class parameter_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside a function's mathematical domain.
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// The truncation window needed to certify a maximum is unreasonably large.
class truncation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class empty_realization_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class sample_size_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature did not reach the requested tolerance. Carries the
// best estimate obtained so callers may still inspect it.
class quadrature_error : public std::runtime_error {
public:
  quadrature_error(const std::string &what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

private:
  double estimate_;
  double error_bound_;
};

namespace detail {

inline void require_domain(bool ok, const char *what) {
  if (!ok) {
    throw domain_error(what);
  }
}

} // namespace detail

} // namespace skyline

#endif // SKYLINE_ERROR_HPP
