#ifndef PHOTODYN_ERROR_HPP
#define PHOTODYN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace photodyn {

// Physical parameters violate a model invariant.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data are malformed, empty or otherwise unusable.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration file or command-line values are invalid.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fit could not be carried out (singular problem, degenerate data).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace photodyn

#endif  // PHOTODYN_ERROR_HPP
