#ifndef MMLAB_ERRORS_HPP
#define MMLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmlab {

/// Single exception type for all simulator errors. The message is the
/// contract: CLI error handling prints it behind a machine-parsable prefix.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mmlab

#endif  // MMLAB_ERRORS_HPP
