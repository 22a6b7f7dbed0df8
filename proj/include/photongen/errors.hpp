#ifndef PHOTONGEN_ERRORS_HPP
#define PHOTONGEN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace photongen {

/// Invalid argument or violated precondition (bad parameter, malformed pmf, ...).
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to converge (quadrature depth exhausted,
/// active-set iteration cap, ...). `worst_index` identifies the offending
/// element when there is one, e.g. the pmf element whose integral did not
/// converge; SIZE_MAX when not applicable.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string &msg, std::size_t worst_index = SIZE_MAX)
        : std::runtime_error(msg), worst_index_(worst_index) {}

    std::size_t worst_index() const noexcept { return worst_index_; }

  private:
    std::size_t worst_index_;
};

/// File or stream I/O failure, including malformed on-disk formats.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration (unknown keys, missing fields, ...).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace photongen

#endif
