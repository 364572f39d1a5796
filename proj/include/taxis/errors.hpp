#ifndef TAXIS_ERRORS_HPP
#define TAXIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace taxis {

// Every failure raised by the library derives from Error so callers can map
// it to an exit category without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept = 0;
};

#define TAXIS_DEFINE_ERROR(Name, Category)                                  \
  class Name : public Error {                                              \
   public:                                                                 \
    using Error::Error;                                                    \
    const char* category() const noexcept override { return Category; }   \
  };

TAXIS_DEFINE_ERROR(DomainError, "domain")
TAXIS_DEFINE_ERROR(ConfigError, "config")
TAXIS_DEFINE_ERROR(SolverError, "solver")
TAXIS_DEFINE_ERROR(BlowupError, "blowup")
TAXIS_DEFINE_ERROR(AlignmentError, "alignment")
TAXIS_DEFINE_ERROR(FitError, "fit")
TAXIS_DEFINE_ERROR(IoError, "io")

#undef TAXIS_DEFINE_ERROR

}  // namespace taxis

#endif  // TAXIS_ERRORS_HPP
