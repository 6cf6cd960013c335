#ifndef GAPMODE_ERRORS_HPP
#define GAPMODE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gapmode {

/// Base for all structured math-path errors. `name()` is the stable
/// machine-readable identifier carried into CLI diagnostics and reports.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define GAPMODE_DEFINE_ERROR(E)                                   \
  struct E : Error {                                              \
    explicit E(const std::string& what) : Error(#E, what) {}      \
  }

GAPMODE_DEFINE_ERROR(NonPositiveEpsilon);
GAPMODE_DEFINE_ERROR(DefectSignViolation);
GAPMODE_DEFINE_ERROR(ResolutionMismatch);
GAPMODE_DEFINE_ERROR(EigensolverFailure);
GAPMODE_DEFINE_ERROR(DegenerateEdge);
GAPMODE_DEFINE_ERROR(TooNarrowSupercell);
GAPMODE_DEFINE_ERROR(NotPositiveDefinite);
GAPMODE_DEFINE_ERROR(IndexOutOfRange);
GAPMODE_DEFINE_ERROR(MuOnSpectrum);
GAPMODE_DEFINE_ERROR(SolveFailure);
GAPMODE_DEFINE_ERROR(EmptySubspace);
GAPMODE_DEFINE_ERROR(BoundViolation);
GAPMODE_DEFINE_ERROR(NoGap);

#undef GAPMODE_DEFINE_ERROR

/// Configuration / input problems (CLI exit code 2, not 1).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

}  // namespace gapmode

#endif
