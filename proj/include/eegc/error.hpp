#pragma once

#include <stdexcept>
#include <string>

namespace eegc {

enum class ErrorKind {
  Format,     // malformed file or stream header
  Structure,  // inconsistent dimensions or layouts
  Range,      // window outside the recording
  Size,       // input too small for the requested transform
  Budget,     // bit budget cannot hold the mandatory header
  Domain,     // argument outside the model's domain
  Fit,        // inverse fit failed for every candidate
  Metric,     // metric undefined for the given inputs
  Config,     // invalid user configuration
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define EEGC_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

EEGC_DEFINE_ERROR(FormatError, Format)
EEGC_DEFINE_ERROR(StructureError, Structure)
EEGC_DEFINE_ERROR(RangeError, Range)
EEGC_DEFINE_ERROR(SizeError, Size)
EEGC_DEFINE_ERROR(BudgetError, Budget)
EEGC_DEFINE_ERROR(DomainError, Domain)
EEGC_DEFINE_ERROR(FitError, Fit)
EEGC_DEFINE_ERROR(MetricError, Metric)
EEGC_DEFINE_ERROR(ConfigError, Config)
EEGC_DEFINE_ERROR(IoError, Io)

#undef EEGC_DEFINE_ERROR

}  // namespace eegc
