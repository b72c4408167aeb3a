#pragma once

#include <stdexcept>
#include <string>

namespace weldfcs {

// Every failure the library reports carries a stable code name so callers
// (and the CLI exit-code mapping) can branch on it without parsing text.
enum class ErrorCode {
  ConfigInvalid,
  BoxTooSmall,
  StepSizeUnderflow,
  QOnUnitCircle,
  TruncationTooCoarse,
  SingularSystem,
  WindowTooSmall,
  NearSingular,
  DerivativeUnresolved,
  SupportClipped,
  NotConverged,
  SeriesInfeasible,
  DeltaBetaZero,
  PoleHit,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Config errors remember which key was at fault.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : Error(ErrorCode::ConfigInvalid, "`" + key + "`: " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace weldfcs
