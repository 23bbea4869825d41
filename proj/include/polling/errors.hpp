#pragma once

#include <stdexcept>
#include <string>

namespace polling {

// One error type for the whole library. The code tells callers (and the CLI
// exit-code mapping) what class of failure happened; the message carries the
// specifics.
enum class Errc {
  InvalidSpec,            // malformed distribution spec
  MomentInfinite,         // requested moment does not exist (heavy tail)
  InvalidParams,          // model parameters fail validation
  InconsistentInput,      // arguments contradict each other
  DuplicateSeeds,         // replication seeds must be distinct
  SaturatedModelRejected, // operation undefined with a saturated queue
  NotLimitedDiscipline,   // limited-only operation called on gated/exhaustive
  NotApplicable,          // preconditions of a closed-form bound fail
  InfeasibleRegion,       // fluid region admits no solution at this state
  UnknownScenario,        // repro scenario id not recognized
  BadAxis,                // sweep axis path does not resolve
  ParseError,             // config file malformed
  NonFiniteSample,        // defensive: sampler produced nan/inf/negative
  Internal,               // invariant violation, always a bug
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::MomentInfinite: return "MomentInfinite";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::InconsistentInput: return "InconsistentInput";
    case Errc::DuplicateSeeds: return "DuplicateSeeds";
    case Errc::SaturatedModelRejected: return "SaturatedModelRejected";
    case Errc::NotLimitedDiscipline: return "NotLimitedDiscipline";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::InfeasibleRegion: return "InfeasibleRegion";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::BadAxis: return "BadAxis";
    case Errc::ParseError: return "ParseError";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace polling
