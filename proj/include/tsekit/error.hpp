#pragma once

#include <stdexcept>
#include <string>

namespace tsekit {

// Error taxonomy. `kind` lets callers (and the CLI exit-code mapping)
// distinguish bad arguments from bad data without parsing messages.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    invalid_argument,          // precondition violated by the caller
    wav_malformed,             // RIFF/fmt/data structure broken
    wav_unsupported_codec,     // not PCM-16 / IEEE float-32
    wav_unsupported_channels,  // not mono
    wav_unsupported_rate,      // not 8 kHz / 16 kHz
    io,                        // filesystem failure
    data,                      // manifest/estimate inconsistency
    check_failed,              // numeric self-check exceeded tolerance
  };

  Error(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(Error::Kind::invalid_argument, msg);
}

[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(Error::Kind::data, msg);
}

}  // namespace tsekit
