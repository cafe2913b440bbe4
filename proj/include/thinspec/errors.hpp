#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thinspec {

enum class Errc {
  InvalidArgument,
  Overflow,
  TolUnreachable,
  DivergentPartition,
  NonPhysical,
  TruncationMismatch,
  GridTooSmall,
  NoCollapse,
  GridTooCoarse,
  WindowTooNarrow,
  MTooLarge,
  Config,
  Io,
};

std::string_view to_string(Errc code) noexcept;

// Every failure in the library is reported as an Error carrying one of the
// codes above; callers that need to branch (e.g. falling back to a scaled
// evaluation on Overflow) inspect code().
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

private:
  Errc code_;
  std::string message_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Overflow: return "Overflow";
    case Errc::TolUnreachable: return "TolUnreachable";
    case Errc::DivergentPartition: return "DivergentPartition";
    case Errc::NonPhysical: return "NonPhysical";
    case Errc::TruncationMismatch: return "TruncationMismatch";
    case Errc::GridTooSmall: return "GridTooSmall";
    case Errc::NoCollapse: return "NoCollapse";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::WindowTooNarrow: return "WindowTooNarrow";
    case Errc::MTooLarge: return "MTooLarge";
    case Errc::Config: return "Config";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace thinspec
