#pragma once

namespace corrstate {

inline constexpr const char* kToolName = "corrstate";
inline constexpr const char* kToolVersion = "0.1.0";

// On-disk formats (dataset CSV + sidecar, reports, strategy/spec files).
inline constexpr int kFormatVersion = 1;

// Generator identity recorded in report config echoes so runs can be
// reproduced elsewhere: mt19937_64 bit stream, Box-Muller normal draws.
inline constexpr const char* kRngName = "mt19937_64/box-muller";

}  // namespace corrstate
