#pragma once

namespace cirsim {

// Engine version recorded in run manifests. Bump when the numerical
// output of the scheme or the generator stream layout changes.
inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace cirsim
