#pragma once

#include <iosfwd>

namespace asuman::cli {

// Runs `asuman <simulate|sweep|bounds> ...`. Returns 0 on success, 2 on a
// usage error (bad flag, bad value, missing required flag) and 1 on a runtime
// failure.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace asuman::cli
