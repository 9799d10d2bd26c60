#pragma once

namespace codesign::cli {

// Entry point shared by the binary and the test suite. Returns the process
// exit code: 0 success, 2 configuration error, 3 compute failure.
int run(int argc, const char* const* argv);

}  // namespace codesign::cli
