#pragma once

namespace kgsmile {

/// Exit codes: 0 ok, 1 usage, 2 input, 3 remote endpoint, 4 internal invariant.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInput = 2, kExitRemote = 3, kExitInternal = 4 };

int run_cli(int argc, const char* const* argv);

}  // namespace kgsmile
