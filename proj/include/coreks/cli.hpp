#pragma once

#include <string>
#include <vector>

namespace coreks {

// Entry point behind the coreks binary; tests drive it in-process.
// Returns 0 on success, 1 on usage errors, 2 on runtime/solver errors.
// Diagnostics go to stderr, data to files or stdout as flagged.
int run_cli(const std::vector<std::string>& args);

}  // namespace coreks
