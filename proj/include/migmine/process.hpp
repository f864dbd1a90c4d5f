#pragma once

#include <string>
#include <utility>
#include <vector>

namespace migmine {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs argv[0] with the given arguments, captures stdout/stderr, optionally
// feeds stdin_data and sets extra environment variables for the child.
// Throws std::runtime_error when the process cannot be spawned at all.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string* stdin_data = nullptr,
                          const std::vector<std::pair<std::string, std::string>>& extra_env = {});

} // namespace migmine
