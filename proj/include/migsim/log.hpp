#pragma once

#include <string>

namespace migsim {

// Verbosity from MIGSIM_LOG: quiet (default when unset is warn), warn, info, debug.
int log_level();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);

} // namespace migsim
