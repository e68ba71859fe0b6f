#include "migsim/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace migsim {

int log_level() {
    static int level = [] {
        const char* env = std::getenv("MIGSIM_LOG");
        if (!env) return 1;
        if (std::strcmp(env, "quiet") == 0) return 0;
        if (std::strcmp(env, "warn") == 0) return 1;
        if (std::strcmp(env, "info") == 0) return 2;
        if (std::strcmp(env, "debug") == 0) return 3;
        return 1;
    }();
    return level;
}

void log_warn(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}

void log_info(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

} // namespace migsim
