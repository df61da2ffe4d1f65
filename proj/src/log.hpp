#pragma once

#include <spdlog/spdlog.h>

namespace freespec::detail {

/// Shared logger; level taken once from FREESPEC_LOG (trace..off, default warn).
spdlog::logger& logger();

}  // namespace freespec::detail
