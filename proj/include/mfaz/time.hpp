#pragma once

#include <chrono>
#include <functional>

#include "mfaz/core.hpp"

namespace mfaz {

using ClockFn = std::function<Timestamp()>;

inline Timestamp system_now() {
    return Timestamp{std::uint64_t(std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now().time_since_epoch()).count())};
}

inline std::uint64_t steady_now_ms() {
    return std::uint64_t(std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now().time_since_epoch()).count());
}

}  // namespace mfaz
