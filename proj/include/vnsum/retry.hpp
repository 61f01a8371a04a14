#pragma once

#include <chrono>
#include <string>
#include <thread>

#include "vnsum/error.hpp"

namespace vnsum {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_delay{500};
    double multiplier = 2.0;
};

// Runs fn up to policy.max_attempts times with exponential backoff between
// attempts. When every attempt throws, raises RetriesExhausted carrying the
// attempt count and the last error text; callers wrap that in their own
// domain error.
template <typename F>
auto with_retry(const RetryPolicy& policy, F&& fn) -> decltype(fn()) {
    std::string last_error = "unknown error";
    auto delay = policy.initial_delay;
    const int attempts = policy.max_attempts < 1 ? 1 : policy.max_attempts;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        try {
            return fn();
        } catch (const std::exception& e) {
            last_error = e.what();
        }
        if (attempt < attempts && delay.count() > 0) {
            std::this_thread::sleep_for(delay);
            delay = std::chrono::milliseconds(
                static_cast<long long>(static_cast<double>(delay.count()) *
                                       policy.multiplier));
        }
    }
    raise(Errc::retries_exhausted,
          std::to_string(attempts) + " attempts failed; last error: " +
              last_error);
}

}  // namespace vnsum
