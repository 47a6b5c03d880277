#pragma once

#include <stdexcept>
#include <string>

namespace qkdlab {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values, malformed inputs, broken invariants.
struct validation_error : error {
    using error::error;
};

// Request exceeds the exact-enumeration caps (table sizes, seed spaces).
struct capacity_error : error {
    using error::error;
};

// A formula was evaluated at a pole (e.g. division by 1 - h(q) at h = 1).
struct singularity_error : error {
    using error::error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw validation_error(msg);
}

inline void require_capacity(bool cond, const std::string& msg) {
    if (!cond) throw capacity_error(msg);
}

}  // namespace qkdlab
