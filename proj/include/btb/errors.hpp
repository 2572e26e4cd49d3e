#pragma once

#include <stdexcept>
#include <string>

namespace btb {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a result cannot be certified at the precision carried by the
// inputs.  The message names the operation and the precision that would have
// been needed.
struct insufficient_precision : error {
    explicit insufficient_precision(const std::string& msg) : error(msg) {}
};

// Quaternion algebra (a,b/k) is a division algebra; no matrix model exists.
struct ramified_algebra : error {
    explicit ramified_algebra(const std::string& msg) : error(msg) {}
};

// Shifted generators do not span an order (negative shift below the depth).
struct not_an_order : error {
    explicit not_an_order(const std::string& msg) : error(msg) {}
};

// Vertex queried against a branch it does not belong to.
struct not_in_branch : error {
    explicit not_in_branch(const std::string& msg) : error(msg) {}
};

struct empty_branch : error {
    explicit empty_branch(const std::string& msg) : error(msg) {}
};

struct infinite_branch : error {
    explicit infinite_branch(const std::string& msg) : error(msg) {}
};

// Enumeration hit the configured radius/vertex cap before the branch closed.
struct truncated : error {
    explicit truncated(const std::string& msg) : error(msg) {}
};

// Predicted enumeration size exceeds the configured memory guard.
struct guard_exceeded : error {
    explicit guard_exceeded(const std::string& msg) : error(msg) {}
};

struct no_solution : error {
    explicit no_solution(const std::string& msg) : error(msg) {}
};

struct bad_input : error {
    explicit bad_input(const std::string& msg) : error(msg) {}
};

} // namespace btb
