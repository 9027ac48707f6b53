#pragma once

#include <stdexcept>
#include <string>

namespace sbsdp {

/// Malformed arguments or data: dimension mismatches, non-finite entries,
/// broken file contents, invalid configuration values.
class InvalidInput : public std::runtime_error {
public:
    explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

/// Well-formed file in a dialect this reader deliberately does not support
/// (multi-block SDPA files, LP/diagonal blocks).
class UnsupportedFormat : public std::runtime_error {
public:
    explicit UnsupportedFormat(const std::string& msg) : std::runtime_error(msg) {}
};

/// Constraint matrices are numerically linearly dependent where independence
/// is required (singular Gram matrix Q33).
class RankDeficient : public std::runtime_error {
public:
    explicit RankDeficient(const std::string& msg) : std::runtime_error(msg) {}
};

/// Primal<->dual conversion has nothing to convert: the constraint null space
/// is empty (m == n(n+1)/2).
class DegenerateConversion : public std::runtime_error {
public:
    explicit DegenerateConversion(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sbsdp
