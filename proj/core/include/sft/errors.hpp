#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sft {

/// Invalid constants, schedules or universes. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A time-domain read outside the declared sample bundle. Maps to exit code 3.
class AuditViolation : public std::runtime_error {
public:
    AuditViolation(std::size_t flat_index, const std::string& what)
        : std::runtime_error(what), index_(flat_index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// The random-shift search ran out of attempts. The parameters were valid,
/// so this is bad luck rather than misconfiguration.
class ShiftSearchFailed : public std::runtime_error {
public:
    ShiftSearchFailed(int iteration, int attempts, const std::string& what)
        : std::runtime_error(what), iteration_(iteration), attempts_(attempts) {}

    int iteration() const noexcept { return iteration_; }
    int attempts() const noexcept { return attempts_; }

private:
    int iteration_;
    int attempts_;
};

} // namespace sft
