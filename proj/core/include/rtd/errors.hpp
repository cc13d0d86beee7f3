#pragma once

#include <stdexcept>
#include <string>

namespace rtd {

/// Malformed user input: bad shapes, non-finite coordinates, unreadable files.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A caller broke a documented precondition (e.g. unsorted filtration).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Euclidean distance gradient is undefined because two points coincide.
class SingularityError : public std::runtime_error {
public:
    SingularityError(int first, int second, const std::string& where)
        : std::runtime_error("coincident points " + std::to_string(first) + " and " +
                             std::to_string(second) + " in " + where),
          first_(first),
          second_(second) {}

    int first() const noexcept { return first_; }
    int second() const noexcept { return second_; }

private:
    int first_;
    int second_;
};

}  // namespace rtd
