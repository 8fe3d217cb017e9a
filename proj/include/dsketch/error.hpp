#pragma once

#include <stdexcept>
#include <string>

namespace dsketch {

// One class per failure family; the CLI maps each to its own exit code.
enum class error_kind {
    parse,           // malformed edge list / sketch file / CLI value
    graph,           // disconnected, negative weight, duplicate edge, ...
    round_limit,     // simulator ran past its round budget
    retry_budget,    // sampling or generation gave up after bounded retries
    incompatible,    // sketches that cannot be compared
    invalid_argument,
    io,
};

class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

}  // namespace dsketch
