#ifndef CTZ_ERRORS_HPP
#define CTZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ctz {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// pattern length exceeds the model's depth limit
struct DepthError : Error {
    using Error::Error;
};

// fewer than two blocks: the phase measures are undefined
struct InsufficientBlocks : Error {
    using Error::Error;
};

// conditional entropy requested for a context with zero empirical probability
struct UnseenContext : Error {
    using Error::Error;
};

// bad magic, version, or header fields
struct FormatError : Error {
    using Error::Error;
};

// corrupt or truncated payload; carries the failing bit position
struct DecodeError : Error {
    DecodeError(const std::string& msg, uint64_t bit_pos)
        : Error(msg + " (bit " + std::to_string(bit_pos) + ")"), position(bit_pos) {}
    uint64_t position;
};

struct ParamError : Error {
    using Error::Error;
};

} // namespace ctz

#endif
