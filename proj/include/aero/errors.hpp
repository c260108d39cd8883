//
// Project     : aerosketch
// Module      : errors.hpp
// Description : exception taxonomy shared by all library modules
//

#ifndef AERO_ERRORS_HPP
#define AERO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aero {

// precondition violation on an API argument or state transition
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// malformed input file (CSV / AERO binary)
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// malformed or out-of-order message in the distributed protocol
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

// exact-oracle history exceeded the configured row cap
struct OracleCapExceeded : std::runtime_error {
    explicit OracleCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aero

#endif  // AERO_ERRORS_HPP
