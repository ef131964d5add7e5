#ifndef SLSIM_ERROR_HPP
#define SLSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace slsim
{

// Categories map onto distinct CLI exit codes.
struct FormatError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

} // namespace slsim

#endif // SLSIM_ERROR_HPP
