// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_ERRORS_HPP
#define MUBSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mubsim {

// Argument/contract violations
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonPrimeDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct TooManyBases : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotUnitary : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegenerateInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InvalidBeta : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonPositiveNoise : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CapacityExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Runtime failures
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mubsim

#endif
