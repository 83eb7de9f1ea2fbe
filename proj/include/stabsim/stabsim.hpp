#ifndef STABSIM_STABSIM_HPP
#define STABSIM_STABSIM_HPP

#include "errors.hpp"
#include "fbm.hpp"
#include "io.hpp"
#include "local_time.hpp"
#include "ltfsm.hpp"
#include "monte_carlo.hpp"
#include "random.hpp"
#include "shot_noise.hpp"
#include "stable_oracle.hpp"
#include "validation.hpp"

namespace stabsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace stabsim

#endif // STABSIM_STABSIM_HPP
