#pragma once

#include "dcsplit/builtins.hpp"
#include "dcsplit/dctest.hpp"
#include "dcsplit/decompose.hpp"
#include "dcsplit/error.hpp"
#include "dcsplit/geometry.hpp"
#include "dcsplit/homogeneous.hpp"
#include "dcsplit/io.hpp"
#include "dcsplit/parallel.hpp"
#include "dcsplit/pwl.hpp"
#include "dcsplit/rng.hpp"
#include "dcsplit/variation.hpp"
#include "dcsplit/vec2.hpp"

namespace dcsplit {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace dcsplit
