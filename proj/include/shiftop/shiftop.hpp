#pragma once

// Umbrella header for the computational modules.

#include "shiftop/invertibility.hpp"
#include "shiftop/io.hpp"
#include "shiftop/operators.hpp"
#include "shiftop/process.hpp"
#include "shiftop/wiener.hpp"
