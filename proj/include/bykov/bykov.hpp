#pragma once

#include "core.hpp"
#include "linalg.hpp"
#include "maps.hpp"
#include "roots.hpp"
#include "fixedpoints.hpp"
#include "lyapunov.hpp"
#include "horseshoe.hpp"
#include "pulses.hpp"
#include "chains.hpp"
