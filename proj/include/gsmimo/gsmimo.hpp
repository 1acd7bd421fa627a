#pragma once

#include "gsmimo/channel.hpp"
#include "gsmimo/metrics.hpp"
#include "gsmimo/precoder.hpp"
#include "gsmimo/rng.hpp"
#include "gsmimo/scenarios.hpp"
#include "gsmimo/solver.hpp"
