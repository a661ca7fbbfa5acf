#pragma once

// Convenience umbrella: the whole library in one include.

#include "truelkit/chain.hpp"
#include "truelkit/core.hpp"
#include "truelkit/equilibrium.hpp"
#include "truelkit/games.hpp"
#include "truelkit/io.hpp"
#include "truelkit/montecarlo.hpp"
#include "truelkit/parallel.hpp"
#include "truelkit/rng.hpp"
#include "truelkit/spatial.hpp"
