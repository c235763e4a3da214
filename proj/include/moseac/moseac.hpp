#pragma once

// Umbrella header for the whole library.

#include "moseac/checkpoint.hpp"
#include "moseac/config.hpp"
#include "moseac/env.hpp"
#include "moseac/errors.hpp"
#include "moseac/evaluate.hpp"
#include "moseac/log.hpp"
#include "moseac/mlp.hpp"
#include "moseac/num.hpp"
#include "moseac/plot.hpp"
#include "moseac/replay.hpp"
#include "moseac/reward.hpp"
#include "moseac/rng.hpp"
#include "moseac/sac.hpp"
#include "moseac/stats.hpp"
#include "moseac/svg.hpp"
#include "moseac/train.hpp"
