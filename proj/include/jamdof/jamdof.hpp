#pragma once

#include "jamdof/baseband.hpp"
#include "jamdof/config.hpp"
#include "jamdof/errors.hpp"
#include "jamdof/estimator.hpp"
#include "jamdof/jammer.hpp"
#include "jamdof/numeric.hpp"
#include "jamdof/regions.hpp"
#include "jamdof/rng.hpp"
#include "jamdof/schemes.hpp"
