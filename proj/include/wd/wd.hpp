#pragma once

// Umbrella header for the Wasserstein-distortion library.

#include "wd/coding.hpp"
#include "wd/distortion.hpp"
#include "wd/distribution.hpp"
#include "wd/errors.hpp"
#include "wd/experiments.hpp"
#include "wd/pooling.hpp"
#include "wd/rng.hpp"
#include "wd/sequence.hpp"
#include "wd/transport.hpp"
