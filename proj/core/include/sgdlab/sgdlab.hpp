#pragma once

#include "sgdlab/bounds.hpp"
#include "sgdlab/calibration.hpp"
#include "sgdlab/engine.hpp"
#include "sgdlab/errors.hpp"
#include "sgdlab/experiments.hpp"
#include "sgdlab/model.hpp"
#include "sgdlab/moments.hpp"
#include "sgdlab/oracles.hpp"
#include "sgdlab/patterns.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/verify.hpp"
