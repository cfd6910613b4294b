#pragma once

/// Umbrella header: two-mode gain/loss Gaussian dynamics toolkit.

#include "gausspt/dynamics.hpp"
#include "gausspt/io.hpp"
#include "gausspt/model.hpp"
#include "gausspt/observables.hpp"
#include "gausspt/oracle.hpp"
#include "gausspt/parallel.hpp"
#include "gausspt/reductions.hpp"
#include "gausspt/rng.hpp"
#include "gausspt/runner.hpp"
#include "gausspt/spectrum.hpp"
#include "gausspt/types.hpp"
