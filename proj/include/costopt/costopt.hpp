#pragma once

// Umbrella header: cost-aware design and evaluation of binary
// simple-hypothesis likelihood-ratio tests.

#include "costopt/distributions.hpp"
#include "costopt/errors.hpp"
#include "costopt/likelihood.hpp"
#include "costopt/montecarlo.hpp"
#include "costopt/normal.hpp"
#include "costopt/relaxation.hpp"
#include "costopt/rng.hpp"
#include "costopt/scenario.hpp"
#include "costopt/table.hpp"
#include "costopt/testdesign.hpp"
