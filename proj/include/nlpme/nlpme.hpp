#pragma once

// Umbrella header for the numerical library (the CLI layer lives in nlpme/cli.hpp).

#include "nlpme/diagnostics.hpp"
#include "nlpme/errors.hpp"
#include "nlpme/fft.hpp"
#include "nlpme/fracops.hpp"
#include "nlpme/grid.hpp"
#include "nlpme/norms.hpp"
#include "nlpme/profiles.hpp"
#include "nlpme/quadrature.hpp"
#include "nlpme/report.hpp"
#include "nlpme/solver.hpp"
#include "nlpme/specfun.hpp"
