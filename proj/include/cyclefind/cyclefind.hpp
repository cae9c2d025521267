#pragma once

// Period estimation for unevenly sampled time series: spectral and
// phase-folding statistics, smoothing-based objectives, grid search with
// bootstrap intervals, and a Monte-Carlo benchmark harness.

#include "config.hpp"     // IWYU pragma: export
#include "dispersion.hpp" // IWYU pragma: export
#include "errors.hpp"     // IWYU pragma: export
#include "fetch.hpp"      // IWYU pragma: export
#include "harness.hpp"    // IWYU pragma: export
#include "io.hpp"         // IWYU pragma: export
#include "parallel.hpp"   // IWYU pragma: export
#include "random.hpp"     // IWYU pragma: export
#include "search.hpp"     // IWYU pragma: export
#include "smoothing.hpp"  // IWYU pragma: export
#include "spectral.hpp"   // IWYU pragma: export
#include "time_series.hpp" // IWYU pragma: export
#include "version.hpp"    // IWYU pragma: export
