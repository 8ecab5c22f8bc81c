#pragma once

// Convenience header pulling in the whole library.

#include "relaxed/error.hpp"
#include "relaxed/rng.hpp"
#include "relaxed/metric_cover.hpp"
#include "relaxed/gaussian.hpp"
#include "relaxed/hypothesis.hpp"
#include "relaxed/mw_core.hpp"
#include "relaxed/sequence.hpp"
#include "relaxed/benchmarks.hpp"
#include "relaxed/adversary.hpp"
#include "relaxed/learners.hpp"
#include "relaxed/harness.hpp"
#include "relaxed/acceptance.hpp"
