#pragma once

// Umbrella header.

#include "drkit/analysis.hpp"
#include "drkit/divergence.hpp"
#include "drkit/error.hpp"
#include "drkit/io.hpp"
#include "drkit/metrics.hpp"
#include "drkit/report.hpp"
#include "drkit/rng.hpp"
#include "drkit/statistics.hpp"
#include "drkit/stopwords.hpp"
#include "drkit/theorem.hpp"
#include "drkit/version.hpp"
