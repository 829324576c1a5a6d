#pragma once

// Umbrella header for the dynamic consistent k-center engine.

#include "dynkc/errors.hpp"
#include "dynkc/report.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/ranks.hpp"
#include "dynkc/leveled_forest.hpp"
#include "dynkc/core_ops.hpp"
#include "dynkc/oracle.hpp"
#include "dynkc/clusterer.hpp"
#include "dynkc/stream.hpp"
#include "dynkc/harness.hpp"
