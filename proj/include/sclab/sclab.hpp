#pragma once

#include "sclab/error.hpp"
#include "sclab/estimators.hpp"
#include "sclab/graph.hpp"
#include "sclab/injective_trace.hpp"
#include "sclab/matrixops.hpp"
#include "sclab/multigraph.hpp"
#include "sclab/parallel.hpp"
#include "sclab/partitions.hpp"
#include "sclab/rational.hpp"
#include "sclab/regular_sampler.hpp"
#include "sclab/report.hpp"
#include "sclab/rng.hpp"
#include "sclab/set_partition.hpp"
#include "sclab/weights.hpp"
