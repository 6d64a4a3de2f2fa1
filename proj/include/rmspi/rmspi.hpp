#pragma once

#include "rmspi/analysis.hpp"
#include "rmspi/bench.hpp"
#include "rmspi/error.hpp"
#include "rmspi/matcore.hpp"
#include "rmspi/operators.hpp"
#include "rmspi/solver.hpp"
#include "rmspi/weighting.hpp"
