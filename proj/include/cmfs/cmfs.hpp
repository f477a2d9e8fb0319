#pragma once

// Confidence-machine feature selection toolkit, single-header entry point.

#include "cmfs/dataset.hpp"
#include "cmfs/error.hpp"
#include "cmfs/eval.hpp"
#include "cmfs/knn.hpp"
#include "cmfs/linalg.hpp"
#include "cmfs/matrix.hpp"
#include "cmfs/rng.hpp"
#include "cmfs/scoring.hpp"
#include "cmfs/stats.hpp"
#include "cmfs/version.hpp"
