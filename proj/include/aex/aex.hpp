#pragma once

// Umbrella header: robustness and explanation engine for classifiers
// over mixed discrete/continuous feature spaces.

#include "aex/brute.hpp"
#include "aex/bridge.hpp"
#include "aex/cli.hpp"
#include "aex/closedform.hpp"
#include "aex/distance.hpp"
#include "aex/domain.hpp"
#include "aex/emit.hpp"
#include "aex/encode.hpp"
#include "aex/errors.hpp"
#include "aex/explain.hpp"
#include "aex/fixtures.hpp"
#include "aex/formula.hpp"
#include "aex/global.hpp"
#include "aex/model.hpp"
#include "aex/model_io.hpp"
#include "aex/pb2cnf.hpp"
#include "aex/rational.hpp"
#include "aex/report.hpp"
#include "aex/robustness.hpp"
#include "aex/solver.hpp"
