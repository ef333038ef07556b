#ifndef RBOOST_RBOOST_HPP
#define RBOOST_RBOOST_HPP

#include "rboost/bench.hpp"
#include "rboost/boosters.hpp"
#include "rboost/core.hpp"
#include "rboost/ensemble.hpp"
#include "rboost/io.hpp"
#include "rboost/model_selection.hpp"
#include "rboost/random.hpp"
#include "rboost/realdata.hpp"
#include "rboost/reporting.hpp"
#include "rboost/targets.hpp"
#include "rboost/weak_learners.hpp"

#endif // RBOOST_RBOOST_HPP
