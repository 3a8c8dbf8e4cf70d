#pragma once

#include "ergocert/error.hpp"
#include "ergocert/region.hpp"
#include "ergocert/kernel.hpp"
#include "ergocert/quadrature.hpp"
#include "ergocert/grid.hpp"
#include "ergocert/minsol.hpp"
#include "ergocert/hitting.hpp"
#include "ergocert/testfn.hpp"
#include "ergocert/truncation.hpp"
#include "ergocert/criteria.hpp"
#include "ergocert/models.hpp"
#include "ergocert/classify.hpp"
#include "ergocert/montecarlo.hpp"
#include "ergocert/config.hpp"
#include "ergocert/report.hpp"
#include "ergocert/runner.hpp"
