#pragma once

#include "anchorstream/cells.hpp"
#include "anchorstream/errors.hpp"
#include "anchorstream/estimators.hpp"
#include "anchorstream/intervals.hpp"
#include "anchorstream/presets.hpp"
#include "anchorstream/report.hpp"
#include "anchorstream/rng.hpp"
#include "anchorstream/simulation.hpp"
#include "anchorstream/variance.hpp"
