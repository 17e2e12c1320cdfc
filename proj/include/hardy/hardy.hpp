#pragma once
// Umbrella header.

#include "hardy/concentration.hpp"
#include "hardy/criteria.hpp"
#include "hardy/error.hpp"
#include "hardy/expression.hpp"
#include "hardy/functionals.hpp"
#include "hardy/measure.hpp"
#include "hardy/potential.hpp"
#include "hardy/quad.hpp"
#include "hardy/report.hpp"
#include "hardy/sampling.hpp"
#include "hardy/scenarios.hpp"
#include "hardy/spectral.hpp"
