#pragma once

#include "rcd/analysis.hpp"
#include "rcd/equation.hpp"
#include "rcd/errors.hpp"
#include "rcd/exact.hpp"
#include "rcd/experiments.hpp"
#include "rcd/grid.hpp"
#include "rcd/io.hpp"
#include "rcd/quadrature.hpp"
#include "rcd/solver.hpp"
#include "rcd/transform.hpp"
#include "rcd/verify.hpp"
