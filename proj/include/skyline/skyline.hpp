#ifndef SKYLINE_SKYLINE_HPP
#define SKYLINE_SKYLINE_HPP

#include "skyline/analytic.hpp"
#include "skyline/coverage.hpp"
#include "skyline/distribution.hpp"
#include "skyline/error.hpp"
#include "skyline/montecarlo.hpp"
#include "skyline/numerics/quadrature.hpp"
#include "skyline/numerics/special_functions.hpp"
#include "skyline/parallel.hpp"
#include "skyline/params.hpp"
#include "skyline/process.hpp"
#include "skyline/ris.hpp"
#include "skyline/rng.hpp"
#include "skyline/stats.hpp"
#include "skyline/validate.hpp"

#endif // SKYLINE_SKYLINE_HPP
