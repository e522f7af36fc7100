#pragma once

#include "tetramotion/dilog.hpp"
#include "tetramotion/fpt.hpp"
#include "tetramotion/gcp.hpp"
#include "tetramotion/geometry.hpp"
#include "tetramotion/law.hpp"
#include "tetramotion/mc_compare.hpp"
#include "tetramotion/quadrature.hpp"
#include "tetramotion/rng.hpp"
#include "tetramotion/sim.hpp"
