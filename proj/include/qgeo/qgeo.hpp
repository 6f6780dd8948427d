#pragma once

#include "qgeo/common.hpp"
#include "qgeo/complexity.hpp"
#include "qgeo/curvature.hpp"
#include "qgeo/geodesics.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/quadrature.hpp"
#include "qgeo/rk4.hpp"
#include "qgeo/states.hpp"
#include "qgeo/tensor.hpp"
#include "qgeo/oracles.hpp"
