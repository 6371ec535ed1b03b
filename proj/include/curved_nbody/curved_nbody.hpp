// Umbrella header.
#pragma once

#include "angles.hpp"
#include "certificate.hpp"
#include "criterion.hpp"
#include "dynamics.hpp"
#include "geometry.hpp"
#include "lp.hpp"
#include "parallel.hpp"
#include "report.hpp"
