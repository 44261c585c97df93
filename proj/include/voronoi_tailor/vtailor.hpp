#pragma once

// Umbrella header.

#include "geom.hpp"
#include "region.hpp"
#include "delaunay.hpp"
#include "diagram.hpp"
#include "sensitivity.hpp"
#include "merit.hpp"
#include "spg.hpp"
#include "experiment.hpp"
