#pragma once
// Everything: places, points, graphs, maps, potentials, measures, affable functions, sweeps.
#include "sweep.hpp"
