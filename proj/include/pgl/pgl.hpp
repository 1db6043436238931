#pragma once

#include "pgl/cavity.hpp"
#include "pgl/config.hpp"
#include "pgl/constants.hpp"
#include "pgl/eigensolver.hpp"
#include "pgl/errors.hpp"
#include "pgl/field_io.hpp"
#include "pgl/grid.hpp"
#include "pgl/landscape.hpp"
#include "pgl/lattice.hpp"
#include "pgl/scenario.hpp"
#include "pgl/spectra.hpp"
#include "pgl/thermo.hpp"
