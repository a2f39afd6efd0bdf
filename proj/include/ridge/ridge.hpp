#pragma once

#include "ridge/error.hpp"
#include "ridge/params.hpp"
#include "ridge/grid.hpp"
#include "ridge/boundary.hpp"
#include "ridge/energy.hpp"
#include "ridge/physical.hpp"
#include "ridge/lbfgs.hpp"
#include "ridge/solve.hpp"
#include "ridge/kappa.hpp"
#include "ridge/constants.hpp"
#include "ridge/certificate.hpp"
#include "ridge/sweep.hpp"
#include "ridge/io.hpp"
#include "ridge/config.hpp"
