#pragma once

#include "rcm/conjugacy.hpp"
#include "rcm/errors.hpp"
#include "rcm/example_models.hpp"
#include "rcm/expansion.hpp"
#include "rcm/hierarchy.hpp"
#include "rcm/linalg.hpp"
#include "rcm/noise_paths.hpp"
#include "rcm/noise_window.hpp"
#include "rcm/oracle.hpp"
#include "rcm/parallel.hpp"
#include "rcm/polynomial.hpp"
#include "rcm/rng.hpp"
#include "rcm/system_model.hpp"
#include "rcm/time_grid.hpp"
#include "rcm/xi_grid.hpp"
