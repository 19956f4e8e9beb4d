#pragma once

#include "errors.hpp"
#include "quadrature.hpp"
#include "cubic_geometry.hpp"
#include "action_engine.hpp"
#include "dynamics_oracle.hpp"
#include "spectrum_solver.hpp"
#include "monodromy_lab.hpp"
#include "operator_algebra.hpp"
#include "export.hpp"
