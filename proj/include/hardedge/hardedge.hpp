#pragma once

#include "hardedge/asymptotics.hpp"
#include "hardedge/brownian.hpp"
#include "hardedge/diffusion.hpp"
#include "hardedge/estimate.hpp"
#include "hardedge/girsanov.hpp"
#include "hardedge/grid.hpp"
#include "hardedge/importance.hpp"
#include "hardedge/matrix_model.hpp"
#include "hardedge/operator_model.hpp"
#include "hardedge/p1_table.hpp"
#include "hardedge/params.hpp"
#include "hardedge/quadrature.hpp"
#include "hardedge/rng.hpp"
#include "hardedge/tail.hpp"
#include "hardedge/tridiagonal.hpp"
