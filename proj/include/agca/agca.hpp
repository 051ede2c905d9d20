// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "agca/common.hpp"
#include "agca/mesh.hpp"
#include "agca/quadrature.hpp"
#include "agca/coefficient.hpp"
#include "agca/fem.hpp"
#include "agca/sparse.hpp"
#include "agca/transfer.hpp"
#include "agca/coarsening.hpp"
#include "agca/solvers/config.hpp"
#include "agca/solvers/relaxation.hpp"
#include "agca/solvers/krylov.hpp"
#include "agca/solvers/multigrid.hpp"
#include "agca/stokes.hpp"
#include "agca/bench/problems.hpp"
#include "agca/bench/memory.hpp"
#include "agca/bench/experiments.hpp"
#include "agca/bench/report.hpp"
