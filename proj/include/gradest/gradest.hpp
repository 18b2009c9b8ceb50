#pragma once

#include "gradest/core/error.hpp"
#include "gradest/core/rational.hpp"
#include "gradest/model/coefficient.hpp"
#include "gradest/model/exponents.hpp"
#include "gradest/model/hamiltonian.hpp"
#include "gradest/model/problem.hpp"
#include "gradest/model/source.hpp"
#include "gradest/grid/grid.hpp"
#include "gradest/grid/field.hpp"
#include "gradest/grid/io.hpp"
#include "gradest/grid/operators.hpp"
#include "gradest/solver/discretization.hpp"
#include "gradest/solver/manufactured.hpp"
#include "gradest/solver/newton.hpp"
#include "gradest/solver/sweep.hpp"
#include "gradest/bernstein/fields.hpp"
#include "gradest/bernstein/ledger.hpp"
#include "gradest/bernstein/levelset.hpp"
#include "gradest/bernstein/maximal.hpp"
#include "gradest/bernstein/scaling.hpp"
#include "gradest/bernstein/thm1.hpp"
#include "gradest/bernstein/thm2.hpp"
#include "gradest/harness/config.hpp"
#include "gradest/harness/experiment.hpp"
#include "gradest/harness/record.hpp"
#include "gradest/harness/report.hpp"
#include "gradest/harness/sweep.hpp"
