#pragma once

#include "esnlr/benchmarks.hpp"
#include "esnlr/csv.hpp"
#include "esnlr/error.hpp"
#include "esnlr/esn.hpp"
#include "esnlr/persistence.hpp"
#include "esnlr/rbf.hpp"
#include "esnlr/readout.hpp"
#include "esnlr/selection.hpp"
#include "esnlr/version.hpp"
