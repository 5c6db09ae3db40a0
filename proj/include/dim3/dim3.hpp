#pragma once

#include "dim3/analysis.hpp"
#include "dim3/chain.hpp"
#include "dim3/common.hpp"
#include "dim3/dataset.hpp"
#include "dim3/enumerate.hpp"
#include "dim3/generator.hpp"
#include "dim3/hyper.hpp"
#include "dim3/likelihood.hpp"
#include "dim3/rng.hpp"
#include "dim3/runner.hpp"
#include "dim3/special.hpp"
#include "dim3/state.hpp"
#include "dim3/stirling.hpp"
#include "dim3/tables.hpp"
