// Copyright (c) the parawarm contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "parawarm/bounds.hpp"
#include "parawarm/decomposition.hpp"
#include "parawarm/errors.hpp"
#include "parawarm/problem.hpp"
#include "parawarm/problem_io.hpp"
#include "parawarm/simplex.hpp"
#include "parawarm/sweep.hpp"
#include "parawarm/tolerances.hpp"
#include "parawarm/warmstart.hpp"
