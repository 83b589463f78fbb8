#pragma once

#include "l0pdas/core.hpp"
#include "l0pdas/rng.hpp"
#include "l0pdas/dct.hpp"
#include "l0pdas/sensing_operator.hpp"
#include "l0pdas/problem_model.hpp"
#include "l0pdas/lsq.hpp"
#include "l0pdas/solver.hpp"
#include "l0pdas/theory.hpp"
#include "l0pdas/baselines.hpp"
#include "l0pdas/io.hpp"
#include "l0pdas/harness.hpp"
